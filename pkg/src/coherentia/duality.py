"""Outer search for the wave-particle complementarity bound.

Maximizes normalized trace-distance coherence of the system state plus the
path distinguishability over all interferometer configurations, by
multi-start Nelder-Mead over an unconstrained parametrization of amplitudes
and detector states, with a final high-accuracy re-verification of every
restart's candidate.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize as scipy_minimize

from .interferometer import (
    NUM_SLITS,
    DualityPoint,
    InterferometerConfig,
    distinguishability,
    random_config,
    system_state,
)
from .measures import OptConfig, normalization_factor
from .optimize import trace_dist_multistart
from .resource import standard_basis

CONTROLLED_DIM = 2  # the incomplete basis {|0>, |1>} inside C^4

FULL_COMPLEX = "full-complex"
REAL_RESTRICTED = "real-restricted"


@dataclass(frozen=True)
class DualitySearchConfig:
    restarts: int = 64
    master_seed: int = 42
    inner_opt_cfg: OptConfig = OptConfig(restarts=1, maxiter=200, fatol=1e-8, polish=0)
    parametrization: str = FULL_COMPLEX
    tolerance: float = 5e-4
    explore_maxfev: int = 2500
    polish_maxfev: int = 1200
    polish_cycles: int = 2
    top_k: int = 6
    verify_restarts: int = 16
    threads: int = 1

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.parametrization not in (FULL_COMPLEX, REAL_RESTRICTED):
            raise ValueError(f"unknown parametrization {self.parametrization!r}")


@dataclass(frozen=True)
class DualityOptimum:
    best_value: float
    best_config: InterferometerConfig
    per_restart_values: np.ndarray
    converged: bool
    best_point: DualityPoint = field(repr=False, default=None)

    def __post_init__(self):
        if abs(self.best_value - float(np.max(self.per_restart_values))) > 1e-12:
            raise ValueError("best_value must be the max of per_restart_values")


def _param_dim(parametrization: str) -> int:
    return 5 * (2 * NUM_SLITS) if parametrization == FULL_COMPLEX else 5 * NUM_SLITS


def decode_config(x: np.ndarray, parametrization: str = FULL_COMPLEX):
    """Unconstrained reals -> (amplitudes, detector rows), or None if degenerate."""
    x = np.asarray(x, dtype=np.float64)
    if parametrization == FULL_COMPLEX:
        z = x[0::2] + 1j * x[1::2]
    else:
        z = x.astype(np.complex128)
    amps = z[:NUM_SLITS]
    nrm = np.linalg.norm(amps)
    if nrm < 1e-12:
        return None
    amps = amps / nrm
    dets = z[NUM_SLITS:].reshape(NUM_SLITS, NUM_SLITS)
    norms = np.linalg.norm(dets, axis=1)
    if norms.min() < 1e-12:
        return None
    dets = dets / norms[:, None]
    return amps, dets


def objective(cfg: InterferometerConfig, inner_opt_cfg: OptConfig = OptConfig()) -> float:
    """Normalized coherence of the system state plus path distinguishability."""
    point = evaluate_point(cfg, inner_opt_cfg)
    return point.ctr_value + point.distinguishability


def evaluate_point(cfg: InterferometerConfig, inner_opt_cfg: OptConfig = OptConfig()) -> DualityPoint:
    """Full duality point (coherence, distinguishability, POVM bookkeeping)."""
    rho_q = np.ascontiguousarray(system_state(cfg))
    raw, _, _, _ = trace_dist_multistart(
        rho_q,
        CONTROLLED_DIM,
        inner_opt_cfg.restarts,
        inner_opt_cfg.seed,
        inner_opt_cfg.maxiter,
        inner_opt_cfg.fatol,
        inner_opt_cfg.polish,
    )
    ctr_value = max(float(raw), 0.0) / normalization_factor(NUM_SLITS, CONTROLLED_DIM)
    wp = distinguishability(cfg)
    return DualityPoint(
        ctr_value=min(ctr_value, 1.0),
        distinguishability=wp.distinguishability,
        gamma0=wp.gamma0,
        discard_probability=wp.discard_probability,
    )


def _objective_x(x: np.ndarray, parametrization: str, inner: OptConfig, inv_factor: float) -> float:
    """Search-time objective on raw parameters; degenerate points score 0."""
    decoded = decode_config(x, parametrization)
    if decoded is None:
        return 0.0
    amps, dets = decoded
    gram = dets.conj() @ dets.T
    if float(np.linalg.eigvalsh(gram)[0]) <= 1e-11:
        return 0.0
    try:
        cfg = InterferometerConfig(amps, dets)
        dist = distinguishability(cfg).distinguishability
    except ValueError:
        # detector set too close to linear dependence for the POVM construction
        return 0.0
    rho_q = np.ascontiguousarray(system_state(cfg))
    raw, _, _, _ = trace_dist_multistart(
        rho_q, CONTROLLED_DIM, inner.restarts, inner.seed, inner.maxiter, inner.fatol, inner.polish
    )
    return max(float(raw), 0.0) * inv_factor + dist


def _sample_x0(rng: np.random.Generator, parametrization: str, max_tries: int = 100) -> np.ndarray:
    dim = _param_dim(parametrization)
    for _ in range(max_tries):
        x0 = rng.standard_normal(dim)
        decoded = decode_config(x0, parametrization)
        if decoded is None:
            continue
        _, dets = decoded
        if float(np.linalg.eigvalsh(dets.conj() @ dets.T)[0]) >= 1e-6:
            return x0
    raise RuntimeError("could not sample a non-degenerate starting configuration")


def _ascent(x0: np.ndarray, search: DualitySearchConfig, inv_factor: float, maxfev: int, cycles: int):
    """Nelder-Mead ascent with restart-from-best cycles."""

    def neg(x):
        return -_objective_x(x, search.parametrization, search.inner_opt_cfg, inv_factor)

    x, best = x0, -neg(x0)
    for cycle in range(cycles):
        res = scipy_minimize(
            neg,
            x,
            method="Nelder-Mead",
            options={"maxfev": maxfev, "fatol": 1e-8, "xatol": 1e-7, "adaptive": True},
        )
        improved = -res.fun
        if improved > best:
            x, gain = res.x, improved - best
            best = improved
            if gain < 1e-6 and cycle > 0:
                break
        else:
            break
    return best, x


def _run_restart(args):
    search, restart_index, inv_factor = args
    rng = np.random.default_rng((search.master_seed, restart_index))
    x0 = _sample_x0(rng, search.parametrization)
    return _ascent(x0, search, inv_factor, search.explore_maxfev, 2)


def maximize_duality(search: DualitySearchConfig = DualitySearchConfig()) -> DualityOptimum:
    """Multi-start ascent over interferometer configurations.

    Every restart runs an independent seeded Nelder-Mead ascent; the top
    candidates get extra polish; all candidates are re-scored with a
    high-accuracy inner minimization before the maximum is reported.
    """
    inv_factor = 1.0 / normalization_factor(NUM_SLITS, CONTROLLED_DIM)
    jobs = [(search, r, inv_factor) for r in range(search.restarts)]
    if search.threads > 1:
        with ProcessPoolExecutor(max_workers=search.threads) as pool:
            results = list(pool.map(_run_restart, jobs))
    else:
        results = [_run_restart(j) for j in jobs]

    values = np.array([v for v, _ in results])
    points = [x for _, x in results]

    # deeper polish for the most promising candidates
    deep = replace(
        search,
        inner_opt_cfg=replace(
            search.inner_opt_cfg, restarts=max(search.inner_opt_cfg.restarts, 2), maxiter=400, polish=1
        ),
    )
    for idx in np.argsort(values)[::-1][: search.top_k]:
        v, x = _ascent(points[idx], deep, inv_factor, search.polish_maxfev, search.polish_cycles)
        if v > values[idx]:
            values[idx], points[idx] = v, x

    # intensive final polish of the single most promising candidate
    lead = int(np.argmax(values))
    v, x = _ascent(points[lead], deep, inv_factor, 2 * search.polish_maxfev, 2 * search.polish_cycles)
    if v > values[lead]:
        values[lead], points[lead] = v, x

    # high-accuracy re-verification of every candidate
    verify = OptConfig(restarts=search.verify_restarts, maxiter=5000, fatol=1e-9, polish=2)
    refined = np.array([_objective_x(x, search.parametrization, verify, inv_factor) for x in points])

    order = np.argsort(-refined, kind="stable")  # lowest restart index wins ties
    best_idx = int(order[0])
    amps, dets = decode_config(points[best_idx], search.parametrization)
    best_config = InterferometerConfig(amps, dets)
    converged = search.restarts < 2 or (refined[order[0]] - refined[order[1]]) < search.tolerance
    return DualityOptimum(
        best_value=float(refined[best_idx]),
        best_config=best_config,
        per_restart_values=refined,
        converged=bool(converged),
        best_point=evaluate_point(best_config, verify),
    )


@dataclass(frozen=True)
class CertificationReport:
    samples: int
    max_value: float
    threshold: float
    violations: tuple[tuple[int, float], ...]

    @property
    def num_violations(self) -> int:
        return len(self.violations)


def certify_bound(samples: int, seed: int = 7, threshold: float = 1.405) -> CertificationReport:
    """Evaluate the objective on random configurations and report any value above threshold."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    inner = OptConfig(restarts=4, maxiter=800, fatol=1e-9, polish=1)
    rng = np.random.default_rng(seed)
    max_value = -np.inf
    violations = []
    for i in range(samples):
        cfg = random_config(rng)
        val = objective(cfg, inner)
        if val > max_value:
            max_value = val
        if val > threshold:
            violations.append((i, float(val)))
    return CertificationReport(
        samples=samples,
        max_value=float(max_value),
        threshold=threshold,
        violations=tuple(violations),
    )


# re-export for callers assembling duality points from scratch
__all__ = [
    "DualitySearchConfig",
    "DualityOptimum",
    "CertificationReport",
    "objective",
    "evaluate_point",
    "maximize_duality",
    "certify_bound",
    "decode_config",
    "standard_basis",
]
