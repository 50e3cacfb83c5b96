"""Coherence quantifiers with respect to an incomplete basis.

Two families: the trace-distance measure (distance to the free set, divided
by a dimension-dependent normalization factor) and the minimal-completion
measure (a complete-basis seed measure minimized over all completions of the
incomplete basis).  An independent brute-force grid oracle for the
trace-distance minimization is provided for cross-checking.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import njit
from scipy.optimize import minimize as scipy_minimize

from . import linalg
from .optimize import free_state_params_decode, trace_dist_multistart
from .resource import FreeStateParams, IncompleteBasis, standard_basis

#: analytically known normalization factors, re-verified numerically on compute
KNOWN_NORMALIZATION = {(4, 2): 4.0 / 3.0}

NORMALIZATION_VERIFY_TOL = 5e-3


@dataclass(frozen=True)
class OptConfig:
    """Budget for the multi-start derivative-free searches."""

    restarts: int = 32
    maxiter: int = 5000
    fatol: float = 1e-9
    seed: int = 7
    agree_tol: float = 1e-6  # best two restarts must agree for "converged"
    polish: int = 2


@dataclass(frozen=True)
class BasisCompletion:
    """A completion of the incomplete basis, as a rotation of the canonical one."""

    basis: IncompleteBasis
    completion_unitary: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.completion_unitary, dtype=np.complex128)
        m = self.basis.dim - self.basis.n
        if u.shape != (m, m):
            raise ValueError(f"completion unitary must be {m}x{m}")
        defect = float(np.abs(u.conj().T @ u - np.eye(m)).max())
        if defect > 1e-9:
            raise ValueError(f"completion unitary defect {defect:.3e}")
        object.__setattr__(self, "completion_unitary", u)

    @property
    def completion_vectors(self) -> np.ndarray:
        """(d-n, d) array of completion states."""
        return (self.basis.complement_basis @ self.completion_unitary).T

    @property
    def full_vectors(self) -> np.ndarray:
        """(d, d) array: fixed basis rows followed by completion rows."""
        full = np.vstack([self.basis.vectors, self.completion_vectors])
        defect = float(np.abs(full.conj() @ full.T - np.eye(self.basis.dim)).max())
        if defect > 1e-9:
            raise ValueError(f"completed basis not orthonormal: defect {defect:.3e}")
        return full


@dataclass(frozen=True)
class MeasureResult:
    value: float
    minimizer: object = None
    iterations: int = 0
    restarts_used: int = 0
    converged: bool = True

    def __post_init__(self):
        if not np.isfinite(self.value) or self.value < -1e-9:
            raise ValueError(f"measure value out of range: {self.value}")


def _decoded_params(x: np.ndarray, n: int, m: int) -> FreeStateParams:
    q, p, b = free_state_params_decode(np.asarray(x, dtype=np.float64), n, m)
    return FreeStateParams(float(q), p, (b + b.conj().T) / 2)


def ctr_unnormalized(basis: IncompleteBasis, rho: np.ndarray, cfg: OptConfig = OptConfig()) -> MeasureResult:
    """min over free states of the trace norm of rho - rho_I.

    Multi-start Nelder-Mead over the feasible-by-construction parametrization
    of the free set; returns the best value and its decoded minimizer.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (basis.dim, basis.dim):
        raise ValueError(f"state dimension {rho.shape} != basis dim {basis.dim}")
    rho_blk = np.ascontiguousarray(basis.to_block_coords(rho))
    best_f, best_x, per_restart, iters = trace_dist_multistart(
        rho_blk, basis.n, cfg.restarts, cfg.seed, cfg.maxiter, cfg.fatol, cfg.polish
    )
    vals = np.sort(per_restart)
    converged = len(vals) < 2 or (vals[1] - vals[0]) < cfg.agree_tol
    return MeasureResult(
        value=max(float(best_f), 0.0),
        minimizer=_decoded_params(best_x, basis.n, basis.dim - basis.n),
        iterations=int(iters),
        restarts_used=cfg.restarts,
        converged=bool(converged),
    )


def _cache_dir() -> Path:
    env = os.environ.get("COHERENTIA_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "coherentia"


def _pure_state_trace_dist(y: np.ndarray, d: int, n: int, inner: OptConfig) -> float:
    psi = y[0::2] + 1j * y[1::2]
    nrm = np.linalg.norm(psi)
    if nrm < 1e-8:
        return 0.0
    psi = psi / nrm
    rho = np.ascontiguousarray(np.outer(psi, psi.conj()))
    f, _, _, _ = trace_dist_multistart(rho, n, inner.restarts, inner.seed, inner.maxiter, inner.fatol, inner.polish)
    return float(f)


def normalization_factor(
    d: int,
    n: int,
    cfg: OptConfig = OptConfig(restarts=12),
    use_cache: bool = True,
    force_compute: bool = False,
) -> float:
    """Max over pure states of the unnormalized trace-distance coherence.

    Cached per (d, n, restarts).  Values with a known closed form are
    returned exactly without a search unless force_compute is set, in which
    case the computed optimum is verified against them (to 5e-3).
    """
    if not 1 <= n < d:
        raise ValueError(f"need 1 <= n < d, got n={n}, d={d}")
    if (d, n) in KNOWN_NORMALIZATION and not force_compute:
        return KNOWN_NORMALIZATION[(d, n)]
    key = f"{d},{n},{cfg.restarts}"
    cache_file = _cache_dir() / "normalization.json"
    if use_cache and cache_file.exists():
        cached = json.loads(cache_file.read_text())
        if key in cached:
            value = float(cached[key])
            if (d, n) in KNOWN_NORMALIZATION:
                known = KNOWN_NORMALIZATION[(d, n)]
                if abs(value - known) > NORMALIZATION_VERIFY_TOL:
                    raise ValueError(f"cached normalization {value} deviates from {known}")
                return known
            return value

    inner = OptConfig(restarts=2, maxiter=500, seed=cfg.seed, polish=1)
    best = -np.inf
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.restarts):
        y0 = rng.standard_normal(2 * d)
        res = scipy_minimize(
            lambda y: -_pure_state_trace_dist(y, d, n, inner),
            y0,
            method="Nelder-Mead",
            options={"maxfev": 2500, "fatol": 1e-7, "xatol": 1e-6, "adaptive": True},
        )
        # polish from the found point
        res = scipy_minimize(
            lambda y: -_pure_state_trace_dist(y, d, n, inner),
            res.x,
            method="Nelder-Mead",
            options={"maxfev": 1500, "fatol": 1e-8, "xatol": 1e-7, "adaptive": True},
        )
        best = max(best, -res.fun)
    value = float(best)

    if use_cache:
        cache_file.parent.mkdir(parents=True, exist_ok=True)
        cached = json.loads(cache_file.read_text()) if cache_file.exists() else {}
        cached[key] = value
        cache_file.write_text(json.dumps(cached, sort_keys=True))

    if (d, n) in KNOWN_NORMALIZATION:
        known = KNOWN_NORMALIZATION[(d, n)]
        if abs(value - known) > NORMALIZATION_VERIFY_TOL:
            raise ValueError(f"computed normalization {value} deviates from known {known}")
        return known
    return value


def ctr(basis: IncompleteBasis, rho: np.ndarray, cfg: OptConfig = OptConfig()) -> MeasureResult:
    """Trace-distance coherence, normalized so the global maximum is 1."""
    raw = ctr_unnormalized(basis, rho, cfg)
    factor = normalization_factor(basis.dim, basis.n)
    return MeasureResult(
        value=raw.value / factor,
        minimizer=raw.minimizer,
        iterations=raw.iterations,
        restarts_used=raw.restarts_used,
        converged=raw.converged,
    )


def _check_full_basis(full_basis) -> np.ndarray:
    vecs = np.atleast_2d(np.asarray(full_basis, dtype=np.complex128))
    d = vecs.shape[1]
    if vecs.shape[0] != d:
        raise ValueError(f"full basis needs {d} vectors, got {vecs.shape[0]}")
    defect = float(np.abs(vecs.conj() @ vecs.T - np.eye(d)).max())
    if defect > 1e-9:
        raise ValueError(f"full basis not orthonormal: defect {defect:.3e}")
    return vecs


def seed_measure_l1(full_basis, rho) -> float:
    """l1 coherence: sum of off-diagonal magnitudes in the given full basis."""
    vecs = _check_full_basis(full_basis)
    a = vecs.conj() @ np.asarray(rho, dtype=np.complex128) @ vecs.T
    return float(np.abs(a).sum() - np.abs(np.diagonal(a)).sum())


def _entropy_bits(eigs: np.ndarray) -> float:
    eigs = np.clip(eigs.real, 0.0, None)
    nz = eigs[eigs > 1e-300]
    return float(-(nz * np.log2(nz)).sum())


def seed_measure_relent(full_basis, rho) -> float:
    """Relative entropy of coherence: S(diag(rho)) - S(rho), in bits."""
    vecs = _check_full_basis(full_basis)
    rho = np.asarray(rho, dtype=np.complex128)
    a = vecs.conj() @ rho @ vecs.T
    s_diag = _entropy_bits(np.diagonal(a))
    s_rho = _entropy_bits(np.linalg.eigvalsh(rho))
    return max(s_diag - s_rho, 0.0)


SEED_MEASURES = {"l1": seed_measure_l1, "relent": seed_measure_relent}


def _unitary_from_params(theta: np.ndarray, m: int) -> np.ndarray:
    """exp(iH) with H Hermitian built from m^2 real parameters."""
    h = np.zeros((m, m), dtype=np.complex128)
    h[np.diag_indices(m)] = theta[:m]
    k = m
    for i in range(m):
        for j in range(i + 1, m):
            h[i, j] = theta[k] + 1j * theta[k + 1]
            h[j, i] = theta[k] - 1j * theta[k + 1]
            k += 2
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(1j * vals)) @ vecs.conj().T


def minimal_completion_measure(
    basis: IncompleteBasis,
    rho: np.ndarray,
    seed_measure: str = "l1",
    cfg: OptConfig = OptConfig(restarts=16),
) -> MeasureResult:
    """min over completions of the incomplete basis of a seed coherence measure.

    The completion manifold is the unitary group on the complement, searched
    by multi-start Nelder-Mead over a Hermitian-generator parametrization.
    For n = d - 1 the completion is unique up to phase and no search is run.
    """
    if seed_measure not in SEED_MEASURES:
        raise ValueError(f"seed_measure must be one of {sorted(SEED_MEASURES)}")
    measure = SEED_MEASURES[seed_measure]
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (basis.dim, basis.dim):
        raise ValueError(f"state dimension {rho.shape} != basis dim {basis.dim}")
    m = basis.dim - basis.n

    if m == 1:
        completion = BasisCompletion(basis, np.eye(1, dtype=np.complex128))
        return MeasureResult(
            value=float(measure(completion.full_vectors, rho)),
            minimizer=completion,
            restarts_used=0,
        )

    def objective(theta: np.ndarray) -> float:
        u = _unitary_from_params(theta, m)
        full = np.vstack([basis.vectors, (basis.complement_basis @ u).T])
        return float(measure(full, rho))

    rng = np.random.default_rng(cfg.seed)
    best_val, best_theta, iters = np.inf, None, 0
    for r in range(cfg.restarts):
        theta0 = np.zeros(m * m) if r == 0 else rng.standard_normal(m * m) * np.pi
        res = scipy_minimize(
            objective,
            theta0,
            method="Nelder-Mead",
            options={"maxfev": 3000, "fatol": 1e-10, "xatol": 1e-8},
        )
        iters += res.nfev
        if res.fun < best_val:
            best_val, best_theta = res.fun, res.x
    completion = BasisCompletion(basis, _unitary_from_params(best_theta, m))
    return MeasureResult(
        value=max(float(best_val), 0.0),
        minimizer=completion,
        iterations=iters,
        restarts_used=cfg.restarts,
        converged=True,
    )


# ---------------------------------------------------------------------------
# Independent brute-force grid oracle for the trace-distance minimization.
# Supports n in {1, 2} and complement dimension in {1, 2} (Bloch-ball block),
# which covers the (4, 2) and (2, 1) settings used throughout.
# ---------------------------------------------------------------------------


@njit(cache=True)
def _grid_scan(rho_blk, n, q_grid, p1_grid, bloch_pts):
    """Exhaustive scan over the gridded free-state parametrization."""
    d = rho_blk.shape[0]
    m = d - n
    best = np.inf
    best_params = np.zeros(5)
    for iq in range(q_grid.size):
        q = q_grid[iq]
        for ip in range(p1_grid.size):
            p1 = p1_grid[ip]
            for ib in range(bloch_pts.shape[0]):
                delta = rho_blk.copy()
                if n == 1:
                    delta[0, 0] -= q
                else:
                    delta[0, 0] -= q * p1
                    delta[1, 1] -= q * (1.0 - p1)
                if m == 1:
                    delta[n, n] -= 1.0 - q
                else:
                    a = bloch_pts[ib, 0]
                    b = bloch_pts[ib, 1]
                    c = bloch_pts[ib, 2]
                    delta[n, n] -= (1.0 - q) * (1.0 + c) / 2.0
                    delta[n + 1, n + 1] -= (1.0 - q) * (1.0 - c) / 2.0
                    delta[n, n + 1] -= (1.0 - q) * complex(a, -b) / 2.0
                    delta[n + 1, n] -= (1.0 - q) * complex(a, b) / 2.0
                val = np.abs(np.linalg.eigvalsh(delta)).sum()
                if val < best:
                    best = val
                    best_params[0] = q
                    best_params[1] = p1
                    best_params[2] = bloch_pts[ib, 0]
                    best_params[3] = bloch_pts[ib, 1]
                    best_params[4] = bloch_pts[ib, 2]
    return best, best_params


def _axis_grid(center: float, radius: float, step: float, lo: float, hi: float) -> np.ndarray:
    lo_c = max(lo, center - radius)
    hi_c = min(hi, center + radius)
    num = max(int(round((hi_c - lo_c) / step)) + 1, 1)
    return np.linspace(lo_c, hi_c, num)


def _bloch_grid(center: np.ndarray, radius: float, step: float) -> np.ndarray:
    axes = [_axis_grid(center[i], radius, step, -1.0, 1.0) for i in range(3)]
    pts = np.array(np.meshgrid(*axes, indexing="ij")).reshape(3, -1).T
    pts = pts[np.einsum("ij,ij->i", pts, pts) <= 1.0 + 1e-12]
    if pts.size == 0:
        pts = center[None, :] / max(np.linalg.norm(center), 1.0)
    return np.ascontiguousarray(pts)


def ctr_grid_oracle(
    basis: IncompleteBasis,
    rho: np.ndarray,
    coarse_step: float = 0.1,
    fine_step: float = 0.01,
) -> float:
    """Brute-force grid minimum of the trace distance to the free set.

    A full-range scan at coarse_step is refined around its argmin with a
    local grid at fine_step (window of one coarse cell in each direction).
    Independent of the Nelder-Mead path; used only as a test oracle.
    """
    n, d = basis.n, basis.dim
    m = d - n
    if n not in (1, 2) or m not in (1, 2):
        raise ValueError("grid oracle supports n in {1,2} and d-n in {1,2}")
    rho_blk = np.ascontiguousarray(basis.to_block_coords(rho))

    def scan(q_c, q_r, p_c, p_r, b_c, b_r, step):
        q_grid = _axis_grid(q_c, q_r, step, 0.0, 1.0)
        p_grid = _axis_grid(p_c, p_r, step, 0.0, 1.0) if n == 2 else np.array([1.0])
        bloch = _bloch_grid(b_c, b_r, step) if m == 2 else np.zeros((1, 3))
        return _grid_scan(rho_blk, n, q_grid, p_grid, bloch)

    best, params = scan(0.5, 0.5, 0.5, 0.5, np.zeros(3), 1.0, coarse_step)
    radius = coarse_step
    step = coarse_step
    while step > fine_step:
        step = max(step / 4.0, fine_step)
        val, params = scan(params[0], radius, params[1], radius, params[2:5], radius, step)
        best = min(best, val)
        radius = step
    return float(best)
