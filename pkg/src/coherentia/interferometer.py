"""Four-slit which-path setup with two controlled slits.

A pure system state passes four slits; a detector entangles with the path via
a controlled unitary.  The reduced system state carries the coherence (wave
side); the reduced detector state feeds an unambiguous-discrimination POVM on
the two accessible paths, giving the distinguishability (particle side).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg

NUM_SLITS = 4
CONTROLLED_SLITS = (0, 1)

#: Gram-matrix minimum eigenvalue below which detector states are rejected
DETECTOR_INDEPENDENCE_TOL = 1e-12


@dataclass(frozen=True)
class InterferometerConfig:
    """Slit amplitudes and post-interaction detector states.

    amplitudes: 4 complex numbers with unit total probability.
    detector_states: (4, 4) array; rows are normalized, linearly independent.
    """

    amplitudes: np.ndarray
    detector_states: np.ndarray
    controlled_slits: tuple[int, int] = CONTROLLED_SLITS

    def __post_init__(self):
        amps = linalg.as_vector(self.amplitudes)
        if amps.size != NUM_SLITS:
            raise ValueError(f"need {NUM_SLITS} amplitudes, got {amps.size}")
        total = float((np.abs(amps) ** 2).sum())
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"amplitude probabilities sum to {total!r}, expected 1")
        dets = np.asarray(self.detector_states, dtype=np.complex128)
        if dets.shape != (NUM_SLITS, NUM_SLITS):
            raise ValueError(f"detector_states must be {NUM_SLITS}x{NUM_SLITS}")
        norms = np.linalg.norm(dets, axis=1)
        if np.abs(norms - 1.0).max() > 1e-10:
            raise ValueError("detector states must be normalized")
        gram = dets.conj() @ dets.T
        min_eig = float(np.linalg.eigvalsh(gram)[0])
        if min_eig <= DETECTOR_INDEPENDENCE_TOL:
            raise ValueError(f"detector states linearly dependent: Gram min eig {min_eig:.3e}")
        if tuple(self.controlled_slits) != CONTROLLED_SLITS:
            raise ValueError("only slits (0, 1) can be controlled")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "detector_states", dets)
        object.__setattr__(self, "controlled_slits", CONTROLLED_SLITS)


@dataclass(frozen=True)
class PathPOVM:
    """POVM {A_0, A_1, A_?} isolating the two accessible detector directions."""

    a0: np.ndarray
    a1: np.ndarray
    aq: np.ndarray
    c: float
    perp_123: np.ndarray = field(repr=False, default=None)
    perp_023: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        d = self.a0.shape[0]
        completeness = float(np.abs(self.a0 + self.a1 + self.aq - np.eye(d)).max())
        if completeness > 1e-9:
            raise ValueError(f"POVM completeness defect {completeness:.3e}")
        if self.c <= 0:
            raise ValueError("c must be positive")
        for name, op in (("A0", self.a0), ("A1", self.a1), ("A?", self.aq)):
            min_eig = float(np.linalg.eigvalsh(op)[0])
            if min_eig < -1e-10:
                raise ValueError(f"{name} not PSD: min eigenvalue {min_eig:.3e}")
        for name, op in (("A0", self.a0), ("A1", self.a1)):
            if int(np.linalg.matrix_rank(op, tol=1e-10)) != 1:
                raise ValueError(f"{name} is not rank one")


@dataclass(frozen=True)
class WhichPathResult:
    """Distinguishability of the two accessible paths via unambiguous discrimination."""

    gamma0: float
    gamma1: float
    dbar: float
    discard_probability: float
    distinguishability: float
    degenerate: bool
    effective_detector_state: np.ndarray = field(repr=False, default=None)


@dataclass(frozen=True)
class DualityPoint:
    """One point of the wave-particle trade-off."""

    ctr_value: float
    distinguishability: float
    gamma0: float
    discard_probability: float

    def __post_init__(self):
        for name in ("ctr_value", "distinguishability", "gamma0", "discard_probability"):
            v = getattr(self, name)
            if not -1e-9 <= v <= 1.0 + 1e-9:
                raise ValueError(f"{name} = {v!r} outside [0, 1]")


def joint_state(cfg: InterferometerConfig) -> np.ndarray:
    """sum_i amp_i |i> (x) |d_i>, a 16-dimensional pure state."""
    out = np.zeros(NUM_SLITS * NUM_SLITS, dtype=np.complex128)
    for i in range(NUM_SLITS):
        slit = np.zeros(NUM_SLITS, dtype=np.complex128)
        slit[i] = 1.0
        out += cfg.amplitudes[i] * np.kron(slit, cfg.detector_states[i])
    return out


def system_state(cfg: InterferometerConfig) -> np.ndarray:
    """Reduced state of the system: entry (i, j) = amp_i amp_j^* <d_j|d_i>."""
    overlaps = cfg.detector_states.conj() @ cfg.detector_states.T  # [j, i] = <d_j|d_i>
    rho = np.outer(cfg.amplitudes, cfg.amplitudes.conj()) * overlaps.T
    return (rho + rho.conj().T) / 2


def detector_state(cfg: InterferometerConfig) -> np.ndarray:
    """Reduced detector state: sum_i |amp_i|^2 |d_i><d_i|."""
    weights = np.abs(cfg.amplitudes) ** 2
    return np.einsum("i,ij,ik->jk", weights, cfg.detector_states, cfg.detector_states.conj())


def build_povm(cfg: InterferometerConfig) -> PathPOVM:
    """Unambiguous which-path POVM with maximal retained probability.

    A_0 and A_1 project (scaled by c) onto the directions orthogonal to the
    three other detector states; c = 1/lambda_max of the projector sum is the
    largest value keeping A_? positive.
    """
    dets = cfg.detector_states
    perp_123 = linalg.orthogonal_complement_vector([dets[1], dets[2], dets[3]])
    perp_023 = linalg.orthogonal_complement_vector([dets[0], dets[2], dets[3]])
    s = np.outer(perp_123, perp_123.conj()) + np.outer(perp_023, perp_023.conj())
    lam_max = float(np.linalg.eigvalsh(s)[-1])
    c = 1.0 / lam_max
    a0 = c * np.outer(perp_123, perp_123.conj())
    a1 = c * np.outer(perp_023, perp_023.conj())
    aq = np.eye(NUM_SLITS, dtype=np.complex128) - a0 - a1
    aq = (aq + aq.conj().T) / 2
    return PathPOVM(a0=a0, a1=a1, aq=aq, c=c, perp_123=perp_123, perp_023=perp_023)


def uqsd_two_state(p1: float, p2: float, overlap: float) -> float:
    """Optimal unambiguous-discrimination success for two states.

    1 - 2 sqrt(p1 p2) |<psi1|psi2>|, clamped to [0, 1].
    """
    if p1 < -1e-12 or p2 < -1e-12 or abs(p1 + p2 - 1.0) > 1e-9:
        raise ValueError(f"(p1, p2) = ({p1}, {p2}) is not a probability pair")
    if not -1e-12 <= overlap <= 1.0 + 1e-12:
        raise ValueError(f"overlap {overlap!r} outside [0, 1]")
    val = 1.0 - 2.0 * np.sqrt(max(p1, 0.0) * max(p2, 0.0)) * overlap
    return float(np.clip(val, 0.0, 1.0))


def uqsd_n_state_bound(probs, overlaps) -> float:
    """Upper bound on unambiguous discrimination of n linearly independent states.

    1 - (1/(n-1)) sum_{i != j} sqrt(p_i p_j) |<psi_i|psi_j>|.  Informational
    only; the two-state exact formula is what enters the distinguishability.
    """
    probs = np.asarray(probs, dtype=np.float64)
    n = probs.size
    if n < 2:
        raise ValueError("need at least two states")
    if np.any(probs < -1e-12) or abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError("probs must lie on the simplex")
    g = np.abs(np.asarray(overlaps, dtype=np.float64))
    if g.shape != (n, n):
        raise ValueError(f"overlaps must be {n}x{n}")
    cross = np.sqrt(np.outer(probs, probs)) * g
    total = cross.sum() - np.diagonal(cross).sum()
    return float(1.0 - total / (n - 1))


def distinguishability(cfg: InterferometerConfig) -> WhichPathResult:
    """Path distinguishability of the two controlled slits.

    Runs the POVM, conditions the detector state on not being discarded
    (square-root update rule), and applies the two-state unambiguous
    discrimination formula weighted by the retained probability.
    """
    povm = build_povm(cfg)
    rho_d = detector_state(cfg)
    discard = float(np.real(np.trace(povm.aq @ rho_d)))
    discard = float(np.clip(discard, 0.0, 1.0))
    alpha, beta = cfg.amplitudes[0], cfg.amplitudes[1]
    w0 = abs(alpha) ** 2 * abs(np.vdot(povm.perp_123, cfg.detector_states[0])) ** 2
    w1 = abs(beta) ** 2 * abs(np.vdot(povm.perp_023, cfg.detector_states[1])) ** 2
    if w0 + w1 < 1e-14:
        # no amplitude passes the controlled slits: gamma_0 is 0/0
        return WhichPathResult(
            gamma0=0.0,
            gamma1=0.0,
            dbar=0.0,
            discard_probability=discard,
            distinguishability=0.0,
            degenerate=True,
            effective_detector_state=None,
        )
    gamma0 = w0 / (w0 + w1)
    gamma1 = 1.0 - gamma0
    overlap = float(abs(np.vdot(povm.perp_123, povm.perp_023)))
    dbar = uqsd_two_state(gamma0, gamma1, min(overlap, 1.0))
    dist = (1.0 - discard) * dbar
    # square-root (Lueders) update conditioned on the unambiguous outcomes
    sa0 = np.sqrt(povm.c) * np.outer(povm.perp_123, povm.perp_123.conj())
    sa1 = np.sqrt(povm.c) * np.outer(povm.perp_023, povm.perp_023.conj())
    eff = sa0 @ rho_d @ sa0 + sa1 @ rho_d @ sa1
    eff /= np.trace(eff).real
    return WhichPathResult(
        gamma0=float(gamma0),
        gamma1=float(gamma1),
        dbar=float(dbar),
        discard_probability=discard,
        distinguishability=float(np.clip(dist, 0.0, 1.0)),
        degenerate=False,
        effective_detector_state=eff,
    )


def random_config(rng: np.random.Generator, max_tries: int = 100) -> InterferometerConfig:
    """Random configuration with independence-checked detector states."""
    for _ in range(max_tries):
        amps = rng.standard_normal(NUM_SLITS) + 1j * rng.standard_normal(NUM_SLITS)
        amps /= np.linalg.norm(amps)
        dets = rng.standard_normal((NUM_SLITS, NUM_SLITS)) + 1j * rng.standard_normal((NUM_SLITS, NUM_SLITS))
        dets /= np.linalg.norm(dets, axis=1)[:, None]
        gram = dets.conj() @ dets.T
        if float(np.linalg.eigvalsh(gram)[0]) >= 1e-6:
            return InterferometerConfig(amps, dets)
    raise RuntimeError("could not sample an independent detector configuration")
