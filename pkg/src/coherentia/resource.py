"""Free states and free (incoherent) operations for an incomplete basis.

An incomplete basis is a fixed orthonormal set of n < d vectors.  Free states
are diagonal on its span, arbitrary on the orthogonal complement, with no
cross terms.  Two structural classes of Kraus channels preserve that set:
block-diagonal channels whose upper block preserves diagonality (class 1) and
channels that dump everything into the complement (class 2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg

COMPLETENESS_TOL = 1e-9


@dataclass(frozen=True)
class IncompleteBasis:
    """n orthonormal vectors in C^d with n < d, plus derived complement data.

    ``vectors`` is an (n, d) array whose rows are the basis states.  The
    canonical complement basis is a deterministic orthonormal basis of the
    orthogonal complement, obtained by Gram-Schmidt over the complement
    projector's columns in pivot order.
    """

    dim: int
    vectors: np.ndarray
    complement_projector: np.ndarray = field(init=False, repr=False)
    complement_basis: np.ndarray = field(init=False, repr=False)  # (d, d-n) columns

    def __post_init__(self):
        vecs = np.atleast_2d(np.asarray(self.vectors, dtype=np.complex128))
        n, d = vecs.shape
        if d != self.dim:
            raise ValueError(f"vector dimension {d} != declared dim {self.dim}")
        if not 1 <= n < d:
            raise ValueError(f"need 1 <= n < d, got n={n}, d={d}")
        gram = vecs.conj() @ vecs.T
        defect = float(np.abs(gram - np.eye(n)).max())
        if defect > 1e-10:
            raise ValueError(f"basis vectors not orthonormal: Gram defect {defect:.3e}")
        object.__setattr__(self, "vectors", vecs)
        proj = np.eye(d, dtype=np.complex128) - vecs.T @ vecs.conj()
        object.__setattr__(self, "complement_projector", proj)
        # deterministic pivot order: take projector columns with residual norm
        # above threshold until d - n collected
        cols: list[np.ndarray] = []
        for j in range(d):
            w = proj[:, j].copy()
            for u in cols:
                w -= np.vdot(u, w) * u
            for u in cols:
                w -= np.vdot(u, w) * u
            nrm = float(np.linalg.norm(w))
            if nrm > 1e-8:
                cols.append(linalg.fix_phase(w / nrm))
            if len(cols) == d - n:
                break
        if len(cols) != d - n:
            raise ValueError("failed to construct canonical complement basis")
        object.__setattr__(self, "complement_basis", np.array(cols).T)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def full_frame(self) -> np.ndarray:
        """d x d unitary whose columns are basis vectors then complement basis."""
        return np.hstack([self.vectors.T, self.complement_basis])

    def to_block_coords(self, m: np.ndarray) -> np.ndarray:
        w = self.full_frame
        return w.conj().T @ np.asarray(m, dtype=np.complex128) @ w

    def from_block_coords(self, m: np.ndarray) -> np.ndarray:
        w = self.full_frame
        return w @ np.asarray(m, dtype=np.complex128) @ w.conj().T


def standard_basis(dim: int, n: int) -> IncompleteBasis:
    """The first n computational basis vectors of C^dim."""
    return IncompleteBasis(dim, np.eye(dim, dtype=np.complex128)[:n])


@dataclass(frozen=True)
class FreeStateParams:
    """Parametrization of a free state: weight q, simplex p, complement block."""

    q: float
    p: np.ndarray
    complement_block: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0 + 1e-12:
            raise ValueError(f"q must lie in [0, 1], got {self.q}")
        p = np.asarray(self.p, dtype=np.float64)
        if p.ndim != 1 or np.any(p < -1e-12) or abs(p.sum() - 1.0) > 1e-9:
            raise ValueError("p must be a probability vector")
        object.__setattr__(self, "p", p)
        block = linalg.check_density_matrix(self.complement_block)
        object.__setattr__(self, "complement_block", block)


@dataclass(frozen=True)
class KrausChannel:
    """A CPTP map given by an explicit list of d x d Kraus matrices."""

    dim: int
    kraus_ops: np.ndarray  # (k, d, d)

    def __post_init__(self):
        ops = np.asarray(self.kraus_ops, dtype=np.complex128)
        if ops.ndim != 3 or ops.shape[1:] != (self.dim, self.dim):
            raise ValueError(f"kraus_ops must have shape (k, {self.dim}, {self.dim})")
        total = np.einsum("mji,mjk->ik", ops.conj(), ops)
        defect = float(np.abs(total - np.eye(self.dim)).max())
        if defect > COMPLETENESS_TOL:
            raise ValueError(f"Kraus completeness defect {defect:.3e} > {COMPLETENESS_TOL:.1e}")
        object.__setattr__(self, "kraus_ops", ops)


@dataclass(frozen=True)
class DefectReport:
    """Outcome of a structural check: verdict plus human-readable defects."""

    ok: bool
    defects: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def make_free_state(basis: IncompleteBasis, params: FreeStateParams) -> np.ndarray:
    """q * sum_i p_i |i><i|  (+)  (1-q) * rho_{d-n} on the canonical complement."""
    n = basis.n
    if len(params.p) != n:
        raise ValueError(f"p has length {len(params.p)}, basis has n={n}")
    m = basis.dim - n
    if params.complement_block.shape != (m, m):
        raise ValueError(f"complement block must be {m}x{m}")
    v = basis.vectors.T  # (d, n) columns
    c = basis.complement_basis
    rho = params.q * (v * params.p) @ v.conj().T
    rho += (1.0 - params.q) * c @ params.complement_block @ c.conj().T
    return rho


def is_free_state(basis: IncompleteBasis, rho: np.ndarray, tol: float = 1e-9) -> DefectReport:
    """Test the free-state block structure.

    True iff there is no coherence within the incomplete basis and no cross
    terms between its span and the complement.  The complement block is
    unconstrained (its basis can be rotated freely).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (basis.dim, basis.dim):
        raise ValueError(f"state dimension {rho.shape} != basis dim {basis.dim}")
    n = basis.n
    blk = basis.to_block_coords(rho)
    defects = []
    for i in range(n):
        for j in range(n):
            if i != j and abs(blk[i, j]) > tol:
                defects.append(f"coherence within basis at ({i},{j}): |{abs(blk[i, j]):.3e}|")
    cross = np.abs(blk[:n, n:])
    for i, j in zip(*np.nonzero(cross > tol)):
        defects.append(f"cross term span/complement at ({i},{n + j}): {cross[i, j]:.3e}")
    return DefectReport(not defects, tuple(defects))


def apply_channel(channel: KrausChannel, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (channel.dim, channel.dim):
        raise ValueError(f"state dimension {rho.shape} != channel dim {channel.dim}")
    out = np.einsum("mij,jk,mlk->il", channel.kraus_ops, rho, channel.kraus_ops.conj())
    return (out + out.conj().T) / 2


def verify_class1(basis: IncompleteBasis, channel: KrausChannel, tol: float = 1e-9) -> DefectReport:
    """Check the block-diagonal free-channel structure.

    Every Kraus operator must be block diagonal w.r.t. span/complement, the
    two block families must separately be complete, and the upper blocks must
    preserve diagonality on the basis states.
    """
    n, d = basis.n, basis.dim
    defects = []
    blocks = [basis.to_block_coords(k) for k in channel.kraus_ops]
    for m, kb in enumerate(blocks):
        off = max(float(np.abs(kb[:n, n:]).max()), float(np.abs(kb[n:, :n]).max()))
        if off > tol:
            defects.append(f"Kraus {m} off-diagonal block norm {off:.3e}")
    p_blocks = [kb[:n, :n] for kb in blocks]
    q_blocks = [kb[n:, n:] for kb in blocks]
    psum = sum(p.conj().T @ p for p in p_blocks)
    qsum = sum(q.conj().T @ q for q in q_blocks)
    pd = float(np.abs(psum - np.eye(n)).max())
    qd = float(np.abs(qsum - np.eye(d - n)).max())
    if pd > tol:
        defects.append(f"sum P^dag P completeness defect {pd:.3e}")
    if qd > tol:
        defects.append(f"sum Q^dag Q completeness defect {qd:.3e}")
    # diagonality preservation on the n rank-one inputs (sufficient by linearity)
    for i in range(n):
        out = sum(p[:, i, None] @ p[None, :, i].conj() for p in p_blocks)
        offdiag = out - np.diag(np.diagonal(out))
        dd = float(np.abs(offdiag).max())
        if dd > tol:
            defects.append(f"P-blocks map |{i}><{i}| to non-diagonal (defect {dd:.3e})")
    return DefectReport(not defects, tuple(defects))


def verify_class2(basis: IncompleteBasis, channel: KrausChannel, tol: float = 1e-9) -> DefectReport:
    """Check the complement-dumping free-channel structure (zero top blocks)."""
    n, d = basis.n, basis.dim
    defects = []
    blocks = [basis.to_block_coords(k) for k in channel.kraus_ops]
    for m, kb in enumerate(blocks):
        top = float(np.abs(kb[:n, :]).max())
        if top > tol:
            defects.append(f"Kraus {m} top block norm {top:.3e}")
    r_blocks = [kb[n:, :n] for kb in blocks]
    q_blocks = [kb[n:, n:] for kb in blocks]
    rsum = sum(r.conj().T @ r for r in r_blocks)
    qsum = sum(q.conj().T @ q for q in q_blocks)
    rd = float(np.abs(rsum - np.eye(n)).max())
    qd = float(np.abs(qsum - np.eye(d - n)).max())
    if rd > tol:
        defects.append(f"sum R^dag R completeness defect {rd:.3e}")
    if qd > tol:
        defects.append(f"sum Q^dag Q completeness defect {qd:.3e}")
    return DefectReport(not defects, tuple(defects))


def random_free_state(basis: IncompleteBasis, rng_seed: int) -> np.ndarray:
    """Seeded draw: q uniform, p flat-simplex, complement block Gaussian-PSD."""
    rng = np.random.default_rng(rng_seed)
    n, d = basis.n, basis.dim
    q = float(rng.uniform())
    p = rng.dirichlet(np.ones(n))
    block = linalg.random_density_matrix(d - n, rng)
    return make_free_state(basis, FreeStateParams(q, p, block))


def random_free_params(basis: IncompleteBasis, rng: np.random.Generator) -> FreeStateParams:
    n, d = basis.n, basis.dim
    return FreeStateParams(
        float(rng.uniform()),
        rng.dirichlet(np.ones(n)),
        linalg.random_density_matrix(d - n, rng),
    )


def _sliced_isometry(rows: int, cols: int, num: int, rng: np.random.Generator) -> list[np.ndarray]:
    """num blocks of shape (rows, cols) stacking to an isometry C^cols -> C^(num*rows)."""
    total = num * rows
    if total < cols:
        raise ValueError(f"need num_kraus * {rows} >= {cols} for an isometry")
    u = linalg.haar_unitary(total, rng)[:, :cols]
    return [u[m * rows : (m + 1) * rows, :] for m in range(num)]


def random_channel_class1(basis: IncompleteBasis, num_kraus: int, rng_seed: int) -> KrausChannel:
    """Constructive class-1 channel: P_m = D_m Pi_m, Q_m from a Haar isometry."""
    if num_kraus < 1:
        raise ValueError("num_kraus must be >= 1")
    rng = np.random.default_rng(rng_seed)
    n, d = basis.n, basis.dim
    perms = [rng.permutation(n) for _ in range(num_kraus)]
    # for each source index j, distribute weight 1 over the num_kraus operators
    weights = rng.dirichlet(np.ones(num_kraus), size=n).T  # (num_kraus, n)
    p_blocks = []
    for m in range(num_kraus):
        pm = np.zeros((n, n), dtype=np.complex128)
        phases = np.exp(2j * np.pi * rng.uniform(size=n))
        for j in range(n):
            pm[perms[m][j], j] = np.sqrt(weights[m, j]) * phases[j]
        p_blocks.append(pm)
    q_blocks = _sliced_isometry(d - n, d - n, num_kraus, rng)
    ops = []
    for pm, qm in zip(p_blocks, q_blocks):
        k = np.zeros((d, d), dtype=np.complex128)
        k[:n, :n] = pm
        k[n:, n:] = qm
        ops.append(basis.from_block_coords(k))
    return KrausChannel(d, np.array(ops))


def random_channel_class2(basis: IncompleteBasis, num_kraus: int, rng_seed: int) -> KrausChannel:
    """Constructive class-2 channel: bottom rows [R_m Q_m] sliced from a Haar isometry."""
    if num_kraus < 1:
        raise ValueError("num_kraus must be >= 1")
    rng = np.random.default_rng(rng_seed)
    n, d = basis.n, basis.dim
    bottoms = _sliced_isometry(d - n, d, num_kraus, rng)
    ops = []
    for bm in bottoms:
        k = np.zeros((d, d), dtype=np.complex128)
        k[n:, :] = bm
        ops.append(basis.from_block_coords(k))
    return KrausChannel(d, np.array(ops))
