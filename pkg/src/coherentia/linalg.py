"""Dense complex linear algebra primitives for small Hilbert spaces (d <= 16).

Matrices and vectors are plain numpy arrays of dtype complex128.  The helpers
here enforce the structural invariants (Hermiticity, positivity, unit trace,
normalization) that the rest of the library relies on.
"""

from __future__ import annotations

import numpy as np

HERMITICITY_TOL = 1e-10
PSD_TOL = 1e-10
TRACE_TOL = 1e-10
NORM_TOL = 1e-10


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(np.float64))):
        raise ValueError("matrix contains non-finite entries")
    return m


def as_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d array, got shape {v.shape}")
    if not np.all(np.isfinite(v.view(np.float64))):
        raise ValueError("vector contains non-finite entries")
    return v


def check_state_vector(v, tol: float = NORM_TOL) -> np.ndarray:
    v = as_vector(v)
    norm2 = float(np.vdot(v, v).real)
    if abs(norm2 - 1.0) > tol:
        raise ValueError(f"state vector not normalized: |v|^2 = {norm2!r}")
    return v


def hermiticity_defect(m: np.ndarray) -> float:
    return float(np.abs(m - m.conj().T).max())


def check_hermitian(m, tol: float = HERMITICITY_TOL) -> np.ndarray:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix is not square: shape {m.shape}")
    defect = hermiticity_defect(m)
    if defect > tol:
        raise ValueError(f"matrix not Hermitian: max |M - M^dag| = {defect:.3e} > {tol:.1e}")
    return m


def check_density_matrix(
    m,
    herm_tol: float = HERMITICITY_TOL,
    psd_tol: float = PSD_TOL,
    trace_tol: float = TRACE_TOL,
) -> np.ndarray:
    """Validate Hermiticity, positivity and unit trace; returns the array."""
    m = check_hermitian(m, herm_tol)
    tr = float(np.trace(m).real)
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace = {tr!r}, expected 1")
    min_eig = float(np.linalg.eigvalsh(m)[0])
    if min_eig < -psd_tol:
        raise ValueError(f"density matrix not PSD: min eigenvalue = {min_eig:.3e}")
    return m


def repair_density(m: np.ndarray) -> np.ndarray:
    """Clip negative eigenvalues to zero and renormalize the trace.

    Only for explicit repair of optimizer output; never applied silently.
    """
    m = as_matrix(m)
    m = (m + m.conj().T) / 2
    vals, vecs = np.linalg.eigh(m)
    vals = np.clip(vals, 0.0, None)
    out = (vecs * vals) @ vecs.conj().T
    tr = float(np.trace(out).real)
    if tr <= 0:
        raise ValueError("cannot repair: non-positive trace after clipping")
    return out / tr


def eig_hermitian(m, tol: float = HERMITICITY_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues ascending, eigenvector matrix V) with m = V diag(w) V^dag.
    """
    m = check_hermitian(m, tol)
    vals, vecs = np.linalg.eigh(m)
    return vals, vecs


def trace_norm(m) -> float:
    """Schatten-1 norm: the sum of singular values."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"trace norm needs a square matrix, got shape {m.shape}")
    return float(np.linalg.svd(m, compute_uv=False).sum())


def partial_trace(joint, dims: tuple[int, int], keep: str) -> np.ndarray:
    """Trace out one tensor factor of a bipartite operator.

    dims = (dA, dB) with joint acting on C^dA (x) C^dB; keep is "A" or "B".
    """
    joint = as_matrix(joint)
    da, db = dims
    if joint.shape != (da * db, da * db):
        raise ValueError(f"joint dimension {joint.shape} incompatible with dims {dims}")
    t = joint.reshape(da, db, da, db)
    if keep == "A":
        return np.einsum("ikjk->ij", t)
    if keep == "B":
        return np.einsum("kikj->ij", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def fix_phase(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate a global phase so the first nonzero component is real positive."""
    for x in v:
        if abs(x) > tol:
            return v * (abs(x) / x)
    return v


def gram_matrix(vectors) -> np.ndarray:
    mat = np.asarray(vectors, dtype=np.complex128)
    return mat.conj() @ mat.T


def gram_schmidt(vectors, tol: float = 1e-10) -> list[np.ndarray]:
    """Orthonormalize a linearly independent list of vectors.

    The output keeps the span, is orthonormal to 1e-10, and each vector's
    first nonzero component is made real positive.
    """
    vecs = [as_vector(v) for v in vectors]
    if not vecs:
        return []
    gram = gram_matrix(vecs)
    rank = int(np.linalg.matrix_rank(gram, tol=1e-10))
    if rank < len(vecs):
        raise ValueError(f"input vectors linearly dependent: Gram rank {rank} < {len(vecs)}")
    out: list[np.ndarray] = []
    for v in vecs:
        w = v.copy()
        for u in out:
            w -= np.vdot(u, w) * u
        # second pass for numerical orthogonality
        for u in out:
            w -= np.vdot(u, w) * u
        nrm = float(np.linalg.norm(w))
        if nrm < tol:
            raise ValueError("vector annihilated during orthogonalization")
        out.append(fix_phase(w / nrm))
    return out


def orthogonal_complement_vector(vectors, tol: float = 1e-10) -> np.ndarray:
    """Unit vector orthogonal to d-1 linearly independent vectors in C^d.

    Phase fixed so the first nonzero component is real positive.
    """
    vecs = [as_vector(v) for v in vectors]
    d = len(vecs[0])
    if len(vecs) != d - 1:
        raise ValueError(f"need {d - 1} vectors in C^{d}, got {len(vecs)}")
    a = np.array(vecs).conj()  # rows <v_i|
    gram = a.conj() @ a.T
    if int(np.linalg.matrix_rank(gram, tol=1e-10)) < d - 1:
        raise ValueError("input vectors linearly dependent")
    # null space of A = eigenvector of A^dag A with smallest eigenvalue
    _, vecs_full = np.linalg.eigh(a.conj().T @ a)
    perp = vecs_full[:, 0]
    residual = float(np.abs(a @ perp).max())
    if residual > tol:
        raise ValueError(f"complement vector residual {residual:.3e} exceeds tolerance")
    return fix_phase(perp)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    phases = np.diagonal(r).copy()
    phases /= np.abs(phases)
    return q * phases


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """PSD-normalized Gaussian: rho = G G^dag / Tr(G G^dag)."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2
