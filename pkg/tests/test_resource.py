import numpy as np
import pytest

from coherentia import linalg
from coherentia.resource import (
    FreeStateParams,
    IncompleteBasis,
    KrausChannel,
    apply_channel,
    is_free_state,
    make_free_state,
    random_channel_class1,
    random_channel_class2,
    random_free_state,
    standard_basis,
    verify_class1,
    verify_class2,
)

B42 = standard_basis(4, 2)


def random_basis(rng, d, n):
    u = linalg.haar_unitary(d, rng)
    return IncompleteBasis(d, u[:, :n].T)


def test_basis_complement_is_orthonormal_and_orthogonal():
    rng = np.random.default_rng(0)
    for _ in range(20):
        basis = random_basis(rng, 5, 2)
        c = basis.complement_basis
        assert np.abs(c.conj().T @ c - np.eye(3)).max() < 1e-10
        assert np.abs(np.array(basis.vectors).conj() @ c).max() < 1e-10


def test_basis_rejects_complete_or_dependent_sets():
    with pytest.raises(ValueError):
        IncompleteBasis(2, np.eye(2, dtype=complex))
    with pytest.raises(ValueError):
        IncompleteBasis(3, np.array([[1, 0, 0], [1, 0, 0]], dtype=complex))


def test_make_free_state_passes_free_check():
    rng = np.random.default_rng(1)
    for k in range(50):
        basis = random_basis(rng, 4, 2)
        rho = random_free_state(basis, 100 + k)
        assert is_free_state(basis, rho, tol=1e-9)


def test_basis_coherent_state_fails_free_check():
    psi = np.array([1, 1, 0, 0], dtype=complex) / np.sqrt(2)
    report = is_free_state(B42, np.outer(psi, psi.conj()))
    assert not report and report.defects


def test_cross_block_coherence_fails_free_check():
    psi = np.array([1, 0, 1, 0], dtype=complex) / np.sqrt(2)
    assert not is_free_state(B42, np.outer(psi, psi.conj()))


def test_complement_coherence_stays_free():
    psi = np.array([0, 0, 1, 1], dtype=complex) / np.sqrt(2)
    assert is_free_state(B42, np.outer(psi, psi.conj()))


def test_class1_random_channels_verify_and_preserve_freeness():
    rng = np.random.default_rng(2)
    for k in range(30):
        basis = random_basis(rng, 4, 2)
        channel = random_channel_class1(basis, 3, 200 + k)
        assert verify_class1(basis, channel)
        rho = random_free_state(basis, 300 + k)
        assert is_free_state(basis, apply_channel(channel, rho), tol=1e-8)


def test_class2_random_channels_verify_and_preserve_freeness():
    rng = np.random.default_rng(3)
    for k in range(30):
        basis = random_basis(rng, 4, 2)
        channel = random_channel_class2(basis, 2, 400 + k)
        assert verify_class2(basis, channel)
        rho = random_free_state(basis, 500 + k)
        assert is_free_state(basis, apply_channel(channel, rho), tol=1e-8)


def test_identity_channel_is_class1_not_class2():
    channel = KrausChannel(4, np.eye(4, dtype=complex)[None])
    assert verify_class1(B42, channel)
    assert not verify_class2(B42, channel)


def test_swap_channel_is_neither_class():
    swap = np.eye(4, dtype=complex)[[2, 3, 0, 1]]
    channel = KrausChannel(4, swap[None])
    assert not verify_class1(B42, channel)
    assert not verify_class2(B42, channel)


def test_verifiers_invariant_under_kraus_reordering():
    rng = np.random.default_rng(4)
    basis = random_basis(rng, 4, 2)
    channel = random_channel_class1(basis, 3, 11)
    shuffled = KrausChannel(basis.dim, channel.kraus_ops[::-1].copy())
    assert verify_class1(basis, shuffled)


def test_apply_channel_preserves_trace_and_positivity():
    rng = np.random.default_rng(5)
    for k in range(20):
        basis = random_basis(rng, 4, 2)
        channel = random_channel_class2(basis, 2, 600 + k)
        rho = linalg.random_density_matrix(4, rng)
        out = apply_channel(channel, rho)
        assert abs(np.trace(out).real - 1.0) < 1e-10
        assert np.linalg.eigvalsh(out)[0] > -1e-10


def test_channel_completeness_enforced():
    bad = 0.9 * np.eye(4, dtype=complex)
    with pytest.raises(ValueError):
        KrausChannel(4, bad[None])


def test_free_params_validation():
    with pytest.raises(ValueError):
        FreeStateParams(1.5, np.array([0.5, 0.5]), np.eye(2, dtype=complex) / 2)
    with pytest.raises(ValueError):
        FreeStateParams(0.5, np.array([0.7, 0.7]), np.eye(2, dtype=complex) / 2)


def test_make_free_state_matches_block_form_in_frame_coords():
    rng = np.random.default_rng(6)
    basis = random_basis(rng, 5, 2)
    p = np.array([0.3, 0.7])
    block = linalg.random_density_matrix(3, rng)
    rho = make_free_state(basis, FreeStateParams(0.6, p, block))
    blk = basis.to_block_coords(rho)
    assert np.abs(blk[:2, :2] - 0.6 * np.diag(p)).max() < 1e-10
    assert np.abs(blk[2:, 2:] - 0.4 * block).max() < 1e-10
    assert np.abs(blk[:2, 2:]).max() < 1e-10
