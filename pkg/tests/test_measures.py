import numpy as np
import pytest

from coherentia import linalg
from coherentia.measures import (
    OptConfig,
    ctr,
    ctr_grid_oracle,
    ctr_unnormalized,
    minimal_completion_measure,
    normalization_factor,
    seed_measure_l1,
    seed_measure_relent,
)
from coherentia.resource import random_free_state, standard_basis

B42 = standard_basis(4, 2)
FAST = OptConfig(restarts=8, maxiter=2000)


def pure(amplitudes):
    v = np.asarray(amplitudes, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


def test_ctr_unnormalized_plus_state():
    # distance from (|0>+|1>)/sqrt(2) to the free set is exactly 1
    result = ctr_unnormalized(B42, pure([1, 1, 0, 0]), FAST)
    assert abs(result.value - 1.0) < 1e-6
    assert result.converged


def test_ctr_unnormalized_three_level_uniform():
    # (|0>+|1>+|2>)/sqrt(3) attains the global maximum 4/3
    result = ctr_unnormalized(B42, pure([1, 1, 1, 0]), FAST)
    assert abs(result.value - 4.0 / 3.0) < 1e-6


def test_ctr_normalized_values():
    assert abs(ctr(B42, pure([1, 1, 0, 0]), FAST).value - 0.75) < 1e-6
    assert abs(ctr(B42, pure([1, 1, 1, 0]), FAST).value - 1.0) < 1e-6


def test_ctr_cross_term_state():
    # coherence between the basis span and its complement is also a resource
    result = ctr_unnormalized(B42, pure([1, 0, 1, 0]), FAST)
    assert abs(result.value - 1.0) < 1e-6


def test_ctr_vanishes_on_free_states():
    for k in range(20):
        rho = random_free_state(B42, 700 + k)
        assert ctr_unnormalized(B42, rho, FAST).value < 1e-7


def test_ctr_bounded_by_one_after_normalization():
    rng = np.random.default_rng(10)
    for _ in range(20):
        rho = linalg.random_density_matrix(4, rng)
        assert ctr(B42, rho, FAST).value <= 1.0 + 1e-9


def test_normalization_factor_known_pair():
    assert abs(normalization_factor(4, 2) - 4.0 / 3.0) < 1e-12


def test_normalization_factor_validates_arguments():
    with pytest.raises(ValueError):
        normalization_factor(2, 2)
    with pytest.raises(ValueError):
        normalization_factor(3, 0)


def test_grid_oracle_agrees_with_multistart():
    rng = np.random.default_rng(11)
    for _ in range(5):
        rho = linalg.random_density_matrix(4, rng)
        nm = ctr_unnormalized(B42, rho, FAST).value
        grid = ctr_grid_oracle(B42, rho)
        assert abs(nm - grid) < 2e-2


def test_grid_oracle_near_zero_on_free_state():
    rho = random_free_state(B42, 42)
    assert ctr_grid_oracle(B42, rho, fine_step=1e-3) < 5e-3


def test_seed_measures_vanish_for_diagonal_states():
    full = np.eye(4, dtype=complex)
    rho = np.diag([0.4, 0.3, 0.2, 0.1]).astype(complex)
    assert seed_measure_l1(full, rho) < 1e-12
    assert seed_measure_relent(full, rho) < 1e-10


def test_seed_measure_l1_plus_state():
    full = np.eye(4, dtype=complex)
    assert abs(seed_measure_l1(full, pure([1, 1, 0, 0])) - 1.0) < 1e-12


def test_seed_measure_relent_pure_uniform():
    # relative entropy of coherence of a d-level uniform pure state is log2(d)
    full = np.eye(4, dtype=complex)
    assert abs(seed_measure_relent(full, pure([1, 1, 1, 1])) - 2.0) < 1e-8


def test_minimal_completion_never_exceeds_canonical_completion():
    rng = np.random.default_rng(12)
    for _ in range(5):
        rho = linalg.random_density_matrix(4, rng)
        canonical = np.vstack([B42.vectors, B42.complement_basis.T])
        direct = seed_measure_l1(canonical.T, rho)
        minimal = minimal_completion_measure(B42, rho, cfg=OptConfig(restarts=6)).value
        assert minimal <= direct + 1e-6


def test_minimal_completion_degenerate_single_missing_vector():
    basis = standard_basis(3, 2)
    psi = np.array([1, 1, 1], dtype=complex) / np.sqrt(3)
    rho = np.outer(psi, psi.conj())
    # with only one completion vector (up to phase) the measure is direct
    result = minimal_completion_measure(basis, rho)
    canonical = np.eye(3, dtype=complex)
    assert abs(result.value - seed_measure_l1(canonical, rho)) < 1e-9


def test_minimal_completion_zero_for_free_diagonal():
    rho = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
    assert minimal_completion_measure(B42, rho).value < 1e-8
