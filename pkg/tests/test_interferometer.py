import numpy as np
import pytest

from coherentia import linalg
from coherentia.interferometer import (
    InterferometerConfig,
    build_povm,
    detector_state,
    distinguishability,
    joint_state,
    random_config,
    system_state,
    uqsd_n_state_bound,
    uqsd_two_state,
)

RNG = np.random.default_rng(20)


def orthonormal_config(amps):
    amps = np.asarray(amps, dtype=complex)
    return InterferometerConfig(amps / np.linalg.norm(amps), np.eye(4, dtype=complex))


def test_config_rejects_unnormalized_amplitudes():
    with pytest.raises(ValueError):
        InterferometerConfig(np.array([1, 1, 0, 0], complex), np.eye(4, dtype=complex))


def test_config_rejects_dependent_detectors():
    dets = np.eye(4, dtype=complex)
    dets[1] = dets[0]
    with pytest.raises(ValueError):
        InterferometerConfig(np.array([1, 0, 0, 0], complex), dets)


def test_reduced_states_match_partial_trace():
    for _ in range(200):
        cfg = random_config(RNG)
        psi = joint_state(cfg)
        joint = np.outer(psi, psi.conj())
        rho_q = linalg.partial_trace(joint, (4, 4), keep="A")
        rho_d = linalg.partial_trace(joint, (4, 4), keep="B")
        assert np.abs(system_state(cfg) - rho_q).max() < 1e-10
        assert np.abs(detector_state(cfg) - rho_d).max() < 1e-10


def test_povm_complete_and_positive():
    for _ in range(200):
        cfg = random_config(RNG)
        povm = build_povm(cfg)  # __post_init__ checks completeness / PSD / rank
        assert 0.0 < povm.c <= 1.0 + 1e-12


def test_povm_elements_annihilate_other_detectors():
    for _ in range(50):
        cfg = random_config(RNG)
        povm = build_povm(cfg)
        d = cfg.detector_states
        for v in (d[1], d[2], d[3]):
            assert np.abs(povm.a0 @ v).max() < 1e-8
        for v in (d[0], d[2], d[3]):
            assert np.abs(povm.a1 @ v).max() < 1e-8


def test_orthonormal_detectors_give_closed_form_distinguishability():
    for _ in range(50):
        amps = RNG.standard_normal(4) + 1j * RNG.standard_normal(4)
        cfg = orthonormal_config(amps)
        a, b, c, d = np.abs(cfg.amplitudes) ** 2
        res = distinguishability(cfg)
        assert abs(res.distinguishability - (a + b)) < 1e-10
        assert abs(res.discard_probability - (c + d)) < 1e-10
        assert abs(res.dbar - 1.0) < 1e-10
        if a + b > 1e-12:
            assert abs(res.gamma0 - a / (a + b)) < 1e-10


def test_degenerate_no_amplitude_through_controlled_slits():
    cfg = orthonormal_config([0, 0, 1, 1])
    res = distinguishability(cfg)
    assert res.degenerate
    assert res.distinguishability == 0.0


def test_identical_controlled_detectors_destroy_distinguishability():
    d0 = np.array([1, 0, 0, 0], complex)
    d1 = (d0 + 1e-5 * np.array([0, 1, 0, 0])).astype(complex)
    d1 /= np.linalg.norm(d1)
    dets = np.array([d0, d1, [0, 0, 1, 0], [0, 0, 0, 1]], dtype=complex)
    cfg = InterferometerConfig(np.array([1, 1, 0, 0], complex) / np.sqrt(2), dets)
    assert distinguishability(cfg).distinguishability < 1e-4


def test_effective_detector_state_is_a_state_on_the_perp_span():
    for _ in range(20):
        cfg = random_config(RNG)
        res = distinguishability(cfg)
        eff = res.effective_detector_state
        assert abs(np.trace(eff).real - 1.0) < 1e-10
        assert np.linalg.eigvalsh(eff)[0] > -1e-10
        assert np.linalg.matrix_rank(eff, tol=1e-10) <= 2


def test_uqsd_two_state_formula_grid():
    for p1 in np.linspace(0.0, 1.0, 10):
        for s in np.linspace(0.0, 1.0, 10):
            expected = min(max(1.0 - 2.0 * np.sqrt(p1 * (1 - p1)) * s, 0.0), 1.0)
            assert uqsd_two_state(p1, 1 - p1, s) == pytest.approx(expected, abs=0.0)


def test_uqsd_two_state_extremes():
    assert uqsd_two_state(0.5, 0.5, 0.0) == 1.0
    assert uqsd_two_state(0.5, 0.5, 1.0) == 0.0


def test_uqsd_n_state_bound_reduces_to_two_state():
    for p1 in np.linspace(0.05, 0.95, 7):
        for s in np.linspace(0.0, 0.9, 7):
            overlaps = np.array([[1.0, s], [s, 1.0]])
            two = 1.0 - 2.0 * np.sqrt(p1 * (1 - p1)) * s
            assert abs(uqsd_n_state_bound([p1, 1 - p1], overlaps) - two) < 1e-15


def test_distinguishability_outputs_within_unit_interval():
    for _ in range(200):
        cfg = random_config(RNG)
        res = distinguishability(cfg)
        for v in (res.gamma0, res.gamma1, res.dbar, res.discard_probability, res.distinguishability):
            assert -1e-9 <= v <= 1.0 + 1e-9
