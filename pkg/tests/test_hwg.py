"""Two-channel scattering amplitudes, pair wavefunctions, correlations."""

import numpy as np
import pytest

from photon_scatter.core import HWGParams, TWGParams
from photon_scatter.hwg import (
    channel_amplitudes,
    pair_wavefunctions,
    second_order_correlation,
    two_photon_s_h,
    two_photon_t_h,
)
from photon_scatter.twg import transmission_amplitude, two_photon_t


def test_channel_unitarity_sweep():
    rng = np.random.default_rng(21)
    for _ in range(200):
        p = HWGParams(rng.uniform(0, 4), (rng.uniform(0.1, 3), rng.uniform(0.1, 3)))
        c = channel_amplitudes(p, rng.uniform(-5, 9))
        assert c.unitarity_defect() < 1e-12


def test_balanced_resonance_full_switch():
    p = HWGParams(1.0, (1.3, 1.3))
    c = channel_amplitudes(p, 1.0)
    assert abs(c.t11) < 1e-15
    assert abs(abs(c.t21) - 1.0) < 1e-15
    assert abs(c.t22) < 1e-15


def test_asymmetric_resonance_point():
    # vbar = (1, 2) at k = Omega: t11 = 3/5, t21 = -4/5
    c = channel_amplitudes(HWGParams(1.0, (1.0, 2.0)), 1.0)
    assert c.t11 == pytest.approx(3.0 / 5.0, abs=1e-15)
    assert c.t21 == pytest.approx(-4.0 / 5.0, abs=1e-15)
    assert abs(c.t11) ** 2 == pytest.approx(9.0 / 25.0, abs=1e-14)
    assert abs(c.t21) ** 2 == pytest.approx(16.0 / 25.0, abs=1e-14)


def test_decoupled_second_guide_reduces_to_single_channel():
    p = HWGParams(1.0, (1.2, 0.0))
    k = np.linspace(-2, 4, 50)
    c = channel_amplitudes(p, k)
    single = transmission_amplitude(TWGParams(1.0, 1.2**2), k)
    assert np.max(np.abs(c.t11 - single)) < 1e-14
    assert np.max(np.abs(c.t21)) == 0.0


def test_swap_covariance():
    k = np.linspace(-3, 5, 64)
    a = channel_amplitudes(HWGParams(0.7, (0.9, 2.1)), k)
    b = channel_amplitudes(HWGParams(0.7, (2.1, 0.9)), k)
    assert np.max(np.abs(a.t11 - b.t22)) < 1e-12
    assert np.max(np.abs(a.t22 - b.t11)) < 1e-12
    assert np.max(np.abs(a.t21 - b.t21)) < 1e-12


def test_two_photon_t_h_channel_prefactors():
    p = HWGParams(1.0, (1.0, 2.0))
    k1, k2, q1 = 1.2, 0.9, 1.05
    q2 = k1 + k2 - q1
    base = two_photon_t_h(p, (1, 2, 1, 1), k1, k2, q1, q2)
    # connected prefactor ratio between (1,1) and (2,2) outputs is (v1/v2)^2
    other = two_photon_t_h(p, (1, 2, 2, 2), k1, k2, q1, q2)
    assert other == pytest.approx(base * 4.0, rel=1e-14)
    # exchange symmetry in the incoming pair
    assert two_photon_t_h(p, (2, 1, 1, 1), k2, k1, q1, q2) == pytest.approx(
        base, rel=1e-14
    )
    with pytest.raises(ValueError):
        two_photon_t_h(p, (1, 2, 1, 1), k1, k2, q1, q2 + 0.1)
    with pytest.raises(ValueError):
        two_photon_t_h(p, (1, 2, 3, 1), k1, k2, q1, q2)


def test_two_photon_t_h_single_channel_limit():
    # second guide decoupled: all-1 channels reduce to the single-channel T
    p = HWGParams(1.0, (1.1, 0.0))
    w = TWGParams(1.0, 1.1**2)
    k1, k2, q1 = 1.3, 0.8, 1.0
    q2 = k1 + k2 - q1
    assert two_photon_t_h(p, (1, 1, 1, 1), k1, k2, q1, q2) == pytest.approx(
        two_photon_t(w, k1, k2, q1, q2), rel=1e-13
    )


def test_s_elements_structure():
    p = HWGParams(1.0, (1.0, 2.0))
    k1, k2 = 1.4, 0.7
    c1 = channel_amplitudes(p, k1)
    c2 = channel_amplitudes(p, k2)
    s = two_photon_s_h(p, k1, k2)
    assert set(s) == {(1, 1), (1, 2), (2, 2)}
    d11 = s[(1, 1)].disconnected
    assert all(t.weight == pytest.approx(c1.t11 * c2.t21, rel=1e-14) for t in d11)
    assert {t.pinned for t in d11} == {(k1, k2), (k2, k1)}
    d12 = s[(1, 2)].disconnected
    assert d12[0].pinned == (k1, k2)
    assert d12[0].weight == pytest.approx(c1.t11 * c2.t22, rel=1e-14)
    assert d12[1].pinned == (k2, k1)
    assert d12[1].weight == pytest.approx(c1.t21 * c2.t21, rel=1e-14)
    d22 = s[(2, 2)].disconnected
    assert all(t.weight == pytest.approx(c1.t21 * c2.t22, rel=1e-14) for t in d22)
    q1 = 1.0
    q2 = k1 + k2 - q1
    assert s[(1, 2)].connected_density(q1, q2) == pytest.approx(
        two_photon_t_h(p, (1, 2, 1, 2), k1, k2, q1, q2), rel=1e-14
    )


def test_pair_wavefunction_parity():
    p = HWGParams(1.0, (1.0, 2.0))
    g = pair_wavefunctions(p, 1.3, 0.9)
    x = np.linspace(0.1, 9.0, 40)
    assert np.max(np.abs(g.g11(x) - g.g11(-x))) < 1e-12
    assert np.max(np.abs(g.g22(x) - g.g22(-x))) < 1e-12
    # mixed channel keeps direct/exchange distinction: parity is broken
    assert np.max(np.abs(g.g12(x) - g.g12(-x))) > 1e-6


def test_pair_wavefunction_resonant_closed_forms():
    # vbar=(2,2), E=2, dk=0, Omega=1: g11 = -exp(-4|x|)/2pi,
    # g12 = (1 - 2 exp(-4|x|))/2pi
    p = HWGParams(1.0, (2.0, 2.0))
    g = pair_wavefunctions(p, 1.0, 1.0)
    x = np.linspace(-3, 3, 101)
    assert np.max(np.abs(g.g11(x) + np.exp(-4 * np.abs(x)) / (2 * np.pi))) < 1e-14
    expected12 = (1.0 - 2.0 * np.exp(-4 * np.abs(x))) / (2 * np.pi)
    assert np.max(np.abs(g.g12(x) - expected12)) < 1e-14
    # balanced couplings: |g11| = |g22| on resonance
    assert np.max(np.abs(np.abs(g.g11(x)) - np.abs(g.g22(x)))) < 1e-14


def test_bound_decay_rate():
    # on two-photon resonance every bound term decays at gamma_e/2
    p = HWGParams(1.0, (0.8, 1.7))
    g = pair_wavefunctions(p, 1.4, 0.6)  # E = 2 Omega
    x = np.linspace(1.0, 6.0 / p.gamma_e + 1.0, 80)
    slope = np.polyfit(x, np.log(np.abs(g._bound(x, 1.0))), 1)[0]
    assert slope == pytest.approx(-0.5 * p.gamma_e, abs=1e-6)


def test_correlation_identity_and_bunching():
    p = HWGParams(1.0, (2.0, 2.0))
    g = pair_wavefunctions(p, 1.0, 1.0)
    x = np.linspace(-4, 4, 81)
    assert np.array_equal(second_order_correlation(p, (1, 1), 1.0, 1.0, x), np.abs(g.g11(x)) ** 2)
    # bunching: center value exceeds the plateau
    center = second_order_correlation(p, (1, 1), 1.0, 1.0, 0.0)
    plateau = second_order_correlation(p, (1, 1), 1.0, 1.0, 60.0)
    assert center > plateau
    g2_12 = second_order_correlation(p, (1, 2), 1.0, 1.0, x)
    assert np.all(g2_12 >= 0.0)


def test_flattening_at_large_coupling_ratio():
    # strongly lopsided couplings wash out the bunching structure
    p = HWGParams(1.0, (1.0, 50.0))
    x = np.linspace(0.0, 10.0 / p.gamma_e, 200)
    vals = second_order_correlation(p, (1, 2), 1.0, 1.0, x)
    assert np.max(vals) / np.min(vals) < 1.1


def test_oscillation_at_nonzero_relative_momentum():
    p = HWGParams(1.0, (1.0, 1.0))
    g = pair_wavefunctions(p, 1.5, 0.5)  # E = 2 Omega, dk = 0.5
    x = np.linspace(0.0, 20.0, 400)
    vals = np.abs(g.g11(x)) ** 2
    inner = vals[1:-1]
    # interior local maximum exists
    assert np.any((inner > vals[:-2]) & (inner > vals[2:]))


def test_velocity_restriction():
    p = HWGParams(1.0, (1.0, 1.0), (1.0, 2.0))
    with pytest.raises(ValueError):
        pair_wavefunctions(p, 1.0, 1.0)
    with pytest.raises(ValueError):
        channel_amplitudes(p, 1.0)
