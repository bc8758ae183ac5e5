"""Chain-model single-photon scattering and bound states."""

import numpy as np
import pytest

from photon_scatter.core import TCRAParams
from photon_scatter.tcra import (
    bound_state_energies,
    bound_state_wavefunction,
    reflection_amplitude,
    self_energy,
    single_photon_s_matrix,
)


def _params(omega_atom=np.pi, omega_cavity=np.pi, hopping=1.0, coupling=1.0):
    return TCRAParams(omega_atom, omega_cavity, hopping, coupling)


def test_reflection_resonance_total():
    # atom on resonance with the band center: pure reflection
    r = reflection_amplitude(_params(), np.pi / 2)
    assert r == pytest.approx(-1.0)


def test_reflection_known_point():
    # omega0=pi, J=1, Omega=pi, V=1, k=pi/3: r = -i/(-sqrt(3) + i)
    r = reflection_amplitude(_params(), np.pi / 3)
    expected = -1j / (2 * np.sin(np.pi / 3) * (np.pi - 2 * np.cos(np.pi / 3) - np.pi) + 1j)
    assert r == pytest.approx(expected, abs=1e-15)
    assert abs(r) ** 2 == pytest.approx(0.25, abs=1e-14)


def test_reflection_decoupled():
    r = reflection_amplitude(_params(coupling=0.0), 1.1)
    assert r == 0.0


def test_reflection_unitarity_sweep():
    rng = np.random.default_rng(3)
    for _ in range(200):
        j = rng.uniform(0.5, 2.0)
        w0 = rng.uniform(2.0, 8.0)
        p = TCRAParams(w0 + rng.uniform(-2.5, 2.5) * j, w0, j, rng.uniform(0.1, 2.0))
        k = rng.uniform(0.02, np.pi - 0.02) * rng.choice([-1.0, 1.0])
        r = reflection_amplitude(p, k)
        assert abs(abs(1 + r) ** 2 + abs(r) ** 2 - 1.0) < 1e-12


def test_reflection_band_edge_refused():
    with pytest.raises(ValueError):
        reflection_amplitude(_params(), 0.0)
    with pytest.raises(ValueError):
        reflection_amplitude(_params(), np.pi)


def test_s_matrix_weights():
    s = single_photon_s_matrix(_params(), np.pi / 2)
    (fwd, bwd) = s.disconnected
    assert fwd.pinned == (np.pi / 2,) and bwd.pinned == (-np.pi / 2,)
    assert fwd.weight == pytest.approx(0.0, abs=1e-14)
    assert bwd.weight == pytest.approx(-1.0)
    assert s.connected_density(0.3) == 0.0
    s0 = single_photon_s_matrix(_params(coupling=0.0), 1.0)
    assert s0.disconnected[0].weight == pytest.approx(1.0)
    assert s0.disconnected[1].weight == pytest.approx(0.0)


def test_self_energy_inside_band():
    se = self_energy(_params(), np.pi)
    assert se.real_part == 0.0
    assert se.dos == pytest.approx(1.0)
    assert se.imag_part == pytest.approx(0.5)


def test_self_energy_outside_band():
    # omega = omega0 + 3J: Sigma = -1/(J sqrt(5))
    se = self_energy(_params(), np.pi + 3.0)
    assert se.imag_part == 0.0 and se.dos == 0.0
    assert se.real_part == pytest.approx(-1.0 / np.sqrt(5.0), rel=1e-14)
    below = self_energy(_params(), np.pi - 3.0)
    assert below.real_part == pytest.approx(1.0 / np.sqrt(5.0), rel=1e-14)


def test_self_energy_asymptotics_and_edge():
    assert abs(self_energy(_params(), 1e6).real_part) < 1e-5
    with pytest.raises(ValueError):
        self_energy(_params(), np.pi + 2.0)


def test_bound_state_closed_form():
    # Omega=omega0, J=1, gamma=1: (E-omega0)^2 = 2 + sqrt(5)
    lower, upper = bound_state_energies(_params())
    x = np.sqrt(2.0 + np.sqrt(5.0))
    assert upper.energy == pytest.approx(np.pi + x, abs=1e-12)
    assert lower.energy == pytest.approx(np.pi - x, abs=1e-12)
    assert lower.residual < 1e-12 and upper.residual < 1e-12
    # symmetric detuning: mirror images about omega0
    assert upper.energy + lower.energy == pytest.approx(2 * np.pi, abs=1e-12)


def test_bound_state_kappa():
    lower, upper = bound_state_energies(_params())
    assert lower.kappa == pytest.approx(0.786151, abs=1e-6)
    assert lower.decay_log == pytest.approx(-0.240606, abs=1e-6)
    # symmetric case: both branches decay equally fast
    assert upper.decay_log == pytest.approx(lower.decay_log, abs=1e-12)
    assert upper.sign_alternating and not lower.sign_alternating


def test_bound_state_detuned_and_small_gamma():
    rng = np.random.default_rng(5)
    for _ in range(20):
        p = TCRAParams(
            rng.uniform(2.0, 4.5),
            np.pi,
            rng.uniform(0.5, 1.5),
            rng.uniform(0.05, 1.5),
        )
        lower, upper = bound_state_energies(p)
        assert lower.energy < p.omega_cavity - 2 * p.hopping
        assert upper.energy > p.omega_cavity + 2 * p.hopping
        assert 0.0 < lower.kappa < 1.0 and 0.0 < upper.kappa < 1.0
    # weak coupling pushes both roots toward the band edges
    weak_lo, weak_up = bound_state_energies(_params(coupling=0.05))
    assert weak_up.energy - (np.pi + 2.0) < 1e-4
    assert (np.pi - 2.0) - weak_lo.energy < 1e-4


def test_wavefunction_profile():
    lower, upper = bound_state_energies(_params())
    x = np.arange(-6, 7)
    psi_lo = bound_state_wavefunction(lower, x)
    psi_up = bound_state_wavefunction(upper, x)
    assert psi_lo[6] == pytest.approx(lower.amplitude)
    # geometric decay site by site
    ratios = psi_lo[7:] / psi_lo[6:-1]
    assert np.allclose(ratios, lower.kappa, atol=1e-12)
    # upper branch alternates sign, lower does not
    assert np.all(psi_lo > 0)
    assert np.all(psi_up[6::2] > 0) and np.all(psi_up[7::2] < 0)
    assert np.allclose(np.abs(psi_up), np.abs(psi_up[::-1]), atol=1e-15)
    with pytest.raises(ValueError):
        bound_state_wavefunction(lower, 0.5)
