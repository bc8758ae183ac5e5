"""Acceptance suite: every primary claim of the package checked end to end.

Each criterion is a self-contained function returning (passed, details); the
registry drives both the ``validate`` CLI subcommand and the acceptance
tests.  Criteria either compare closed forms against an independent oracle
(finite lattice, ring sums, Bethe construction) or assert exact structural
properties (unitarity, symmetry, pole positions) at fixed tolerances.

Criterion functions are deterministic: random sweeps use fixed seeds.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import permutations
from typing import Callable

import numpy as np

from . import bethe, hwg, lattice_oracle, tcra, twg
from .core import HWGParams, TCRAParams, TWGParams


@dataclass(frozen=True)
class CriterionResult:
    """Outcome of one acceptance criterion run."""

    number: int
    title: str
    passed: bool
    details: str
    elapsed: float


# ---------------------------------------------------------------------------
# criterion implementations


def _criterion_single_photon_unitarity():
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(1000):
        w0 = rng.uniform(-1.0, 1.0)
        j = rng.uniform(0.3, 2.0)
        v = rng.uniform(0.2, 1.5)
        params = TCRAParams(
            omega_atom=w0 + rng.uniform(-2.5, 2.5) * j,
            omega_cavity=w0,
            hopping=j,
            coupling=v,
        )
        k = float(rng.uniform(0.05, np.pi - 0.05) * rng.choice((-1.0, 1.0)))
        r = tcra.reflection_amplitude(params, k)
        worst = max(worst, abs(abs(1.0 + r) ** 2 + abs(r) ** 2 - 1.0))
    return worst <= 1e-12, (
        f"max flux deficit {worst:.2e} over 1000 random (k, Omega, J, V) draws"
        f" (tol 1e-12)"
    )


def _criterion_bound_states():
    params = TCRAParams(omega_atom=0.0, omega_cavity=0.0, hopping=1.0, coupling=1.0)
    lower, upper = tcra.bound_state_energies(params)
    quartic = np.sqrt(2.0 + np.sqrt(5.0))
    dev_quartic = max(abs(lower.energy + quartic), abs(upper.energy - quartic))
    report = lattice_oracle.bound_state_check(
        lattice_oracle.LatticeModel(params=params, size=2001)
    )
    dev_energy = max(report.energy_residuals)
    dev_slope = max(report.slope_residuals)
    passed = (
        dev_quartic <= 1e-12
        and dev_energy <= 1e-6
        and dev_slope <= 1e-3
        and report.upper_sign_alternating
    )
    return passed, (
        f"quartic dev {dev_quartic:.2e} (tol 1e-12); L=2001 energy dev"
        f" {dev_energy:.2e} (tol 1e-6); envelope slope dev {dev_slope:.2e}"
        f" (tol 1e-3); upper branch alternates: {report.upper_sign_alternating}"
    )


def _criterion_total_reflection():
    params = TCRAParams(omega_atom=0.0, omega_cavity=0.0, hopping=1.0, coupling=1.0)
    model = lattice_oracle.LatticeModel(params=params, size=801)
    # band center hits the atom frequency: analytic transmission is zero
    run = lattice_oracle.wavepacket_scatter(model, np.pi / 2.0, 40.0)
    return run.transmission < 1e-2, (
        f"lattice wavepacket transmission {run.transmission:.2e} at resonance"
        f" (tol 1e-2, analytic 0)"
    )


def _criterion_waveguide_phase():
    params = TWGParams(omega_atom=0.7, gamma_t=1.3)
    k = params.omega_atom + np.linspace(-40.0, 40.0, 1000) * params.gamma_t
    dev = float(np.max(np.abs(np.abs(twg.transmission_amplitude(params, k)) - 1.0)))
    t_res = twg.transmission_amplitude(params, params.omega_atom)
    exact = t_res == -1.0
    return dev <= 1e-14 and exact, (
        f"max ||t_k| - 1| = {dev:.2e} on 1000-point grid (tol 1e-14);"
        f" t at resonance = {t_res} (exactly -1: {exact})"
    )


def _criterion_two_photon_out_state():
    params = TWGParams(omega_atom=0.2, gamma_t=0.3)
    om, g = params.omega_atom, params.gamma_t

    xs = np.linspace(0.05, 9.0, 40)
    psi = twg.two_photon_out_wavefunction(params, 0.13, 0.31, 0.45, xs)
    psi_neg = twg.two_photon_out_wavefunction(params, 0.13, 0.31, 0.45, -xs)
    dev_even = float(np.max(np.abs(psi - psi_neg)))

    xg = np.linspace(-8.0, 8.0, 161)
    xc = 0.37
    res = twg.two_photon_out_wavefunction(params, om, om, xc, xg)
    envelope = (1.0 - 4.0 * np.exp(-0.5 * g * np.abs(xg))) / (2.0 * np.pi)
    dev_env = float(np.max(np.abs(res * np.exp(-2j * om * xc) - envelope)))

    xf = np.linspace(0.5, 5.0, 20)
    bound = 1.0 / (2.0 * np.pi) - twg.two_photon_out_wavefunction(
        params, om, om, 0.0, xf
    )
    slope = np.polyfit(xf, np.log(np.abs(bound)), 1)[0]
    dev_decay = abs(-slope - 0.5 * g)

    rng = np.random.default_rng(105)
    dev_ring = 0.0
    for _ in range(10):
        xc_i = float(rng.uniform(-2.0, 2.0))
        xr_i = float(rng.uniform(0.3, 6.0))
        (k1s, k2s), ring = lattice_oracle.ring_two_photon_wavefunction(
            params, 0.15, 0.25, xc_i, xr_i, 601
        )
        ana = twg.two_photon_out_wavefunction(params, k1s, k2s, xc_i, xr_i)
        dev_ring = max(dev_ring, abs(ring - ana))

    passed = (
        dev_even <= 1e-12
        and dev_env <= 1e-12
        and dev_decay <= 1e-6
        and dev_ring <= 1e-3
    )
    return passed, (
        f"evenness dev {dev_even:.2e} (tol 1e-12); resonance envelope dev"
        f" {dev_env:.2e} (tol 1e-12); decay-rate dev {dev_decay:.2e} (tol 1e-6);"
        f" ring-sum dev {dev_ring:.2e} at 10 points, L=601 (tol 1e-3)"
    )


def _criterion_three_photon_t():
    params = TWGParams(omega_atom=1.0, gamma_t=1.0)
    rng = np.random.default_rng(106)

    dev_ref = 0.0
    for _ in range(100):
        k = tuple(1.0 + rng.uniform(-1.5, 1.5, 3))
        e = sum(k)
        p1, p2 = e / 3.0 + rng.uniform(-2.0, 2.0, 2)
        p = (float(p1), float(p2), e - float(p1) - float(p2))
        lit = twg.three_photon_t_reference(params, k, p)
        opt = complex(twg.three_photon_t(params, k, p))
        dev_ref = max(dev_ref, abs(lit - opt) / max(1.0, abs(lit)))

    dev_sym = 0.0
    for _ in range(5):
        k = tuple(1.0 + rng.uniform(-1.2, 1.2, 3))
        e = sum(k)
        p1, p2 = e / 3.0 + rng.uniform(-1.5, 1.5, 2)
        p = (float(p1), float(p2), e - float(p1) - float(p2))
        base = twg.three_photon_t_reference(params, k, p)
        for sig in permutations(range(3)):
            for tau in permutations(range(3)):
                val = twg.three_photon_t_reference(
                    params, tuple(k[i] for i in sig), tuple(p[i] for i in tau)
                )
                dev_sym = max(dev_sym, abs(val - base) / max(1.0, abs(base)))

    delta = np.linspace(0.05, 2.0, 50)
    slice_res = twg.three_photon_fluorescence(
        params, (1.0, 1.0, 1.0), 1.0 + delta, 1.0 - delta
    )
    slice_off = twg.three_photon_fluorescence(
        params, (0.5, 0.3, 2.2), 1.0 + delta, 1.0 - delta
    )
    enhanced = bool(np.all(slice_res > slice_off))

    passed = dev_ref <= 1e-10 and dev_sym <= 1e-12 and enhanced
    return passed, (
        f"literal-vs-simplified dev {dev_ref:.2e} at 100 on-shell points"
        f" (tol 1e-10); 36-relabeling dev {dev_sym:.2e} (tol 1e-12); resonant"
        f" fluorescence exceeds detuned slice pointwise: {enhanced}"
        f" (min ratio {float(np.min(slice_res / slice_off)):.2f})"
    )


def _criterion_three_photon_spatial():
    params = TWGParams(omega_atom=1.0, gamma_t=1.0)
    k = (1.0, 1.0, 1.0)
    # mirror ridge points carry identical probability here, so sample one side
    ridge = {}
    for s in (2.0, 3.0, 4.0, 5.0, 6.0):
        ridge[s] = (
            abs(twg.three_photon_out_wavefunction(params, k, (s, s, 0.0), rtol=1e-5))
            ** 2
        )
    origin = (
        abs(twg.three_photon_out_wavefunction(params, k, (0.0, 0.0, 0.0), rtol=1e-5))
        ** 2
    )
    best = max(ridge.values())
    passed = best > origin
    return passed, (
        f"ridge max {best:.4g} over x1=x2, |x1| in [2,6] vs origin {origin:.4g};"
        f" ridge profile {[round(v, 5) for v in ridge.values()]}"
    )


def _criterion_h_unitarity():
    rng = np.random.default_rng(108)
    worst = 0.0
    for _ in range(1000):
        v1, v2 = rng.uniform(0.2, 2.5, 2)
        params = HWGParams(omega_atom=float(rng.uniform(0.0, 2.0)), vbar=(v1, v2))
        k = params.omega_atom + float(rng.uniform(-5.0, 5.0)) * params.gamma_e
        c = hwg.channel_amplitudes(params, k)
        worst = max(
            worst,
            abs(abs(c.t11) ** 2 + abs(c.t21) ** 2 - 1.0),
            abs(abs(c.t22) ** 2 + abs(c.t21) ** 2 - 1.0),
        )

    equal = hwg.channel_amplitudes(HWGParams(omega_atom=1.0, vbar=(2.0, 2.0)), 1.0)
    res_ok = equal.t11 == 0.0 and abs(abs(equal.t21) - 1.0) <= 1e-15

    mixed = hwg.channel_amplitudes(HWGParams(omega_atom=1.0, vbar=(1.0, 2.0)), 1.0)
    dev_split = max(
        abs(abs(mixed.t11) ** 2 - 9.0 / 25.0), abs(abs(mixed.t21) ** 2 - 16.0 / 25.0)
    )

    passed = worst <= 1e-12 and res_ok and dev_split <= 1e-12
    return passed, (
        f"max flux deficit {worst:.2e} over 1000 draws (tol 1e-12); equal-coupling"
        f" resonance t11={equal.t11}, ||t21|-1|={abs(abs(equal.t21) - 1.0):.1e};"
        f" (1,2) split dev {dev_split:.2e} from (9/25, 16/25)"
    )


def _criterion_correlations():
    x = np.linspace(-6.0, 6.0, 241)

    params = HWGParams(omega_atom=1.0, vbar=(1.0, 2.0))
    wf = hwg.pair_wavefunctions(params, 1.0, 1.0)
    dev_identity = 0.0
    dev_even = 0.0
    for pair in ((1, 1), (1, 2), (2, 2)):
        g = wf.channel(pair)(x)
        soc = hwg.second_order_correlation(params, pair, 1.0, 1.0, x)
        dev_identity = max(dev_identity, float(np.max(np.abs(np.abs(g) ** 2 - soc))))
        if pair != (1, 2):
            dev_even = max(
                dev_even, float(np.max(np.abs(wf.channel(pair)(x) - wf.channel(pair)(-x))))
            )

    c1 = hwg.channel_amplitudes(params, 1.0)
    planes = {
        (1, 1): c1.t11 * c1.t21,
        (2, 2): c1.t21 * c1.t22,
        (1, 2): c1.t11 * c1.t22 + c1.t21 * c1.t21,
    }
    dev_decay = 0.0
    xa, xb = 0.4, 1.1
    for pair, plane in planes.items():
        g = wf.channel(pair)
        b1 = g(xa) - plane / (2.0 * np.pi)
        b2 = g(xb) - plane / (2.0 * np.pi)
        rate = -(np.log(abs(b2)) - np.log(abs(b1))) / (xb - xa)
        dev_decay = max(dev_decay, abs(rate - 0.5 * params.gamma_e))

    def indicator(vbar):
        p = HWGParams(omega_atom=1.0, vbar=vbar)
        g11 = hwg.pair_wavefunctions(p, 1.0, 1.0).g11
        return abs(g11(0.0)) ** 2 / abs(g11(10.0 / p.gamma_e)) ** 2

    bunching = indicator((2.0, 2.0))
    flat = indicator((1.0, 50.0))

    passed = (
        dev_identity <= 1e-15
        and dev_even <= 1e-15
        and dev_decay <= 1e-6
        and bunching > 1.0
        and abs(flat - 1.0) <= 0.1
    )
    return passed, (
        f"|g|^2 identity dev {dev_identity:.1e} (tol 1e-15); evenness dev"
        f" {dev_even:.1e}; bound decay-rate dev {dev_decay:.2e} (tol 1e-6);"
        f" bunching indicator {bunching:.3g} > 1; coupling-ratio-50 indicator"
        f" {flat:.4f} within 10% of 1"
    )


def _random_path_to(rng, n, target):
    """Random adjacent-transposition path from identity to target."""
    work = list(target)
    moves = []
    for _ in range(rng.integers(0, 7)):
        j = int(rng.integers(0, n - 1))
        work[j], work[j + 1] = work[j + 1], work[j]
        moves.append(j)
    prefix = []
    for pos in range(n):
        j = work.index(pos + 1)
        while j > pos:
            work[j - 1], work[j] = work[j], work[j - 1]
            prefix.append(j - 1)
            j -= 1
    return tuple(reversed(prefix)) + tuple(reversed(moves))


def _region_coefficients(state, params, x1, x2, shift):
    """Coefficients of the two plane-wave terms around (x1, x2)."""
    k1, k2 = state.momenta
    rows, rhs = [], []
    for xa, xb in ((x1, x2), (x1 - shift, x2)):
        rows.append(
            [np.exp(1j * (k1 * xa + k2 * xb)), np.exp(1j * (k2 * xa + k1 * xb))]
        )
        rhs.append(bethe.eigenstate_value(state, params, (xa, xb)))
    return np.linalg.solve(np.array(rows), np.array(rhs))


def _criterion_bethe_cross_checks():
    params = TWGParams(omega_atom=0.45, gamma_t=0.9)
    k = params.omega_atom + np.linspace(-25.0, 25.0, 1000) * params.gamma_t
    t = twg.transmission_amplitude(params, k)
    dev_phase = max(
        abs(bethe.single_phase(params, float(ki)) - ti) for ki, ti in zip(k, t)
    )

    rng = np.random.default_rng(110)
    dev_path = 0.0
    for n in (2, 3, 4):
        momenta = tuple(np.sort(rng.uniform(-1.5, 1.5, n)))
        state = bethe.BetheState(momenta=momenta, gamma=params.gamma_t)
        for target in permutations(range(1, n + 1)):
            ref = bethe.amplitude(state, target)
            for _ in range(2):
                path = _random_path_to(rng, n, target)
                reached, amp = bethe.transposition_path_amplitude(state, path)
                assert reached == target
                dev_path = max(dev_path, abs(amp - ref))

    # two-body phase pole in the pair detuning sits at twice the T2 pole
    gamma = params.gamma_t
    e_res = 2.0 * params.omega_atom
    d = np.linspace(0.35, 0.85, 7)
    inv_t2 = 1.0 / twg.two_photon_t(
        params, e_res / 2.0 + 0.3, e_res / 2.0 - 0.3, e_res / 2.0 + d, e_res / 2.0 - d
    )
    pair_roots = np.roots(np.polyfit(d, inv_t2, 2))
    pair_pole = pair_roots[np.argmin(pair_roots.imag)]
    inv_phase = 1.0 / (
        1.0 - np.array([bethe.two_body_phase(gamma, float(di), 0.0) for di in d])
    )
    phase_pole = np.roots(np.polyfit(d, inv_phase, 1))[0]
    dev_pole = abs(phase_pole - 2.0 * pair_pole)

    dev_coeff = 0.0
    for _ in range(10):
        k1 = params.omega_atom + float(rng.uniform(-2.0, 2.0)) * gamma
        k2 = k1 + float(rng.uniform(0.1, 2.0))
        state = bethe.BetheState(momenta=(k1, k2), gamma=gamma)
        t1 = twg.transmission_amplitude(params, k1)
        t2 = twg.transmission_amplitude(params, k2)
        shift = float(np.clip(1.2 / (k2 - k1), 0.4, 30.0))
        x_in = float(rng.uniform(-9.0, -5.0))
        c_in = _region_coefficients(
            state, params, x_in, x_in + float(rng.uniform(0.5, 3.0)), shift
        )
        c_mid = _region_coefficients(
            state, params, x_in, float(rng.uniform(0.5, 5.0)), shift
        )
        # x1 - shift must stay positive in the fully crossed region
        x_out = float(rng.uniform(0.5, 3.0))
        c_out = _region_coefficients(
            state, params, x_out, x_out + float(rng.uniform(0.5, 3.0)), 0.4
        )
        disc = twg.two_photon_s(params, k1, k2).disconnected
        dev_coeff = max(
            dev_coeff,
            abs(c_mid[0] / c_in[0] - t2),
            abs(c_mid[1] / c_in[1] - t1),
            abs(c_out[0] / c_in[0] - disc[0].weight),
            abs(c_out[1] / c_in[1] - disc[1].weight),
        )

    passed = (
        dev_phase <= 1e-15
        and dev_path <= 1e-12
        and dev_pole <= 1e-12
        and dev_coeff <= 1e-8
    )
    return passed, (
        f"single-phase vs t_k dev {dev_phase:.1e} (tol 1e-15); path-independence"
        f" dev {dev_path:.2e} for N<=4 (tol 1e-12); pole-doubling dev"
        f" {dev_pole:.2e} (tol 1e-12); N=2 region coefficients dev {dev_coeff:.2e}"
        f" at 10 points (tol 1e-8)"
    )


def _criterion_two_excitation_lattice():
    resonant = lattice_oracle.two_excitation_check(
        lattice_oracle.LatticeModel(
            params=TCRAParams(
                omega_atom=0.0, omega_cavity=0.0, hopping=1.0, coupling=1.0
            ),
            size=281,
        ),
        np.pi / 2.0,
        np.pi / 2.0,
    )
    detuned = lattice_oracle.two_excitation_check(
        lattice_oracle.LatticeModel(
            params=TCRAParams(
                omega_atom=0.0, omega_cavity=0.0, hopping=1.0, coupling=0.5
            ),
            size=281,
        ),
        2.2,
        2.2,
    )
    passed = resonant.bunching_indicator > 1.0 and abs(
        detuned.bunching_indicator - 1.0
    ) <= 0.1
    return passed, (
        f"resonant bunching indicator {resonant.bunching_indicator:.2f} > 1;"
        f" detuned indicator {detuned.bunching_indicator:.4f} within 10% of 1"
    )


_CheckFn = Callable[[], tuple[bool, str]]

CRITERIA: tuple[tuple[int, str, _CheckFn], ...] = (
    (1, "single-photon unitarity", _criterion_single_photon_unitarity),
    (2, "bound states vs lattice", _criterion_bound_states),
    (3, "total reflection at resonance", _criterion_total_reflection),
    (4, "waveguide transmission phase", _criterion_waveguide_phase),
    (5, "two-photon out-state", _criterion_two_photon_out_state),
    (6, "three-photon connected T", _criterion_three_photon_t),
    (7, "three-photon spatial preference", _criterion_three_photon_spatial),
    (8, "two-channel unitarity and split", _criterion_h_unitarity),
    (9, "pair correlations", _criterion_correlations),
    (10, "Bethe cross-checks", _criterion_bethe_cross_checks),
    (11, "two-excitation lattice dynamics", _criterion_two_excitation_lattice),
)


def run(numbers=None) -> list[CriterionResult]:
    """Run the selected acceptance criteria (all by default), never raising.

    A criterion that raises is reported as failed with the exception text in
    its details.
    """
    if numbers is not None:
        wanted = set(int(n) for n in numbers)
        unknown = wanted - {num for num, _, _ in CRITERIA}
        if unknown:
            raise ValueError(f"unknown criterion numbers: {sorted(unknown)}")
        selected = [c for c in CRITERIA if c[0] in wanted]
    else:
        selected = list(CRITERIA)

    results = []
    for number, title, check in selected:
        start = time.perf_counter()
        try:
            passed, details = check()
        except Exception as exc:  # noqa: BLE001 - reported, not swallowed
            passed, details = False, f"raised {type(exc).__name__}: {exc}"
        results.append(
            CriterionResult(
                number=number,
                title=title,
                passed=passed,
                details=details,
                elapsed=time.perf_counter() - start,
            )
        )
    return results


def format_report(results) -> str:
    """One pass/fail line per criterion plus a summary line."""
    lines = [
        f"[{'PASS' if r.passed else 'FAIL'}] criterion {r.number:2d}"
        f" ({r.elapsed:6.2f}s) {r.title}: {r.details}"
        for r in results
    ]
    failed = sum(1 for r in results if not r.passed)
    lines.append(
        f"{len(results) - failed}/{len(results)} criteria passed"
        + (f", {failed} FAILED" if failed else "")
    )
    return "\n".join(lines)
