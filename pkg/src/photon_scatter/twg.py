"""Few-photon scattering in the linearized single-channel waveguide.

One, two, and three photons in the even channel of the high-energy
(linear-dispersion) regime: transmission phase, connected T-matrix
densities, structured S-matrices, fluorescence densities, and spatial
out-state wavefunctions.

All connected densities returned here carry the leading factor i, i.e.
they are the quantities added to the disconnected part when assembling
``S = 1 + iT`` matrix elements; Dirac deltas are handled structurally
through :class:`~photon_scatter.core.ScatteringAmplitudeSet`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from photon_scatter.core import (
    DeltaTerm,
    PinnedPairTerm,
    ScatteringAmplitudeSet,
    ToleranceError,
    TWGParams,
)

__all__ = [
    "transmission_amplitude",
    "two_photon_t",
    "two_photon_s",
    "TwoPhotonOutState",
    "two_photon_out_wavefunction",
    "two_photon_fluorescence",
    "three_photon_t",
    "three_photon_t_reference",
    "three_photon_s",
    "three_photon_fluorescence",
    "three_photon_out_wavefunction",
]

_ONSHELL_RTOL = 1e-10

# three-photon evaluator: outgoing momenta closer than _COINCIDENCE_RTOL
# (times the momentum scale) to an incoming one sit on a cancelled-pole
# line; they are evaluated as a symmetric split average at distance
# _SPLIT_STEP along a direction with zero component sum (stays on shell)
_COINCIDENCE_RTOL = 1e-4
_SPLIT_STEP = 1e-5
_SPLIT_DIR = np.array([1.0, -3.0, 2.0]) / np.sqrt(14.0)

_PERMS3 = tuple(itertools.permutations(range(3)))


def transmission_amplitude(params: TWGParams, k):
    """Single-photon transmission phase t_k = (k - alpha*)/(k - alpha).

    Unimodular for every real k; equals -1 exactly on resonance.
    """
    k = np.asarray(k, dtype=float)
    a = params.alpha
    t = (k - np.conj(a)) / (k - a)
    return t if t.ndim else complex(t)


def _require_on_shell(e_in, e_out) -> None:
    tol = _ONSHELL_RTOL * max(1.0, abs(e_in))
    if np.any(np.abs(np.asarray(e_out) - e_in) > tol):
        raise ValueError("outgoing momenta violate total-energy conservation")


def two_photon_t(params: TWGParams, k1: float, k2: float, p1, p2):
    """Connected two-photon T density (with the leading i) on the shell.

    Returns the smooth coefficient of delta(k1 + k2 - p1 - p2):

        i (gamma_t^2/pi) (E - 2 alpha) /
            [(p2 - alpha)(k1 - alpha)(p1 - alpha)(k2 - alpha)]

    p1, p2 may be arrays (elementwise on shell with k1 + k2).
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    e = k1 + k2
    _require_on_shell(e, p1 + p2)
    a = params.alpha
    g = params.gamma_t
    num = 1j * g**2 / np.pi * (e - 2.0 * a)
    den = (p2 - a) * (k1 - a) * (p1 - a) * (k2 - a)
    out = num / den
    return out if out.ndim else complex(out)


def two_photon_s(params: TWGParams, k1: float, k2: float) -> ScatteringAmplitudeSet:
    """Two-photon S-matrix: both delta pairings plus the connected density."""
    t12 = transmission_amplitude(params, k1) * transmission_amplitude(params, k2)

    def density(p1, p2):
        return two_photon_t(params, k1, k2, p1, p2)

    return ScatteringAmplitudeSet(
        total_energy=k1 + k2,
        disconnected=(DeltaTerm((k1, k2), t12), DeltaTerm((k2, k1), t12)),
        connected=density,
    )


@dataclass(frozen=True)
class TwoPhotonOutState:
    """Spatial out-state of a scattered photon pair.

    The full amplitude factorizes as ``exp(i E x_c) * envelope(x)`` in the
    center/relative coordinates; the envelope is the plane-wave part plus a
    bound term decaying in |x|.
    """

    params: TWGParams
    k1: float
    k2: float

    @property
    def total_energy(self) -> float:
        return self.k1 + self.k2

    @property
    def relative_momentum(self) -> float:
        return 0.5 * (self.k1 - self.k2)

    def plane_envelope(self, x):
        t12 = transmission_amplitude(self.params, self.k1) * transmission_amplitude(
            self.params, self.k2
        )
        return t12 * np.cos(self.relative_momentum * np.asarray(x)) / (2.0 * np.pi)

    def bound_envelope(self, x):
        x = np.asarray(x, dtype=float)
        g = self.params.gamma_t
        # E - 2 alpha = E - 2 Omega + i gamma_t
        w = self.total_energy - 2.0 * self.params.alpha
        dk = self.relative_momentum
        num = -4.0 * g**2 * np.exp(0.5j * w * np.abs(x))
        return num / (4.0 * dk**2 - w**2) / (2.0 * np.pi)

    def envelope(self, x):
        return self.plane_envelope(x) + self.bound_envelope(x)

    def __call__(self, x_center, x_relative):
        phase = np.exp(1j * self.total_energy * np.asarray(x_center))
        return phase * self.envelope(x_relative)


def two_photon_out_wavefunction(params: TWGParams, k1: float, k2: float, x_center, x_relative):
    """Out-state amplitude <x_c, x|out> for an incident (k1, k2) pair."""
    return TwoPhotonOutState(params, k1, k2)(x_center, x_relative)


def two_photon_fluorescence(params: TWGParams, k1: float, k2: float, p1):
    """Background fluorescence density |T2|^2 with p2 fixed by the shell."""
    p1 = np.asarray(p1, dtype=float)
    p2 = k1 + k2 - p1
    val = np.abs(two_photon_t(params, k1, k2, p1, p2)) ** 2
    return val if np.ndim(val) else float(val)


# ---------------------------------------------------------------------------
# three photons


def _fsum(k, p, alpha):
    """Permutation sum of the three rational families, vectorized over p.

    k is a 3-sequence of floats, p an array of shape (3, ...).  Individual
    (P, Q) terms have simple poles where an outgoing momentum meets an
    incoming one; the full sum cancels them, so callers must keep points
    off those lines (see three_photon_t for the regularized entry point).
    """
    k0, k1, k2 = (float(v) for v in k)
    kk = (k0, k1, k2)
    tot = np.zeros(np.shape(p[0]), dtype=complex)
    for perm_in in _PERMS3:
        w0, w1, w2 = kk[perm_in[0]], kk[perm_in[1]], kk[perm_in[2]]
        for perm_out in _PERMS3:
            q0 = p[perm_out[0]]
            q1 = p[perm_out[1]]
            q2 = p[perm_out[2]]
            tot += 1.0 / (
                (q0 - w0) * (q2 - w2) * (w0 - alpha) * (q2 - alpha) * (w0 + w1 - q0 - alpha)
            )
            tot += 1.0 / (
                (q1 - w1) * (q2 - w2) * (q1 - alpha) * (w2 - alpha) * (q1 + q0 - w1 - alpha)
            )
            tot += 1.0 / (
                (q1 - w1) * (q0 - w0) * (q0 - alpha) * (w1 - alpha) * (w1 + w2 - q1 - alpha)
            )
    return tot


def _t3_prefactor(params: TWGParams) -> complex:
    return 1j * params.gamma_t**3 / (3.0 * (2.0 * np.pi) ** 2)


def three_photon_t(params: TWGParams, k, p):
    """Connected three-photon T density (with the leading i) on the shell.

    Parameters
    ----------
    k : sequence of 3 floats
        Incoming momenta.
    p : sequence of 3 floats or arrays
        Outgoing momenta, elementwise on the shell sum(p) = sum(k).

    Notes
    -----
    Points where some p_j approaches some k_i lie on pole lines of the
    individual permutation terms that cancel in the sum; they are evaluated
    by a symmetric two-point split along a shell-preserving direction,
    accurate to ~1e-9 relative on single lines and degrading gracefully at
    multi-line crossings.
    """
    k = [float(v) for v in k]
    e = sum(k)
    p = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in p))
    shape = p[0].shape
    p = np.stack([c.ravel() for c in p])
    _require_on_shell(e, p.sum(axis=0))

    scale = max(1.0, params.gamma_t, abs(e) / 3.0)
    dmin = np.min(
        np.abs(p[None, :, :] - np.asarray(k, dtype=float)[:, None, None]), axis=(0, 1)
    )
    near = dmin < _COINCIDENCE_RTOL * scale

    vals = np.empty(p.shape[1], dtype=complex)
    alpha = params.alpha
    if np.any(~near):
        vals[~near] = _fsum(k, p[:, ~near], alpha)
    if np.any(near):
        h = _SPLIT_STEP * scale
        shift = h * _SPLIT_DIR[:, None]
        vals[near] = 0.5 * (
            _fsum(k, p[:, near] + shift, alpha) + _fsum(k, p[:, near] - shift, alpha)
        )
    out = _t3_prefactor(params) * vals
    out = out.reshape(shape)
    return out if out.ndim else complex(out)


def three_photon_t_reference(params: TWGParams, k, p) -> complex:
    """Literal permutation-sum evaluation of the connected three-photon T.

    Scalar-only reference path: the 36 (P, Q) terms of each of the three
    families are accumulated one by one exactly as printed, with no
    vectorization, no factoring, and no coincidence handling.  Used to
    validate the optimized evaluator on generic points.
    """
    k = [float(v) for v in k]
    p = [float(v) for v in p]
    _require_on_shell(sum(k), sum(p))
    a = params.alpha
    total = 0.0 + 0.0j
    for perm_in in _PERMS3:
        for perm_out in _PERMS3:
            w = [k[perm_in[0]], k[perm_in[1]], k[perm_in[2]]]
            wp = [p[perm_out[0]], p[perm_out[1]], p[perm_out[2]]]
            f1 = 1.0 / (
                (wp[0] - w[0]) * (wp[2] - w[2]) * (w[0] - a) * (wp[2] - a)
                * (w[0] + w[1] - wp[0] - a)
            )
            f2 = 1.0 / (
                (wp[1] - w[1]) * (wp[2] - w[2]) * (wp[1] - a) * (w[2] - a)
                * (wp[1] + wp[0] - w[1] - a)
            )
            f3 = 1.0 / (
                (wp[1] - w[1]) * (wp[0] - w[0]) * (wp[0] - a) * (w[1] - a)
                * (w[1] + w[2] - wp[1] - a)
            )
            total += f1 + f2 + f3
    return complex(_t3_prefactor(params) * total)


def three_photon_s(params: TWGParams, k) -> ScatteringAmplitudeSet:
    """Three-photon S-matrix in three connectedness tiers.

    Tier (a): six fully pinned permutations weighted t_{k1} t_{k2} t_{k3};
    tier (b): nine terms with one transmitted leg pinned into one outgoing
    slot and a connected two-photon density on the remaining pair;
    tier (c): the fully connected three-photon density.
    """
    k = [float(v) for v in k]
    e = sum(k)
    t = [complex(transmission_amplitude(params, v)) for v in k]
    tprod = t[0] * t[1] * t[2]

    disconnected = tuple(
        DeltaTerm((k[q[0]], k[q[1]], k[q[2]]), tprod) for q in _PERMS3
    )

    pinned = []
    for i in range(3):
        ka, kb = (k[m] for m in range(3) if m != i)

        def pair_density(pa, pb, ka=ka, kb=kb):
            return two_photon_t(params, ka, kb, pa, pb)

        for j in range(3):
            pinned.append(
                PinnedPairTerm(
                    slot=j,
                    value=k[i],
                    amplitude=t[i],
                    pair_energy=e - k[i],
                    density=pair_density,
                )
            )

    def connected(p1, p2, p3):
        return three_photon_t(params, k, (p1, p2, p3))

    return ScatteringAmplitudeSet(
        total_energy=e,
        disconnected=disconnected,
        pinned_pairs=tuple(pinned),
        connected=connected,
    )


def three_photon_fluorescence(params: TWGParams, k, p1, p2):
    """Background fluorescence density |T3|^2 on an outgoing slice.

    p1 and p2 parametrize the two-dimensional shell; p3 is fixed by energy
    conservation.  Both may be arrays.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    p3 = (float(k[0]) + float(k[1]) + float(k[2])) - p1 - p2
    val = np.abs(three_photon_t(params, k, (p1, p2, p3))) ** 2
    return val if np.ndim(val) else float(val)


# ---------------------------------------------------------------------------
# three-photon spatial out-state


def _pair_kernel(params: TWGParams, ka: float, kb: float, xa, xb):
    """Fourier transform of the connected pair density over its shell.

    Equals int dpa dpb  iT2(pa, pb; ka, kb) delta(pa + pb - ka - kb)
    e^{i(pa xa + pb xb)}, evaluated by contour integration.
    """
    a = params.alpha
    g = params.gamma_t
    e_pair = ka + kb
    beta = 0.5 * e_pair - a
    xa = np.asarray(xa, dtype=float)
    xb = np.asarray(xb, dtype=float)
    phase = np.exp(0.5j * e_pair * (xa + xb) + 1j * beta * np.abs(xa - xb))
    return 2.0 * g**2 * phase / ((ka - a) * (kb - a))


def _gl_rule(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


_GL_COARSE = _gl_rule(8)
_GL_FINE = _gl_rule(16)


def _panel_integrals(f, panels: np.ndarray):
    """Coarse and fine tensor Gauss-Legendre estimates on each panel.

    panels has rows (u0, u1, v0, v1); f maps flat (u, v) arrays to complex.
    Returns (fine integrals, error estimates) per panel.
    """
    out = []
    for nodes, weights in (_GL_FINE, _GL_COARSE):
        n = len(nodes)
        cu = 0.5 * (panels[:, 0] + panels[:, 1])
        hu = 0.5 * (panels[:, 1] - panels[:, 0])
        cv = 0.5 * (panels[:, 2] + panels[:, 3])
        hv = 0.5 * (panels[:, 3] - panels[:, 2])
        u = cu[:, None, None] + hu[:, None, None] * nodes[None, :, None]
        v = cv[:, None, None] + hv[:, None, None] * nodes[None, None, :]
        u, v = np.broadcast_arrays(u, v)
        vals = f(u.ravel(), v.ravel()).reshape(len(panels), n, n)
        out.append(hu * hv * np.einsum("i,j,pij->p", weights, weights, vals))
    fine, coarse = out
    return fine, np.abs(fine - coarse)


def _adaptive_quad_2d(f, half_window: float, rtol: float, atol: float, max_panels: int):
    """Adaptive panel quadrature of f over the square [-W, W]^2.

    Panels with the largest coarse/fine disagreement are quadrisected until
    the summed error estimate meets max(atol, rtol * |integral|).
    """
    n0 = 12
    edges = np.linspace(-half_window, half_window, n0 + 1)
    panels = np.array(
        [
            (edges[i], edges[i + 1], edges[j], edges[j + 1])
            for i in range(n0)
            for j in range(n0)
        ]
    )
    vals, errs = _panel_integrals(f, panels)
    while True:
        total = vals.sum()
        err = errs.sum()
        if err <= max(atol, rtol * abs(total)):
            return total, err, len(panels)
        if len(panels) > max_panels:
            raise ToleranceError(
                f"quadrature stalled at {len(panels)} panels: "
                f"error {err:.3e} vs target {max(atol, rtol * abs(total)):.3e}"
            )
        # quadrisect the worst eighth of the panels in one batch
        nsplit = max(1, len(panels) // 8)
        worst = np.argpartition(errs, -nsplit)[-nsplit:]
        keep = np.ones(len(panels), dtype=bool)
        keep[worst] = False
        children = []
        for u0, u1, v0, v1 in panels[worst]:
            um, vm = 0.5 * (u0 + u1), 0.5 * (v0 + v1)
            children += [
                (u0, um, v0, vm),
                (um, u1, v0, vm),
                (u0, um, vm, v1),
                (um, u1, vm, v1),
            ]
        children = np.array(children)
        child_vals, child_errs = _panel_integrals(f, children)
        panels = np.concatenate([panels[keep], children])
        vals = np.concatenate([vals[keep], child_vals])
        errs = np.concatenate([errs[keep], child_errs])


def three_photon_out_wavefunction(
    params: TWGParams,
    k,
    x,
    rtol: float = 1e-8,
    window: float | None = None,
    max_panels: int = 60000,
) -> complex:
    """Spatial out-state amplitude of three photons at positions x.

    Three analytic tiers share the prefactor 1/(6 (2 pi)^{3/2}): the fully
    disconnected symmetrized plane waves, the nine one-leg-transmitted terms
    with a pair bound/plane structure, and the fully connected part obtained
    by integrating the connected density over the two momentum degrees of
    freedom left by energy conservation (adaptive quadrature on a window of
    half-width ``window``, default 40 gamma_t, around the symmetric point).

    Raises
    ------
    ToleranceError
        If the quadrature cannot reach rtol within ``max_panels`` panels.
    """
    k = [float(v) for v in k]
    x = [float(v) for v in x]
    e = sum(k)
    t = [complex(transmission_amplitude(params, v)) for v in k]

    tier_a = 0.0j
    for q in _PERMS3:
        tier_a += np.exp(1j * (k[q[0]] * x[0] + k[q[1]] * x[1] + k[q[2]] * x[2]))
    tier_a *= t[0] * t[1] * t[2]

    tier_b = 0.0j
    for i in range(3):
        ka, kb = (k[m] for m in range(3) if m != i)
        for j in range(3):
            xa, xb = (x[m] for m in range(3) if m != j)
            tier_b += t[i] * np.exp(1j * k[i] * x[j]) * _pair_kernel(params, ka, kb, xa, xb)

    if window is None:
        window = 40.0 * params.gamma_t

    # The square window constrains the two integration slots to E/3 +- W
    # while the eliminated slot roams twice as far; averaging over the three
    # choices of eliminated slot makes the truncated region permutation
    # symmetric, so the wavefunction is exactly bosonic up to rtol.
    tier_c = 0.0j
    for s in range(3):
        xa, xb = (x[m] for m in range(3) if m != s)
        xs = x[s]

        def integrand(u, v, xa=xa, xb=xb, xs=xs):
            pa = e / 3.0 + u
            pb = e / 3.0 + v
            ps = e / 3.0 - u - v
            dens = three_photon_t(params, k, (pa, pb, ps))
            return dens * np.exp(1j * (pa * xa + pb * xb + ps * xs))

        val, _, _ = _adaptive_quad_2d(
            integrand, window, rtol=rtol, atol=1e-300, max_panels=max_panels
        )
        tier_c += val
    tier_c /= 3.0

    return complex((tier_a + tier_b + tier_c) / (6.0 * (2.0 * np.pi) ** 1.5))
