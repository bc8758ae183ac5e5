"""Shared parameter records, dispersions, kinematics, and amplitude containers.

Conventions used throughout the package: the lattice spacing is 1, hbar = 1,
and in the linearized waveguide modules the group velocity is 1 so that
momentum and energy coincide for a right-moving photon.  Dirac deltas are
never sampled on a grid; scattering matrices are returned as a structured
split into delta-supported (disconnected) terms and a smooth connected
density, see :class:`ScatteringAmplitudeSet`.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "CosineBand",
    "LinearBand",
    "TCRAParams",
    "TWGParams",
    "HWGParams",
    "TwoPhotonKinematics",
    "DeltaTerm",
    "PinnedPairTerm",
    "ScatteringAmplitudeSet",
    "ToleranceError",
    "eo_mixing_matrix",
    "thread_count",
    "parallel_map",
]


class ToleranceError(RuntimeError):
    """A numerical procedure failed to reach its requested tolerance."""


# ---------------------------------------------------------------------------
# dispersion relations


@dataclass(frozen=True)
class CosineBand:
    """Tight-binding cosine band eps_k = omega_cavity - 2 J cos k.

    Parameters
    ----------
    omega_cavity : float
        Bare resonator frequency (band center).
    hopping : float
        Nearest-neighbor hopping J > 0.
    """

    omega_cavity: float
    hopping: float

    def __post_init__(self) -> None:
        if not self.hopping > 0.0:
            raise ValueError("hopping must be positive")

    @property
    def band_bottom(self) -> float:
        return self.omega_cavity - 2.0 * self.hopping

    @property
    def band_top(self) -> float:
        return self.omega_cavity + 2.0 * self.hopping

    def energy(self, k):
        """Band energy at momentum k, defined for k in (-pi, pi]."""
        k = np.asarray(k, dtype=float)
        if np.any(k <= -np.pi) or np.any(k > np.pi):
            raise ValueError("momentum outside the first Brillouin zone (-pi, pi]")
        return self.omega_cavity - 2.0 * self.hopping * np.cos(k)

    def group_velocity(self, k):
        """d eps / d k = 2 J sin k."""
        k = np.asarray(k, dtype=float)
        return 2.0 * self.hopping * np.sin(k)


@dataclass(frozen=True)
class LinearBand:
    """Linearized high-energy dispersion eps_k = v_g |k|."""

    group_velocity: float = 1.0

    def __post_init__(self) -> None:
        if not self.group_velocity > 0.0:
            raise ValueError("group velocity must be positive")

    def energy(self, k):
        return self.group_velocity * np.abs(np.asarray(k, dtype=float))


# ---------------------------------------------------------------------------
# parameter records


@dataclass(frozen=True)
class TCRAParams:
    """Atom-coupled resonator chain with the full cosine band.

    Parameters
    ----------
    omega_atom : float
        Two-level atom splitting.
    omega_cavity : float
        Resonator frequency.
    hopping : float
        Inter-cavity hopping J > 0.
    coupling : float
        Atom-cavity hybridization V >= 0 at the center site.

    Notes
    -----
    The single-photon decay scale is ``gamma = coupling**2``.
    """

    omega_atom: float
    omega_cavity: float
    hopping: float
    coupling: float

    def __post_init__(self) -> None:
        if not self.hopping > 0.0:
            raise ValueError("hopping must be positive")
        if self.coupling < 0.0:
            raise ValueError("coupling must be nonnegative")

    @property
    def gamma(self) -> float:
        return self.coupling**2

    @property
    def band(self) -> CosineBand:
        return CosineBand(self.omega_cavity, self.hopping)


@dataclass(frozen=True)
class TWGParams:
    """Linearized single-channel waveguide coupled to a two-level atom.

    ``gamma_t`` is the total atom decay rate into the even channel; the
    complex pole of every amplitude sits at ``alpha = omega_atom - i gamma_t/2``.
    """

    omega_atom: float
    gamma_t: float

    def __post_init__(self) -> None:
        if not self.gamma_t > 0.0:
            raise ValueError("gamma_t must be positive")

    @classmethod
    def from_coupling(cls, omega_atom: float, coupling: float) -> "TWGParams":
        # even-channel coupling is sqrt(2) V, so the rate is 2 V^2
        return cls(omega_atom, 2.0 * coupling**2)

    @property
    def alpha(self) -> complex:
        return self.omega_atom - 0.5j * self.gamma_t


@dataclass(frozen=True)
class HWGParams:
    """Two linearized waveguides sharing one two-level atom.

    Parameters
    ----------
    omega_atom : float
        Atom splitting.
    vbar : (float, float)
        Even-channel couplings of the two waveguides.
    group_velocity : (float, float), optional
        Group velocities (v1, v2); the spatial pair formulas require (1, 1).
    """

    omega_atom: float
    vbar: tuple[float, float]
    group_velocity: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self) -> None:
        if len(self.vbar) != 2 or len(self.group_velocity) != 2:
            raise ValueError("vbar and group_velocity must be pairs")
        if not (self.vbar[0] >= 0.0 and self.vbar[1] >= 0.0):
            raise ValueError("couplings must be nonnegative")
        if not (self.group_velocity[0] > 0.0 and self.group_velocity[1] > 0.0):
            raise ValueError("group velocities must be positive")
        if self.vbar[0] == 0.0 and self.vbar[1] == 0.0:
            raise ValueError("at least one coupling must be nonzero")

    @property
    def gamma_e(self) -> float:
        v1, v2 = self.group_velocity
        return self.vbar[0] ** 2 / v1 + self.vbar[1] ** 2 / v2

    @property
    def alpha_h(self) -> complex:
        return self.omega_atom - 0.5j * self.gamma_e


# ---------------------------------------------------------------------------
# kinematics


@dataclass(frozen=True)
class TwoPhotonKinematics:
    """Total/relative parametrization of a photon pair.

    ``total_energy = k1 + k2`` and ``relative_momentum = (k1 - k2)/2``; the
    conjugate positions are ``center = (x1 + x2)/2`` and
    ``relative = x1 - x2``.  Round-trips with the individual coordinates are
    exact up to floating rounding.
    """

    total_energy: float
    relative_momentum: float

    @classmethod
    def from_momenta(cls, k1: float, k2: float) -> "TwoPhotonKinematics":
        return cls(k1 + k2, 0.5 * (k1 - k2))

    @property
    def momenta(self) -> tuple[float, float]:
        e, dk = self.total_energy, self.relative_momentum
        return (0.5 * e + dk, 0.5 * e - dk)

    @staticmethod
    def positions_to_pair(x1: float, x2: float) -> tuple[float, float]:
        return (0.5 * (x1 + x2), x1 - x2)

    @staticmethod
    def pair_to_positions(center: float, relative: float) -> tuple[float, float]:
        return (center + 0.5 * relative, center - 0.5 * relative)


def eo_mixing_matrix(k: float) -> np.ndarray:
    """Even/odd mixing of the (a_k, a_{-k}) pair for k > 0.

    Rows are the (even, odd) combinations; the matrix is its own inverse
    up to transposition (real orthogonal).
    """
    if not k > 0.0:
        raise ValueError("parity decomposition is defined for k > 0")
    s = 1.0 / np.sqrt(2.0)
    return np.array([[s, s], [s, -s]])


# ---------------------------------------------------------------------------
# structured S-matrix values


@dataclass(frozen=True)
class DeltaTerm:
    """One fully pinned outgoing configuration with a complex weight.

    ``pinned`` lists the outgoing momentum forced into each slot; the term
    stands for ``weight * prod_i delta(p_i - pinned_i)`` in continuum
    normalization.
    """

    pinned: tuple[float, ...]
    weight: complex


@dataclass(frozen=True)
class PinnedPairTerm:
    """One outgoing slot pinned, the remaining pair carried by a density.

    Represents ``amplitude * delta(p_slot - value) * density(pa, pb) *
    delta(pa + pb - pair_energy)`` where (pa, pb) are the two outgoing
    momenta not in ``slot``.  Used by the three-photon assembly.
    """

    slot: int
    value: float
    amplitude: complex
    pair_energy: float
    density: Callable[..., complex]


@dataclass(frozen=True)
class ScatteringAmplitudeSet:
    """S-matrix element split by connectedness.

    ``disconnected`` carries products of single-photon amplitudes on fully
    delta-pinned configurations; ``pinned_pairs`` (three photons only)
    carries one pinned leg times a two-photon connected density; ``connected``
    is the smooth fully connected density multiplying the single overall
    energy delta ``delta(total_energy - sum p)``.  No Dirac delta is ever
    materialized numerically.
    """

    total_energy: float
    disconnected: tuple[DeltaTerm, ...]
    pinned_pairs: tuple[PinnedPairTerm, ...] = ()
    connected: Callable[..., complex] | None = None

    def connected_density(self, *momenta) -> complex:
        if self.connected is None:
            return 0.0j
        return self.connected(*momenta)


# ---------------------------------------------------------------------------
# parallel-map contract


def thread_count() -> int:
    """Worker count from PHOTON_SCATTER_THREADS, defaulting to 1."""
    raw = os.environ.get("PHOTON_SCATTER_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"PHOTON_SCATTER_THREADS must be an integer, got {raw!r}")
    return max(1, n)


def parallel_map(fn: Callable, items: Sequence, workers: int | None = None) -> list:
    """Map with optional threading; results in input order regardless of workers."""
    if workers is None:
        workers = thread_count()
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
