"""Cylinder, corrugation profile and field-point value types.

A corrugation is a finite list of real cosine modes

    h(phi, z) = sum_m  amplitude_m * cos(m_phi * phi + k_z * z + phase_m),

so its Fourier transform is a finite set of delta spikes and every
first-order integral over the spectrum collapses to a finite sum.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

# k_c * a is accepted as an integer when within this distance of one
INTEGER_TOL = 1e-9


class ConstraintViolation(ValueError):
    """Geometry violates a hard constraint (e.g. non-integer N = k_c * a)."""


class PerturbativeValidityWarning(UserWarning):
    """Parameters outside the regime where a first-order expansion is trustworthy."""


class Direction(str, Enum):
    AXIAL = "axial"
    AZIMUTHAL = "azimuthal"
    MIXED = "mixed"


@dataclass(frozen=True)
class Mode:
    m_phi: int
    k_z: float
    amplitude: float
    phase: float = 0.0

    def __post_init__(self):
        if int(self.m_phi) != self.m_phi:
            raise ConstraintViolation(f"azimuthal mode count must be an integer, got {self.m_phi!r}")
        object.__setattr__(self, "m_phi", int(self.m_phi))
        if self.amplitude < 0:
            raise ValueError("mode amplitude must be >= 0")


@dataclass(frozen=True)
class CorrugationProfile:
    modes: tuple[Mode, ...] = ()

    @property
    def direction(self) -> Direction:
        axial = any(m.k_z != 0 for m in self.modes)
        azimuthal = any(m.m_phi != 0 for m in self.modes)
        if axial and azimuthal:
            return Direction.MIXED
        return Direction.AZIMUTHAL if azimuthal else Direction.AXIAL

    @property
    def max_height(self) -> float:
        return sum(m.amplitude for m in self.modes)

    def __call__(self, phi, z):
        """Evaluate ``h(phi, z)`` (broadcasts over arrays)."""
        phi, z = np.broadcast_arrays(np.asarray(phi, float), np.asarray(z, float))
        h = np.zeros(phi.shape)
        for m in self.modes:
            h += m.amplitude * np.cos(m.m_phi * phi + m.k_z * z + m.phase)
        return h if h.ndim else float(h)

    def spectrum(self) -> list[tuple[int, float, complex]]:
        """Nonzero spectral weights ``(dj, dk, c)``, each cosine split into two exponentials."""
        out: list[tuple[int, float, complex]] = []
        for m in self.modes:
            if m.amplitude == 0.0:
                continue
            c = 0.5 * m.amplitude * cmath.exp(1j * m.phase)
            if m.m_phi == 0 and m.k_z == 0:
                # constant offset: both halves land on the same spike
                out.append((0, 0.0, 2 * c.real + 0j))
                continue
            out.append((m.m_phi, m.k_z, c))
            out.append((-m.m_phi, -m.k_z, c.conjugate()))
        return out


def h_fourier_coefficient(profile: CorrugationProfile, dj: int, dk: float, tol: float = 1e-12) -> complex:
    """Weight of the spectral spike of ``h`` at azimuthal shift ``dj`` and axial shift ``dk``.

    The full transform is ``2*pi * sum c * delta(k - k' - dk)`` restricted
    to ``j - j' = dj``; with the ``dk'/2pi`` measure of the first-order
    kernels only ``c`` survives.  For ``h = delta*cos(k_c z)`` this is
    ``delta/2`` at ``(0, +-k_c)`` and zero elsewhere.
    """
    total = 0j
    for sj, sk, c in profile.spectrum():
        if sj == dj and abs(sk - dk) <= tol * max(1.0, abs(dk)):
            total += c
    return total


@dataclass(frozen=True)
class CylinderGeometry:
    a: float
    profile: CorrugationProfile = field(default_factory=CorrugationProfile)

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"cylinder radius must be > 0, got {self.a!r}")

    @property
    def delta(self) -> float:
        return self.profile.max_height


@dataclass(frozen=True)
class FieldPoint:
    rho: float
    phi: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be > 0")
        object.__setattr__(self, "phi", float(self.phi) % (2 * math.pi))

    def standoff(self, geometry: CylinderGeometry) -> float:
        """``d = rho - a``; raises if the point is not outside the corrugated surface."""
        d = self.rho - geometry.a
        if d <= geometry.profile.max_height:
            raise ConstraintViolation(
                f"point at rho={self.rho} is not outside the corrugated surface "
                f"(a={geometry.a}, max|h|={geometry.profile.max_height})"
            )
        return d


def mode_count(a: float, k_c: float) -> int:
    """``N = k_c * a`` for an azimuthal corrugation; must be a positive integer."""
    n = k_c * a
    if n < 1 - INTEGER_TOL or abs(n - round(n)) > INTEGER_TOL * max(1.0, n):
        raise ConstraintViolation(
            f"azimuthal corrugation needs N = k_c*a to be a positive integer; got k_c*a = {n:g}"
        )
    return int(round(n))


def make_sinusoidal_z(a: float, delta: float, k_c: float) -> CylinderGeometry:
    """``h(z) = delta * cos(k_c z)``."""
    if not k_c > 0:
        raise ValueError("k_c must be > 0")
    if delta < 0:
        raise ValueError("delta must be >= 0")
    return CylinderGeometry(a, CorrugationProfile((Mode(0, float(k_c), float(delta)),)))


def make_sinusoidal_phi(a: float, delta: float, N: int) -> CylinderGeometry:
    """``h(phi) = delta * cos(N phi)``, i.e. wavenumber ``k_c = N/a`` along the circumference."""
    if int(N) != N or N < 1:
        raise ConstraintViolation(f"N must be a positive integer, got {N!r}")
    if delta < 0:
        raise ValueError("delta must be >= 0")
    return CylinderGeometry(a, CorrugationProfile((Mode(int(N), 0.0, float(delta)),)))


def make_sinusoidal_phi_kc(a: float, delta: float, k_c: float) -> CylinderGeometry:
    return make_sinusoidal_phi(a, delta, mode_count(a, k_c))


def check_perturbative(delta: float, d: float, k_c: float) -> None:
    """Warn when ``delta/d > 0.1`` or ``delta*k_c > 0.5``."""
    if d > 0 and delta / d > 0.1:
        warnings.warn(
            f"delta/d = {delta / d:.3g} > 0.1: first-order corrugation result may be unreliable",
            PerturbativeValidityWarning,
            stacklevel=3,
        )
    if delta * k_c > 0.5:
        warnings.warn(
            f"delta*k_c = {delta * k_c:.3g} > 0.5: first-order corrugation result may be unreliable",
            PerturbativeValidityWarning,
            stacklevel=3,
        )
