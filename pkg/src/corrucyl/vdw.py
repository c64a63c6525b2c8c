"""Non-retarded van der Waals energy of an anisotropic polarizable particle
outside a grounded, corrugated conducting cylinder.

All energies are reported in units of ``1/(8 pi eps0)``: multiply by that
prefactor (or its Gaussian-unit counterpart) to restore physical units.
The first-order lateral energy of a sinusoidal corrugation is

    U1 = delta * (C cos(k_c z0) + B sin(k_c z0)) = delta * A cos(k_c z0 - Delta),

with ``C`` collecting the diagonal dipole entries and ``B`` the single
cross entry that couples the normal to the corrugation direction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache

import numpy as np

from ._sums import LadderCache, OrderSummedIntegrand, component_report, integrate_orders
from .charge import CorrugationAxis
from .geometry import (
    ConstraintViolation,
    CylinderGeometry,
    Direction,
    FieldPoint,
    check_perturbative,
    mode_count,
)
from .numerics import DEFAULT_CONFIG, ConvergenceReport, NumericsConfig
from .special_functions import ik_product_ladder

# regime tolerance for inputs where B vanishes by symmetry / for swept numerical inputs
ANGLE_TOL_EXACT = 1e-6
ANGLE_TOL_SWEEP = 1e-3


@dataclass(frozen=True)
class ParticleOrientation:
    """Axis direction ``(theta, phi_o)`` in the local (rho, phi, z) frame and anisotropy ``beta``."""

    theta: float
    phi_o: float = 0.0
    beta: float = 0.2

    def __post_init__(self):
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must satisfy 0 < beta <= 1, got {self.beta!r}")
        if self.beta == 1.0:
            warnings.warn("beta = 1 is the isotropic particle; the orientation is irrelevant",
                          UserWarning, stacklevel=3)


@dataclass(frozen=True)
class DipoleTensor:
    """Symmetric tensor of dipole-fluctuation expectations in the (rho, phi, z) frame."""

    drho2: float
    dphi2: float
    dz2: float
    drho_dphi: float = 0.0
    drho_dz: float = 0.0
    dphi_dz: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if min(self.drho2, self.dphi2, self.dz2) < 0:
            raise ValueError("diagonal dipole entries must be >= 0")
        eig = np.linalg.eigvalsh(self.matrix())
        tol = 1e-12 * max(1.0, float(np.max(np.abs(eig))))
        if eig[0] < -tol:
            raise ValueError(f"dipole tensor is not positive semidefinite (eigenvalue {eig[0]:.3g})")

    def matrix(self) -> np.ndarray:
        return np.array([
            [self.drho2, self.drho_dphi, self.drho_dz],
            [self.drho_dphi, self.dphi2, self.dphi_dz],
            [self.drho_dz, self.dphi_dz, self.dz2],
        ])

    @property
    def trace(self) -> float:
        return self.drho2 + self.dphi2 + self.dz2

    def scaled(self, factor: float) -> "DipoleTensor":
        return DipoleTensor(*(factor * v for v in (self.drho2, self.dphi2, self.dz2, self.drho_dphi,
                                                   self.drho_dz, self.dphi_dz, self.scale)))


_QUARTER_TURNS = ((0.0, 1.0), (1.0, 0.0), (0.0, -1.0), (-1.0, 0.0))


def _sincos(x: float) -> tuple[float, float]:
    """``(sin x, cos x)``, exact when ``x`` is a multiple of pi/2 up to rounding.

    ``math.sin(math.pi)`` is 1.2e-16, which would leave a spurious cross
    correlation for an axis lying exactly along a frame direction.
    """
    n = round(x / (0.5 * math.pi))
    if abs(x - n * 0.5 * math.pi) <= 8 * np.finfo(float).eps * max(1.0, abs(x)):
        return _QUARTER_TURNS[n % 4]
    return math.sin(x), math.cos(x)


def dipole_from_orientation(o: ParticleOrientation, scale: float = 1.0) -> DipoleTensor:
    """Tensor of a cylindrically symmetric particle, ``scale*[beta*I + (1-beta) n n^T]``."""
    b = o.beta
    st, ct = _sincos(o.theta)
    sp, cp = _sincos(o.phi_o)
    c = 1.0 - b
    return DipoleTensor(
        drho2=scale * (b + c * st * st * cp * cp),
        dphi2=scale * (b + c * st * st * sp * sp),
        dz2=scale * (b + c * ct * ct),
        drho_dphi=scale * c * st * st * sp * cp,
        drho_dz=scale * c * st * ct * cp,
        dphi_dz=scale * c * st * ct * sp,
        scale=scale,
    )


# ---------------------------------------------------------------------------
# smooth cylinder


@dataclass(frozen=True)
class XiCoefficients:
    rho: float
    phi: float
    z: float
    report: ConvergenceReport

    def as_tuple(self) -> tuple[float, float, float]:
        return self.rho, self.phi, self.z


def _check_radii(a, rho0):
    if not a > 0:
        raise ValueError(f"a must be > 0, got {a!r}")
    if not rho0 > a:
        raise ValueError(f"rho0 must exceed a (got rho0={rho0!r}, a={a!r})")


def xi_term(a: float, rho0: float):
    """Folded summands ``I_j K_j(ka) * (D_j^2, j^2 F_j^2/rho0^2, k^2 F_j^2)``."""

    def term(k):
        lad = LadderCache(k, a, rho0)
        cache = {}

        def at(js):
            jmax = int(js.max())
            if jmax not in cache:
                F, D = lad.get(jmax)
                P = ik_product_ladder(k * a, jmax)
                j = np.arange(jmax + 1, dtype=float)[:, None]
                FF = P * F * F
                cache.clear()
                cache[jmax] = np.stack([P * D * D, j * j * FF / rho0**2, k * k * FF], axis=-1)
            return cache[jmax][js]

        return at

    return term


@lru_cache(maxsize=256)
def xi_coefficients(a: float, rho0: float, cfg: NumericsConfig = DEFAULT_CONFIG) -> XiCoefficients:
    """Smooth-cylinder coefficients ``(Xi_rho, Xi_phi, Xi_z)``; all three negative.

    ``Xi = -(4/pi) sum'_j int_0^inf I_j K_j(ka) * {D_j^2, j^2 F_j^2/rho0^2, k^2 F_j^2} dk``
    with ``F_j = K_j(k rho0)/K_j(ka)`` and ``D_j = dF_j/drho0``.
    """
    _check_radii(a, rho0)

    integrand = OrderSummedIntegrand(xi_term(a, rho0), cfg, primed=True)
    res, base = integrate_orders(integrand, cfg, [], 1.0 / (rho0 - a), "xi_coefficients")
    pref = -4.0 / math.pi
    vals = pref * res.value
    worst = component_report(res, base, int(np.argmax(res.error)), pref)
    return XiCoefficients(float(vals[0]), float(vals[1]), float(vals[2]), worst)


def u0_vdw(dipole: DipoleTensor, xi: XiCoefficients | tuple) -> float:
    """Smooth-cylinder energy ``Xi_rho<d_rho^2> + Xi_phi<d_phi^2> + Xi_z<d_z^2>``."""
    xr, xp, xz = xi.as_tuple() if isinstance(xi, XiCoefficients) else xi
    return xr * dipole.drho2 + xp * dipole.dphi2 + xz * dipole.dz2


# ---------------------------------------------------------------------------
# first-order coefficient functions


@dataclass(frozen=True)
class RFunctions:
    """First-order coefficient functions for one sinusoidal corrugation.

    ``cross`` is ``R_rho_z`` for an axial corrugation and ``R_rho_phi`` for
    an azimuthal one.
    """

    direction: CorrugationAxis
    rho_rho: float
    phi_phi: float
    zz: float
    cross: float
    report: ConvergenceReport

    def as_array(self) -> np.ndarray:
        return np.array([self.rho_rho, self.phi_phi, self.zz, self.cross])

    @classmethod
    def from_array(cls, direction, values, report) -> "RFunctions":
        return cls(CorrugationAxis(direction), *(float(v) for v in values), report)


def _finish(direction, res, base, prefactors):
    vals = np.asarray(prefactors) * res.value
    i = int(np.argmax(res.error * np.abs(prefactors)))
    return RFunctions.from_array(direction, vals, component_report(res, base, i, prefactors[i]))


def r_z_term(a: float, rho0: float, k_c: float):
    """Folded summands of :func:`r_functions_z` at shifted wavenumber ``q``."""
    h = 0.5 * k_c

    def term(q):
        lo, hi = LadderCache(np.abs(q - h), a, rho0), LadderCache(q + h, a, rho0)
        mid = LadderCache(q, a, rho0, derivative=False)
        up, down = LadderCache(q + k_c, a, rho0), LadderCache(np.abs(q - k_c), a, rho0)

        def at(js):
            jmax = int(js.max())
            Fl, Dl = lo.get(jmax)
            Fh, Dh = hi.get(jmax)
            Fm = mid.get(jmax)[0]
            Du, Dd = up.get(jmax)[1], down.get(jmax)[1]
            jj = js.astype(float)[:, None]
            FF = Fl[js] * Fh[js]
            return np.stack([
                Dl[js] * Dh[js],
                jj * jj * FF / rho0**2,
                (q * q - h * h) * FF,
                q * Fm[js] * (Du[js] - Dd[js]),
            ], axis=-1)

        return at

    return term


@lru_cache(maxsize=1024)
def r_functions_z(a: float, rho0: float, k_c: float, cfg: NumericsConfig = DEFAULT_CONFIG) -> RFunctions:
    """``(R_rho_rho, R_phi_phi, R_zz, R_rho_z)`` for ``h = delta cos(k_c z)``.

    With ``F_j(k) = K_j(|k| rho0)/K_j(|k| a)``, ``D_j = dF_j/drho0`` and
    ``h = k_c/2``, each is ``-(4/(pi a)) sum'_j int_0^inf`` of

    * ``D_j(k-h) D_j(k+h)``
    * ``j^2 F_j(k-h) F_j(k+h) / rho0^2``
    * ``(k^2 - h^2) F_j(k-h) F_j(k+h)``
    * ``k F_j(k) [D_j(k+k_c) - D_j(k-k_c)]``
    """
    _check_radii(a, rho0)
    if not k_c > 0:
        raise ValueError("k_c must be > 0")
    h = 0.5 * k_c
    integrand = OrderSummedIntegrand(r_z_term(a, rho0, k_c), cfg, primed=True)
    res, base = integrate_orders(integrand, cfg, [h, k_c], 1.0 / (rho0 - a), "r_functions_z")
    pref = -4.0 / (math.pi * a)
    return _finish(CorrugationAxis.Z, res, base, np.full(4, pref))


def r_phi_term(a: float, rho0: float, N: int):
    """Folded summands of :func:`r_functions_phi` (before prefactors)."""

    def term(k):
        lad = LadderCache(k, a, rho0)

        def at(js):
            F, D = lad.get(int(js.max()) + N)
            up, down = js + N, np.abs(js - N)
            jj = js.astype(float)[:, None]
            Fj = F[js]
            return np.stack([
                D[js] * (D[up] + D[down]),
                jj * Fj * ((jj + N) * F[up] + (jj - N) * F[down]) / rho0**2,
                k * k * Fj * (F[up] + F[down]),
                jj * Fj * (D[up] - D[down]),
            ], axis=-1)

        return at

    return term


@lru_cache(maxsize=1024)
def r_functions_phi(a: float, rho0: float, N: int, cfg: NumericsConfig = DEFAULT_CONFIG) -> RFunctions:
    """``(R_rho_rho, R_phi_phi, R_zz, R_rho_phi)`` for ``h = delta cos(N phi)``.

    Summands over ``j >= 0`` (primed) of ``int_0^inf dk``:

    * ``-(2/(pi a))  D_j [D_{j+N} + D_{j-N}]``
    * ``-(2/(pi a))  j F_j [(j+N) F_{j+N} + (j-N) F_{j-N}] / rho0^2``
    * ``-(2/(pi a))  k^2 F_j [F_{j+N} + F_{j-N}]``
    * ``-(4/(pi a rho0))  j F_j [D_{j+N} - D_{j-N}]``

    Negative orders reduce to ``|j-N|`` since ``K_{-n} = K_n``.
    """
    _check_radii(a, rho0)
    if int(N) != N or N < 1:
        raise ConstraintViolation(f"N must be a positive integer, got {N!r}")
    N = int(N)

    integrand = OrderSummedIntegrand(r_phi_term(a, rho0, N), cfg, primed=True, shift=N)
    res, base = integrate_orders(integrand, cfg, [], 1.0 / (rho0 - a), "r_functions_phi")
    p = -2.0 / (math.pi * a)
    return _finish(CorrugationAxis.PHI, res, base, np.array([p, p, p, 2.0 * p / rho0]))


# ---------------------------------------------------------------------------
# phase analysis


class Regime(str, Enum):
    PEAK = "peak"
    VALLEY = "valley"
    INTERMEDIATE = "intermediate"


@dataclass(frozen=True)
class RegimeResult:
    B: float
    C: float
    A: float
    delta: float
    regime: Regime
    report: ConvergenceReport
    degenerate: bool = False


def classify(delta: float, angle_tol: float = ANGLE_TOL_EXACT) -> Regime:
    if abs(delta) <= angle_tol:
        return Regime.VALLEY
    if abs(delta - math.pi) <= angle_tol or abs(delta + math.pi) <= angle_tol:
        return Regime.PEAK
    return Regime.INTERMEDIATE


def phase_analysis(dipole: DipoleTensor, r: RFunctions, direction: CorrugationAxis | str | None = None,
                   angle_tol: float = ANGLE_TOL_EXACT) -> RegimeResult:
    """Amplitude ``A`` and phase ``Delta`` with ``C cos x + B sin x = A cos(x - Delta)``.

    ``Delta = atan2(B, C)`` in (-pi, pi]; a vanishing ``B`` is taken as +0 so a
    negative ``C`` gives exactly ``pi``.  ``A = 0`` is flagged degenerate
    (no first-order lateral force) and reported with ``Delta = 0``.
    """
    if direction is not None and CorrugationAxis(direction) is not r.direction:
        raise ValueError(f"R-functions are for the {r.direction.value} direction, not {direction}")
    cross = dipole.drho_dz if r.direction is CorrugationAxis.Z else dipole.drho_dphi
    B = cross * r.cross
    C = dipole.drho2 * r.rho_rho + dipole.dphi2 * r.phi_phi + dipole.dz2 * r.zz
    if B == 0.0:
        B = 0.0
    A = math.hypot(B, C)
    degenerate = A == 0.0
    delta = 0.0 if degenerate else math.atan2(B, C)
    return RegimeResult(B, C, A, delta, classify(delta, angle_tol), r.report, degenerate)


def equilibrium_position(result: RegimeResult, k_c: float) -> float:
    """Stable position ``k_c z0 = Delta + pi`` folded into one period ``[0, 2 pi/k_c)``.

    ``U1 = delta A cos(k_c z0 - Delta)`` is smallest where the cosine is -1,
    so the particle rests over the peak (z0 = 0) for ``Delta = pi`` and over
    the valley (z0 = pi/k_c) for ``Delta = 0``.  For an azimuthal
    corrugation pass ``k_c = N`` to obtain ``phi0``.
    """
    period = 2.0 * math.pi / k_c
    return ((result.delta + math.pi) / k_c) % period


def _single_mode(geometry: CylinderGeometry):
    modes = [m for m in geometry.profile.modes if m.amplitude != 0.0]
    if len(modes) != 1 or geometry.profile.direction is Direction.MIXED:
        raise ValueError("the closed form needs a single sinusoidal mode along z or phi; "
                         "use u1_vdw_generic for other profiles")
    m = modes[0]
    if m.m_phi == 0:
        sign = 1.0 if m.k_z > 0 else -1.0
        return CorrugationAxis.Z, abs(m.k_z), sign * m.phase, m.amplitude
    sign = 1.0 if m.m_phi > 0 else -1.0
    return CorrugationAxis.PHI, abs(m.m_phi), sign * m.phase, m.amplitude


@dataclass(frozen=True)
class VdwEnergyResult:
    value: float
    phase: RegimeResult | None
    report: ConvergenceReport


def u1_vdw(geometry: CylinderGeometry, point: FieldPoint, dipole: DipoleTensor,
           cfg: NumericsConfig = DEFAULT_CONFIG) -> VdwEnergyResult:
    """First-order lateral energy ``delta A cos(x - Delta)`` for one sinusoidal mode.

    ``x = k_c z0 + phase`` along z, ``x = N phi0 + phase`` around the circumference.
    """
    d = point.standoff(geometry)
    axis, wave, psi, delta = _single_mode(geometry)
    if axis is CorrugationAxis.Z:
        check_perturbative(delta, d, wave)
        r = r_functions_z(float(geometry.a), float(point.rho), float(wave), cfg)
        x = wave * point.z + psi
    else:
        check_perturbative(delta, d, wave / geometry.a)
        r = r_functions_phi(float(geometry.a), float(point.rho), int(wave), cfg)
        x = wave * point.phi + psi
    res = phase_analysis(dipole, r)
    value = delta * res.A * math.cos(x - res.delta)
    rep = replace(res.report, value=value, estimated_error=delta * abs(res.report.estimated_error))
    return VdwEnergyResult(value, res, rep)


# ---------------------------------------------------------------------------
# generic kernels straight from the corrugation spectrum

KERNELS = ("rho_rho", "phi_phi", "zz", "rho_phi", "rho_z", "phi_z")
# kernels whose bracket carries an explicit factor i
_IMAGINARY = np.array([False, False, False, True, True, False])


def _kernel_term(a, rho, dj, dk):
    def term(q):
        base = LadderCache(q, a, rho)
        sides = [(s * q, LadderCache(np.abs(s * q - dk), a, rho)) for s in (1.0, -1.0)]

        def at(js):
            jmax = int(np.abs(js).max()) + abs(dj)
            F, D = base.get(jmax)
            j = js.astype(float)[:, None]
            jp = j - dj
            aj, ajp = np.abs(js), np.abs(js - dj)
            Fj, Dj = F[aj], D[aj]
            out = 0.0
            for k, cache in sides:
                Fs, Ds = cache.get(jmax)
                Fp, Dp = Fs[ajp], Ds[ajp]
                kp = k - dk
                FF = Fj * Fp
                out = out + np.stack([
                    Dj * Dp,
                    j * jp * FF / rho**2,
                    k * kp * FF,
                    (j * Fj * Dp - jp * Dj * Fp) / rho,
                    k * Fj * Dp - kp * Dj * Fp,
                    (kp * j + k * jp) * FF / rho,
                ], axis=-1)
            return out

        return at

    return term


def kernel_integrals(geometry: CylinderGeometry, point: FieldPoint,
                     cfg: NumericsConfig = DEFAULT_CONFIG) -> tuple[dict, ConvergenceReport]:
    """The six first-order kernels ``I_ab`` at ``point``, summed over the profile spectrum.

    Orders run over all integers and k over the whole real line, with no
    folding, so this is an independent check on the R-function forms.
    """
    a = geometry.a
    d = point.standoff(geometry)
    total = np.zeros(6)
    err = np.zeros(6)
    evals = orders = 0
    for dj, dk, c in geometry.profile.spectrum():
        integrand = OrderSummedIntegrand(_kernel_term(a, point.rho, dj, dk), cfg, primed=False,
                                         shift=abs(dj), two_sided=True)
        bps = [abs(dk)] if dk != 0 else []
        res, rep = integrate_orders(integrand, cfg, bps, 1.0 / d, "kernel_integrals")
        w = c * complex(math.cos(dk * point.z + dj * point.phi), math.sin(dk * point.z + dj * point.phi))
        w = np.where(_IMAGINARY, 1j * w, w)
        total += (w * res.value).real
        err += np.abs(w) * res.error
        evals += rep.quad_evaluations
        orders = max(orders, rep.orders_used)
    pref = -1.0 / (math.pi * a)
    vals = pref * total
    report = ConvergenceReport(float(vals[0]), float(np.max(np.abs(pref) * err)), orders, evals, True)
    return dict(zip(KERNELS, (float(v) for v in vals))), report


def u1_vdw_generic(geometry: CylinderGeometry, point: FieldPoint, dipole: DipoleTensor,
                   cfg: NumericsConfig = DEFAULT_CONFIG) -> VdwEnergyResult:
    """First-order energy from the six kernels contracted with the dipole tensor (any profile)."""
    kern, report = kernel_integrals(geometry, point, cfg)
    value = (dipole.drho2 * kern["rho_rho"] + dipole.dphi2 * kern["phi_phi"] + dipole.dz2 * kern["zz"]
             + dipole.drho_dphi * kern["rho_phi"] + dipole.drho_dz * kern["rho_z"]
             + dipole.dphi_dz * kern["phi_z"])
    return VdwEnergyResult(value, None, replace(report, value=value))


# ---------------------------------------------------------------------------
# corrugated-plane surrogate


class PlaneQuantity(str, Enum):
    C = "C"
    DELTA = "Delta"


@dataclass(frozen=True)
class PlaneReference:
    value: float
    radii: tuple[float, float]
    raw: tuple[float, float]
    low_confidence: bool
    phase: RegimeResult


def _r_at(direction, a, d, k_c, cfg):
    if direction is CorrugationAxis.Z:
        return r_functions_z(float(a), float(a + d), float(k_c), cfg)
    return r_functions_phi(float(a), float(a + d), mode_count(a, k_c), cfg)


def surrogate_radii(direction: CorrugationAxis | str, d: float, k_c: float,
                    a_big: float | None = None) -> tuple[float, float]:
    """``(a1, 2 a1)`` with ``a1 >= max(100 d, 100/k_c)``; along phi, ``k_c a1`` is rounded up to an integer."""
    direction = CorrugationAxis(direction)
    a1 = a_big if a_big is not None else max(100.0 * d, 100.0 / k_c)
    if direction is CorrugationAxis.PHI:
        a1 = math.ceil(k_c * a1 - 1e-9) / k_c
    return a1, 2.0 * a1


def plane_reference(quantity: PlaneQuantity | str, direction: CorrugationAxis | str, d: float, k_c: float,
                    dipole: DipoleTensor, cfg: NumericsConfig = DEFAULT_CONFIG,
                    a_big: float | None = None, tol: float = 0.01,
                    angle_tol: float = ANGLE_TOL_SWEEP) -> PlaneReference:
    """Flat-surface limit of ``C`` or ``Delta`` from two large radii.

    The R-functions behave as ``R(a) = R_inf + c/a`` for ``a >> d, 1/k_c``;
    evaluating at ``a1`` and ``a2 = 2 a1`` and eliminating ``c`` gives
    ``R_inf = (a2 R2 - a1 R1) / (a2 - a1)``.  The result is flagged
    ``low_confidence`` when it differs from the unextrapolated ``a2`` value
    by more than ``tol`` (relative to the summed magnitudes of the terms of C,
    or as a fraction of pi for Delta).
    """
    quantity = PlaneQuantity(quantity)
    direction = CorrugationAxis(direction)
    a1, a2 = surrogate_radii(direction, d, k_c, a_big)
    need = int(40.0 * a2 / d + k_c * a2 + 64)
    big = replace(cfg, max_order=max(cfg.max_order, need))
    r1, r2 = _r_at(direction, a1, d, k_c, big), _r_at(direction, a2, d, k_c, big)
    r_inf = (a2 * r2.as_array() - a1 * r1.as_array()) / (a2 - a1)
    r_inf = RFunctions.from_array(direction, r_inf, r2.report)

    def pick(r):
        res = phase_analysis(dipole, r, angle_tol=angle_tol)
        return res, res.C if quantity is PlaneQuantity.C else res.delta

    (_, q1), (_, q2), (phase, q_inf) = pick(r1), pick(r2), pick(r_inf)
    if quantity is PlaneQuantity.C:
        # relative to the size of the individual terms, not of C itself, which crosses zero
        size = abs(dipole.drho2 * r_inf.rho_rho) + abs(dipole.dphi2 * r_inf.phi_phi) + abs(dipole.dz2 * r_inf.zz)
        spread = abs(q_inf - q2) / max(size, 1e-300)
    else:
        spread = abs(math.remainder(q_inf - q2, 2 * math.pi)) / math.pi
    return PlaneReference(q_inf, (a1, a2), (q1, q2), spread > tol, phase)
