"""Unit point charge outside a grounded, corrugated conducting cylinder.

Energies are in Gaussian units for a unit charge.  The first-order lateral
energies factor as ``-(delta/(a*pi)) * cos(phase) * S`` where the lateral
sum ``S`` is positive and independent of the lateral coordinate; ``S`` is
cached so sweeps along z or phi cost one quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import special

from ._sums import LadderCache, OrderSummedIntegrand, integrate_orders
from .geometry import CylinderGeometry, FieldPoint, check_perturbative, mode_count
from .numerics import DEFAULT_CONFIG, ConvergenceReport, NumericsConfig
from .special_functions import ik_product_ladder, radial_ladders


@dataclass(frozen=True)
class ChargeEnergyResult:
    value: float
    normalized: float | None
    report: ConvergenceReport


class CorrugationAxis(str, Enum):
    Z = "z"
    PHI = "phi"


def _check_standoff(a, d):
    if not a > 0:
        raise ValueError(f"a must be > 0, got {a!r}")
    if not d > 0:
        raise ValueError(f"d must be > 0, got {d!r}")


def u0_term(a: float, rho: float):
    """Summand factory ``k -> (js -> I_j K_j(ka) F_j(k)^2)`` of the smooth-cylinder charge energy."""

    def term(k):
        cache = {}

        def at(js):
            jmax = int(js.max())
            if jmax not in cache:
                F, _ = radial_ladders(k, a, rho, jmax, derivative=False)
                cache.clear()
                cache[jmax] = ik_product_ladder(k * a, jmax) * F * F
            return cache[jmax][js]

        return at

    return term


def u0_charge(a: float, rho: float, cfg: NumericsConfig = DEFAULT_CONFIG) -> ChargeEnergyResult:
    """Image energy of a unit charge at radius ``rho`` from a smooth grounded cylinder.

    ``U0 = -(4/pi) sum'_j int_0^inf I_j(ka) K_j(ka) [K_j(k rho)/K_j(ka)]^2 dk``,
    the folded form of the two-sided sum and integral.  Always negative.
    """
    _check_standoff(a, rho - a)
    term = u0_term(a, rho)
    integrand = OrderSummedIntegrand(term, cfg, primed=True)
    res, report = integrate_orders(integrand, cfg, [], 1.0 / (rho - a), "u0_charge")
    value = -4.0 / math.pi * float(res.value)
    report = ConvergenceReport(value, 4.0 / math.pi * float(res.error), report.orders_used,
                               report.quad_evaluations, True)
    return ChargeEnergyResult(value, None, report)


def lateral_z_term(a: float, rho: float, k_c: float):
    """Folded summand ``F_j(k) [F_j(k + k_c) + F_j(|k - k_c|)]`` of :func:`lateral_sum_z`."""

    def term(k):
        here = LadderCache(k, a, rho, derivative=False)
        up = LadderCache(k + k_c, a, rho, derivative=False)
        down = LadderCache(np.abs(k - k_c), a, rho, derivative=False)

        def at(js):
            jmax = int(js.max())
            f0, f1, f2 = here.get(jmax)[0], up.get(jmax)[0], down.get(jmax)[0]
            return f0[js] * (f1[js] + f2[js])

        return at

    return term


def lateral_phi_term(a: float, rho: float, N: int):
    """Folded summand ``F_j [F_{j+N} + F_{|j-N|}]`` of :func:`lateral_sum_phi`."""

    def term(k):
        lad = LadderCache(k, a, rho, derivative=False)

        def at(js):
            F = lad.get(int(js.max()) + N)[0]
            return F[js] * (F[js + N] + F[np.abs(js - N)])

        return at

    return term


@lru_cache(maxsize=512)
def lateral_sum_z(a: float, d: float, k_c: float, cfg: NumericsConfig = DEFAULT_CONFIG) -> ConvergenceReport:
    """``S = sum_j int dk F_j(k) F_j(k + k_c)`` over all integers and all real k.

    ``F_j(k) = K_j(|k|(a+d)) / K_j(|k|a)``.  Evaluated on ``k >= 0`` as
    ``2 sum'_j int_0^inf F_j(k) [F_j(k+k_c) + F_j(|k-k_c|)] dk`` with a
    breakpoint at the kink ``k = k_c``.
    """
    _check_standoff(a, d)
    if not k_c > 0:
        raise ValueError("k_c must be > 0")
    integrand = OrderSummedIntegrand(lateral_z_term(a, a + d, k_c), cfg, primed=True)
    res, report = integrate_orders(integrand, cfg, [k_c], 1.0 / d, "lateral_sum_z")
    return ConvergenceReport(2.0 * float(res.value), 2.0 * float(np.max(res.error)),
                             report.orders_used, report.quad_evaluations, True)


@lru_cache(maxsize=512)
def lateral_sum_phi(a: float, d: float, N: int, cfg: NumericsConfig = DEFAULT_CONFIG) -> ConvergenceReport:
    """``S = sum_j int dk F_j(k) F_{j+N}(k)`` over all integers and all real k.

    Folded to ``2 sum'_j int_0^inf F_j [F_{j+N} + F_{|j-N|}] dk``.
    """
    _check_standoff(a, d)
    if int(N) != N or N < 1:
        raise ValueError("N must be a positive integer")
    N = int(N)
    integrand = OrderSummedIntegrand(lateral_phi_term(a, a + d, N), cfg, primed=True, shift=N)
    res, report = integrate_orders(integrand, cfg, [], 1.0 / d, "lateral_sum_phi")
    return ConvergenceReport(2.0 * float(res.value), 2.0 * float(np.max(res.error)),
                             report.orders_used, report.quad_evaluations, True)


def _lateral_result(S: ConvergenceReport, a, delta, cos_phase) -> ChargeEnergyResult:
    normalized = -cos_phase * S.value
    pref = delta / (a * math.pi)
    report = ConvergenceReport(pref * normalized, pref * abs(cos_phase) * S.estimated_error,
                               S.orders_used, S.quad_evaluations, S.converged)
    return ChargeEnergyResult(pref * normalized, normalized, report)


def u1_charge_z(a: float, d: float, k_c: float, z: float, delta: float,
                cfg: NumericsConfig = DEFAULT_CONFIG) -> ChargeEnergyResult:
    """First-order lateral energy for ``h(z) = delta cos(k_c z)``.

    ``U1 = -(delta/(a pi)) cos(k_c z) S`` with ``S`` from :func:`lateral_sum_z`;
    ``normalized`` is ``U1 / (delta/(a pi))``.
    """
    check_perturbative(delta, d, k_c)
    S = lateral_sum_z(float(a), float(d), float(k_c), cfg)
    return _lateral_result(S, a, delta, math.cos(k_c * z))


def u1_charge_phi(a: float, d: float, N: int, phi: float, delta: float,
                  cfg: NumericsConfig = DEFAULT_CONFIG) -> ChargeEnergyResult:
    """First-order lateral energy for ``h(phi) = delta cos(N phi)``."""
    check_perturbative(delta, d, N / a)
    S = lateral_sum_phi(float(a), float(d), int(N), cfg)
    return _lateral_result(S, a, delta, math.cos(N * phi))


def u1_plane(d: float, k_c: float, z: float, delta: float) -> ChargeEnergyResult:
    """Corrugated-plane reference ``-(delta/4) k_c^2 cos(k_c z) K_2(k_c d)`` (closed form)."""
    if not d > 0:
        raise ValueError("d must be > 0")
    value = -0.25 * delta * k_c * k_c * math.cos(k_c * z) * float(special.kv(2, k_c * d))
    return ChargeEnergyResult(value, None, ConvergenceReport(value, 0.0))


def curvature_ratio(direction: CorrugationAxis | str, a: float, d: float, k_c: float,
                    cfg: NumericsConfig = DEFAULT_CONFIG) -> float:
    """``U1_cylinder / U1_plane`` with the charge over a corrugation peak.

    For the azimuthal case ``k_c * a`` must be a positive integer.
    """
    direction = CorrugationAxis(direction)
    if direction is CorrugationAxis.Z:
        S = lateral_sum_z(float(a), float(d), float(k_c), cfg).value
    else:
        S = lateral_sum_phi(float(a), float(d), mode_count(a, k_c), cfg).value
    plane = 0.25 * k_c * k_c * float(special.kv(2, k_c * d))
    return S / (a * math.pi) / plane


def _generic_term(a, rho, dj, dk):
    """Two-sided first-order charge summand ``F_j(k) F_{j-dj}(k-dk)`` folded onto k >= 0."""

    def term(q):
        ks = (q, -q)
        shifted = [LadderCache(np.abs(k - dk), a, rho, derivative=False) for k in ks]
        base = LadderCache(q, a, rho, derivative=False)

        def at(js):
            jmax = int(np.abs(js).max()) + abs(dj)
            F = base.get(jmax)[0]
            out = 0.0
            for cache in shifted:
                Fs = cache.get(jmax)[0]
                out = out + F[np.abs(js)] * Fs[np.abs(js - dj)]
            return out

        return at

    return term


def u1_charge_generic(geometry: CylinderGeometry, point: FieldPoint,
                      cfg: NumericsConfig = DEFAULT_CONFIG) -> ChargeEnergyResult:
    """First-order energy for an arbitrary finite mode profile, straight from the spectrum.

    Sums over all integer orders and integrates over all real k with no use
    of the even-in-j / even-in-k symmetries the specialized routines rely
    on, so it doubles as their oracle.
    """
    a = geometry.a
    d = point.standoff(geometry)
    total = 0.0
    err = 0.0
    evals = orders = 0
    for dj, dk, c in geometry.profile.spectrum():
        shift = abs(dj)
        integrand = OrderSummedIntegrand(_generic_term(a, point.rho, dj, dk), cfg, primed=False,
                                         shift=shift, two_sided=True)
        bps = [abs(dk)] if dk != 0 else []
        res, rep = integrate_orders(integrand, cfg, bps, 1.0 / d, "u1_charge_generic")
        phase = c * complex(math.cos(dk * point.z + dj * point.phi), math.sin(dk * point.z + dj * point.phi))
        total += (phase * float(res.value)).real
        err += abs(phase) * float(np.max(res.error))
        evals += rep.quad_evaluations
        orders = max(orders, rep.orders_used)
    pref = -1.0 / (math.pi * a)
    value = pref * total
    delta = geometry.delta
    normalized = value / (delta / (a * math.pi)) if delta > 0 else None
    return ChargeEnergyResult(value, normalized,
                              ConvergenceReport(value, abs(pref) * err, orders, evals, True))
