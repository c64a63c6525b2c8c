"""Shared plumbing: nest an order sum inside a k-quadrature and report both."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .numerics import (
    ConvergenceError,
    ConvergenceReport,
    NumericsConfig,
    QuadResult,
    integrate_vector,
    sum_orders_array,
)
from .special_functions import radial_ladders

# inner order sums run this much tighter than the outer integral
INNER_FACTOR = 100.0
# nodes per ladder evaluation, shrunk so orders x nodes stays under CHUNK_ELEMENTS
CHUNK = 256
CHUNK_ELEMENTS = 1 << 20


class LadderCache:
    """Radial ladders at fixed wavenumbers, grown on demand."""

    def __init__(self, k: np.ndarray, a: float, rho: float, derivative: bool = True):
        self.k, self.a, self.rho, self.derivative = k, a, rho, derivative
        self.jmax = -1
        self.F = self.D = None

    def get(self, jmax: int):
        if jmax > self.jmax:
            self.F, self.D = radial_ladders(self.k, self.a, self.rho, jmax, self.derivative)
            self.jmax = jmax
        return self.F, self.D


class OrderSummedIntegrand:
    """``k -> sum_j term(k, js)`` with the order range remembered between calls.

    ``term(k, js)`` returns an array of shape ``(len(js), n, ...)`` for the
    (possibly negative) orders ``js``.  ``shift`` is the largest order offset
    the summand uses (``N`` for azimuthal corrugations); summation always
    starts past it so the three-small-terms test is not fooled by the
    rising part of the summand.
    """

    def __init__(self, term, cfg: NumericsConfig, primed: bool = True, shift: int = 0,
                 two_sided: bool = False):
        self.term = term
        self.cfg = cfg.tighter(INNER_FACTOR)
        self.primed = primed
        self.shift = shift
        self.two_sided = two_sided
        self.start = 16 + shift
        self.orders_used = 0

    def __call__(self, k: np.ndarray) -> np.ndarray:
        chunk = max(8, min(CHUNK, CHUNK_ELEMENTS // (2 * self.start + 1)))
        if k.size > chunk:
            parts = [self(k[i:i + chunk]) for i in range(0, k.size, chunk)]
            return np.concatenate(parts, axis=0)
        state = self.term(k)
        res = sum_orders_array(state, self.primed, self.cfg, start=self.start,
                               two_sided=self.two_sided)
        self.start = max(16 + self.shift, res.orders_used // 2)
        self.orders_used = max(self.orders_used, res.orders_used)
        return res.value


def integrate_orders(
    integrand: OrderSummedIntegrand,
    cfg: NumericsConfig,
    breakpoints: Sequence[float],
    decay_scale: float,
    what: str,
) -> tuple[QuadResult, ConvergenceReport]:
    """Run the quadrature; raise ConvergenceError with a partial report on failure."""
    try:
        res = integrate_vector(integrand, cfg, breakpoints, decay_scale)
    except ConvergenceError as exc:
        raise ConvergenceError(f"{what}: {exc}", exc.report) from exc
    report = ConvergenceReport(
        value=float(np.ravel(res.value)[0]),
        estimated_error=float(np.max(res.error)),
        orders_used=integrand.orders_used,
        quad_evaluations=res.evaluations,
        converged=res.converged,
    )
    if not res.converged:
        raise ConvergenceError(f"{what}: quadrature not converged", report)
    return res, report


def component_report(res: QuadResult, base: ConvergenceReport, i: int, scale: float = 1.0) -> ConvergenceReport:
    return ConvergenceReport(
        value=float(res.value[i] * scale),
        estimated_error=float(res.error[i] * abs(scale)),
        orders_used=base.orders_used,
        quad_evaluations=base.quad_evaluations,
        converged=base.converged,
    )
