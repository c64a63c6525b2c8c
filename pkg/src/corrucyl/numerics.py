"""Adaptive semi-infinite quadrature and convergent order sums.

Both routines are vectorized: integrands receive an array of wavenumbers
and order terms receive an array of orders, so one call evaluates many
quadrature nodes (or many orders) at once.  Integrands may be scalar- or
vector-valued (shape ``(n,)`` or ``(n, m)``); every component is controlled
to the same tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

FIXED = "fixed_multiple_of_decay_scale"
ADAPTIVE = "adaptive"

# Gauss-Kronrod 7/15 (QUADPACK qk15): abscissae on [0, 1) and weights.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[[9, 11, 13]] = _WG[2::-1]
GAUSS_WEIGHTS[7] = _WG[3]


@dataclass(frozen=True)
class NumericsConfig:
    """Tolerances and safety caps shared by every energy evaluation."""

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_order: int = 8192
    max_quad_depth: int = 60
    tail_cutoff_policy: str = FIXED
    cutoff_multiple: float = 40.0

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if self.max_order < 1:
            raise ValueError("max_order must be >= 1")
        if self.max_quad_depth < 1:
            raise ValueError("max_quad_depth must be >= 1")
        if self.tail_cutoff_policy not in (FIXED, ADAPTIVE):
            raise ValueError(f"unknown tail_cutoff_policy {self.tail_cutoff_policy!r}")
        if not self.cutoff_multiple > 0:
            raise ValueError("cutoff_multiple must be positive")

    def tighter(self, factor: float) -> "NumericsConfig":
        return replace(self, rel_tol=self.rel_tol / factor, abs_tol=self.abs_tol / factor)


DEFAULT_CONFIG = NumericsConfig()


@dataclass(frozen=True)
class ConvergenceReport:
    value: float
    estimated_error: float
    orders_used: int = 0
    quad_evaluations: int = 0
    converged: bool = True


class ConvergenceError(RuntimeError):
    """Raised when a sum or integral misses its tolerance; carries the partial report."""

    def __init__(self, message: str, report: ConvergenceReport | None = None):
        super().__init__(message)
        self.report = report


def _tolerance(values: np.ndarray, cfg: NumericsConfig) -> np.ndarray:
    return np.maximum(cfg.rel_tol * np.abs(values), cfg.abs_tol)


# ---------------------------------------------------------------------------
# order sums


@dataclass
class OrderSum:
    """Result of a vectorized order sum (arrays over the term's trailing shape)."""

    value: np.ndarray
    error: np.ndarray
    orders_used: int


def _weights(js: np.ndarray, primed: bool) -> np.ndarray:
    w = np.ones(js.shape)
    if primed:
        w[js == 0] = 0.5
    return w


def sum_orders_array(
    term: Callable[[np.ndarray], np.ndarray],
    primed: bool,
    cfg: NumericsConfig = DEFAULT_CONFIG,
    start: int = 16,
    two_sided: bool = False,
) -> OrderSum:
    """Sum ``term(j)`` over ``j = 0, 1, 2, ...`` until three consecutive terms are negligible.

    ``term`` receives an integer array of orders and returns an array whose
    first axis runs over those orders.  The order range doubles until the
    last three terms all fall below ``max(rel_tol*|partial|, abs_tol)``
    elementwise.  With ``primed`` the ``j = 0`` term carries weight 1/2.
    With ``two_sided`` the sum runs over all integers, ``term(0) +
    sum_{j>=1} [term(j) + term(-j)]``, each side evaluated separately.
    """
    jmax = max(3, min(int(start), cfg.max_order))
    while True:
        js = np.arange(jmax + 1)
        terms = np.asarray(term(js), dtype=float)
        if two_sided:
            neg = np.asarray(term(-js[1:]), dtype=float)
            terms = terms.copy()
            terms[1:] += neg
        w = _weights(js, primed).reshape((-1,) + (1,) * (terms.ndim - 1))
        weighted = terms * w
        total = weighted.sum(axis=0)
        last = np.abs(weighted[-3:])
        thr = _tolerance(total, cfg)
        if np.all(last <= thr):
            with np.errstate(divide="ignore", invalid="ignore"):
                q = np.where(last[-2] > 0, last[-1] / last[-2], 0.0)
            q = np.clip(np.nan_to_num(q, nan=0.0), 0.0, 0.99)
            error = last[-1] * (1.0 + q / (1.0 - q))
            return OrderSum(total, error, jmax)
        if jmax >= cfg.max_order:
            worst = float(np.max(last[-1]))
            report = ConvergenceReport(
                value=float(np.ravel(total)[0]),
                estimated_error=worst,
                orders_used=jmax,
                converged=False,
            )
            raise ConvergenceError(
                f"order sum not converged at max_order={cfg.max_order} "
                f"(last term {worst:.3e}); raise NumericsConfig.max_order",
                report,
            )
        jmax = min(2 * jmax, cfg.max_order)


def sum_orders(
    term: Callable[[np.ndarray], np.ndarray],
    primed: bool,
    cfg: NumericsConfig = DEFAULT_CONFIG,
    start: int = 16,
) -> ConvergenceReport:
    """Scalar front end to :func:`sum_orders_array`."""
    res = sum_orders_array(term, primed, cfg, start=start)
    value = float(np.ravel(res.value)[0])
    err = float(np.ravel(res.error)[0])
    return ConvergenceReport(value, err, orders_used=res.orders_used, converged=True)


# ---------------------------------------------------------------------------
# quadrature


@dataclass
class QuadResult:
    value: np.ndarray
    error: np.ndarray
    evaluations: int
    panels: int
    converged: bool


def _gk_panels(f, lo: np.ndarray, hi: np.ndarray):
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    k = (center[:, None] + half[:, None] * NODES[None, :]).ravel()
    vals = np.asarray(f(k), dtype=float)
    vals = vals.reshape((lo.size, 15) + vals.shape[1:])
    scale = half.reshape((-1,) + (1,) * (vals.ndim - 2))
    kron = np.tensordot(KRONROD_WEIGHTS, vals, axes=([0], [1])) * scale
    gauss = np.tensordot(GAUSS_WEIGHTS, vals, axes=([0], [1])) * scale
    return kron, np.abs(kron - gauss), k.size


def _initial_grid(breakpoints: Sequence[float], scale: float, cutoff: float) -> np.ndarray:
    pts = {0.0, cutoff}
    top = 0.0
    for b in breakpoints:
        if 0.0 < b < cutoff:
            pts.add(float(b))
            top = max(top, float(b))
    # geometric panels past the last kink so the decaying part starts resolved
    step = 0.25 * scale
    while top + step < cutoff:
        pts.add(top + step)
        step *= 2.0
    return np.array(sorted(pts))


def integrate_vector(
    f: Callable[[np.ndarray], np.ndarray],
    cfg: NumericsConfig = DEFAULT_CONFIG,
    breakpoints: Sequence[float] = (),
    decay_scale: float = 1.0,
) -> QuadResult:
    """Integrate a (vector-valued) ``f`` over ``[0, inf)``.

    ``f`` is assumed to decay at least like ``exp(-k/decay_scale)``.  The
    range is cut at ``cutoff_multiple * decay_scale`` past the last
    breakpoint and the dropped tail is bounded by ``|f(L)| * decay_scale``,
    which is added to the error estimate.  With the adaptive policy the
    cutoff doubles until that bound is itself negligible.
    """
    if not decay_scale > 0:
        raise ValueError("decay_scale must be positive")
    top_bp = max([0.0] + [float(b) for b in breakpoints])
    cutoff = top_bp + cfg.cutoff_multiple * decay_scale
    edges = _initial_grid(breakpoints, decay_scale, cutoff)
    lo, hi = edges[:-1], edges[1:]
    depth = np.zeros(lo.size, dtype=int)
    vals, errs, nev = _gk_panels(f, lo, hi)

    def tail_at(L):
        fl = np.asarray(f(np.array([L])), dtype=float)[0]
        return np.abs(fl) * decay_scale * 2.0

    tail = tail_at(cutoff)
    nev += 1
    converged = False
    for _ in range(10_000):
        total = vals.sum(axis=0)
        err = errs.sum(axis=0) + tail
        tol = _tolerance(total, cfg)
        if cfg.tail_cutoff_policy == ADAPTIVE and np.any(tail > 0.1 * tol):
            new_lo, new_hi = np.array([cutoff]), np.array([2.0 * cutoff])
            v, e, n = _gk_panels(f, new_lo, new_hi)
            lo, hi = np.append(lo, new_lo), np.append(hi, new_hi)
            depth = np.append(depth, 0)
            vals, errs = np.concatenate([vals, v]), np.concatenate([errs, e])
            cutoff *= 2.0
            tail = tail_at(cutoff)
            nev += n + 1
            continue
        if np.all(err <= tol):
            converged = True
            break
        # normalized panel error: worst component relative to its tolerance
        e_norm = (errs / tol).reshape(lo.size, -1).max(axis=1)
        order = np.argsort(-e_norm, kind="stable")
        budget = e_norm.sum() - 0.5
        cum = np.cumsum(e_norm[order])
        n_split = int(np.searchsorted(cum, 0.8 * max(budget, 0.0))) + 1
        chosen = order[:n_split]
        chosen = chosen[depth[chosen] < cfg.max_quad_depth]
        chosen = chosen[e_norm[chosen] > 0]
        if chosen.size == 0:
            break
        keep = np.ones(lo.size, dtype=bool)
        keep[chosen] = False
        mid = 0.5 * (lo[chosen] + hi[chosen])
        new_lo = np.concatenate([lo[chosen], mid])
        new_hi = np.concatenate([mid, hi[chosen]])
        v, e, n = _gk_panels(f, new_lo, new_hi)
        nev += n
        new_depth = np.concatenate([depth[chosen], depth[chosen]]) + 1
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        depth = np.concatenate([depth[keep], new_depth])
        vals = np.concatenate([vals[keep], v])
        errs = np.concatenate([errs[keep], e])
        # fixed left-to-right order keeps the final reduction deterministic
        idx = np.argsort(lo, kind="stable")
        lo, hi, depth, vals, errs = lo[idx], hi[idx], depth[idx], vals[idx], errs[idx]
    total = vals.sum(axis=0)
    err = errs.sum(axis=0) + tail
    return QuadResult(total, err, nev, lo.size, converged)


def integrate_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    cfg: NumericsConfig = DEFAULT_CONFIG,
    breakpoints: Sequence[float] = (),
    decay_scale: float = 1.0,
) -> ConvergenceReport:
    """Integrate a scalar integrand over ``[0, inf)``; see :func:`integrate_vector`.

    Raises :class:`ConvergenceError` (with the partial report attached) when
    the tolerance is not met within ``max_quad_depth`` bisections.
    """
    res = integrate_vector(f, cfg, breakpoints, decay_scale)
    report = ConvergenceReport(
        value=float(np.ravel(res.value)[0]),
        estimated_error=float(np.ravel(res.error)[0]),
        quad_evaluations=res.evaluations,
        converged=res.converged,
    )
    if not res.converged:
        raise ConvergenceError(
            f"quadrature not converged within max_quad_depth={cfg.max_quad_depth}", report
        )
    return report


def check_converged(res: QuadResult, what: str, orders_used: int = 0) -> None:
    if not res.converged:
        report = ConvergenceReport(
            float(np.ravel(res.value)[0]), float(np.max(res.error)), orders_used, res.evaluations, False
        )
        raise ConvergenceError(f"{what}: quadrature not converged", report)


