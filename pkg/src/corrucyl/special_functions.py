r"""Integer-order modified Bessel functions in a form that survives the
extreme ratios appearing in cylinder Green's functions.

Two layers live here.

Scalar functions (:func:`bessel_i`, :func:`bessel_k`, :func:`k_ratio`, ...)
take a single order and argument.  They use scipy's exponentially scaled
kernels ``ive``/``kve`` where those are representable and fall back to log
space otherwise, so :func:`log_bessel_k` is finite for any order up to the
cap and any positive argument.

Ladder functions (:func:`k_ratio_ladder`, :func:`k_dlog_ladder`,
:func:`ik_product_ladder`) return every order ``0..jmax`` at once on an
array of arguments.  They are built on the ratio

.. math::
    r_j(x) = K_{j+1}(x) / K_j(x), \qquad r_j = 1/r_{j-1} + 2j/x,

which is a sum of positive terms and therefore free of cancellation.
Ratios of the form :math:`K_j(x_1)/K_j(x_2)` are accumulated as
``exp(cumsum(log r(x1) - log r(x2)))`` and never form the individual
factors, which overflow long before the ratio does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

ORDER_CAP = 200

# log of the largest / smallest normal double
_LOG_MAX = math.log(np.finfo(float).max)
_TINY = 1e-290


class BesselDomainError(ValueError):
    """Argument outside the supported domain (x must be > 0)."""


class OrderCapError(ValueError):
    """Requested order exceeds the configured order cap."""


@dataclass(frozen=True)
class LogScaledValue:
    """A real number stored as ``sign * exp(log_magnitude)``."""

    sign: int
    log_magnitude: float

    @classmethod
    def from_float(cls, value: float) -> "LogScaledValue":
        if value == 0.0:
            return cls(0, -math.inf)
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    @property
    def value(self) -> float:
        """Plain float; raises OverflowError if not representable."""
        if self.sign == 0:
            return 0.0
        if self.log_magnitude > _LOG_MAX:
            raise OverflowError(
                f"exp({self.log_magnitude:.6g}) is not representable; use the log-scaled value"
            )
        return self.sign * math.exp(self.log_magnitude)

    def __mul__(self, other: "LogScaledValue") -> "LogScaledValue":
        return LogScaledValue(self.sign * other.sign, self.log_magnitude + other.log_magnitude)

    def __truediv__(self, other: "LogScaledValue") -> "LogScaledValue":
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero LogScaledValue")
        return LogScaledValue(self.sign * other.sign, self.log_magnitude - other.log_magnitude)


def _check(j: int, x: float, order_cap: int) -> int:
    if int(j) != j:
        raise TypeError(f"order must be an integer, got {j!r}")
    j = abs(int(j))
    if j > order_cap:
        raise OrderCapError(f"order {j} exceeds the order cap {order_cap}")
    if not x > 0.0 or not math.isfinite(x):
        raise BesselDomainError(f"argument must be a finite positive number, got {x!r}")
    return j


def _log_k0(x):
    return np.log(special.k0e(x)) - x


def _k_order_ratios(x: np.ndarray, jmax: int) -> np.ndarray:
    """``r[j] = K_{j+1}(x)/K_j(x)`` for ``j = 0..jmax``; shape (jmax+1, *x.shape)."""
    x = np.asarray(x, dtype=float)
    r = np.empty((jmax + 1,) + x.shape)
    r[0] = special.k1e(x) / special.k0e(x)
    two_over_x = 2.0 / x
    for j in range(1, jmax + 1):
        r[j] = 1.0 / r[j - 1] + j * two_over_x
    return r


def log_k_ladder(x, jmax: int) -> np.ndarray:
    """``log K_j(x)`` for ``j = 0..jmax``, stacked along the first axis."""
    x = np.asarray(x, dtype=float)
    out = np.empty((jmax + 1,) + x.shape)
    out[0] = _log_k0(x)
    if jmax > 0:
        np.cumsum(np.log(_k_order_ratios(x, jmax - 1)), axis=0, out=out[1:])
        out[1:] += out[0]
    return out


def k_ratio_ladder(x_num, x_den, jmax: int) -> np.ndarray:
    """``K_j(x_num)/K_j(x_den)`` for ``j = 0..jmax`` (broadcast over arguments)."""
    x_num, x_den = np.broadcast_arrays(np.asarray(x_num, float), np.asarray(x_den, float))
    logs = np.empty((jmax + 1,) + x_num.shape)
    logs[0] = np.log(special.k0e(x_num) / special.k0e(x_den)) - (x_num - x_den)
    if jmax > 0:
        diff = np.log(_k_order_ratios(x_num, jmax - 1)) - np.log(_k_order_ratios(x_den, jmax - 1))
        np.cumsum(diff, axis=0, out=logs[1:])
        logs[1:] += logs[0]
    return np.exp(logs)


def k_dlog_ladder(x, jmax: int) -> np.ndarray:
    """``-K_j'(x)/K_j(x) = (K_{j-1}(x) + K_{j+1}(x)) / (2 K_j(x))`` for ``j = 0..jmax``.

    Multiply by ``-|k|`` and a :func:`k_ratio_ladder` row to obtain
    ``d/drho K_j(|k| rho) / K_j(|k| a)``.
    """
    x = np.asarray(x, dtype=float)
    r = _k_order_ratios(x, jmax)
    g = np.empty_like(r)
    g[0] = r[0]
    if jmax > 0:
        g[1:] = 0.5 * (1.0 / r[:-1] + r[1:])
    return g


def radial_ladders(k, a: float, rho: float, jmax: int, derivative: bool = True):
    """Cylinder ratios for orders ``0..jmax`` at wavenumbers ``k``.

    Returns ``F[j] = K_j(|k| rho)/K_j(|k| a)`` and, with ``derivative``,
    ``D[j] = d/drho K_j(|k| rho) / K_j(|k| a)`` (otherwise ``None``).
    """
    k = np.abs(np.asarray(k, dtype=float))
    x_num, x_den = k * rho, k * a
    r_num = _k_order_ratios(x_num, jmax)
    logs = np.empty_like(r_num)
    logs[0] = np.log(special.k0e(x_num) / special.k0e(x_den)) - (x_num - x_den)
    if jmax > 0:
        diff = np.log(r_num[:-1]) - np.log(_k_order_ratios(x_den, jmax - 1))
        np.cumsum(diff, axis=0, out=logs[1:])
        logs[1:] += logs[0]
    F = np.exp(logs)
    if not derivative:
        return F, None
    g = np.empty_like(r_num)
    g[0] = r_num[0]
    if jmax > 0:
        g[1:] = 0.5 * (1.0 / r_num[:-1] + r_num[1:])
    return F, -k * g * F


def _i_ratio_start(nu: int, x: np.ndarray) -> np.ndarray:
    # I_{nu+1}/I_nu; exact from ive where representable, else a tight bound
    with np.errstate(all="ignore"):
        lo = special.ive(nu, x)
        hi = special.ive(nu + 1, x)
        exact = hi / lo
    approx = x / (nu + 1.0 + np.sqrt((nu + 1.0) ** 2 + x * x))
    return np.where((lo > _TINY) & np.isfinite(exact), exact, approx)


def i_order_ratios(x, jmax: int, extra: int = 24) -> np.ndarray:
    """``s[j] = I_{j+1}(x)/I_j(x)`` for ``j = 0..jmax`` by backward recurrence."""
    x = np.asarray(x, dtype=float)
    top = jmax + extra
    s = _i_ratio_start(top, x)
    out = np.empty((jmax + 1,) + x.shape)
    two_over_x = 2.0 / x
    for j in range(top, 0, -1):
        # s_{j-1} = 1 / (2j/x + s_j)
        s = 1.0 / (j * two_over_x + s)
        if j - 1 <= jmax:
            out[j - 1] = s
    return out


def ik_product_ladder(x, jmax: int) -> np.ndarray:
    """``I_j(x) K_j(x)`` for ``j = 0..jmax`` via the Wronskian.

    ``I_j K_{j+1} + I_{j+1} K_j = 1/x`` gives ``I_j K_j = 1 / (x (r_j + s_j))``
    with both ratios positive, so no factor is ever formed on its own.
    """
    x = np.asarray(x, dtype=float)
    r = _k_order_ratios(x, jmax)
    s = i_order_ratios(x, jmax)
    return 1.0 / (x * (r + s))


def log_bessel_k(j: int, x: float, order_cap: int = ORDER_CAP) -> LogScaledValue:
    """``K_j(x)`` as a :class:`LogScaledValue`."""
    j = _check(j, x, order_cap)
    with np.errstate(all="ignore"):
        kv = float(special.kve(j, x))
    if math.isfinite(kv) and kv > _TINY:
        return LogScaledValue(1, math.log(kv) - x)
    return LogScaledValue(1, float(log_k_ladder(np.array([x]), j)[j, 0]))


def _log_i_series(j: int, x: float) -> float:
    q = 0.25 * x * x
    term = 1.0
    total = 1.0
    m = 1
    while True:
        term *= q / (m * (m + j))
        total += term
        if term < 1e-17 * total:
            break
        m += 1
    return j * math.log(0.5 * x) - math.lgamma(j + 1) + math.log(total)


def log_bessel_i(j: int, x: float, order_cap: int = ORDER_CAP) -> LogScaledValue:
    """``I_j(x)`` as a :class:`LogScaledValue`."""
    j = _check(j, x, order_cap)
    iv = float(special.ive(j, x))
    if iv > _TINY:
        return LogScaledValue(1, math.log(iv) + x)
    return LogScaledValue(1, _log_i_series(j, x))


def bessel_i(j: int, x: float, order_cap: int = ORDER_CAP) -> float:
    """Modified Bessel function of the first kind ``I_j(x)``, integer ``j``.

    Raises OverflowError past ~x = 713; use :func:`log_bessel_i` there.
    """
    return log_bessel_i(j, x, order_cap).value


def bessel_k(j: int, x: float, order_cap: int = ORDER_CAP) -> float:
    """Modified Bessel function of the second kind ``K_j(x)``, integer ``j``.

    Underflows to 0.0 for very large ``x``; overflows (OverflowError) for
    large orders at tiny arguments, where :func:`log_bessel_k` still works.
    """
    return log_bessel_k(j, x, order_cap).value


def bessel_k_drho(j: int, k: float, rho: float, order_cap: int = ORDER_CAP) -> float:
    """``d/drho K_j(|k| rho) = -(|k|/2) [K_{j-1}(|k|rho) + K_{j+1}(|k|rho)]``."""
    if k == 0.0:
        raise BesselDomainError("wavenumber must be nonzero")
    j = _check(j, rho, order_cap)
    x = abs(k) * rho
    _check(j + 1, x, order_cap + 1)
    lo = log_bessel_k(j - 1, x, order_cap + 1)
    hi = log_bessel_k(j + 1, x, order_cap + 1)
    # log-sum-exp keeps the pair finite when each term is huge
    m = max(lo.log_magnitude, hi.log_magnitude)
    log_sum = m + math.log(math.exp(lo.log_magnitude - m) + math.exp(hi.log_magnitude - m))
    return -LogScaledValue(1, math.log(0.5 * abs(k)) + log_sum).value


def k_ratio(j: int, x_num: float, x_den: float, order_cap: int = ORDER_CAP) -> float:
    """``K_j(x_num) / K_j(x_den)`` evaluated in log space."""
    num = log_bessel_k(j, x_num, order_cap)
    den = log_bessel_k(j, x_den, order_cap)
    return (num / den).value
