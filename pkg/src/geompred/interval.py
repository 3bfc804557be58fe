"""Guaranteed-enclosure interval arithmetic for the dynamic-filter stage.

Intervals are (lo, hi) tuples of binary64 values with lo <= hi; the exact
real result of the operation history always lies inside.  Instead of
switching the CPU rounding mode, each endpoint is computed to nearest and
then stepped outward by one ulp only when the operation was inexact, which
both preserves the enclosure and keeps exact inputs degenerate (an exact
chain stays width zero).  Rounding-mode mutation is process-global state;
this formulation is thread-safe by construction.

Only +, -, x are provided: sign filters for polynomial predicates need
nothing else.
"""

from __future__ import annotations

from math import inf, isnan, nextafter

from .expansion import two_diff, two_product, two_sum

_MAX = 1.7976931348623157e308

# Outside this band the Dekker product residual cannot be trusted
# (splitting overflow above, residual underflow below); endpoints are then
# widened unconditionally, which is always sound.
_MUL_HI = 2.0**500
_MUL_LO = 2.0**-500


def iv_from(a: float) -> tuple[float, float]:
    """Degenerate interval for an exactly known value."""
    if isnan(a):
        raise ValueError("NaN cannot seed an interval")
    return (a, a)


def iv_from_sub(a: float, b: float) -> tuple[float, float]:
    """Tight interval for the exact difference of two binary64 values."""
    x = a - b
    if x == inf:
        return (_MAX, inf)
    if x == -inf:
        return (-inf, -_MAX)
    _, r = two_diff(a, b)
    if r > 0.0:
        return (x, nextafter(x, inf))
    if r < 0.0:
        return (nextafter(x, -inf), x)
    return (x, x)


def _down_sum(a: float, b: float) -> float:
    s = a + b
    if s == inf:
        return _MAX
    if s == -inf:
        return s
    _, r = two_sum(a, b)
    if r < 0.0:
        return nextafter(s, -inf)
    return s


def _up_sum(a: float, b: float) -> float:
    s = a + b
    if s == -inf:
        return -_MAX
    if s == inf:
        return s
    _, r = two_sum(a, b)
    if r > 0.0:
        return nextafter(s, inf)
    return s


def _down_mul(a: float, b: float) -> float:
    p = a * b
    if p == inf:
        return _MAX
    if p == -inf:
        return p
    if (
        abs(a) > _MUL_HI
        or abs(b) > _MUL_HI
        or (abs(p) < _MUL_LO and a != 0.0 and b != 0.0)
    ):
        return nextafter(p, -inf)
    _, r = two_product(a, b)
    if r < 0.0:
        return nextafter(p, -inf)
    return p


def _up_mul(a: float, b: float) -> float:
    p = a * b
    if p == -inf:
        return -_MAX
    if p == inf:
        return p
    if (
        abs(a) > _MUL_HI
        or abs(b) > _MUL_HI
        or (abs(p) < _MUL_LO and a != 0.0 and b != 0.0)
    ):
        return nextafter(p, inf)
    _, r = two_product(a, b)
    if r > 0.0:
        return nextafter(p, inf)
    return p


def iv_add(x: tuple[float, float], y: tuple[float, float]) -> tuple[float, float]:
    return (_down_sum(x[0], y[0]), _up_sum(x[1], y[1]))


def iv_sub(x: tuple[float, float], y: tuple[float, float]) -> tuple[float, float]:
    return (_down_sum(x[0], -y[1]), _up_sum(x[1], -y[0]))


def iv_neg(x: tuple[float, float]) -> tuple[float, float]:
    return (-x[1], -x[0])


def _mul_lo_pick(c1: tuple[float, float], c2: tuple[float, float]) -> float:
    # min of two downward-rounded products = downward rounding of the min.
    p1 = _down_mul(*c1)
    p2 = _down_mul(*c2)
    return p1 if p1 <= p2 else p2


def _mul_hi_pick(c1: tuple[float, float], c2: tuple[float, float]) -> float:
    p1 = _up_mul(*c1)
    p2 = _up_mul(*c2)
    return p1 if p1 >= p2 else p2


def iv_mul(x: tuple[float, float], y: tuple[float, float]) -> tuple[float, float]:
    a, b = x
    c, d = y
    if a >= 0.0:
        if c >= 0.0:
            return (_down_mul(a, c), _up_mul(b, d))
        if d <= 0.0:
            return (_down_mul(b, c), _up_mul(a, d))
        return (_down_mul(b, c), _up_mul(b, d))
    if b <= 0.0:
        if c >= 0.0:
            return (_down_mul(a, d), _up_mul(b, c))
        if d <= 0.0:
            return (_down_mul(b, d), _up_mul(a, c))
        return (_down_mul(a, d), _up_mul(a, c))
    if c >= 0.0:
        return (_down_mul(a, d), _up_mul(b, d))
    if d <= 0.0:
        return (_down_mul(b, c), _up_mul(a, c))
    return (
        _mul_lo_pick((a, d), (b, c)),
        _mul_hi_pick((a, c), (b, d)),
    )


def iv_sign(x: tuple[float, float]) -> int | None:
    """Certain sign of the enclosed value: -1, 0, +1, or None if ambiguous."""
    lo, hi = x
    if lo > 0.0:
        return 1
    if hi < 0.0:
        return -1
    if lo == 0.0 and hi == 0.0:
        return 0
    return None
