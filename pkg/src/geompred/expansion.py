"""Exact arithmetic over floating-point expansions.

An expansion is a sequence of binary64 components, ordered by increasing
magnitude, whose exact sum is the real number represented.  Components are
nonoverlapping (each is smaller than the unit-in-last-place of the next
nonzero one), zeros are eliminated, and the canonical zero is the empty
sequence.  Sums, differences, scalings and products are error-free; the sign
of an expansion is the sign of its largest component.

Internally the classic error-free transforms are used (two_sum, two_product,
expansion merging, scaling, compression).  All routines assume round-to-
nearest-even binary64 arithmetic, which CPython guarantees on every
supported platform.
"""

from __future__ import annotations

import math

# Dekker splitter for 53-bit significands: 2**27 + 1.
_SPLITTER = 134217729.0

# Expansions longer than this are compressed before further processing;
# purely a performance knob, exactness is unaffected.
_COMPRESS_AT = 12

# Hard cap on component count.  The predicates in this package evaluate
# low-degree polynomials and never get anywhere close; blowing the cap
# signals a bug or pathological misuse, never a value to truncate.
_component_cap = 1024


class ExpansionOverflow(Exception):
    """Raised when an expansion exceeds the configured component cap."""


class ExpansionRangeError(ArithmeticError):
    """A product left the exponent range where error-free transforms hold.

    Exact values with bits below the subnormal floor (or above overflow)
    cannot be represented by binary64 expansions at all; callers must
    switch to an arbitrary-range exact number type.
    """


# Outside this magnitude band a Dekker product tail is no longer exact
# (subnormal underflow below, splitting overflow above).
_PRODUCT_FLOOR = 2.0**-916
_PRODUCT_CEIL = 2.0**996


def set_component_cap(n: int) -> None:
    global _component_cap
    if n < 4:
        raise ValueError("component cap must be at least 4")
    _component_cap = n


def component_cap() -> int:
    return _component_cap


def two_sum(a: float, b: float) -> tuple[float, float]:
    """Error-free sum: returns (hi, lo) with hi = fl(a+b) and hi+lo = a+b."""
    hi = a + b
    bv = hi - a
    av = hi - bv
    return hi, (a - av) + (b - bv)


def fast_two_sum(a: float, b: float) -> tuple[float, float]:
    # Requires |a| >= |b|.
    hi = a + b
    return hi, b - (hi - a)


def two_diff(a: float, b: float) -> tuple[float, float]:
    """Error-free difference: (hi, lo) with hi = fl(a-b), hi+lo = a-b."""
    hi = a - b
    bv = a - hi
    av = hi + bv
    return hi, (a - av) + (bv - b)


def _split(a: float) -> tuple[float, float]:
    c = _SPLITTER * a
    ahi = c - (c - a)
    return ahi, a - ahi


def two_product(a: float, b: float) -> tuple[float, float]:
    """Error-free product: (hi, lo) with hi = fl(a*b) and hi+lo = a*b.

    Dekker splitting; exact provided no intermediate overflow and the
    product does not fall into the subnormal range.  Callers guard the
    magnitude range (the expansion-level operations do so and raise
    ExpansionRangeError when exactness is unattainable).
    """
    hi = a * b
    ahi, alo = _split(a)
    bhi, blo = _split(b)
    err = hi - ahi * bhi
    err -= alo * bhi
    err -= ahi * blo
    return hi, alo * blo - err


def from_float(a: float) -> list[float]:
    """Expansion representing a single binary64 value."""
    return [a] if a != 0.0 else []


def from_sub(a: float, b: float) -> list[float]:
    """Expansion representing the exact difference a - b."""
    hi, lo = two_diff(a, b)
    if lo != 0.0:
        return [lo, hi]
    return [hi] if hi != 0.0 else []


def _merge(e: list[float], f: list[float]) -> list[float]:
    # Merge by increasing magnitude (sign-agnostic comparison trick).
    ne, nf = len(e), len(f)
    ei = fi = 0
    g: list[float] = []
    while ei < ne and fi < nf:
        enow, fnow = e[ei], f[fi]
        if (fnow > enow) == (fnow > -enow):
            g.append(enow)
            ei += 1
        else:
            g.append(fnow)
            fi += 1
    if ei < ne:
        g.extend(e[ei:])
    else:
        g.extend(f[fi:])
    return g


def _linear_expansion_sum_ze(e: list[float], f: list[float]) -> list[float]:
    # Linear expansion sum with zero elimination: value-exact and
    # nonoverlap-preserving for any nonoverlapping operands (it does not
    # need the stronger input form the faster merge-sum variant requires).
    g = _merge(e, f)
    n = len(g)
    if n == 1:
        return [] if g[0] == 0.0 else [g[0]]
    h: list[float] = []
    q_big, q = fast_two_sum(g[1], g[0])
    for i in range(2, n):
        r, lo = fast_two_sum(g[i], q)
        if lo != 0.0:
            h.append(lo)
        q_big, q = two_sum(q_big, r)
    if q != 0.0:
        h.append(q)
    if q_big != 0.0 or not h:
        h.append(q_big)
    if len(h) == 1 and h[0] == 0.0:
        return []
    return h


def _checked_product(a: float, b: float, bhi: float, blo: float) -> tuple[float, float]:
    # Presplit Dekker product with exactness-range enforcement.
    p = a * b
    ap = abs(p)
    if not (_PRODUCT_FLOOR <= ap <= _PRODUCT_CEIL):
        if p == 0.0 and (a == 0.0 or b == 0.0):
            return 0.0, 0.0
        raise ExpansionRangeError(f"product magnitude {p!r} outside exact range")
    ahi, alo = _split(a)
    err = p - ahi * bhi
    err -= alo * bhi
    err -= ahi * blo
    return p, alo * blo - err


def _scale_ze(e: list[float], b: float) -> list[float]:
    # Scale a nonoverlapping expansion by b with zero elimination.
    bhi, blo = _split(b)
    q, lo = _checked_product(e[0], b, bhi, blo)
    h: list[float] = []
    if lo != 0.0:
        h.append(lo)
    for i in range(1, len(e)):
        p, plo = _checked_product(e[i], b, bhi, blo)
        sum_, lo = two_sum(q, plo)
        if lo != 0.0:
            h.append(lo)
        q, lo = fast_two_sum(p, sum_)
        if lo != 0.0:
            h.append(lo)
    if q != 0.0 or not h:
        h.append(q)
    if not h or (len(h) == 1 and h[0] == 0.0):
        return []
    return h


def compress(e: list[float]) -> list[float]:
    """Compress to a minimal nonadjacent form representing the same value."""
    if not e:
        return []
    n = len(e)
    if n == 1:
        return [] if e[0] == 0.0 else [e[0]]
    g = [0.0] * n
    bottom = n - 1
    q = e[bottom]
    for i in range(n - 2, -1, -1):
        hi, lo = fast_two_sum(q, e[i])
        if lo != 0.0:
            g[bottom] = hi
            bottom -= 1
            q = lo
        else:
            q = hi
    h: list[float] = []
    for i in range(bottom + 1, n):
        hi, lo = fast_two_sum(g[i], q)
        if lo != 0.0:
            h.append(lo)
        q = hi
    if q != 0.0:
        h.append(q)
    return h


def _checked(e: list[float]) -> list[float]:
    if len(e) > _component_cap:
        e = compress(e)
        if len(e) > _component_cap:
            raise ExpansionOverflow(
                f"expansion grew to {len(e)} components (cap {_component_cap})"
            )
    return e


def expansion_sum(e: list[float], f: list[float]) -> list[float]:
    """Exact sum of two expansions."""
    if not e:
        return list(f)
    if not f:
        return list(e)
    h = _linear_expansion_sum_ze(e, f)
    if len(h) > _COMPRESS_AT:
        h = compress(h)
    return _checked(h)


def expansion_diff(e: list[float], f: list[float]) -> list[float]:
    """Exact difference of two expansions."""
    if not f:
        return list(e)
    nf = [-c for c in f]
    if not e:
        return nf
    h = _linear_expansion_sum_ze(e, nf)
    if len(h) > _COMPRESS_AT:
        h = compress(h)
    return _checked(h)


def expansion_scale(e: list[float], b: float) -> list[float]:
    """Exact product of an expansion by a single binary64 value."""
    if not e or b == 0.0:
        return []
    if math.frexp(b)[0] in (0.5, -0.5):
        # Power-of-two scaling is exact at any exponent as long as no
        # component over/underflows, which the round-trip check detects.
        # Magnitude order is unaffected.
        out = []
        for c in e:
            p = c * b
            if p / b != c:
                raise ExpansionRangeError(f"power-of-two scale lost bits at {c!r}")
            out.append(p)
        return out
    if len(e) > _COMPRESS_AT:
        e = compress(e)
    return _checked(_scale_ze(e, b))


def expansion_product(e: list[float], f: list[float]) -> list[float]:
    """Exact product of two expansions."""
    if not e or not f:
        return []
    if len(f) == 1:
        return expansion_scale(e, f[0])
    if len(e) == 1:
        return expansion_scale(f, e[0])
    # Compression keeps operands nonadjacent, which the scaling and merging
    # steps rely on, and keeps intermediate sizes near-minimal.
    if len(e) > 2:
        e = compress(e)
    if len(f) > 2:
        f = compress(f)
    if len(e) < len(f):
        e, f = f, e
    acc = _scale_ze(e, f[0])
    for i in range(1, len(f)):
        part = _scale_ze(e, f[i])
        if part:
            acc = _linear_expansion_sum_ze(acc, part) if acc else part
        if len(acc) > _COMPRESS_AT:
            acc = compress(acc)
    return _checked(acc)


def expansion_sign(e: list[float]) -> int:
    """Sign of the exact represented value: -1, 0 or +1."""
    if not e:
        return 0
    last = e[-1]
    return 1 if last > 0.0 else (-1 if last < 0.0 else 0)


def approximate(e: list[float]) -> float:
    """Correctly rounded binary64 approximation of the expansion's value."""
    if not e:
        return 0.0
    return math.fsum(e)
