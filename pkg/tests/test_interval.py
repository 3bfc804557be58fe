import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geompred import interval as iv


def contains(x, v):
    lo, hi = x
    return Fraction(lo) <= v <= Fraction(hi) if math.isfinite(lo) and math.isfinite(hi) else (
        (lo == -math.inf or Fraction(lo) <= v) and (hi == math.inf or v <= Fraction(hi))
    )


def test_from_degenerate():
    assert iv.iv_from(0.0) == (0.0, 0.0)
    assert iv.iv_from(1.5) == (1.5, 1.5)
    assert iv.iv_from(-3.25) == (-3.25, -3.25)


def test_from_nan_rejected():
    with pytest.raises(ValueError):
        iv.iv_from(float("nan"))


def test_mul_exact_endpoints():
    assert iv.iv_mul((1.0, 2.0), (3.0, 4.0)) == (3.0, 8.0)


def test_sub_self_contains_zero():
    for a in (0.0, 1.0, -2.75, 0.1, 3e100):
        lo, hi = iv.iv_sub((a, a), (a, a))
        assert lo <= 0.0 <= hi


def test_exact_chain_stays_degenerate():
    x = iv.iv_from(0.5)
    y = iv.iv_from(0.25)
    s = iv.iv_add(x, y)
    assert s == (0.75, 0.75)
    p = iv.iv_mul(s, iv.iv_from(2.0))
    assert p == (1.5, 1.5)


def test_add_chain_encloses_oracle():
    rng = random.Random(11)
    total = Fraction(0)
    acc = iv.iv_from(0.0)
    for _ in range(10_000):
        t = rng.uniform(-1, 1)
        total += Fraction(t)
        acc = iv.iv_add(acc, iv.iv_from(t))
    assert contains(acc, total)
    # ~1 ulp widening per inexact op; 1e4 ops at magnitude ~60.
    assert acc[1] - acc[0] < 1e-10


def test_sign_cases():
    assert iv.iv_sign((3.0, 8.0)) == 1
    assert iv.iv_sign((-1e-30, 1e-30)) is None
    assert iv.iv_sign((0.0, 0.0)) == 0
    assert iv.iv_sign((-5.0, -2.0)) == -1
    assert iv.iv_sign((0.0, 1.0)) is None


def test_from_sub_tight():
    rng = random.Random(17)
    for _ in range(2000):
        a, b = rng.uniform(-1, 1), rng.uniform(-1, 1)
        lo, hi = iv.iv_from_sub(a, b)
        v = Fraction(a) - Fraction(b)
        assert Fraction(lo) <= v <= Fraction(hi)
        assert hi == lo or hi == math.nextafter(lo, math.inf)


def test_overflow_widens_not_breaks():
    big = (1e308, 1e308)
    lo, hi = iv.iv_add(big, big)
    assert hi == math.inf and lo <= 2e308
    lo, hi = iv.iv_mul(big, big)
    assert hi == math.inf and math.isfinite(lo)


def _rand_tree(rng, depth, leaves):
    if depth == 0 or (depth < 6 and rng.random() < 0.25):
        v = rng.choice(leaves)
        return ("leaf", v)
    op = rng.choice(("add", "sub", "mul"))
    return (op, _rand_tree(rng, depth - 1, leaves), _rand_tree(rng, depth - 1, leaves))


def _eval_tree(t):
    if t[0] == "leaf":
        return iv.iv_from(t[1]), Fraction(t[1])
    _, a, b = t
    xa, fa = _eval_tree(a)
    xb, fb = _eval_tree(b)
    if t[0] == "add":
        return iv.iv_add(xa, xb), fa + fb
    if t[0] == "sub":
        return iv.iv_sub(xa, xb), fa - fb
    return iv.iv_mul(xa, xb), fa * fb


def test_enclosure_random_trees():
    # Random expression trees of depth <= 8 against the rational oracle.
    rng = random.Random(99)
    for _ in range(3000):
        leaves = [rng.uniform(-2, 2) for _ in range(4)]
        leaves += [rng.uniform(-2, 2) * 2.0 ** rng.randrange(-30, 30) for _ in range(2)]
        t = _rand_tree(rng, rng.randrange(1, 9), leaves)
        x, v = _eval_tree(t)
        assert contains(x, v), (t, x, v)


def _wider(x, rng):
    lo, hi = x
    lo2 = lo - abs(rng.uniform(0, 0.5))
    hi2 = hi + abs(rng.uniform(0, 0.5))
    return (lo2, hi2)


def test_monotonicity_widening_inputs():
    rng = random.Random(5)
    for _ in range(2000):
        x = tuple(sorted((rng.uniform(-3, 3), rng.uniform(-3, 3))))
        y = tuple(sorted((rng.uniform(-3, 3), rng.uniform(-3, 3))))
        xw, yw = _wider(x, rng), _wider(y, rng)
        for op in (iv.iv_add, iv.iv_sub, iv.iv_mul):
            lo, hi = op(x, y)
            lo2, hi2 = op(xw, yw)
            assert lo2 <= lo and hi >= hi or (lo2 <= lo and hi2 >= hi)


small = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


@settings(max_examples=400)
@given(small, small, small, small, small, small)
def test_mul_add_enclosure_hypothesis(a, b, c, d, e, f):
    x = (min(a, b), max(a, b))
    y = (min(c, d), max(c, d))
    z = (min(e, f), max(e, f))
    r = iv.iv_mul(iv.iv_add(x, y), iv.iv_sub(y, z))
    for pa in (x[0], x[1]):
        for pb in (y[0], y[1]):
            for pc in (z[0], z[1]):
                v = (Fraction(pa) + Fraction(pb)) * (Fraction(pb) - Fraction(pc))
                assert contains(r, v)


def test_sign_never_contradicts_oracle():
    rng = random.Random(2024)
    for _ in range(3000):
        leaves = [rng.uniform(-1, 1) for _ in range(4)]
        t = _rand_tree(rng, rng.randrange(1, 7), leaves)
        x, v = _eval_tree(t)
        s = iv.iv_sign(x)
        if s is not None:
            assert s == (v > 0) - (v < 0)
