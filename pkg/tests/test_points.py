import random
from fractions import Fraction

import pytest

import geompred.points as pts
from geompred import oracle
from geompred.interval import iv_sign
from geompred.points import (
    Point2,
    Point3,
    PointLLI,
    PointLPI,
    ex_lambdas,
    fp_lambdas,
    iv_lambdas,
    lambdas,
    lli_lambda,
    lpi_lambda,
)

from _support import rand_lli, rand_lpi


def exact(e):
    return sum(map(Fraction, e), Fraction(0))


@pytest.fixture(autouse=True)
def default_cache():
    prev = pts.cache_level()
    pts.set_cache_level("interval")
    yield
    pts.set_cache_level(prev)


def test_lli_worked_example():
    # lines (0,0)-(1,1) and (0,1)-(1,0) meet at (0.5, 0.5)
    lx, ly, d, beta = lli_lambda((0, 0), (1, 1), (0, 1), (1, 0), "fp")
    assert (lx, ly, d) == (-1.0, -1.0, -2.0)
    assert lx / d == 0.5 and ly / d == 0.5
    assert beta == 1.0


def test_lli_parallel_and_degenerate():
    assert lli_lambda((0, 0), (1, 0), (0, 1), (1, 1), "fp")[2] == 0.0
    assert lli_lambda((0.25, 0.5), (0.25, 0.5), (0, 1), (1, 0), "fp")[2] == 0.0


def test_lpi_worked_example():
    lx, ly, lz, d, beta = lpi_lambda(
        (0, 0, -1), (0, 0, 1), (0, 0, 0), (1, 0, 0), (0, 1, 0), "fp"
    )
    assert (lx, ly, lz, d) == (0.0, 0.0, 0.0, -2.0)


def test_lpi_parallel_and_collinear_plane():
    assert (
        lpi_lambda((0, 0, 1), (1, 0, 1), (0, 0, 0), (1, 0, 0), (0, 1, 0), "fp")[3]
        == 0.0
    )
    assert (
        lpi_lambda((0, 0, -1), (0, 0, 1), (0, 0, 0), (1, 1, 0), (2, 2, 0), "fp")[3]
        == 0.0
    )


def test_explicit_lambdas():
    assert lambdas(Point2(3, 4), "fp") == (3.0, 4.0, 1.0, 4.0)
    x, y, z, d = iv_lambdas(Point3(1, 2, 3))
    assert d == (1.0, 1.0) and x == (1.0, 1.0)
    ex = ex_lambdas(Point2(0.0, 2.5))
    assert ex == ([], [2.5], [1.0])


def test_fp_matches_naive_transcription():
    # Bit-exact agreement with a direct transcription of the construction
    # polynomials in their published evaluation order.
    rng = random.Random(8)
    for _ in range(2000):
        a1x, a1y, a2x, a2y, b1x, b1y, b2x, b2y = (
            rng.uniform(-3, 3) for _ in range(8)
        )
        lx, ly, d, _ = lli_lambda(
            (a1x, a1y), (a2x, a2y), (b1x, b1y), (b2x, b2y), "fp"
        )
        deta = a1x * a2y - a2x * a1y
        detb = b1x * b2y - b2x * b1y
        assert lx == deta * (b1x - b2x) - detb * (a1x - a2x)
        assert ly == deta * (b1y - b2y) - detb * (a1y - a2y)
        assert d == (a1x - a2x) * (b1y - b2y) - (a1y - a2y) * (b1x - b2x)


def test_exact_model_matches_oracle():
    rng = random.Random(5)
    for _ in range(400):
        p = rand_lli(rng)
        ex, ey, ed = ex_lambdas(p)
        ox, oy, od = oracle.lli_exact(p.args)
        assert exact(ex) == ox and exact(ey) == oy and exact(ed) == od
        q = rand_lpi(rng)
        vals = ex_lambdas(q)
        ovals = oracle.lpi_exact(q.args)
        assert all(exact(a) == b for a, b in zip(vals, ovals))


def test_interval_model_encloses_exact():
    rng = random.Random(6)
    for _ in range(400):
        p = rand_lli(rng)
        ivs = iv_lambdas(p)
        os = oracle.lli_exact(p.args)
        for (lo, hi), o in zip(ivs, os):
            assert Fraction(lo) <= o <= Fraction(hi)


def test_fp_model_close_to_direct_solve():
    # Well-conditioned random constructions: lambda/d close to the naive
    # parametric intersection (sanity, not exactness).
    rng = random.Random(7)
    checked = 0
    while checked < 300:
        a1 = (rng.uniform(0, 1), rng.uniform(0, 1))
        a2 = (rng.uniform(0, 1), rng.uniform(0, 1))
        b1 = (rng.uniform(0, 1), rng.uniform(0, 1))
        b2 = (rng.uniform(0, 1), rng.uniform(0, 1))
        den = (a1[0] - a2[0]) * (b1[1] - b2[1]) - (a1[1] - a2[1]) * (b1[0] - b2[0])
        if abs(den) < 0.1:
            continue
        t = (
            (a1[0] - b1[0]) * (b1[1] - b2[1]) - (a1[1] - b1[1]) * (b1[0] - b2[0])
        ) / den
        px = a1[0] + t * (a2[0] - a1[0])
        py = a1[1] + t * (a2[1] - a1[1])
        lx, ly, d, _ = lli_lambda(a1, a2, b1, b2, "fp")
        assert abs(lx / d - px) <= 1e-9 * max(1.0, abs(px))
        assert abs(ly / d - py) <= 1e-9 * max(1.0, abs(py))
        checked += 1


def test_beta_is_max_b_factor():
    p = PointLLI((0.5, -2.0), (0.25, 0.125), (0.75, 0.0), (-0.5, 1.0))
    beta = fp_lambdas(p)[-1]
    coords = [abs(v) for v in p.args]
    diffs = [
        abs(p.args[0] - p.args[2]),
        abs(p.args[1] - p.args[3]),
        abs(p.args[4] - p.args[6]),
        abs(p.args[5] - p.args[7]),
    ]
    assert beta == max(coords + diffs)


def test_cache_hit_no_recompute():
    p = rand_lli(random.Random(1))
    before = pts.recompute_counts["fp"]
    first = fp_lambdas(p)
    assert pts.recompute_counts["fp"] == before + 1
    second = fp_lambdas(p)
    assert pts.recompute_counts["fp"] == before + 1
    assert first == second


def test_cache_level_none_recomputes():
    pts.set_cache_level("none")
    p = rand_lli(random.Random(2))
    before = pts.recompute_counts["fp"]
    a = fp_lambdas(p)
    b = fp_lambdas(p)
    assert pts.recompute_counts["fp"] == before + 2
    assert a == b


def test_cache_levels_gate_models():
    for level, cached in (
        ("none", (False, False, False)),
        ("fp", (True, False, False)),
        ("interval", (True, True, False)),
        ("exact", (True, True, True)),
    ):
        pts.set_cache_level(level)
        p = rand_lli(random.Random(3))
        fp_lambdas(p)
        iv_lambdas(p)
        ex_lambdas(p)
        assert (p._fp is not None, p._iv is not None, p._ex is not None) == cached


def test_cache_transparency():
    rng = random.Random(4)
    from geompred.predicates import incircle

    cases = [
        tuple(rand_lli(rng) for _ in range(4)) for _ in range(100)
    ]
    results = []
    for level in ("none", "fp", "interval", "exact"):
        pts.set_cache_level(level)
        fresh = [
            tuple(PointLLI(c.args[0:2], c.args[2:4], c.args[4:6], c.args[6:8])
                  for c in case)
            for case in cases
        ]
        results.append([incircle(*case) for case in fresh])
    assert results[0] == results[1] == results[2] == results[3]


def test_cache_level_names():
    pts.set_cache_level(0)
    assert pts.cache_level_name() == "none"
    with pytest.raises(ValueError):
        pts.set_cache_level("turbo")
    pts.set_cache_level("interval")
