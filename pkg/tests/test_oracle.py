import random
from fractions import Fraction

from geompred import oracle
from geompred.points import Point2, Point3, PointLLI
from geompred.predicates import (
    POSITIVE,
    ZERO,
    PredicateResult,
    canonical_signature,
)

from _support import mixed_case_2d, parallel_lli, rand_point2


def test_worked_example():
    p1 = PointLLI((0, 0), (1, 1), (0, 1), (1, 0))
    assert oracle.coordinates(p1) == (Fraction(1, 2), Fraction(1, 2))
    assert oracle.oracle_orient2d(p1, Point2(0, 0), Point2(1, 0)) is POSITIVE


def test_parallel_undefined():
    par = parallel_lli()
    assert oracle.coordinates(par) is None
    r = oracle.oracle_orient2d(Point2(0, 0), par, Point2(1, 0))
    assert r == PredicateResult.undefined(1)


def test_cocircular_zero():
    assert (
        oracle.oracle_incircle(
            Point2(0, 0), Point2(1, 0), Point2(0, 1), Point2(1, 1)
        )
        is ZERO
    )


def test_exact_rational_coordinates_of_lli():
    # denominators and numerators must be exact dyadic rationals
    p = PointLLI((0.1, 0.1), (0.9, 0.7), (0.1, 0.7), (0.9, 0.1))
    c = oracle.coordinates(p)
    x, y = c
    assert x == Fraction(0.1) + (Fraction(0.9) - Fraction(0.1)) / 2
    assert isinstance(x, Fraction)


def test_permutation_parity_invariance():
    # oracle results transform exactly like the canonical-signature parity
    rng = random.Random(21)
    import itertools

    for _ in range(100):
        pts = mixed_case_2d(rng, 4, rng.randrange(16))
        base = oracle.oracle_incircle(*pts)
        if base.is_undefined:
            continue
        for perm in itertools.permutations(range(4)):
            par = _perm_parity(perm)
            r = oracle.oracle_incircle(*(pts[i] for i in perm))
            assert r == (base if not par else -base)


def _perm_parity(perm):
    seen = [False] * len(perm)
    odd = False
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, ln = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            ln += 1
        if ln % 2 == 0:
            odd = not odd
    return odd


def test_homogeneous_explicit():
    assert oracle.homogeneous(Point2(3, 4)) == (3, 4, 1)
    assert oracle.homogeneous(Point3(1, 2, 3)) == (1, 2, 3, 1)


def test_oracle_predicate_dispatch():
    a, b, c = Point2(0, 0), Point2(1, 0), Point2(0, 1)
    assert oracle.oracle_predicate("orient2d", (a, b, c)) is POSITIVE
