"""Shared generators for randomized and adversarial predicate cases."""

import math
import random

from geompred.points import Point2, Point3, PointLLI, PointLPI


def rand_point2(rng, lo=-1.0, hi=1.0):
    return Point2(rng.uniform(lo, hi), rng.uniform(lo, hi))


def rand_point3(rng, lo=-1.0, hi=1.0):
    return Point3(*(rng.uniform(lo, hi) for _ in range(3)))


def rand_lli(rng, lo=-1.0, hi=1.0):
    return PointLLI(*[(rng.uniform(lo, hi), rng.uniform(lo, hi)) for _ in range(4)])


def rand_lpi(rng, lo=-1.0, hi=1.0):
    return PointLPI(
        *[tuple(rng.uniform(lo, hi) for _ in range(3)) for _ in range(5)]
    )


def lli_at(x, y, h=0.125):
    """Intersection of the two diagonals through (x, y); exact when x, y, h
    are dyadic with headroom."""
    return PointLLI((x - h, y - h), (x + h, y + h), (x - h, y + h), (x + h, y - h))


def lli_near(rng, x, y, spread=0.3):
    """Non-degenerate line pair whose intersection is near (x, y)."""
    while True:
        a1 = rng.uniform(0.0, math.tau)
        a2 = rng.uniform(0.0, math.tau)
        if abs(math.sin(a1 - a2)) >= 0.1:
            break
    u = spread
    c1, s1 = math.cos(a1), math.sin(a1)
    c2, s2 = math.cos(a2), math.sin(a2)
    return PointLLI(
        (x - u * c1, y - u * s1),
        (x + u * c1, y + u * s1),
        (x - u * c2, y - u * s2),
        (x + u * c2, y + u * s2),
    )


def lpi_vertical(x, y, zs=(0.25, 0.5, 0.75), a=0.125):
    """Vertical line through (x, y) meeting a tilted plane: the exact XY
    projection is (x, y)."""
    zr, zs_, zt = zs
    return PointLPI(
        (x, y, 0.0), (x, y, 1.0),
        (x - a, y - a, zr), (x + a, y - a, zs_), (x, y + a, zt),
    )


def lpi_onto_z0(x, y):
    """Line through (x, y, -1)/(x, y, 1) onto the plane z = 0: intersection
    exactly (x, y, 0)."""
    return PointLPI((x, y, -1.0), (x, y, 1.0), (0, 0, 0), (1, 0, 0), (0, 1, 0))


def parallel_lli():
    return PointLLI((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0))


def parallel_lpi():
    return PointLPI((0, 0, 1), (1, 0, 1), (0, 0, 0), (1, 0, 0), (0, 1, 0))


def mixed_case_2d(rng, arity, implicit_mask):
    return tuple(
        rand_lli(rng) if implicit_mask & (1 << i) else rand_point2(rng)
        for i in range(arity)
    )


def mixed_case_3d(rng, arity, implicit_mask):
    return tuple(
        rand_lpi(rng) if implicit_mask & (1 << i) else rand_point3(rng)
        for i in range(arity)
    )


def adversarial_orient2d(rng):
    """Collinear / near-collinear triples, some via implicit grid points."""
    kind = rng.randrange(5)
    if kind == 0:  # exactly collinear on an inexact-coordinate line
        g = 10
        y = rng.randrange(g) / g
        xs = rng.sample(range(g), 3)
        return tuple(
            lli_at(x / g, y, h=0.1) if rng.random() < 0.6 else Point2(x / g, y)
            for x in xs
        )
    if kind == 1:  # one-ulp perturbation off a horizontal line
        x1, x2, x3 = sorted(rng.uniform(0, 1) for _ in range(3))
        y = rng.uniform(0, 1)
        y3 = math.nextafter(y, 2.0) if rng.random() < 0.5 else y
        return (Point2(x1, y), Point2(x2, y), Point2(x3, y3))
    if kind == 2:  # undefined construction in a random slot
        pts = [rand_point2(rng) for _ in range(3)]
        pts[rng.randrange(3)] = parallel_lli()
        return tuple(pts)
    if kind == 3:  # coincident implicit/explicit points
        x, y = rng.randrange(8) / 8, rng.randrange(8) / 8
        return (lli_at(x, y), Point2(x, y), rand_point2(rng))
    g = 512  # dyadic grid: construction arithmetic fully exact
    y = rng.randrange(g) / g
    xs = rng.sample(range(g), 3)
    return tuple(
        lli_at(x / g, y) if rng.random() < 0.5 else Point2(x / g, y) for x in xs
    )


def adversarial_incircle(rng):
    kind = rng.randrange(4)
    if kind == 0:  # exactly cocircular: corners of an axis-aligned square
        g = 10
        x0, y0 = rng.randrange(g - 4) / g, rng.randrange(g - 4) / g
        s = rng.randrange(1, 4) / g
        corners = [(x0, y0), (x0 + s, y0), (x0 + s, y0 + s), (x0, y0 + s)]
        return tuple(
            lli_at(*c, h=0.1) if rng.random() < 0.5 else Point2(*c)
            for c in corners
        )
    if kind == 1:  # cocircular lattice points on a circle of radius 5*s
        s = 2.0 ** -rng.randrange(1, 6)
        cx, cy = rng.randrange(8) / 8, rng.randrange(8) / 8
        quad = [(5, 0), (3, 4), (-4, 3), (0, -5)]
        rng.shuffle(quad)
        pts = [(cx + a * s, cy + b * s) for a, b in quad]
        return tuple(
            lli_at(*c) if rng.random() < 0.4 else Point2(*c) for c in pts
        )
    if kind == 2:
        pts = [rand_point2(rng) for _ in range(4)]
        pts[rng.randrange(4)] = parallel_lli()
        return tuple(pts)
    # three collinear plus one随 free point forces near-degenerate rows
    g = 10
    y = rng.randrange(g) / g
    xs = rng.sample(range(g), 3)
    pts = [
        lli_at(x / g, y, h=0.1) if rng.random() < 0.5 else Point2(x / g, y)
        for x in xs
    ]
    pts.append(rand_point2(rng))
    rng.shuffle(pts)
    return tuple(pts)


def adversarial_orient3d(rng):
    kind = rng.randrange(3)
    if kind == 0:  # exactly coplanar in z = 0 with implicit members
        def pt():
            x, y = rng.randrange(10) / 10, rng.randrange(10) / 10
            if rng.random() < 0.5:
                return lpi_onto_z0(x, y)
            return Point3(x, y, 0.0)

        return tuple(pt() for _ in range(4))
    if kind == 1:
        pts = [rand_point3(rng) for _ in range(4)]
        pts[rng.randrange(4)] = parallel_lpi()
        return tuple(pts)
    # one-ulp off coplanar
    z = rng.uniform(0, 1)
    z4 = math.nextafter(z, 2.0) if rng.random() < 0.5 else z
    return (
        Point3(rng.uniform(0, 1), rng.uniform(0, 1), z),
        Point3(rng.uniform(0, 1), rng.uniform(0, 1), z),
        Point3(rng.uniform(0, 1), rng.uniform(0, 1), z),
        Point3(rng.uniform(0, 1), rng.uniform(0, 1), z4),
    )
