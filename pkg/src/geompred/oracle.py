"""Arbitrary-precision rational reference for constructions and predicates.

Every construction and predicate is re-evaluated over exact rationals by
the most direct route: implicit points become exact coordinate fractions
lambda/d, and those coordinates are substituted into the classical
determinant of each predicate.  The staged engine instead evaluates the
homogeneous rewritten polynomials, so agreement between the two also
validates the rewriting itself.  Performance is irrelevant here; these
functions back the test suites and generators.
"""

from __future__ import annotations

from fractions import Fraction

from .points import GenericPoint, PointLLI, PointLPI
from .predicates import (
    NEGATIVE,
    POSITIVE,
    ZERO,
    DegeneratePlaneError,
    PredicateResult,
)

_PROJ = {2: (0, 1), 1: (0, 2), 0: (1, 2)}


def _sign(v: Fraction) -> int:
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0


def lli_exact(args) -> tuple[Fraction, Fraction, Fraction]:
    """Exact (lambda_x, lambda_y, d) of a line-line intersection."""
    a1x, a1y, a2x, a2y, b1x, b1y, b2x, b2y = map(Fraction, args)
    deta = a1x * a2y - a2x * a1y
    detb = b1x * b2y - b2x * b1y
    lx = deta * (b1x - b2x) - detb * (a1x - a2x)
    ly = deta * (b1y - b2y) - detb * (a1y - a2y)
    d = (a1x - a2x) * (b1y - b2y) - (a1y - a2y) * (b1x - b2x)
    return lx, ly, d


def lpi_exact(args) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Exact (lambda_x, lambda_y, lambda_z, d) of a line-plane intersection."""
    (q1x, q1y, q1z, q2x, q2y, q2z,
     rx, ry, rz, sx, sy, sz, tx, ty, tz) = map(Fraction, args)
    ax, ay, az = sx - rx, sy - ry, sz - rz
    bx, by, bz = tx - rx, ty - ry, tz - rz
    m1 = ay * bz - az * by
    m2 = ax * bz - az * bx
    m3 = ax * by - ay * bx
    d = (q1x - q2x) * m1 - (q1y - q2y) * m2 + (q1z - q2z) * m3
    n = (q1x - rx) * m1 - (q1y - ry) * m2 + (q1z - rz) * m3
    lx = d * q1x + n * q2x - n * q1x
    ly = d * q1y + n * q2y - n * q1y
    lz = d * q1z + n * q2z - n * q1z
    return lx, ly, lz, d


def homogeneous(p: GenericPoint):
    """Exact homogeneous coordinates (lambda..., d) of any point."""
    if not p.implicit:
        return tuple(map(Fraction, p.coords())) + (Fraction(1),)
    if isinstance(p, PointLLI):
        return lli_exact(p.args)
    if isinstance(p, PointLPI):
        return lpi_exact(p.args)
    raise TypeError(f"unsupported point {p!r}")


def coordinates(p: GenericPoint):
    """Exact Cartesian coordinates, or None when the construction has d=0."""
    h = homogeneous(p)
    d = h[-1]
    if d == 0:
        return None
    return tuple(v / d for v in h[:-1])


def _project(coords, axis: int | None):
    if axis is None or len(coords) == 2:
        return coords
    c0, c1 = _PROJ[axis]
    return (coords[c0], coords[c1])


def _resolve(pts, axis):
    """Coordinates of all points, or an Undefined result (first zero d)."""
    out = []
    for i, p in enumerate(pts):
        c = coordinates(p)
        if c is None:
            return None, PredicateResult.undefined(i)
        out.append(_project(c, axis))
    return out, None


def oracle_orient2d(p1, p2, p3, axis: int | None = None) -> PredicateResult:
    pts = (p1, p2, p3)
    if pts[0].dim == 3 and axis is None:
        axis = 2
    cs, undef = _resolve(pts, axis)
    if undef is not None:
        return undef
    (x1, y1), (x2, y2), (x3, y3) = cs
    det = (x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1)
    return _result(_sign(det))


def oracle_incircle(p1, p2, p3, p4, axis: int | None = None) -> PredicateResult:
    pts = (p1, p2, p3, p4)
    if pts[0].dim == 3 and axis is None:
        axis = 2
    cs, undef = _resolve(pts, axis)
    if undef is not None:
        return undef
    (x1, y1), (x2, y2), (x3, y3), (x4, y4) = cs
    a1, b1 = x1 - x4, y1 - y4
    a2, b2 = x2 - x4, y2 - y4
    a3, b3 = x3 - x4, y3 - y4
    c1 = a1 * a1 + b1 * b1
    c2 = a2 * a2 + b2 * b2
    c3 = a3 * a3 + b3 * b3
    det = (
        a1 * (b2 * c3 - c2 * b3)
        - b1 * (a2 * c3 - c2 * a3)
        + c1 * (a2 * b3 - b2 * a3)
    )
    return _result(_sign(det))


def oracle_orient3d(p1, p2, p3, p4) -> PredicateResult:
    cs, undef = _resolve((p1, p2, p3, p4), None)
    if undef is not None:
        return undef
    (x1, y1, z1), (x2, y2, z2), (x3, y3, z3), (x4, y4, z4) = cs
    a1, b1, c1 = x1 - x4, y1 - y4, z1 - z4
    a2, b2, c2 = x2 - x4, y2 - y4, z2 - z4
    a3, b3, c3 = x3 - x4, y3 - y4, z3 - z4
    det = (
        a1 * (b2 * c3 - c2 * b3)
        - b1 * (a2 * c3 - c2 * a3)
        + c1 * (a2 * b3 - b2 * a3)
    )
    return _result(_sign(det))


def oracle_orient2d3d(p1, p2, p3, r, s, t) -> PredicateResult:
    rc = tuple(map(Fraction, r.coords()))
    sc = tuple(map(Fraction, s.coords()))
    tc = tuple(map(Fraction, t.coords()))
    ux, uy, uz = (sc[i] - rc[i] for i in range(3))
    vx, vy, vz = (tc[i] - rc[i] for i in range(3))
    n = (uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx)
    axes = sorted(range(3), key=lambda a: (-abs(n[a]), a))
    for axis in axes:
        c0, c1 = _PROJ[axis]
        base = _sign(
            (sc[c0] - rc[c0]) * (tc[c1] - rc[c1])
            - (sc[c1] - rc[c1]) * (tc[c0] - rc[c0])
        )
        if base == 0:
            continue
        res = oracle_orient2d(p1, p2, p3, axis=axis)
        if res.undefined_index is not None:
            return res
        return _result(res.sign * base)
    raise DegeneratePlaneError("plane points are collinear in every projection")


def _result(s: int) -> PredicateResult:
    return POSITIVE if s > 0 else (NEGATIVE if s < 0 else ZERO)


def oracle_predicate(name: str, args, **kw) -> PredicateResult:
    """Dispatch by predicate name; ground truth for the staged engine."""
    fn = {
        "orient2d": oracle_orient2d,
        "incircle": oracle_incircle,
        "orient3d": oracle_orient3d,
        "orient2d3d": oracle_orient2d3d,
    }[name]
    return fn(*args, **kw)
