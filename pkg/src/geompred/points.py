"""Generic points: explicit coordinates or implicit intersections.

An implicit point stores only its defining explicit points; its homogeneous
coordinates (lambda..., d) are computed on demand under the requested model
(floating point, interval, expansion) and cached write-once according to
the global cache policy.  Points are immutable; concurrent cache fills are
benign because every thread computes the same deterministic values.

Cache levels mirror the ablation axis of the benchmark harness:

    none     - recompute everything on every predicate call
    fp       - cache float lambdas, d, and the local filter bound beta
    interval - additionally cache interval lambdas (the default)
    exact    - additionally cache expansion lambdas (memory heavy)
"""

from __future__ import annotations

from . import kernels as _k

CACHE_NONE = 0
CACHE_FP = 1
CACHE_INTERVAL = 2
CACHE_EXACT = 3

_LEVELS = {"none": CACHE_NONE, "fp": CACHE_FP, "interval": CACHE_INTERVAL,
           "exact": CACHE_EXACT}

_cache_level = CACHE_INTERVAL

# Recompute counters per model, for cache-behavior tests and reports.
recompute_counts = {"fp": 0, "iv": 0, "ex": 0}


def set_cache_level(level: int | str) -> None:
    global _cache_level
    if isinstance(level, str):
        try:
            level = _LEVELS[level]
        except KeyError:
            raise ValueError(f"unknown cache level {level!r}") from None
    if level not in (0, 1, 2, 3):
        raise ValueError(f"cache level out of range: {level}")
    _cache_level = level


def cache_level() -> int:
    return _cache_level


def cache_level_name() -> str:
    return ("none", "fp", "interval", "exact")[_cache_level]


class GenericPoint:
    __slots__ = ()
    dim = 0
    implicit = False


class Point2(GenericPoint):
    """Explicit 2D point."""

    __slots__ = ("x", "y")
    dim = 2

    def __init__(self, x: float, y: float):
        self.x = float(x)
        self.y = float(y)

    def coords(self) -> tuple[float, float]:
        return (self.x, self.y)

    def __repr__(self):
        return f"Point2({self.x!r}, {self.y!r})"


class Point3(GenericPoint):
    """Explicit 3D point."""

    __slots__ = ("x", "y", "z")
    dim = 3

    def __init__(self, x: float, y: float, z: float):
        self.x = float(x)
        self.y = float(y)
        self.z = float(z)

    def coords(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def __repr__(self):
        return f"Point3({self.x!r}, {self.y!r}, {self.z!r})"


def _xy(p) -> tuple[float, float]:
    if isinstance(p, GenericPoint):
        return (p.x, p.y)
    x, y = p
    return (float(x), float(y))


def _xyz(p) -> tuple[float, float, float]:
    if isinstance(p, GenericPoint):
        return (p.x, p.y, p.z)
    x, y, z = p
    return (float(x), float(y), float(z))


class PointLLI(GenericPoint):
    """Implicit 2D point: intersection of line (a1,a2) with line (b1,b2)."""

    __slots__ = ("args", "_fp", "_iv", "_ex", "_fr")
    dim = 2
    implicit = True

    def __init__(self, a1, a2, b1, b2):
        a1x, a1y = _xy(a1)
        a2x, a2y = _xy(a2)
        b1x, b1y = _xy(b1)
        b2x, b2y = _xy(b2)
        # Argument order matches the construction kernel's input order.
        self.args = (a1x, a1y, a2x, a2y, b1x, b1y, b2x, b2y)
        self._fp = None
        self._iv = None
        self._ex = None
        self._fr = None

    def __repr__(self):
        return f"PointLLI{self.args!r}"


class PointLPI(GenericPoint):
    """Implicit 3D point: intersection of line (q1,q2) with plane (r,s,t)."""

    __slots__ = ("args", "_fp", "_iv", "_ex", "_fr")
    dim = 3
    implicit = True

    def __init__(self, q1, q2, r, s, t):
        self.args = _xyz(q1) + _xyz(q2) + _xyz(r) + _xyz(s) + _xyz(t)
        self._fp = None
        self._iv = None
        self._ex = None
        self._fr = None

    def __repr__(self):
        return f"PointLPI{self.args!r}"


def fp_lambdas(p) -> tuple:
    """(lambda..., d, beta) under the float model; beta is the largest
    b-factor magnitude of the defining inputs."""
    if not p.implicit:
        c = p.coords()
        beta = max(abs(v) for v in c)
        return c + (1.0, beta)
    cached = p._fp
    if cached is None:
        recompute_counts["fp"] += 1
        kern = _k.LLI if p.dim == 2 else _k.LPI
        cached = kern.fp(*p.args)
        if _cache_level >= CACHE_FP:
            p._fp = cached
    return cached


def iv_lambdas(p) -> tuple:
    """(lambda..., d) as intervals."""
    if not p.implicit:
        return tuple((v, v) for v in p.coords()) + (((1.0, 1.0)),)
    cached = p._iv
    if cached is None:
        recompute_counts["iv"] += 1
        kern = _k.LLI if p.dim == 2 else _k.LPI
        cached = kern.iv(*p.args)
        if _cache_level >= CACHE_INTERVAL:
            p._iv = cached
    return cached


def ex_lambdas(p) -> tuple:
    """(lambda..., d) as expansions."""
    if not p.implicit:
        return tuple([v] if v != 0.0 else [] for v in p.coords()) + ([1.0],)
    cached = p._ex
    if cached is None:
        recompute_counts["ex"] += 1
        kern = _k.LLI if p.dim == 2 else _k.LPI
        cached = kern.ex(*p.args)
        if _cache_level >= CACHE_EXACT:
            p._ex = cached
    return cached


def fr_lambdas(p) -> tuple:
    """(lambda..., d) as exact rationals (the expansion route's deep-
    instance sibling; cached under the same policy level)."""
    if not p.implicit:
        from fractions import Fraction

        return tuple(Fraction(v) for v in p.coords()) + (Fraction(1),)
    cached = p._fr
    if cached is None:
        kern = _k.LLI if p.dim == 2 else _k.LPI
        cached = kern.fr(*p.args)
        if _cache_level >= CACHE_EXACT:
            p._fr = cached
    return cached


def lambdas(p, model: str):
    """Homogeneous representation of a point under the given model.

    'fp' returns (lambda..., d, beta); 'interval' and 'exact' return
    (lambda..., d) in the model's value type.  Explicit points have d = 1.
    """
    if model == "fp":
        return fp_lambdas(p)
    if model == "interval":
        return iv_lambdas(p)
    if model == "exact":
        return ex_lambdas(p)
    raise ValueError(f"unknown model {model!r}")


def lli_lambda(a1, a2, b1, b2, model: str):
    """Evaluate the line-line construction directly under a model."""
    return lambdas(PointLLI(a1, a2, b1, b2), model)


def lpi_lambda(q1, q2, r, s, t, model: str):
    """Evaluate the line-plane construction directly under a model."""
    return lambdas(PointLPI(q1, q2, r, s, t), model)


def approx_coords(p) -> tuple:
    """Float approximation of a point's coordinates (spatial sorting only)."""
    if not p.implicit:
        return p.coords()
    vals = fp_lambdas(p)
    d = vals[-2]
    if d == 0.0:
        return (0.0,) * p.dim
    return tuple(v / d for v in vals[:-2])
