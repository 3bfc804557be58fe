"""Indirect geometric predicates with staged exact evaluation.

orient2d, incircle, orient3d and orient2d3d accept any mix of explicit and
implicit points.  Each call is permuted into a canonical instance (implicit
arguments first, sign flipped by the permutation parity) and resolved by
the cheapest certain stage:

  1. floating point with composed semi-static filters,
  2. interval arithmetic,
  3. error-free expansion arithmetic (always decides).

Denominator signs flip the result only for d's of odd multiplicity in the
instance's common denominator.  A predicate returns Undefined(i) only when
stage 3 proves that argument i's construction has d = 0.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass

from . import kernels as _k
from .expansion import ExpansionRangeError, expansion_sign
from .interval import iv_sign
from .points import ex_lambdas, fp_lambdas, fr_lambdas, iv_lambdas

# Thresholds this small cannot certify anything reliably (the padded
# multiply chain may have gone subnormal); defer to the interval stage.
_TINY = 2.0**-900


class DegeneratePlaneError(ValueError):
    """The three plane points are collinear in every axis projection."""


class PredicateResult:
    """Sign of an indirect predicate: Positive, Negative, Zero, or
    Undefined(index of the implicit argument whose d is exactly zero)."""

    __slots__ = ("sign", "undefined_index")

    def __init__(self, sign: int, undefined_index: int | None = None):
        self.sign = sign
        self.undefined_index = undefined_index

    @classmethod
    def undefined(cls, index: int) -> "PredicateResult":
        return cls(0, index)

    @property
    def is_undefined(self) -> bool:
        return self.undefined_index is not None

    @property
    def is_positive(self) -> bool:
        return self.sign > 0

    @property
    def is_negative(self) -> bool:
        return self.sign < 0

    @property
    def is_zero(self) -> bool:
        return self.sign == 0 and self.undefined_index is None

    def __neg__(self) -> "PredicateResult":
        if self.undefined_index is not None:
            return self
        return _SIGN_RESULT[-self.sign]

    def __eq__(self, other):
        if not isinstance(other, PredicateResult):
            return NotImplemented
        return (
            self.sign == other.sign
            and self.undefined_index == other.undefined_index
        )

    def __hash__(self):
        return hash((self.sign, self.undefined_index))

    def __repr__(self):
        if self.undefined_index is not None:
            return f"Undefined({self.undefined_index})"
        return {1: "Positive", -1: "Negative", 0: "Zero"}[self.sign]


POSITIVE = PredicateResult(1)
NEGATIVE = PredicateResult(-1)
ZERO = PredicateResult(0)
_SIGN_RESULT = {1: POSITIVE, -1: NEGATIVE, 0: ZERO}


@dataclass(frozen=True)
class Signature:
    """Canonicalization of an E/I tag sequence: the permutation sorting
    implicit arguments first (stably) and its parity."""

    tags: tuple[str, ...]
    permutation: tuple[int, ...]
    parity: str
    canonical: str


def _perm_parity(perm: tuple[int, ...]) -> bool:
    seen = [False] * len(perm)
    odd = False
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            odd = not odd
    return odd


def canonical_signature(tags, arity: int | None = None) -> Signature:
    tags = tuple(tags)
    if arity is None:
        arity = len(tags)
    if arity not in (3, 4) or len(tags) != arity:
        raise ValueError("arity must be 3 or 4 and match the tag count")
    if any(t not in ("E", "I") for t in tags):
        raise ValueError(f"tags must be 'E' or 'I', got {tags!r}")
    perm = tuple(
        [i for i, t in enumerate(tags) if t == "I"]
        + [i for i, t in enumerate(tags) if t == "E"]
    )
    return Signature(
        tags=tags,
        permutation=perm,
        parity="odd" if _perm_parity(perm) else "even",
        canonical="I" * tags.count("I") + "E" * tags.count("E"),
    )


def _canon_table(arity: int):
    table = []
    for mask in range(1 << arity):
        tags = tuple("I" if mask & (1 << i) else "E" for i in range(arity))
        sig = canonical_signature(tags, arity)
        table.append((sig.permutation, sig.parity == "odd", sig.canonical))
    return table


_CANON = {3: _canon_table(3), 4: _canon_table(4)}

# --------------------------------------------------------------------------
# stage statistics (thread-sharded counters)

_reg_lock = threading.Lock()
_registry: list[dict] = []


class _TLS(threading.local):
    def __init__(self):
        self.data: dict[str, list[int]] = {}
        with _reg_lock:
            _registry.append(self.data)


_tls = _TLS()


def _counters(pred: str) -> list[int]:
    d = _tls.data
    c = d.get(pred)
    if c is None:
        c = d[pred] = [0, 0, 0, 0]  # fp, interval, exact, undefined
    return c


def stats_snapshot() -> dict[str, dict[str, int]]:
    """Aggregated per-predicate stage counters across all threads."""
    out: dict[str, dict[str, int]] = {}
    with _reg_lock:
        shards = list(_registry)
    for shard in shards:
        for pred, (fp, ivc, exc, und) in list(shard.items()):
            agg = out.setdefault(
                pred,
                {
                    "fp_success": 0,
                    "interval_success": 0,
                    "exact_evaluations": 0,
                    "undefined_hits": 0,
                    "total": 0,
                },
            )
            agg["fp_success"] += fp
            agg["interval_success"] += ivc
            agg["exact_evaluations"] += exc
            agg["undefined_hits"] += und
            agg["total"] += fp + ivc + exc
    return out


def reset_stats() -> None:
    with _reg_lock:
        for shard in _registry:
            for c in shard.values():
                c[0] = c[1] = c[2] = c[3] = 0


# --------------------------------------------------------------------------
# stage forcing

_force: str | None = None


@contextmanager
def force_stage(stage: str | None):
    """Start evaluation at the given stage ('fp', 'interval', 'exact').

    Skipping stages never changes results; this exists for benchmarks and
    the stage-invariance test suite.  Not thread-safe against concurrent
    predicate calls in other threads.
    """
    global _force
    if stage not in (None, "fp", "interval", "exact"):
        raise ValueError(f"unknown stage {stage!r}")
    prev = _force
    _force = stage
    try:
        yield
    finally:
        _force = prev


def set_force_stage(stage: str | None) -> None:
    global _force
    if stage not in (None, "fp", "interval", "exact"):
        raise ValueError(f"unknown stage {stage!r}")
    _force = stage


# --------------------------------------------------------------------------
# staged evaluation core


def _stage_fp(inst, cargs) -> int | None:
    comps = inst.comps
    pslots = inst.parity_slots
    args: list[float] = []
    beta_all = 0.0
    neg = False
    slot = 0
    for p in cargs:
        if inst.tags[slot] == "I":
            vals = fp_lambdas(p)
            d = vals[-2]
            b = vals[-1]
            t = inst.d_pad
            for _ in range(inst.d_deg):
                t *= b
            if t < _TINY or not (d > t or -d > t):
                return None
            if b > beta_all:
                beta_all = b
            for c in comps:
                args.append(vals[c])
            args.append(d)
            if d < 0.0 and slot in pslots:
                neg = not neg
        else:
            coords = p.coords()
            for c in comps:
                args.append(coords[c])
        slot += 1
    lam, beta_o = inst.fp(*args)
    if beta_o > beta_all:
        beta_all = beta_o
    t = inst.lam_pad
    for _ in range(inst.lam_deg):
        t *= beta_all
    if t < _TINY:
        return None
    if lam > t:
        return -1 if neg else 1
    if -lam > t:
        return 1 if neg else -1
    return None


def _stage_iv(inst, cargs) -> int | None:
    comps = inst.comps
    pslots = inst.parity_slots
    args: list = []
    neg = False
    slot = 0
    for p in cargs:
        if inst.tags[slot] == "I":
            vals = iv_lambdas(p)
            dlo, dhi = vals[-1]
            if dlo > 0.0:
                pass
            elif dhi < 0.0:
                if slot in pslots:
                    neg = not neg
            else:
                # Zero or ambiguous d: only the exact stage may decide
                # between Undefined and a genuine sign.
                return None
            for c in comps:
                args.append(vals[c])
            args.append(vals[-1])
        else:
            coords = p.coords()
            for c in comps:
                args.append(coords[c])
        slot += 1
    s = iv_sign(inst.iv(*args))
    if s is None:
        return None
    if s == 0:
        return 0
    return -s if neg else s


def _stage_ex(inst, cargs) -> tuple[int, int | None]:
    if inst.deep:
        # The exact value of instances this deep has bits below binary64's
        # exponent floor even for unit-box inputs; expansions cannot finish.
        return _stage_rational(inst, cargs)
    try:
        return _stage_ex_expansion(inst, cargs)
    except ExpansionRangeError:
        return _stage_rational(inst, cargs)


def _stage_ex_expansion(inst, cargs) -> tuple[int, int | None]:
    comps = inst.comps
    pslots = inst.parity_slots
    args: list = []
    neg = False
    slot = 0
    for p in cargs:
        if inst.tags[slot] == "I":
            vals = ex_lambdas(p)
            ds = expansion_sign(vals[-1])
            if ds == 0:
                return 0, slot
            if ds < 0 and slot in pslots:
                neg = not neg
            for c in comps:
                args.append(vals[c])
            args.append(vals[-1])
        else:
            coords = p.coords()
            for c in comps:
                args.append(coords[c])
        slot += 1
    s = expansion_sign(inst.ex(*args))
    if s == 0:
        return 0, None
    return (-s if neg else s), None


def _stage_rational(inst, cargs) -> tuple[int, int | None]:
    comps = inst.comps
    pslots = inst.parity_slots
    args: list = []
    neg = False
    slot = 0
    for p in cargs:
        if inst.tags[slot] == "I":
            vals = fr_lambdas(p)
            d = vals[-1]
            if d == 0:
                return 0, slot
            if d < 0 and slot in pslots:
                neg = not neg
            for c in comps:
                args.append(vals[c])
            args.append(d)
        else:
            coords = p.coords()
            for c in comps:
                args.append(coords[c])
        slot += 1
    lam = inst.fr(*args)
    if lam == 0:
        return 0, None
    s = 1 if lam > 0 else -1
    return (-s if neg else s), None


def _run(inst, cargs, counters) -> tuple[int, int | None]:
    force = _force
    if force is None or force == "fp":
        s = _stage_fp(inst, cargs)
        if s is not None:
            counters[0] += 1
            return s, None
    if force != "exact":
        s = _stage_iv(inst, cargs)
        if s is not None:
            counters[1] += 1
            return s, None
    counters[2] += 1
    s, undef = _stage_ex(inst, cargs)
    if undef is not None:
        counters[3] += 1
    return s, undef


def _indirect(pred: str, pts: tuple, axis: int | None = None) -> PredicateResult:
    dim = pts[0].dim
    for p in pts:
        if p.dim != dim:
            raise ValueError("mixed 2D/3D arguments")
    if pred == "orient3d":
        if dim != 3:
            raise ValueError("orient3d requires 3D points")
    elif dim not in (2, 3):
        raise ValueError(f"unsupported dimension {dim}")
    mask = 0
    for i, p in enumerate(pts):
        if p.implicit:
            mask |= 1 << i
    perm, odd, sig = _CANON[len(pts)][mask]
    inst = _k.instance(pred, sig, dim, axis)
    cargs = tuple(pts[j] for j in perm)
    s, undef = _run(inst, cargs, _counters(pred))
    if undef is not None:
        return PredicateResult.undefined(perm[undef])
    if odd and s:
        s = -s
    return _SIGN_RESULT[s]


def stage_outcomes(pred: str, pts: tuple, axis: int | None = None) -> dict:
    """Independent per-stage outcomes for filter-soundness auditing.

    Returns {'fp': result-or-None, 'interval': result-or-None,
    'exact': result}, each already mapped through the canonical permutation
    parity, so every non-None entry is directly comparable with the oracle.
    """
    dim = pts[0].dim
    mask = 0
    for i, p in enumerate(pts):
        if p.implicit:
            mask |= 1 << i
    perm, odd, sig = _CANON[len(pts)][mask]
    inst = _k.instance(pred, sig, dim, axis)
    cargs = tuple(pts[j] for j in perm)

    def fix(s):
        if s is None:
            return None
        return _SIGN_RESULT[-s if (odd and s) else s]

    out = {
        "fp": fix(_stage_fp(inst, cargs)),
        "interval": fix(_stage_iv(inst, cargs)),
    }
    s, undef = _stage_ex(inst, cargs)
    if undef is not None:
        out["exact"] = PredicateResult.undefined(perm[undef])
    else:
        out["exact"] = fix(s)
    return out


# --------------------------------------------------------------------------
# public predicates


def orient2d(p1, p2, p3) -> PredicateResult:
    """Exact orientation of three points (2D, or 3D via XY projection)."""
    return _indirect("orient2d", (p1, p2, p3))


def incircle(p1, p2, p3, p4) -> PredicateResult:
    """Exact incircle test: Positive iff p4 lies inside the circle through
    p1, p2, p3 taken counterclockwise (2D, or 3D via XY projection)."""
    return _indirect("incircle", (p1, p2, p3, p4))


def orient3d(p1, p2, p3, p4) -> PredicateResult:
    """Exact 3D orientation of four points."""
    return _indirect("orient3d", (p1, p2, p3, p4))


def orient2d3d(p1, p2, p3, r, s, t) -> PredicateResult:
    """Orientation of p1, p2, p3 within the oriented plane through the
    explicit points r, s, t: the product of the two projected orientations.

    The projection drops the axis where the plane normal is largest; if
    that projection degenerates the other axes are tried.
    """
    from .points import Point2, Point3

    for q in (r, s, t):
        if not isinstance(q, Point3) or q.implicit:
            raise ValueError("plane points r, s, t must be explicit 3D points")
    for q in (p1, p2, p3):
        if q.dim != 3:
            raise ValueError("orient2d3d operates on 3D points")
    ux, uy, uz = s.x - r.x, s.y - r.y, s.z - r.z
    vx, vy, vz = t.x - r.x, t.y - r.y, t.z - r.z
    n = (uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx)
    axes = sorted(range(3), key=lambda a: (-abs(n[a]), a))
    for axis in axes:
        c0, c1 = _k.PROJECTION[axis]
        rc, sc, tc = r.coords(), s.coords(), t.coords()
        base = _indirect(
            "orient2d",
            (
                Point2(rc[c0], rc[c1]),
                Point2(sc[c0], sc[c1]),
                Point2(tc[c0], tc[c1]),
            ),
        )
        if base.sign == 0:
            continue
        res = _indirect("orient2d", (p1, p2, p3), axis=axis)
        if res.undefined_index is not None:
            return res
        return _SIGN_RESULT[res.sign * base.sign]
    raise DegeneratePlaneError("plane points are collinear in every projection")
