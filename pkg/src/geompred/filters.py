"""Semi-static filter derivation by forward roundoff analysis.

Each DAG node carries a pair (m, e): m bounds the magnitude of the
floating-point value in units of beta**degree, e bounds the absolute
difference between the floating-point value and the exact value in the same
units, where beta is the largest magnitude among the b-factors (plain
inputs and declared translated differences).  With u = 2**-53:

    plain input        -> degree 1, m = 1, e = 0
    translated input   -> degree 1, m = 1, e = u
    add/sub            -> m = ma + mb, e = ea + eb + u*m
    mul                -> m = ma * mb, e = ea*mb + eb*ma + ea*eb + u*m

All constant arithmetic is carried out with upward rounding so the derived
constant delta = e(root) never underestimates.  At runtime the filter
certifies the sign of a computed value v whenever |v| > delta * beta**k.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf, nextafter

from .expansion import two_product, two_sum
from .formula import ADD, IN, MUL, SUB, TIN, ExprDag, FormulaError

U = 2.0**-53

_MAX_DEGREE = 64


class FilterError(ValueError):
    pass


_SAFE_LO = 2.0**-900
_SAFE_HI = 2.0**900


def _add_up(a: float, b: float) -> float:
    s, r = two_sum(a, b)
    return nextafter(s, inf) if r > 0.0 else s


def _mul_up(a: float, b: float) -> float:
    p = a * b
    ap = abs(p)
    if p != 0.0 and (ap < _SAFE_LO or ap > _SAFE_HI or abs(a) > _SAFE_HI or abs(b) > _SAFE_HI):
        # Residual untrustworthy near the range edges; one ulp up is
        # always a sound upper bound for a to-nearest product.
        return nextafter(p, inf)
    _, r = two_product(a, b)
    return nextafter(p, inf) if r > 0.0 else p


@dataclass(frozen=True)
class FilterSpec:
    """Static error constant and homogeneous degree of a filtered value."""

    delta: float
    degree: int

    def __post_init__(self):
        if not self.delta > 0.0:
            raise FilterError(f"delta must be positive, got {self.delta}")
        if self.degree < 1:
            raise FilterError(f"degree must be >= 1, got {self.degree}")


def derive_filter(dag: ExprDag, root: str) -> FilterSpec:
    """Derive the (delta, degree) filter constants for a named root."""
    idx = dag.root(root)
    degree = dag.degree(idx)  # raises on non-homogeneous roots
    if degree > _MAX_DEGREE:
        raise FilterError(f"degree {degree} exceeds supported maximum")
    m: dict[int, float] = {}
    e: dict[int, float] = {}
    for n in dag.reachable(idx):
        node = dag.nodes[n]
        kind = node[0]
        if kind == IN:
            m[n], e[n] = 1.0, 0.0
        elif kind == TIN:
            m[n], e[n] = 1.0, U
        elif kind == MUL:
            _, a, b = node
            mm = _mul_up(m[a], m[b])
            err = _add_up(_mul_up(e[a], m[b]), _mul_up(e[b], m[a]))
            err = _add_up(err, _mul_up(e[a], e[b]))
            err = _add_up(err, _mul_up(U, mm))
            m[n], e[n] = mm, err
        else:
            _, a, b = node
            mm = _add_up(m[a], m[b])
            err = _add_up(_add_up(e[a], e[b]), _mul_up(U, mm))
            m[n], e[n] = mm, err
    delta = e[idx]
    if delta <= 0.0:
        raise FilterError(f"root {root!r} is exact; no filter applies")
    return FilterSpec(delta, degree)


def threshold(spec: FilterSpec, beta: float) -> float:
    """delta * beta**degree, rounded upward (never an underestimate)."""
    if beta < 0.0:
        raise ValueError("beta must be nonnegative")
    if beta == 0.0:
        return 0.0
    t = spec.delta
    for _ in range(spec.degree):
        t = _mul_up(t, beta)
    return t


def beta_of(values) -> float:
    """Largest magnitude among the listed b-factors (0 for an empty list)."""
    beta = 0.0
    for v in values:
        a = abs(v)
        if a > beta:
            beta = a
    return beta


def padded_delta(spec: FilterSpec) -> float:
    """delta inflated so a plain to-nearest product chain with beta**degree
    never undershoots the true threshold; used on hot paths where the
    stepwise upward rounding of threshold() is too slow."""
    pad = 1.0 + (spec.degree + 2) * 2.0 * U
    return _mul_up(spec.delta, pad)
