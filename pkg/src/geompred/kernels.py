"""Predicate instance kernels: formulas, compiled evaluators, filter table.

Every construction (line-line, line-plane) and every canonical predicate
instance is defined ONCE as formula text in the package DSL.  From that
single source this module compiles, per instance:

  * a floating-point evaluator that also returns the largest local b-factor
    magnitude (feeding the semi-static filter),
  * an interval evaluator,
  * an expansion evaluator,
  * composed semi-static filter constants derived across both the
    construction stage and the predicate polynomial stage.

Instances are canonical: implicit arguments sorted first; callers permute
arguments and flip signs through the signature machinery in predicates.
"""

from __future__ import annotations

import threading
from fractions import Fraction

from . import expansion as _ex
from . import interval as _iv
from .filters import FilterSpec, derive_filter, padded_delta
from .formula import ADD, IN, MUL, SUB, TIN, ExprDag, parse_formula

# ---------------------------------------------------------------------------
# construction formulas


def lli_text(prefix: str = "", lx: str = "lx", ly: str = "ly", d: str = "d") -> str:
    """Line-line intersection homogeneous coordinates.

    Inputs: the 8 coordinates of the two point pairs (a1, a2) and (b1, b2).
    The evaluation order matches the construction polynomials as published:
    the two 2x2 determinants are formed first, then combined with the
    coordinate differences.
    """
    p = prefix
    pairs = [
        (f"{p}a1x", f"{p}a2x"),
        (f"{p}a1y", f"{p}a2y"),
        (f"{p}b1x", f"{p}b2x"),
        (f"{p}b1y", f"{p}b2y"),
    ]
    lines = [f"#translated {a} {b}" for a, b in pairs]
    lines += [
        f"{p}deta = {p}a1x*{p}a2y - {p}a2x*{p}a1y",
        f"{p}detb = {p}b1x*{p}b2y - {p}b2x*{p}b1y",
        f"{lx} = {p}deta*({p}b1x - {p}b2x) - {p}detb*({p}a1x - {p}a2x)",
        f"{ly} = {p}deta*({p}b1y - {p}b2y) - {p}detb*({p}a1y - {p}a2y)",
        f"{d} = ({p}a1x - {p}a2x)*({p}b1y - {p}b2y)"
        f" - ({p}a1y - {p}a2y)*({p}b1x - {p}b2x)",
    ]
    return "\n".join(lines)


LLI_INPUTS = ("a1x", "a1y", "a2x", "a2y", "b1x", "b1y", "b2x", "b2y")


def lpi_text(
    prefix: str = "",
    lx: str | None = "lx",
    ly: str | None = "ly",
    lz: str | None = "lz",
    d: str = "d",
) -> str:
    """Line-plane intersection homogeneous coordinates.

    Line through q1, q2; plane through r, s, t.  d and the auxiliary
    determinant share the row-2/row-3 minors; lambda components may be
    omitted (pass None) when a projection never consumes them.
    """
    p = prefix
    pairs = [
        (f"{p}q1x", f"{p}q2x"),
        (f"{p}q1y", f"{p}q2y"),
        (f"{p}q1z", f"{p}q2z"),
        (f"{p}sx", f"{p}rx"),
        (f"{p}sy", f"{p}ry"),
        (f"{p}sz", f"{p}rz"),
        (f"{p}tx", f"{p}rx"),
        (f"{p}ty", f"{p}ry"),
        (f"{p}tz", f"{p}rz"),
        (f"{p}q1x", f"{p}rx"),
        (f"{p}q1y", f"{p}ry"),
        (f"{p}q1z", f"{p}rz"),
    ]
    lines = [f"#translated {a} {b}" for a, b in pairs]
    lines += [
        f"{p}m1 = ({p}sy - {p}ry)*({p}tz - {p}rz) - ({p}sz - {p}rz)*({p}ty - {p}ry)",
        f"{p}m2 = ({p}sx - {p}rx)*({p}tz - {p}rz) - ({p}sz - {p}rz)*({p}tx - {p}rx)",
        f"{p}m3 = ({p}sx - {p}rx)*({p}ty - {p}ry) - ({p}sy - {p}ry)*({p}tx - {p}rx)",
        f"{d} = ({p}q1x - {p}q2x)*{p}m1 - ({p}q1y - {p}q2y)*{p}m2"
        f" + ({p}q1z - {p}q2z)*{p}m3",
        f"{p}n = ({p}q1x - {p}rx)*{p}m1 - ({p}q1y - {p}ry)*{p}m2"
        f" + ({p}q1z - {p}rz)*{p}m3",
    ]
    if lx is not None:
        lines.append(f"{lx} = {d}*{p}q1x + {p}n*{p}q2x - {p}n*{p}q1x")
    if ly is not None:
        lines.append(f"{ly} = {d}*{p}q1y + {p}n*{p}q2y - {p}n*{p}q1y")
    if lz is not None:
        lines.append(f"{lz} = {d}*{p}q1z + {p}n*{p}q2z - {p}n*{p}q1z")
    return "\n".join(lines)


LPI_INPUTS = (
    "q1x", "q1y", "q1z", "q2x", "q2y", "q2z",
    "rx", "ry", "rz", "sx", "sy", "sz", "tx", "ty", "tz",
)

# ---------------------------------------------------------------------------
# code generation


def _compile(
    dag: ExprDag,
    roots: tuple[str, ...],
    inputs: tuple[str, ...],
    mode: str,
    carriers: frozenset[str] = frozenset(),
    want_beta: bool = False,
    name: str = "f",
):
    """Compile a DAG into a python function of the given positional inputs.

    mode 'fp' works on floats, 'iv' on (lo, hi) tuples, 'ex' on expansions.
    ``carriers`` are inputs already in the mode's value type (cached lambda
    and d values); other inputs are raw floats that get wrapped.  With
    ``want_beta`` the fp function additionally returns the largest local
    b-factor magnitude (plain non-carrier inputs plus translated diffs).
    """
    root_ids = [dag.root(r) for r in roots]
    order: list[int] = []
    seen: set[int] = set()
    for rid in root_ids:
        for n in dag.reachable(rid):
            if n not in seen:
                seen.add(n)
                order.append(n)
    lines = [f"def {name}({', '.join(inputs)}):"]
    val: dict[int, str] = {}
    bfactors: list[str] = []
    for n in order:
        node = dag.nodes[n]
        kind = node[0]
        t = f"t{n}"
        if kind == IN:
            nm = node[1]
            if nm in carriers:
                val[n] = nm
            elif mode == "fp":
                val[n] = nm
                bfactors.append(f"abs({nm})")
            elif mode == "iv":
                lines.append(f"    {t} = ({nm}, {nm})")
                val[n] = t
            elif mode == "fr":
                lines.append(f"    {t} = _F({nm})")
                val[n] = t
            else:
                lines.append(f"    {t} = [{nm}] if {nm} != 0.0 else []")
                val[n] = t
        elif kind == TIN:
            a, b = node[1], node[2]
            if mode == "fp":
                lines.append(f"    {t} = {a} - {b}")
                bfactors.append(f"abs({t})")
            elif mode == "iv":
                lines.append(f"    {t} = _ivfs({a}, {b})")
            elif mode == "fr":
                lines.append(f"    {t} = _F({a}) - _F({b})")
            else:
                lines.append(f"    {t} = _exfs({a}, {b})")
            val[n] = t
        else:
            a, b = val[node[1]], val[node[2]]
            if mode in ("fp", "fr"):
                op = {ADD: "+", SUB: "-", MUL: "*"}[kind]
                lines.append(f"    {t} = {a} {op} {b}")
            elif mode == "iv":
                fn = {ADD: "_iva", SUB: "_ivs", MUL: "_ivm"}[kind]
                lines.append(f"    {t} = {fn}({a}, {b})")
            else:
                fn = {ADD: "_exa", SUB: "_exs", MUL: "_exm"}[kind]
                lines.append(f"    {t} = {fn}({a}, {b})")
            val[n] = t
    outs = [val[r] for r in root_ids]
    if want_beta:
        if bfactors:
            lines.append(f"    beta = max({', '.join(bfactors)})")
        else:
            lines.append("    beta = 0.0")
        outs.append("beta")
    lines.append(f"    return {', '.join(outs)}" if len(outs) > 1 else f"    return {outs[0]}")
    src = "\n".join(lines)
    ns = {
        "_ivfs": _iv.iv_from_sub,
        "_iva": _iv.iv_add,
        "_ivs": _iv.iv_sub,
        "_ivm": _iv.iv_mul,
        "_exfs": _ex.from_sub,
        "_exa": _ex.expansion_sum,
        "_exs": _ex.expansion_diff,
        "_exm": _ex.expansion_product,
        "_F": Fraction,
        "abs": abs,
        "max": max,
    }
    exec(compile(src, f"<kernel:{name}:{mode}>", "exec"), ns)
    fn = ns[name]
    fn.__source__ = src
    return fn


class ConstructionKernel:
    """Per-construction-kind evaluators and the d-sign filter."""

    __slots__ = (
        "kind", "inputs", "fp", "iv", "ex", "fr", "d_spec", "d_pad", "n_lambdas",
    )

    def __init__(self, kind: str):
        self.kind = kind
        if kind == "lli":
            text, inputs, n_l = lli_text(), LLI_INPUTS, 2
            roots = ("lx", "ly", "d")
        else:
            text, inputs, n_l = lpi_text(), LPI_INPUTS, 3
            roots = ("lx", "ly", "lz", "d")
        self.inputs = inputs
        self.n_lambdas = n_l
        dag = parse_formula(text)
        self.fp = _compile(dag, roots, inputs, "fp", want_beta=True, name=f"{kind}_fp")
        self.iv = _compile(dag, roots, inputs, "iv", name=f"{kind}_iv")
        self.ex = _compile(dag, roots, inputs, "ex", name=f"{kind}_ex")
        self.fr = _compile(dag, roots, inputs, "fr", name=f"{kind}_fr")
        self.d_spec = derive_filter(dag, "d")
        self.d_pad = padded_delta(self.d_spec)


LLI = ConstructionKernel("lli")
LPI = ConstructionKernel("lpi")

# ---------------------------------------------------------------------------
# predicate instance formulas

# Which lambda components of a 3D construction survive the projection that
# drops the given axis, in (x-like, y-like) order.
PROJECTION = {2: (0, 1), 1: (0, 2), 0: (1, 2)}


class _Outer:
    """Accumulates outer-formula lines plus slot/input layout."""

    def __init__(self, dim: int):
        self.dim = dim
        self.pairs: list[tuple[str, str]] = []
        self.lines: list[str] = []
        self.inputs: list[str] = []
        self.slots: list[tuple] = []

    def implicit(self, i: int, coords: int) -> tuple[str, ...]:
        names = tuple(f"l{i}{c}" for c in ("x", "y", "z")[:coords]) + (f"d{i}",)
        self.inputs += list(names)
        self.slots.append(("I",))
        return names

    def explicit(self, i: int, coords: int) -> tuple[str, ...]:
        names = tuple(f"p{i}{c}" for c in ("x", "y", "z")[:coords])
        self.inputs += list(names)
        self.slots.append(("E",))
        return names

    def tin(self, a: str, b: str) -> str:
        self.pairs.append((a, b))
        return f"({a} - {b})"

    def let(self, name: str, expr: str) -> str:
        self.lines.append(f"{name} = {expr}")
        return name

    def text(self) -> str:
        out = [f"#translated {a} {b}" for a, b in self.pairs]
        return "\n".join(out + self.lines)


def _orient2d_outer(sig: str) -> tuple[_Outer, tuple[int, ...]]:
    o = _Outer(2)
    n_imp = sig.count("I")
    if sig == "EEE":
        x1, y1 = o.explicit(1, 2)
        x2, y2 = o.explicit(2, 2)
        x3, y3 = o.explicit(3, 2)
        a = o.tin(x2, x1)
        b = o.tin(y3, y1)
        c = o.tin(y2, y1)
        e = o.tin(x3, x1)
        o.let("lam", f"{a}*{b} - {c}*{e}")
        return o, ()
    if sig == "IEE":
        lx, ly, d = o.implicit(1, 2)
        x2, y2 = o.explicit(2, 2)
        x3, y3 = o.explicit(3, 2)
        o.let("f1", f"{d}*{x2} - {lx}")
        o.let("f2", f"{d}*{y3} - {ly}")
        o.let("f3", f"{d}*{y2} - {ly}")
        o.let("f4", f"{d}*{x3} - {lx}")
        o.let("lam", "f1*f2 - f3*f4")
        return o, ()
    if sig == "IIE":
        l1x, l1y, d1 = o.implicit(1, 2)
        l2x, l2y, d2 = o.implicit(2, 2)
        x3, y3 = o.explicit(3, 2)
        o.let("f1", f"{d1}*{l2x} - {d2}*{l1x}")
        o.let("f2", f"{d1}*{y3} - {l1y}")
        o.let("f3", f"{d1}*{l2y} - {d2}*{l1y}")
        o.let("f4", f"{d1}*{x3} - {l1x}")
        o.let("lam", "f1*f2 - f3*f4")
        return o, (1,)
    if sig == "III":
        l1x, l1y, d1 = o.implicit(1, 2)
        l2x, l2y, d2 = o.implicit(2, 2)
        l3x, l3y, d3 = o.implicit(3, 2)
        o.let("f1", f"{d1}*{l2x} - {d2}*{l1x}")
        o.let("f2", f"{d1}*{l3y} - {d3}*{l1y}")
        o.let("f3", f"{d1}*{l2y} - {d2}*{l1y}")
        o.let("f4", f"{d1}*{l3x} - {d3}*{l1x}")
        o.let("lam", "f1*f2 - f3*f4")
        return o, (1, 2)
    raise ValueError(sig)


def _det3(o: _Outer, rows: list[tuple[str, str, str]]) -> None:
    (a11, a12, a13), (a21, a22, a23), (a31, a32, a33) = rows
    o.let("c1", f"{a22}*{a33} - {a23}*{a32}")
    o.let("c2", f"{a21}*{a33} - {a23}*{a31}")
    o.let("c3", f"{a21}*{a32} - {a22}*{a31}")
    o.let("lam", f"{a11}*c1 - {a12}*c2 + {a13}*c3")


def _incircle_outer(sig: str) -> tuple[_Outer, tuple[int, ...]]:
    o = _Outer(2)
    n_imp = sig.count("I")
    imp: dict[int, tuple[str, str, str]] = {}
    exp: dict[int, tuple[str, str]] = {}
    for i, tag in enumerate(sig, start=1):
        if tag == "I":
            lx, ly, d = o.implicit(i, 2)
            imp[i] = (lx, ly, d)
        else:
            exp[i] = o.explicit(i, 2)
    rows: list[tuple[str, str, str]] = []
    if 4 in imp:
        # fully implicit: entries over the common denominator (d1..d4)^2
        l4x, l4y, d4 = imp[4]
        o.let("d4sq", f"{d4}*{d4}")
        o.let("s4", f"{l4x}*{l4x} + {l4y}*{l4y}")
        for i in (1, 2, 3):
            lx, ly, d = imp[i]
            o.let(f"d{i}sq", f"{d}*{d}")
            o.let(f"s{i}", f"{lx}*{lx} + {ly}*{ly}")
            o.let(f"w{i}", f"{d}*{d4}*({lx}*{l4x} + {ly}*{l4y})")
            m1 = o.let(f"m{i}1", f"{d}*d4sq*{lx} - d{i}sq*{d4}*{l4x}")
            m2 = o.let(f"m{i}2", f"{d}*d4sq*{ly} - d{i}sq*{d4}*{l4y}")
            m3 = o.let(f"m{i}3", f"d4sq*s{i} + d{i}sq*s4 - w{i} - w{i}")
            rows.append((m1, m2, m3))
    else:
        x4, y4 = exp[4]
        o.let("s4", f"{x4}*{x4} + {y4}*{y4}")
        for i in (1, 2, 3):
            if i in imp:
                lx, ly, d = imp[i]
                o.let(f"d{i}sq", f"{d}*{d}")
                o.let(f"s{i}", f"{lx}*{lx} + {ly}*{ly}")
                o.let(f"w{i}", f"{d}*({lx}*{x4} + {ly}*{y4})")
                m1 = o.let(f"m{i}1", f"{d}*{lx} - d{i}sq*{x4}")
                m2 = o.let(f"m{i}2", f"{d}*{ly} - d{i}sq*{y4}")
                m3 = o.let(f"m{i}3", f"s{i} + d{i}sq*s4 - w{i} - w{i}")
            else:
                xi, yi = exp[i]
                a = o.tin(xi, x4)
                b = o.tin(yi, y4)
                m1 = o.let(f"m{i}1", a)
                m2 = o.let(f"m{i}2", b)
                m3 = o.let(f"m{i}3", f"{a}*{a} + {b}*{b}")
            rows.append((m1, m2, m3))
    _det3(o, rows)
    return o, ()


def _orient3d_outer(sig: str) -> tuple[_Outer, tuple[int, ...]]:
    o = _Outer(3)
    imp: dict[int, tuple[str, str, str, str]] = {}
    exp: dict[int, tuple[str, str, str]] = {}
    for i, tag in enumerate(sig, start=1):
        if tag == "I":
            imp[i] = o.implicit(i, 3)
        else:
            exp[i] = o.explicit(i, 3)
    rows: list[tuple[str, str, str]] = []
    parity: tuple[int, ...]
    if 4 in imp:
        l4x, l4y, l4z, d4 = imp[4]
        for i in (1, 2, 3):
            lx, ly, lz, d = imp[i]
            r1 = o.let(f"r{i}x", f"{d4}*{lx} - {d}*{l4x}")
            r2 = o.let(f"r{i}y", f"{d4}*{ly} - {d}*{l4y}")
            r3 = o.let(f"r{i}z", f"{d4}*{lz} - {d}*{l4z}")
            rows.append((r1, r2, r3))
        parity = (0, 1, 2, 3)
    else:
        x4, y4, z4 = exp[4]
        par = []
        for i in (1, 2, 3):
            if i in imp:
                lx, ly, lz, d = imp[i]
                r1 = o.let(f"r{i}x", f"{lx} - {d}*{x4}")
                r2 = o.let(f"r{i}y", f"{ly} - {d}*{y4}")
                r3 = o.let(f"r{i}z", f"{lz} - {d}*{z4}")
                par.append(i - 1)
            else:
                xi, yi, zi = exp[i]
                r1 = o.tin(xi, x4)
                r2 = o.tin(yi, y4)
                r3 = o.tin(zi, z4)
            rows.append((r1, r2, r3))
        parity = tuple(par)
    _det3(o, rows)
    return o, parity


_OUTER_BUILDERS = {
    "orient2d": _orient2d_outer,
    "incircle": _incircle_outer,
    "orient3d": _orient3d_outer,
}

SIGNATURES = {
    "orient2d": ("EEE", "IEE", "IIE", "III"),
    "incircle": ("EEEE", "IEEE", "IIEE", "IIIE", "IIII"),
    "orient3d": ("EEEE", "IEEE", "IIEE", "IIIE", "IIII"),
}


class Instance:
    """A canonical predicate instance with evaluators and filter constants."""

    __slots__ = (
        "pred", "sig", "dim", "axis", "arity", "n_implicit",
        "fp", "iv", "ex", "fr", "lam_spec", "lam_pad", "lam_deg",
        "d_spec", "d_pad", "d_deg", "parity_slots", "comps", "tags", "deep",
    )

    def __init__(self, pred: str, sig: str, dim: int, axis: int | None):
        self.pred = pred
        self.sig = sig
        self.dim = dim
        self.axis = axis
        self.arity = len(sig)
        self.n_implicit = sig.count("I")
        self.tags = sig
        outer, parity = _OUTER_BUILDERS[pred](sig)
        self.parity_slots = parity
        # Composed DAG: construction formulas for each implicit slot feeding
        # the predicate polynomial; single beta normalizes both stages.
        chunks = []
        ck = LLI if dim == 2 else LPI
        is3d_pred = pred == "orient3d"
        for i, tag in enumerate(sig, start=1):
            if tag != "I":
                continue
            if dim == 2:
                chunks.append(lli_text(f"p{i}_", lx=f"l{i}x", ly=f"l{i}y", d=f"d{i}"))
            elif is3d_pred:
                chunks.append(
                    lpi_text(f"p{i}_", lx=f"l{i}x", ly=f"l{i}y", lz=f"l{i}z", d=f"d{i}")
                )
            else:
                names: list[str | None] = [None, None, None]
                u, v = PROJECTION[axis]
                names[u] = f"l{i}x"
                names[v] = f"l{i}y"
                chunks.append(
                    lpi_text(f"p{i}_", lx=names[0], ly=names[1], lz=names[2], d=f"d{i}")
                )
        composed = parse_formula("\n".join(chunks + [outer.text()]))
        self.lam_spec = derive_filter(composed, "lam")
        self.lam_pad = padded_delta(self.lam_spec)
        self.lam_deg = self.lam_spec.degree
        # High-degree instances go to the exact stage's rational route
        # directly: beyond this depth expansions are slower (and from
        # degree ~19 cannot even represent the exact value's low bits for
        # unit-box inputs, since those fall below the subnormal floor).
        self.deep = self.lam_deg >= 12
        self.d_spec = ck.d_spec
        self.d_pad = ck.d_pad
        self.d_deg = ck.d_spec.degree
        # Outer-only DAG for runtime evaluation over cached lambdas.
        outer_dag = parse_formula(outer.text())
        inputs = tuple(outer.inputs)
        carriers = frozenset(n for n in inputs if n[0] in "ld")
        nm = f"{pred}_{sig}"
        self.fp = _compile(outer_dag, ("lam",), inputs, "fp", carriers, True, nm)
        self.iv = _compile(outer_dag, ("lam",), inputs, "iv", carriers, False, nm)
        self.ex = _compile(outer_dag, ("lam",), inputs, "ex", carriers, False, nm)
        self.fr = _compile(outer_dag, ("lam",), inputs, "fr", carriers, False, nm)
        # Per-slot lambda components consumed from the cache, resolving the
        # projection for 2D predicates over 3D constructions.
        if dim == 2:
            self.comps = (0, 1)
        elif is3d_pred:
            self.comps = (0, 1, 2)
        else:
            self.comps = PROJECTION[axis]


_instances: dict[tuple, Instance] = {}
_lock = threading.Lock()


def instance(pred: str, sig: str, dim: int, axis: int | None = None) -> Instance:
    if pred == "orient3d" or dim == 2:
        axis = None
    elif axis is None:
        axis = 2
    key = (pred, sig, dim, axis)
    inst = _instances.get(key)
    if inst is None:
        with _lock:
            inst = _instances.get(key)
            if inst is None:
                inst = Instance(pred, sig, dim, axis)
                _instances[key] = inst
    return inst


def construction(dim: int) -> ConstructionKernel:
    return LLI if dim == 2 else LPI


def filter_table() -> dict[tuple, tuple[float, int]]:
    """All canonical filter constants for the standard instance set."""
    table: dict[tuple, tuple[float, int]] = {}
    for kind, ck in (("lli", LLI), ("lpi", LPI)):
        table[("construction", kind, "d")] = (ck.d_spec.delta, ck.d_spec.degree)
    for pred, sigs in SIGNATURES.items():
        dims = (3,) if pred == "orient3d" else (2, 3)
        for dim in dims:
            for sig in sigs:
                inst = instance(pred, sig, dim)
                table[(pred, sig, dim, inst.axis)] = (
                    inst.lam_spec.delta,
                    inst.lam_spec.degree,
                )
    return table


def selfcheck() -> None:
    """Re-derive every canonical filter constant and compare bit-exactly."""
    before = filter_table()
    with _lock:
        _instances.clear()
    after = filter_table()
    if before != after:
        raise AssertionError("filter table re-derivation mismatch")
