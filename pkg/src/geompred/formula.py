"""Line-oriented polynomial formula DSL and its expression DAG.

Grammar::

    program := line+
    line    := ident '=' expr
    expr    := term (('+'|'-') term)*
    term    := factor ('*' factor)*
    factor  := ident | '(' expr ')'

Identifiers that are never assigned are inputs.  A directive line
``#translated a b`` declares that the difference ``a - b`` is a translated
input: occurrences of that subtraction become single degree-1 leaves whose
magnitude participates in the dynamic filter bound alongside the plain
inputs.  Every assignment names a root that can later be analyzed.

The DAG deduplicates structurally identical subexpressions and records, per
node, enough to run a forward roundoff analysis (see filters).
"""

from __future__ import annotations

import re

_TOKEN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|[=+\-*()]|\S")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

IN = "in"
TIN = "tin"
ADD = "add"
SUB = "sub"
MUL = "mul"


class FormulaError(ValueError):
    """Parse or structural error, with 1-based source position."""

    def __init__(self, message: str, line: int, col: int = 0):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class ExprDag:
    """Interned expression DAG with named roots."""

    def __init__(self) -> None:
        self.nodes: list[tuple] = []
        self._intern: dict[tuple, int] = {}
        self.assignments: dict[str, int] = {}
        self.inputs: dict[str, int] = {}
        self.translated: set[tuple[str, str]] = set()
        self._degree: dict[int, int] = {}

    def node(self, *key) -> int:
        idx = self._intern.get(key)
        if idx is None:
            idx = len(self.nodes)
            self.nodes.append(key)
            self._intern[key] = idx
        return idx

    def input_node(self, name: str) -> int:
        idx = self.node(IN, name)
        self.inputs.setdefault(name, idx)
        return idx

    def count(self, kind: str) -> int:
        return sum(1 for n in self.nodes if n[0] == kind)

    def degree(self, idx: int) -> int:
        """Homogeneous degree; raises on non-homogeneous sums."""
        d = self._degree.get(idx)
        if d is not None:
            return d
        kind = self.nodes[idx][0]
        if kind in (IN, TIN):
            d = 1
        elif kind == MUL:
            _, a, b = self.nodes[idx]
            d = self.degree(a) + self.degree(b)
        else:
            _, a, b = self.nodes[idx]
            da, db = self.degree(a), self.degree(b)
            if da != db:
                raise FormulaError(
                    f"non-homogeneous {kind}: degree {da} vs {db}", 0, 0
                )
            d = da
        self._degree[idx] = d
        return d

    def root(self, name: str) -> int:
        try:
            return self.assignments[name]
        except KeyError:
            raise KeyError(f"no root named {name!r}") from None

    def reachable(self, idx: int) -> list[int]:
        """Node ids reachable from idx, in topological (children-first) order."""
        seen: set[int] = set()
        order: list[int] = []
        stack = [(idx, False)]
        while stack:
            n, done = stack.pop()
            if done:
                order.append(n)
                continue
            if n in seen:
                continue
            seen.add(n)
            stack.append((n, True))
            node = self.nodes[n]
            if node[0] in (ADD, SUB, MUL):
                stack.append((node[1], False))
                stack.append((node[2], False))
        return order

    def leaves(self, idx: int) -> list[int]:
        return [n for n in self.reachable(idx) if self.nodes[n][0] in (IN, TIN)]

    def _compact(self) -> None:
        # Drop nodes unreachable from every assignment (inputs that were
        # interned before collapsing into translated leaves).
        keep: set[int] = set()
        for idx in self.assignments.values():
            keep.update(self.reachable(idx))
        remap: dict[int, int] = {}
        new_nodes: list[tuple] = []
        for old, node in enumerate(self.nodes):
            if old not in keep:
                continue
            kind = node[0]
            if kind in (ADD, SUB, MUL):
                node = (kind, remap[node[1]], remap[node[2]])
            remap[old] = len(new_nodes)
            new_nodes.append(node)
        self.nodes = new_nodes
        self._intern = {n: i for i, n in enumerate(new_nodes)}
        self.assignments = {k: remap[v] for k, v in self.assignments.items()}
        self.inputs = {
            name: remap[v] for name, v in self.inputs.items() if v in keep
        }
        self._degree = {}


class _Parser:
    def __init__(self, dag: ExprDag, tokens: list[str], line_no: int, cols: list[int]):
        self.dag = dag
        self.tokens = tokens
        self.line = line_no
        self.cols = cols
        self.pos = 0
        self.used_inputs: set[str] = set()

    def _err(self, msg: str):
        col = self.cols[self.pos] if self.pos < len(self.cols) else (
            self.cols[-1] + len(self.tokens[-1]) if self.tokens else 1
        )
        raise FormulaError(msg, self.line, col)

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        if self.pos >= len(self.tokens):
            self._err("unexpected end of line")
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expr(self) -> int:
        left = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            right = self.term()
            left = self._binary(ADD if op == "+" else SUB, left, right)
        return left

    def term(self) -> int:
        left = self.factor()
        while self.peek() == "*":
            self.take()
            right = self.factor()
            left = self.dag.node(MUL, left, right)
        return left

    def factor(self) -> int:
        t = self.peek()
        if t == "(":
            self.take()
            inner = self.expr()
            if self.peek() != ")":
                self._err("expected ')'")
            self.take()
            return inner
        if t is None or t in ("+", "*", ")", "="):
            self._err(f"expected identifier or '(', got {t!r}")
        if t in ("/", "%", "^"):
            self._err(f"non-polynomial construct {t!r}")
        if not _IDENT.match(t):
            self._err(f"invalid token {t!r}")
        self.take()
        if t in self.dag.assignments:
            return self.dag.assignments[t]
        self.used_inputs.add(t)
        return self.dag.input_node(t)

    def _binary(self, kind: str, a: int, b: int) -> int:
        # A subtraction of two declared-translated inputs collapses into a
        # single translated-input leaf.
        if kind == SUB:
            na, nb = self.dag.nodes[a], self.dag.nodes[b]
            if na[0] == IN and nb[0] == IN:
                if (na[1], nb[1]) in self.dag.translated:
                    return self.dag.node(TIN, na[1], nb[1])
        return self.dag.node(kind, a, b)


def parse_formula(text: str) -> ExprDag:
    """Parse DSL source into an expression DAG with named roots."""
    dag = ExprDag()
    used_as_input: dict[str, int] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line.split()
            if parts[0] != "#translated":
                raise FormulaError(f"unknown directive {parts[0]!r}", line_no, 1)
            if len(parts) != 3 or not all(_IDENT.match(p) for p in parts[1:]):
                raise FormulaError(
                    "expected '#translated a b' with two identifiers", line_no, 1
                )
            dag.translated.add((parts[1], parts[2]))
            continue
        tokens: list[str] = []
        cols: list[int] = []
        for m in _TOKEN.finditer(raw):
            tokens.append(m.group())
            cols.append(m.start() + 1)
        if len(tokens) < 3 or tokens[1] != "=":
            raise FormulaError("expected 'ident = expr'", line_no, cols[0] if cols else 1)
        name = tokens[0]
        if not _IDENT.match(name):
            raise FormulaError(f"invalid assignment target {name!r}", line_no, cols[0])
        if name in dag.assignments:
            raise FormulaError(f"{name!r} assigned twice", line_no, cols[0])
        if name in used_as_input:
            raise FormulaError(
                f"{name!r} used as input on line {used_as_input[name]} "
                "before being defined",
                line_no,
                cols[0],
            )
        p = _Parser(dag, tokens[2:], line_no, cols[2:])
        idx = p.expr()
        if p.pos != len(p.tokens):
            nxt = p.peek()
            if nxt in ("/", "%", "^"):
                p._err(f"non-polynomial construct {nxt!r}")
            p._err(f"trailing tokens starting at {nxt!r}")
        for u in p.used_inputs:
            used_as_input.setdefault(u, line_no)
        dag.assignments[name] = idx
    if not dag.assignments:
        raise FormulaError("empty program", 1, 1)
    dag._compact()
    return dag
