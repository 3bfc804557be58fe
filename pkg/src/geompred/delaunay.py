"""Incremental Delaunay triangulation over generic (possibly implicit) points.

Bowyer-Watson insertion with ghost triangles closing the convex hull: for
every hull edge a->b (hull counterclockwise) a ghost (b, a, GHOST) covers
the outer half-plane, so cavity collection is uniform.  All geometric
decisions go through the staged exact predicates, hence the construction is
exact: cocircular and collinear configurations take the boundary-inclusive
empty-circle rule (a Zero from incircle never violates).

3D points are triangulated by their XY projection, implicit points by the
exact projection of their construction; points whose construction is
undefined (d = 0) are rejected up front and reported.

Insertion order is a seeded shuffle refined by a Morton-order sort of
approximate coordinates: deterministic for a given seed, spatially local
for fast point location (a first-negative-edge walk from the last touched
triangle; visibility walks terminate on Delaunay triangulations with exact
predicates).
"""

from __future__ import annotations

from .expansion import expansion_diff, expansion_product, expansion_sign
from .points import approx_coords, ex_lambdas, fp_lambdas
from .predicates import force_stage, incircle, orient2d

GHOST = -1


class DegenerateInputError(ValueError):
    """Fewer than three distinct, non-collinear usable points."""


def point_defined(p) -> bool:
    """True unless p is an implicit point whose construction has d = 0."""
    if not p.implicit:
        return True
    vals = fp_lambdas(p)
    d, b = vals[-2], vals[-1]
    from . import kernels as _k

    ck = _k.construction(p.dim)
    t = ck.d_pad
    for _ in range(ck.d_spec.degree):
        t *= b
    if t > 2.0**-900 and (d > t or -d > t):
        return True
    return expansion_sign(ex_lambdas(p)[-1]) != 0


def points_coincide(p, q) -> bool:
    """Exact coordinate equality, lambda cross-products over expansions."""
    if p is q:
        return True
    if p.dim != q.dim:
        return False
    lp = ex_lambdas(p)
    lq = ex_lambdas(q)
    dp, dq = lp[-1], lq[-1]
    for c in range(p.dim):
        cross = expansion_diff(
            expansion_product(lp[c], dq), expansion_product(lq[c], dp)
        )
        if expansion_sign(cross) != 0:
            return False
    return True


def _morton_key(x: float, y: float) -> int:
    xi = min(max(int(x * 65535.0), 0), 65535)
    yi = min(max(int(y * 65535.0), 0), 65535)
    key = 0
    for b in range(16):
        key |= ((xi >> b) & 1) << (2 * b) | ((yi >> b) & 1) << (2 * b + 1)
    return key


def insertion_order(points, seed: int) -> list[int]:
    """Seeded spatial shuffle: random permutation stabilized into Morton
    order of the approximate positions."""
    import random

    idx = list(range(len(points)))
    random.Random(seed).shuffle(idx)
    coords = []
    for i in idx:
        c = approx_coords(points[i])
        x, y = c[0], c[1]
        if x != x or y != y:  # NaN guard: order only, never correctness
            x = y = 0.0
        coords.append((x, y))
    if not coords:
        return idx
    xs = [c[0] for c in coords]
    ys = [c[1] for c in coords]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    sx = 1.0 / (x1 - x0) if x1 > x0 else 0.0
    sy = 1.0 / (y1 - y0) if y1 > y0 else 0.0
    # XOR with a seeded mask permutes the quadrant order at every level of
    # the implicit quadtree: locality is preserved, order varies per seed.
    mask = random.Random(seed ^ 0x9E3779B9).getrandbits(32)
    keyed = [
        (_morton_key((x - x0) * sx, (y - y0) * sy) ^ mask, i)
        for (x, y), i in zip(coords, idx)
    ]
    keyed.sort()
    return [i for _, i in keyed]


class Triangulation:
    """Triangle-soup Delaunay triangulation with ghost hull closure.

    tris[t] is a vertex triple (GHOST allowed in the last slot) or None if
    the triangle died; nbrs[t][i] is the neighbor across the edge opposite
    vertex i.  vertices holds the accepted GenericPoints; input_vertex maps
    every input position to its vertex id (duplicates share one id) or None
    when the point was rejected.
    """

    def __init__(self):
        self.vertices = []
        self.tris: list[tuple | None] = []
        self.nbrs: list[list[int]] = []
        self._free: list[int] = []
        self._hint = 0
        self.input_vertex: list[int | None] = []
        self.rejected: list[tuple[int, str]] = []
        self.duplicates: dict[int, int] = {}

    # -- structure helpers ------------------------------------------------

    def _new_tri(self, a: int, b: int, c: int) -> int:
        # Rotate a ghost vertex into the last slot (orientation-preserving).
        if b == GHOST:
            a, b, c = c, a, b
        elif a == GHOST:
            a, b, c = b, c, a
        if self._free:
            t = self._free.pop()
            self.tris[t] = (a, b, c)
            self.nbrs[t] = [-9, -9, -9]
        else:
            t = len(self.tris)
            self.tris.append((a, b, c))
            self.nbrs.append([-9, -9, -9])
        return t

    def _kill(self, t: int) -> None:
        self.tris[t] = None
        self._free.append(t)

    def _edge_slot(self, t: int, a: int, b: int) -> int:
        vs = self.tris[t]
        for i in range(3):
            if vs[(i + 1) % 3] == a and vs[(i + 2) % 3] == b:
                return i
        raise AssertionError(f"edge ({a},{b}) not in triangle {t}:{vs}")

    def finite_triangles(self) -> list[tuple[int, int, int]]:
        return [vs for vs in self.tris if vs is not None and vs[2] != GHOST]

    def triangle_count(self) -> int:
        return sum(1 for vs in self.tris if vs is not None and vs[2] != GHOST)

    def hull_edges(self) -> list[tuple[int, int]]:
        """Directed hull edges a->b, counterclockwise."""
        return [
            (vs[1], vs[0])
            for vs in self.tris
            if vs is not None and vs[2] == GHOST
        ]

    # -- location ----------------------------------------------------------

    def locate(self, p):
        """('interior', t) | ('edge', t, slot) | ('vertex', t, vertex_id) |
        ('ghost', t) for points outside the hull."""
        t = self._hint
        if self.tris[t] is None:
            t = next(i for i, vs in enumerate(self.tris) if vs is not None)
        guard = 4 * len(self.tris) + 16
        while self.tris[t][2] == GHOST:
            t = self.nbrs[t][2]  # into the finite triangle behind the hull edge
        verts = self.vertices
        while True:
            guard -= 1
            if guard <= 0:
                raise AssertionError("point location failed to terminate")
            vs = self.tris[t]
            a, b, c = vs
            zero_slots = []
            moved = False
            for i, (u, v) in enumerate(((b, c), (c, a), (a, b))):
                o = orient2d(verts[u], verts[v], p)
                if o.is_negative:
                    nb = self.nbrs[t][i]
                    if self.tris[nb][2] == GHOST:
                        return ("ghost", nb)
                    t = nb
                    moved = True
                    break
                if o.is_zero:
                    zero_slots.append(i)
            if moved:
                continue
            if not zero_slots:
                return ("interior", t)
            if len(zero_slots) == 1:
                return ("edge", t, zero_slots[0])
            # two zero orientations: p coincides with the vertex shared by
            # both edges, the one opposite neither zero slot
            i, j = zero_slots
            return ("vertex", t, vs[3 - i - j])

    def _in_conflict(self, t: int, p) -> bool:
        vs = self.tris[t]
        verts = self.vertices
        if vs[2] == GHOST:
            return orient2d(verts[vs[0]], verts[vs[1]], p).is_positive
        return incircle(verts[vs[0]], verts[vs[1]], verts[vs[2]], p).is_positive

    # -- insertion ---------------------------------------------------------

    def insert(self, p) -> int:
        """Insert a point, returning its vertex id (an existing id if p
        exactly coincides with a present vertex)."""
        where = self.locate(p)
        if where[0] == "vertex":
            return where[2]
        if where[0] == "interior":
            seeds = [where[1]]
        elif where[0] == "edge":
            t, slot = where[1], where[2]
            seeds = [t, self.nbrs[t][slot]]
        else:
            seeds = [where[1]]
        v = len(self.vertices)
        self.vertices.append(p)
        cavity = set(seeds)
        queue = list(seeds)
        while queue:
            ti = queue.pop()
            for nb in self.nbrs[ti]:
                if nb not in cavity and self._in_conflict(nb, p):
                    cavity.add(nb)
                    queue.append(nb)
        boundary = []  # (a, b, outside triangle)
        for ti in cavity:
            vs = self.tris[ti]
            for i in range(3):
                nb = self.nbrs[ti][i]
                if nb not in cavity:
                    boundary.append((vs[(i + 1) % 3], vs[(i + 2) % 3], nb))
        for ti in cavity:
            self._kill(ti)
        # The cavity boundary is a simple directed cycle (the ghost vertex
        # occurs at most once); fan new triangles around v and stitch
        # consecutive ones together.
        edge_start: dict[int, int] = {}
        new_tris = []
        last_finite = None
        for a, b, outside in boundary:
            nt = self._new_tri(a, b, v)
            self.nbrs[nt][self._edge_slot(nt, a, b)] = outside
            self.nbrs[outside][self._edge_slot(outside, b, a)] = nt
            edge_start[a] = nt
            new_tris.append((a, b, nt))
            if self.tris[nt][2] != GHOST:
                last_finite = nt
        for a, b, nt in new_tris:
            nxt = edge_start[b]
            self.nbrs[nt][self._edge_slot(nt, b, v)] = nxt
            self.nbrs[nxt][self._edge_slot(nxt, v, b)] = nt
        self._hint = last_finite if last_finite is not None else next(
            i for i, vs in enumerate(self.tris) if vs is not None
        )
        return v


def triangulate(points, seed: int = 0) -> Triangulation:
    """Delaunay triangulation of a point collection.

    Implicit points with undefined constructions are rejected (reported in
    .rejected); exact duplicates are merged (.duplicates).  Raises
    DegenerateInputError when fewer than 3 usable distinct points remain or
    all of them are collinear.
    """
    points = list(points)
    if len(points) < 3:
        raise DegenerateInputError("need at least 3 points")
    tri = Triangulation()
    tri.input_vertex = [None] * len(points)
    usable = []
    order = insertion_order(points, seed)
    for i in order:
        p = points[i]
        if p.implicit and not point_defined(p):
            tri.rejected.append((i, "undefined construction (d = 0)"))
        else:
            usable.append(i)
    if len(usable) < 3:
        raise DegenerateInputError("fewer than 3 defined points")

    # First three pairwise-distinct, non-collinear points seed the mesh.
    i0 = usable[0]
    p0 = points[i0]
    i1 = None
    for k in range(1, len(usable)):
        if not points_coincide(p0, points[usable[k]]):
            i1 = usable[k]
            k1 = k
            break
    if i1 is None:
        raise DegenerateInputError("all points coincide")
    p1 = points[i1]
    i2 = None
    for k in range(k1 + 1, len(usable)):
        cand = points[usable[k]]
        o = orient2d(p0, p1, cand)
        if not o.is_zero:
            i2 = usable[k]
            k2 = k
            flip = o.is_negative
            break
    if i2 is None:
        raise DegenerateInputError("all points are collinear")
    p2 = points[i2]
    if flip:
        p1, p2 = p2, p1
        i1, i2 = i2, i1

    v0, v1, v2 = 0, 1, 2
    tri.vertices = [p0, p1, p2]
    t0 = tri._new_tri(v0, v1, v2)
    g01 = tri._new_tri(v1, v0, GHOST)
    g12 = tri._new_tri(v2, v1, GHOST)
    g20 = tri._new_tri(v0, v2, GHOST)
    tri.nbrs[t0] = [g12, g20, g01]
    tri.nbrs[g01] = [g20, g12, t0]
    tri.nbrs[g12] = [g01, g20, t0]
    tri.nbrs[g20] = [g12, g01, t0]
    tri.input_vertex[i0] = v0
    tri.input_vertex[i1] = v1
    tri.input_vertex[i2] = v2

    seeded = {i0, i1, i2}
    for i in usable:
        if i in seeded:
            continue
        before = len(tri.vertices)
        v = tri.insert(points[i])
        tri.input_vertex[i] = v
        if len(tri.vertices) == before:
            tri.duplicates[i] = v
    return tri


def verify_delaunay(tri: Triangulation) -> dict:
    """Exhaustive exact verification of the triangulation invariants.

    Checks combinatorial consistency (mutual neighbor links, each directed
    edge exactly once), positive orientation of every finite triangle,
    hull convexity, and the boundary-inclusive empty-circumcircle property
    across every interior edge, all with exact-stage-forced predicates.
    """
    from . import points as _pts

    violations = []
    verts = tri.vertices
    live = [(t, vs) for t, vs in enumerate(tri.tris) if vs is not None]
    # Expansion lambdas are reused across every adjacent check; caching them
    # for the duration is result-transparent and much faster.
    prev_level = _pts.cache_level()
    if prev_level < _pts.CACHE_EXACT:
        _pts.set_cache_level(_pts.CACHE_EXACT)
    edge_seen = {}
    for t, vs in live:
        for i in range(3):
            a, b = vs[(i + 1) % 3], vs[(i + 2) % 3]
            if (a, b) in edge_seen:
                violations.append(("duplicate-edge", (a, b, t, edge_seen[(a, b)])))
            edge_seen[(a, b)] = t
            nb = tri.nbrs[t][i]
            if nb < 0 or tri.tris[nb] is None:
                violations.append(("dead-neighbor", (t, i, nb)))
                continue
            try:
                back = tri.nbrs[nb][tri._edge_slot(nb, b, a)]
            except AssertionError:
                violations.append(("missing-twin-edge", (t, nb, (b, a))))
                continue
            if back != t:
                violations.append(("asymmetric-link", (t, nb)))
    for a, b in edge_seen:
        if (b, a) not in edge_seen:
            violations.append(("unpaired-edge", (a, b)))
    with force_stage("exact"):
        for t, vs in live:
            if vs[2] == GHOST:
                continue
            a, b, c = vs
            if not orient2d(verts[a], verts[b], verts[c]).is_positive:
                violations.append(("orientation", (t, vs)))
        checked = 0
        for t, vs in live:
            if vs[2] == GHOST:
                continue
            for i in range(3):
                nb = tri.nbrs[t][i]
                nvs = tri.tris[nb]
                if nvs is None or nvs[2] == GHOST or nb < t:
                    continue
                opp = next(x for x in nvs if x not in vs)
                r = incircle(verts[vs[0]], verts[vs[1]], verts[vs[2]], verts[opp])
                checked += 1
                if r.is_positive:
                    violations.append(("incircle", (t, nb, opp)))
                elif r.is_undefined:
                    violations.append(("undefined-vertex", (t, nb, opp)))
        hull = dict(tri.hull_edges())
        for a, b in list(hull.items()):
            c = hull.get(b)
            if c is None:
                violations.append(("broken-hull", (a, b)))
                continue
            if orient2d(verts[a], verts[b], verts[c]).is_negative:
                violations.append(("hull-reflex", (a, b, c)))
    _pts.set_cache_level(prev_level)
    return {
        "ok": not violations,
        "violations": violations,
        "finite_triangles": tri.triangle_count(),
        "incircle_checked": checked,
    }
