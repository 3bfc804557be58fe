"""Benchmark harness: point-set generators, experiment runner, CLI.

Six experiments exercise the predicate stack through Delaunay
triangulation:

    1.1  random explicit 2D points in the unit square
    1.2  random mix of explicit 2D points and line-line intersections
         whose exact intersections lie in the unit square
    1.3  regular grid, a share of whose nodes are built as exact
         line-line intersections (heavy exact-arithmetic pressure)
    2.1  random explicit 3D points in the unit cube (XY-projected)
    2.2  random mix of explicit 3D points and line-plane intersections
         inside the unit cube
    2.3  regular XY-grid of 3D points with random Z, implicit ones built
         as vertical-line/plane intersections hitting the nodes exactly

Generation is deterministic per seed and every implicit point is checked
against the rational reference for a nonzero denominator (and for the
stated containment).  Timing covers triangulation only; generation and
verification are excluded.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
import tracemalloc
from dataclasses import dataclass, field
from fractions import Fraction

from . import points as _pts
from .delaunay import triangulate, verify_delaunay
from .oracle import lli_exact, lpi_exact
from .points import Point2, Point3, PointLLI, PointLPI
from .predicates import reset_stats, set_force_stage, stats_snapshot

EXPERIMENTS = ("1.1", "1.2", "1.3", "2.1", "2.2", "2.3")

CSV_HEADER = (
    "experiment,n_points,implicit_pct,cache,seed,elapsed_s,peak_bytes,"
    "orient2d_calls,incircle_calls,orient3d_calls,fp_hits,interval_hits,"
    "exact_hits,undefined_hits,triangles,verified"
)


@dataclass
class ExperimentConfig:
    experiment: str
    n_points: int
    implicit_pct: int = 0
    cache: str = "interval"
    seed: int = 0
    out: str | None = None
    verify: bool = False
    force_stage: str | None = None
    measure_memory: bool = False
    dump_points: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.n_points < 3:
            raise ValueError("n_points must be at least 3")
        if not 0 <= self.implicit_pct <= 100:
            raise ValueError("implicit_pct must be within 0..100")
        if self.experiment in ("1.1", "2.1"):
            self.implicit_pct = 0  # reference experiments are all-explicit
        if self.cache not in ("none", "fp", "interval", "exact"):
            raise ValueError(f"unknown cache level {self.cache!r}")


@dataclass
class RunReport:
    config: ExperimentConfig
    elapsed_s: float
    peak_bytes: int
    predicate_calls: dict
    stage_stats: dict
    triangles: int
    verified: str  # "true" | "false" | "skipped"
    rejected: int = 0
    duplicates: int = 0
    violations: list = field(default_factory=list)

    def csv_row(self) -> str:
        c = self.config
        pc = self.predicate_calls
        st = self.stage_stats
        return ",".join(
            str(v)
            for v in (
                c.experiment,
                c.n_points,
                c.implicit_pct,
                c.cache,
                c.seed,
                f"{self.elapsed_s:.6f}",
                self.peak_bytes,
                pc.get("orient2d", 0),
                pc.get("incircle", 0),
                pc.get("orient3d", 0),
                st["fp"],
                st["interval"],
                st["exact"],
                st["undefined"],
                self.triangles,
                self.verified,
            )
        )


# ---------------------------------------------------------------------------
# generators


def _lli_near(rng, tx: float, ty: float, check_square: bool) -> PointLLI | None:
    a1 = rng.uniform(0.0, math.tau)
    a2 = rng.uniform(0.0, math.tau)
    if abs(math.sin(a1 - a2)) < 0.05:
        return None
    u1 = 0.2 + 0.3 * rng.random()
    u2 = 0.2 + 0.3 * rng.random()
    c1, s1 = math.cos(a1), math.sin(a1)
    c2, s2 = math.cos(a2), math.sin(a2)
    p = PointLLI(
        (tx - u1 * c1, ty - u1 * s1),
        (tx + u1 * c1, ty + u1 * s1),
        (tx - u2 * c2, ty - u2 * s2),
        (tx + u2 * c2, ty + u2 * s2),
    )
    lx, ly, d = lli_exact(p.args)
    if d == 0:
        return None
    if check_square:
        x, y = lx / d, ly / d
        if not (0 <= x <= 1 and 0 <= y <= 1):
            return None
    return p


def _lpi_near(rng, t: tuple[float, float, float]) -> PointLPI | None:
    tx, ty, tz = t
    wx, wy, wz = (rng.uniform(-1, 1) for _ in range(3))
    nw = math.hypot(wx, wy, wz)
    if nw < 1e-3:
        return None
    wx, wy, wz = wx / nw, wy / nw, wz / nw
    ua = 0.2 + 0.3 * rng.random()
    ub = 0.2 + 0.3 * rng.random()
    q1 = (tx + ua * wx, ty + ua * wy, tz + ua * wz)
    q2 = (tx - ub * wx, ty - ub * wy, tz - ub * wz)
    off = lambda: tuple(rng.uniform(-0.35, 0.35) for _ in range(3))
    o1, o2, o3 = off(), off(), off()
    r = (tx + o1[0], ty + o1[1], tz + o1[2])
    s = (tx + o2[0], ty + o2[1], tz + o2[2])
    t3 = (tx + o3[0], ty + o3[1], tz + o3[2])
    p = PointLPI(q1, q2, r, s, t3)
    lx, ly, lz, d = lpi_exact(p.args)
    if d == 0:
        return None
    x, y, z = lx / d, ly / d, lz / d
    if not (0 <= x <= 1 and 0 <= y <= 1 and 0 <= z <= 1):
        return None
    return p


def _grid_side(n: int) -> int:
    g = 1
    while g * g < n:
        g *= 2
    return g


def _implicit_flags(rng, n: int, pct: int) -> list[bool]:
    k = (n * pct) // 100
    flags = [False] * n
    for i in rng.sample(range(n), k):
        flags[i] = True
    return flags


def generate(config: ExperimentConfig) -> list:
    """Deterministic point set for an experiment configuration."""
    import random

    rng = random.Random(config.seed)
    n = config.n_points
    exp = config.experiment
    if exp == "1.1":
        return [Point2(rng.random(), rng.random()) for _ in range(n)]
    if exp == "2.1":
        return [Point3(rng.random(), rng.random(), rng.random()) for _ in range(n)]
    if exp == "1.2":
        flags = _implicit_flags(rng, n, config.implicit_pct)
        pts = []
        for imp in flags:
            if not imp:
                pts.append(Point2(rng.random(), rng.random()))
                continue
            for _ in range(64):
                p = _lli_near(rng, rng.random(), rng.random(), True)
                if p is not None:
                    pts.append(p)
                    break
            else:
                raise AssertionError("line-pair sampling failed to converge")
        return pts
    if exp == "2.2":
        flags = _implicit_flags(rng, n, config.implicit_pct)
        pts = []
        for imp in flags:
            if not imp:
                pts.append(Point3(rng.random(), rng.random(), rng.random()))
                continue
            for _ in range(64):
                t = (rng.random(), rng.random(), rng.random())
                p = _lpi_near(rng, t)
                if p is not None:
                    pts.append(p)
                    break
            else:
                raise AssertionError("line-plane sampling failed to converge")
        return pts
    # grid experiments: power-of-two lattice so construction arithmetic is
    # exact and implicit points land on their nodes exactly
    g = _grid_side(n)
    cells = [(i, j) for i in range(g) for j in range(g)]
    rng.shuffle(cells)
    cells = cells[:n]
    flags = _implicit_flags(rng, n, config.implicit_pct)
    h = 1.0 / g
    pts = []
    if exp == "1.3":
        for (i, j), imp in zip(cells, flags):
            x, y = i / g, j / g
            if imp:
                pts.append(
                    PointLLI(
                        (x - h, y - h), (x + h, y + h),
                        (x - h, y + h), (x + h, y - h),
                    )
                )
            else:
                pts.append(Point2(x, y))
        return pts
    for (i, j), imp in zip(cells, flags):
        x, y = i / g, j / g
        if imp:
            zr, zs, zt = rng.random(), rng.random(), rng.random()
            pts.append(
                PointLPI(
                    (x, y, 0.0), (x, y, 1.0),
                    (x - h, y - h, zr), (x + h, y - h, zs), (x, y + h, zt),
                )
            )
        else:
            pts.append(Point3(x, y, rng.random()))
    return pts


# ---------------------------------------------------------------------------
# point-set serialization (shortest round-trip decimals)


def dump_points(points, path: str) -> None:
    with open(path, "w") as fh:
        for p in points:
            if isinstance(p, Point2):
                fh.write(f"E2 {p.x!r} {p.y!r}\n")
            elif isinstance(p, Point3):
                fh.write(f"E3 {p.x!r} {p.y!r} {p.z!r}\n")
            elif isinstance(p, PointLLI):
                fh.write("LLI " + " ".join(repr(v) for v in p.args) + "\n")
            elif isinstance(p, PointLPI):
                fh.write("LPI " + " ".join(repr(v) for v in p.args) + "\n")
            else:
                raise TypeError(f"cannot serialize {p!r}")


def load_points(path: str) -> list:
    out = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            tag, vals = parts[0], [float(v) for v in parts[1:]]
            if tag == "E2" and len(vals) == 2:
                out.append(Point2(*vals))
            elif tag == "E3" and len(vals) == 3:
                out.append(Point3(*vals))
            elif tag == "LLI" and len(vals) == 8:
                out.append(
                    PointLLI(vals[0:2], vals[2:4], vals[4:6], vals[6:8])
                )
            elif tag == "LPI" and len(vals) == 15:
                out.append(
                    PointLPI(
                        vals[0:3], vals[3:6], vals[6:9], vals[9:12], vals[12:15]
                    )
                )
            else:
                raise ValueError(f"{path}:{line_no}: bad point line {line!r}")
    return out


# ---------------------------------------------------------------------------
# runner


def _stage_totals(snap: dict) -> dict:
    tot = {"fp": 0, "interval": 0, "exact": 0, "undefined": 0}
    for rec in snap.values():
        tot["fp"] += rec["fp_success"]
        tot["interval"] += rec["interval_success"]
        tot["exact"] += rec["exact_evaluations"]
        tot["undefined"] += rec["undefined_hits"]
    return tot


def run(config: ExperimentConfig, points=None) -> RunReport:
    """Generate (unless given), triangulate, optionally verify, report."""
    if points is None:
        points = generate(config)
    if config.dump_points:
        dump_points(points, config.dump_points)
    prev_level = _pts.cache_level()
    _pts.set_cache_level(config.cache)
    set_force_stage(config.force_stage)
    before = stats_snapshot()
    peak = 0
    try:
        if config.measure_memory:
            tracemalloc.start()
        t0 = time.perf_counter()
        tri = triangulate(points, seed=config.seed)
        elapsed = time.perf_counter() - t0
        if config.measure_memory:
            _, peak = tracemalloc.get_traced_memory()
            tracemalloc.stop()
    finally:
        set_force_stage(None)
        _pts.set_cache_level(prev_level)
    after = stats_snapshot()
    calls = {
        pred: after.get(pred, {}).get("total", 0)
        - before.get(pred, {}).get("total", 0)
        for pred in ("orient2d", "incircle", "orient3d", "orient2d3d")
    }
    bt = _stage_totals(before)
    at = _stage_totals(after)
    stages = {k: at[k] - bt[k] for k in at}
    verified = "skipped"
    violations = []
    if config.verify:
        rep = verify_delaunay(tri)
        verified = "true" if rep["ok"] else "false"
        violations = rep["violations"]
    report = RunReport(
        config=config,
        elapsed_s=elapsed,
        peak_bytes=peak,
        predicate_calls=calls,
        stage_stats=stages,
        triangles=tri.triangle_count(),
        verified=verified,
        rejected=len(tri.rejected),
        duplicates=len(tri.duplicates),
        violations=violations,
    )
    if config.out:
        write_csv(config.out, [report])
    return report


def write_csv(path: str, reports) -> None:
    with open(path, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in reports:
            fh.write(r.csv_row() + "\n")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="bench",
        description="Delaunay benchmark over exact indirect predicates",
    )
    ap.add_argument("--experiment", required=True, choices=EXPERIMENTS)
    ap.add_argument("--n", required=True, type=int, dest="n")
    ap.add_argument("--implicit-pct", type=int, default=0)
    ap.add_argument(
        "--cache", choices=("none", "fp", "interval", "exact"), default="interval"
    )
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    ap.add_argument("--verify", action="store_true")
    ap.add_argument(
        "--force-stage", choices=("fp", "interval", "exact"), default=None
    )
    ap.add_argument("--memory", action="store_true", help="measure peak bytes")
    ap.add_argument("--dump-points", default=None, metavar="PATH")
    args = ap.parse_args(argv)
    config = ExperimentConfig(
        experiment=args.experiment,
        n_points=args.n,
        implicit_pct=args.implicit_pct,
        cache=args.cache,
        seed=args.seed,
        out=args.out,
        verify=args.verify,
        force_stage=args.force_stage,
        measure_memory=args.memory,
        dump_points=args.dump_points,
    )
    report = run(config)
    print(CSV_HEADER)
    print(report.csv_row())
    if report.rejected:
        print(f"# rejected points: {report.rejected}", file=sys.stderr)
    if report.verified == "false":
        for v in report.violations[:20]:
            print(f"# violation: {v}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
