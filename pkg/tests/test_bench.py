import os
from fractions import Fraction

import pytest

from geompred import oracle
from geompred.bench import (
    CSV_HEADER,
    ExperimentConfig,
    dump_points,
    generate,
    load_points,
    main,
    run,
)
from geompred.points import Point2, Point3, PointLLI, PointLPI


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig("9.9", 100)
    with pytest.raises(ValueError):
        ExperimentConfig("1.1", 2)
    with pytest.raises(ValueError):
        ExperimentConfig("1.2", 100, implicit_pct=120)
    c = ExperimentConfig("1.1", 100, implicit_pct=40)
    assert c.implicit_pct == 0  # forced for the reference experiments


def test_generator_determinism():
    for exp, pct in (("1.1", 0), ("1.2", 50), ("1.3", 30), ("2.2", 40), ("2.3", 100)):
        c1 = ExperimentConfig(exp, 60, implicit_pct=pct, seed=5)
        c2 = ExperimentConfig(exp, 60, implicit_pct=pct, seed=5)
        a = generate(c1)
        b = generate(c2)
        assert [type(p) for p in a] == [type(p) for p in b]
        for p, q in zip(a, b):
            pa = p.args if p.implicit else p.coords()
            qa = q.args if q.implicit else q.coords()
            assert pa == qa
        c3 = ExperimentConfig(exp, 60, implicit_pct=pct, seed=6)
        assert any(
            (p.args if p.implicit else p.coords())
            != (q.args if q.implicit else q.coords())
            for p, q in zip(a, generate(c3))
        )


def test_experiment_11_plain_unit_square():
    pts = generate(ExperimentConfig("1.1", 200, seed=42))
    assert len(pts) == 200
    assert all(isinstance(p, Point2) for p in pts)
    assert all(0 <= p.x <= 1 and 0 <= p.y <= 1 for p in pts)


def test_experiment_12_intersections_in_square():
    pts = generate(ExperimentConfig("1.2", 100, implicit_pct=50, seed=7))
    implicit = [p for p in pts if p.implicit]
    assert len(implicit) == 50
    for p in implicit:
        lx, ly, d = oracle.lli_exact(p.args)
        assert d != 0
        assert 0 <= lx / d <= 1 and 0 <= ly / d <= 1


def test_experiment_13_grid_exact_nodes():
    pts = generate(ExperimentConfig("1.3", 64, implicit_pct=50, seed=3))
    nodes = set()
    for p in pts:
        if p.implicit:
            lx, ly, d = oracle.lli_exact(p.args)
            assert d != 0
            x, y = lx / d, ly / d
            assert x.denominator & (x.denominator - 1) == 0  # dyadic
            nodes.add((x, y))
        else:
            nodes.add((Fraction(p.x), Fraction(p.y)))
    assert len(nodes) == 64  # all distinct grid nodes


def test_experiment_23_exact_xy_projection():
    pts = generate(ExperimentConfig("2.3", 50, implicit_pct=100, seed=7))
    assert all(isinstance(p, PointLPI) for p in pts)
    for p in pts:
        lx, ly, lz, d = oracle.lpi_exact(p.args)
        assert d != 0
        x, y = lx / d, ly / d
        assert x.denominator & (x.denominator - 1) == 0
        assert y.denominator & (y.denominator - 1) == 0
        assert 0 <= lz / d <= 1


def test_experiment_22_in_cube():
    pts = generate(ExperimentConfig("2.2", 60, implicit_pct=40, seed=9))
    for p in pts:
        if p.implicit:
            lx, ly, lz, d = oracle.lpi_exact(p.args)
            assert d != 0
            for v in (lx / d, ly / d, lz / d):
                assert 0 <= v <= 1


def test_dump_load_roundtrip(tmp_path):
    pts = generate(ExperimentConfig("1.2", 40, implicit_pct=50, seed=1))
    pts += generate(ExperimentConfig("2.2", 40, implicit_pct=50, seed=2))
    path = tmp_path / "pts.txt"
    dump_points(pts, str(path))
    back = load_points(str(path))
    assert len(back) == len(pts)
    for p, q in zip(pts, back):
        assert type(p) is type(q)
        pa = p.args if p.implicit else p.coords()
        qa = q.args if q.implicit else q.coords()
        assert pa == qa  # bit-exact round-trip via shortest repr


def test_run_report_and_csv(tmp_path):
    out = tmp_path / "r.csv"
    cfg = ExperimentConfig(
        "1.2", 300, implicit_pct=25, seed=4, out=str(out), verify=True
    )
    rep = run(cfg)
    assert rep.verified == "true"
    assert rep.triangles > 0
    assert rep.predicate_calls["orient2d"] > 0
    stats = rep.stage_stats
    total_calls = sum(rep.predicate_calls.values())
    assert stats["fp"] + stats["interval"] + stats["exact"] == total_calls
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    fields = lines[1].split(",")
    assert len(fields) == len(CSV_HEADER.split(","))
    assert fields[0] == "1.2" and fields[-1] == "true"


def test_run_skips_verification_by_default():
    rep = run(ExperimentConfig("1.1", 50, seed=1))
    assert rep.verified == "skipped"


def test_memory_measurement():
    rep = run(ExperimentConfig("1.1", 200, seed=1, measure_memory=True))
    assert rep.peak_bytes > 0


def test_force_stage_run():
    rep = run(ExperimentConfig("1.1", 120, seed=3, force_stage="interval", verify=True))
    assert rep.verified == "true"
    assert rep.stage_stats["fp"] == 0


def test_cli_roundtrip(tmp_path, capsys):
    out = tmp_path / "cli.csv"
    rc = main(
        [
            "--experiment", "1.3",
            "--n", "64",
            "--implicit-pct", "50",
            "--cache", "interval",
            "--seed", "11",
            "--out", str(out),
            "--verify",
        ]
    )
    assert rc == 0
    printed = capsys.readouterr().out.splitlines()
    assert printed[0] == CSV_HEADER
    assert out.read_text().splitlines()[1] == printed[1]
