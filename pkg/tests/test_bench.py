from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rectcover.bench import (
    ALGORITHMS,
    CSV_HEADER,
    Instance,
    RunRecord,
    load_instances,
    preprocess_trivial,
    records_from_csv,
    records_to_csv,
    run_config,
    run_one,
    sort_records,
    summarize,
)
from rectcover.cli import main
from rectcover.cost import CostParams
from rectcover.covers import partition_cover
from rectcover.fixtures import FIG1, L6, PLUS12, RECT1, staircase_band

FIXTURES = [L6, PLUS12, FIG1]


def test_preprocess_trivial():
    trivial, rest = preprocess_trivial([RECT1])
    assert [p for p, _ in trivial] == [RECT1] and rest == []
    assert len(trivial[0][1]) == 1 and trivial[0][1].rects[0] == RECT1.bbox()
    assert preprocess_trivial([L6]) == ([], [L6])
    trivial, rest = preprocess_trivial([RECT1, L6, PLUS12])
    assert len(trivial) == 1 and rest == [L6, PLUS12]


def test_run_config_par_delegates():
    params = CostParams(1, 1)
    recs = run_config(FIXTURES, "par", params, repeats=3)
    assert len(recs) == 3
    for rec, p in zip(recs, FIXTURES):
        assert rec.ok and rec.cost == partition_cover(p, params).total_cost
        assert rec.cost == rec.alpha * rec.num_rects + rec.beta * rec.total_area
        assert rec.time_ms >= 0


def test_run_config_strip_pts_not_worse():
    params = CostParams(100, 1)
    plain = run_config(FIXTURES, "strip", params)
    post = run_config(FIXTURES, "strip-pts", params)
    assert all(b.cost <= a.cost for a, b in zip(plain, post))


def test_run_config_exact_fig1():
    rec = run_config([FIG1], "exact", CostParams(1, 0))[0]
    assert rec.num_rects == 9 and rec.cost == 9


def test_failure_rows():
    recs = run_config(FIXTURES, "exact", CostParams(1, 1), max_candidates=50)
    assert len(recs) == len(FIXTURES)
    assert [r.status for r in recs] == ["ok", "ok", "cap"]
    assert recs[2].cost is None and recs[2].num_rects is None
    big = Instance("staircase", 0, staircase_band(2000, seed=3))
    rec, cover = run_one(big, "grdy", CostParams(1, 1), timeout_ms=1)
    assert rec.status == "timeout" and cover is None
    rec, cover = run_one(Instance("l", 0, L6), "strip", CostParams(1, 1), timeout_ms=30_000)
    assert rec.ok and cover.total_cost == rec.cost


def test_unknown_label_and_repeats():
    with pytest.raises(ValueError):
        run_config([L6], "nope", CostParams(1, 1))
    with pytest.raises(ValueError):
        run_config([L6], "par", CostParams(1, 1), post=["polish"])
    with pytest.raises(ValueError):
        run_config([L6], "par", CostParams(1, 1), repeats=0)


def test_row_count_is_polygons_times_configs():
    recs = []
    for label in ALGORITHMS:
        for a in (1, 50):
            recs += run_config(FIXTURES, label, CostParams(a, 1), max_candidates=300)
    assert len(recs) == len(FIXTURES) * len(ALGORITHMS) * 2
    assert len(records_from_csv(records_to_csv(recs))) == len(recs)


def test_csv_round_trip_and_header():
    recs = sort_records(run_config(FIXTURES, "grdy-pt", CostParams("5/2", 1))
                        + run_config(FIXTURES, "exact", CostParams(1, 1), max_candidates=50))
    text = records_to_csv(recs)
    assert text.splitlines()[0] == CSV_HEADER
    assert records_from_csv(text) == recs
    with pytest.raises(ValueError):
        records_from_csv("a,b\n1,2\n")


_fracs = st.fractions(min_value=0, max_value=1000, max_denominator=50)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.builds(
    RunRecord,
    instance=st.text(st.characters(blacklist_categories=("Cs", "Cc")), min_size=1, max_size=12),
    polygon_id=st.integers(0, 10**6), n_vertices=st.integers(4, 10**6), n_holes=st.integers(0, 100),
    n_base_rects=st.integers(1, 10**6), algorithm=st.sampled_from(sorted(ALGORITHMS)),
    alpha=_fracs, beta=_fracs,
    num_rects=st.none() | st.integers(1, 1000), total_area=st.none() | st.integers(1, 10**9),
    cost=st.none() | _fracs, time_ms=st.none() | st.floats(0, 1e7, allow_nan=False),
    status=st.sampled_from(["ok", "cap", "timeout"])), max_size=5))
def test_csv_round_trip_property(recs):
    assert records_from_csv(records_to_csv(recs)) == recs


def test_summarize_single_algorithm():
    s = summarize(run_config(FIXTURES, "strip", CostParams(1, 1)))
    assert all(r.rel_cost == 1 and r.rel_time == 1 for r in s.rows)


def test_summarize_exact_is_one():
    recs = []
    for label in ("exact", "strip", "grdy", "par"):
        recs += run_config([L6, PLUS12], label, CostParams(10, 1))
    s = summarize(recs)
    assert all(r.rel_cost == 1 for r in s.rows if r.algorithm == "exact")
    groups = {}
    for r in s.rows:
        groups.setdefault((r.polygon_id, r.alpha), []).append(r)
    assert all(min(r.rel_cost for r in g) == 1 and min(r.rel_time for r in g) == 1 for g in groups.values())
    assert s.to_csv().startswith("algorithm,alpha,beta,mean_rel_cost,mean_rel_time,groups\n")


def test_summarize_par_f_not_worse_at_large_alpha(medium_corpus):
    recs = []
    for label in ("par", "par-f"):
        recs += run_config(medium_corpus, label, CostParams(1000, 1))
    means = summarize(recs).means
    assert means[("par-f", 1000, 1)][0] <= means[("par", 1000, 1)][0]


def test_summarize_rejects_empty():
    with pytest.raises(ValueError):
        summarize([])
    with pytest.raises(ValueError):
        summarize(run_config([FIG1], "exact", CostParams(1, 1), max_candidates=5))


def test_load_instances_multipolygon(tmp_path):
    (tmp_path / "a.wkt").write_text(
        "MULTIPOLYGON (((0 0, 1 0, 1 1, 0 1, 0 0)), ((5 0, 7 0, 7 1, 6 1, 6 2, 5 2, 5 0)))")
    (tmp_path / "b.wkt").write_text(L6.to_wkt())
    insts = load_instances(tmp_path)
    assert [(i.name, i.polygon_id) for i in insts] == [("a", 0), ("a", 1), ("b", 0)]
    assert load_instances(tmp_path / "b.wkt")[0].polygon == L6


# --------------------------------------------------------------------------
# CLI


@pytest.fixture
def wkt_dir(tmp_path):
    d = tmp_path / "in"
    d.mkdir()
    (d / "shapes.wkt").write_text(f"MULTIPOLYGON ({RECT1.to_wkt()[7:]}, {L6.to_wkt()[7:]}, {PLUS12.to_wkt()[7:]})")
    return d


def test_cli_solve(wkt_dir, tmp_path, capsys):
    out = tmp_path / "r.csv"
    svg, lp = tmp_path / "svg", tmp_path / "lp"
    code = main(["solve", "--input", str(wkt_dir), "--alg", "exact", "--alpha", "1", "--beta", "1",
                 "--out-csv", str(out), "--out-svg", str(svg), "--emit-lp", str(lp)])
    assert code == 0
    recs = records_from_csv(out.read_text())
    assert [(r.polygon_id, r.cost) for r in recs] == [(1, 5), (2, 8)]
    assert len(list(svg.glob("*.svg"))) == 2
    assert all(f.read_bytes().startswith(b"<svg") or b"<svg" in f.read_bytes() for f in svg.iterdir())
    assert sorted(f.name for f in lp.iterdir())[0] == "shapes_1_a1_b1_unweighted.lp"
    assert "skipping 1" in capsys.readouterr().err


def test_cli_keep_trivial_and_post(wkt_dir, capsys):
    assert main(["solve", "--input", str(wkt_dir), "--alg", "strip", "--alpha", "3/2",
                 "--post", "prune,trim", "--keep-trivial"]) == 0
    recs = records_from_csv(capsys.readouterr().out)
    assert len(recs) == 3 and {r.algorithm for r in recs} == {"strip+prune+trim"}
    assert all(r.alpha == Fraction(3, 2) and r.beta == 0 for r in recs)


def test_cli_bench(tmp_path):
    out, summary = tmp_path / "b.csv", tmp_path / "s.csv"
    code = main(["bench", "--input", "random:3", "--seed", "4", "--algs", "par,strip,grdy",
                 "--out-csv", str(out), "--summary-csv", str(summary)])
    assert code == 0
    recs = records_from_csv(out.read_text())
    assert len(recs) == 3 * 3 * 6
    assert {r.alpha for r in recs} == {1, 10, 50, 100, 500, 1000} and {r.beta for r in recs} == {1}
    assert len(summary.read_text().splitlines()) == 1 + 3 * 6


def test_cli_decomposition_dump(wkt_dir, tmp_path, capsys):
    dump = tmp_path / "dump"
    assert main(["solve", "--input", str(wkt_dir), "--alg", "par", "--dump-decomposition", str(dump),
                 "--report-decomposition"]) == 0
    assert (dump / "shapes_1_base.csv").read_text().splitlines()[1:] == ["0,1,1,2", "0,0,1,1", "1,0,2,1"]
    assert len((dump / "shapes_1_powerset.csv").read_text().splitlines()) == 6
    assert "base rectangles" in capsys.readouterr().err


def test_cli_errors(tmp_path, capsys):
    assert main(["solve", "--input", str(tmp_path / "missing.wkt"), "--alg", "par"]) != 0
    bad = tmp_path / "bad.wkt"
    bad.write_text("POLYGON ((0 0, 2 0, 2 2, 0 0))")
    assert main(["solve", "--input", str(bad), "--alg", "par"]) != 0
    bad.write_text("POLYGON ((0 0, 2 0, 2")
    assert main(["solve", "--input", str(bad), "--alg", "par"]) != 0
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--input", str(bad), "--alg", "nope"])
    assert exc.value.code != 0
    with pytest.raises(SystemExit):
        main(["solve", "--input", str(bad), "--alg", "par", "--post", "polish"])
