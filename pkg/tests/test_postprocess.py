import pytest

from rectcover.cost import CostParams
from rectcover.covers import Cover, greedy_cover, partition_cover, strip_cover, validate_cover
from rectcover.decomposition import build_graph
from rectcover.exact import solve_exact
from rectcover.fixtures import FIG1, L6, PLUS12, RECT1
from rectcover.geometry import Polygon, Rect, bounding_box
from rectcover.postprocess import (
    CoverageIndex,
    bb_split,
    full_join,
    gaps,
    partition_split,
    prune,
    run_pipeline,
    simple_join,
    trim,
)

VBAR = Rect(1, 0, 2, 3)
HBAR = Rect(0, 1, 3, 2)
CENTRE = Rect(1, 1, 2, 2)
SQUARE3 = Polygon.from_rings([(0, 0), (3, 0), (3, 3), (0, 3)])


def test_prune_examples():
    assert prune(PLUS12, Cover.of([VBAR, HBAR, CENTRE])).rects == (VBAR, HBAR)
    two = [Rect(0, 0, 1, 2), Rect(0, 0, 2, 1)]
    assert list(prune(L6, Cover.of(two)).rects) == two
    assert prune(RECT1, Cover.of([Rect(0, 0, 1, 1)] * 2)).rects == (Rect(0, 0, 1, 1),)


def test_prune_respects_order():
    # the first of two redundant rectangles goes
    c = Cover.of([HBAR, VBAR, Rect(0, 1, 3, 2)])
    assert prune(PLUS12, c).rects == (VBAR, HBAR)


def test_trim_examples():
    c = trim(L6, Cover.of([Rect(0, 0, 1, 2), Rect(0, 0, 2, 1)]))
    assert c.rects == (Rect(0, 1, 1, 2), Rect(0, 0, 2, 1))
    assert trim(RECT1, Cover.of([Rect(0, 0, 1, 1)])).rects == (Rect(0, 0, 1, 1),)
    assert trim(PLUS12, Cover.of([VBAR, HBAR])).rects == (VBAR, HBAR)


def test_trim_leaves_fully_redundant_rectangle():
    c = Cover.of([Rect(0, 0, 1, 1), Rect(0, 0, 1, 1)])
    assert len(trim(RECT1, c)) == 2


def test_bb_split_accept_and_reject():
    acc = bb_split(PLUS12, Cover.of([VBAR, HBAR], CostParams(1, 2)))
    assert acc.total_cost == 13
    assert len(acc) == 3
    rej = bb_split(PLUS12, Cover.of([VBAR, HBAR], CostParams(2, 1)))
    assert rej.rects == (VBAR, HBAR) and rej.total_cost == 10


def test_bb_split_equal_cost_is_rejected():
    c = bb_split(RECT1, Cover.of([Rect(0, 0, 1, 1)], CostParams(1, 1)))
    assert c.rects == (Rect(0, 0, 1, 1),)


def test_partition_split_matches_bb_split_on_rectangular_gaps():
    for params in (CostParams(1, 2), CostParams(2, 1)):
        a = bb_split(PLUS12, Cover.of([VBAR, HBAR], params))
        b = partition_split(PLUS12, Cover.of([VBAR, HBAR], params))
        assert a.rects == b.rects
    assert partition_split(RECT1, Cover.of([Rect(0, 0, 1, 1)])).rects == (Rect(0, 0, 1, 1),)


def test_partition_split_l_shaped_gap():
    # the square's unique part is an L; its bounding box is the square itself
    cover = Cover.of([Rect(0, 0, 3, 3), Rect(1, 1, 3, 3)], CostParams(1, 1))
    # bounding the L gives the square back at equal cost, so it stays; the inner
    # rectangle is then fully redundant and its empty gap set costs nothing
    assert bb_split(SQUARE3, cover).rects == (Rect(0, 0, 3, 3),)
    split = partition_split(SQUARE3, cover)
    assert set(split.rects) == {Rect(1, 1, 3, 3), Rect(0, 0, 1, 3), Rect(1, 0, 3, 1)} or \
        set(split.rects) == {Rect(1, 1, 3, 3), Rect(0, 0, 3, 1), Rect(0, 1, 1, 3)}
    assert split.total_cost == 12 < cover.total_cost
    assert split.total_cost >= solve_exact(SQUARE3, CostParams(1, 1)).total_cost
    # with a large creation cost the L is not split up
    cover = cover.with_params(CostParams(10, 1))
    assert partition_split(SQUARE3, cover).rects == (Rect(0, 0, 3, 3),)


def test_gaps_use_edge_connectivity():
    arms = [Rect(1, 0, 2, 1), Rect(0, 1, 1, 2), Rect(2, 1, 3, 2), Rect(1, 2, 2, 3)]
    idx = CoverageIndex(SQUARE3, [Rect(0, 0, 3, 3), *arms])
    # the square's own cells are the centre and four corners, touching only at points
    groups = gaps(idx, idx.unique(idx.order[0]))
    boxes = sorted(bounding_box(idx.cells[c] for c in g) for g in groups)
    assert boxes == sorted(Rect(x, y, x + 1, y + 1) for x in (0, 1, 2) for y in (0, 1, 2) if (x + y) % 2 == 0)


def test_simple_join_adjacent():
    two = Polygon.from_rings([(0, 0), (2, 0), (2, 1), (0, 1)])
    c = simple_join(two, Cover.of([Rect(0, 0, 1, 1), Rect(1, 0, 2, 1)], CostParams(1, 1)))
    assert c.rects == (Rect(0, 0, 2, 1),)


def test_simple_join_blocked_by_notch():
    u = Polygon.from_rings([(0, 0), (3, 0), (3, 2), (2, 2), (2, 1), (1, 1), (1, 2), (0, 2)])
    c = Cover.of([Rect(0, 1, 1, 2), Rect(2, 1, 3, 2), Rect(0, 0, 3, 1)], CostParams(100, 1))
    assert simple_join(u, c).rects == c.rects


def test_simple_join_gap_trade_off():
    # two aligned unit squares with a gap of area 2 between them, covered by a taller rectangle
    t = Polygon.from_rings([(0, 0), (4, 0), (4, 1), (3, 1), (3, 2), (1, 2), (1, 1), (0, 1)])
    rects = [Rect(0, 0, 1, 1), Rect(3, 0, 4, 1), Rect(1, 0, 3, 2)]
    kept = simple_join(t, Cover.of(rects, CostParams(1, 1)))
    assert kept.rects == tuple(rects)
    joined = simple_join(t, Cover.of(rects, CostParams(5, 1)))
    assert joined.rects == (Rect(0, 0, 4, 1), Rect(1, 0, 3, 2))
    assert joined.total_cost == 5 + 4 + 5 + 4


def test_simple_join_vertical_pass():
    c = simple_join(L6, Cover.of([Rect(0, 1, 1, 2), Rect(0, 0, 1, 1), Rect(1, 0, 2, 1)], CostParams(10, 1)))
    assert set(c.rects) == {Rect(0, 0, 2, 1), Rect(0, 1, 1, 2)} or set(c.rects) == {Rect(0, 0, 1, 2), Rect(1, 0, 2, 1)}
    assert c.total_cost == 23


def test_full_join_examples():
    cells = [Rect(0, 1, 1, 2), Rect(0, 0, 1, 1), Rect(1, 0, 2, 1)]
    c = full_join(L6, Cover.of(cells, CostParams(10, 1)))
    assert c.rects == (Rect(0, 0, 1, 2), Rect(1, 0, 2, 1))
    assert c.total_cost == 23
    assert full_join(RECT1, Cover.of([Rect(0, 0, 1, 1)], CostParams(5, 1))).rects == (Rect(0, 0, 1, 1),)
    cells = [Rect(1, 2, 2, 3), Rect(0, 1, 1, 2), CENTRE, Rect(2, 1, 3, 2), Rect(1, 0, 2, 1)]
    c = full_join(PLUS12, Cover.of(cells, CostParams(100, 1)))
    assert c.total_cost < 5 * 101
    assert c.total_cost >= solve_exact(PLUS12, CostParams(100, 1)).total_cost
    assert set(c.rects) == {VBAR, HBAR}


def test_full_join_is_cost_check_then_containment():
    # the triple join in L6 passes the cost test but not containment
    c = full_join(L6, Cover.of([Rect(0, 0, 1, 2), Rect(1, 0, 2, 1)], CostParams(10, 1)))
    assert len(c) == 2


def test_run_pipeline_trace_and_identity():
    base = strip_cover(FIG1, CostParams(100, 1))
    r = run_pipeline(FIG1, base, CostParams(100, 1), [])
    assert r.cover.rects == base.rects and r.trace == (("input", base.total_cost),)
    r = run_pipeline(FIG1, base, CostParams(100, 1), ["prune", "trim"])
    assert [s for s, _ in r.trace] == ["input", "prune", "trim"]
    costs = [c for _, c in r.trace]
    assert costs == sorted(costs, reverse=True)
    with pytest.raises(ValueError, match="unknown"):
        run_pipeline(FIG1, base, CostParams(1, 1), ["prune", "shrink"])


ALL_STAGES = ["prune", "trim", "bbsplit", "parsplit", "join", "fulljoin"]
PIPELINES = [["prune", "trim"], ["prune", "trim", "bbsplit"], ["prune", "trim", "parsplit"], ["join"],
             ["fulljoin"], ["fulljoin", "prune", "trim", "parsplit", "join"]]


def _heuristics(p, params, g):
    return [strip_cover(p, params, g), partition_cover(p, params), greedy_cover(p, params, g)]


@pytest.mark.parametrize("ab", [(1, 0), (1, 1), (10, 1), (100, 1)])
def test_stages_are_monotone_and_valid(ab, small_corpus, medium_corpus):
    params = CostParams(*ab)
    for p in [FIG1, *small_corpus[::4], *medium_corpus[::2]]:
        g = build_graph(p)
        for base in _heuristics(p, params, g):
            for stage in ALL_STAGES:
                out = run_pipeline(p, base, params, [stage], g).cover
                assert validate_cover(p, out, g)
                assert out.total_cost <= base.total_cost
            for stages in PIPELINES:
                res = run_pipeline(p, base, params, stages, g)
                assert validate_cover(p, res.cover, g)
                costs = [c for _, c in res.trace]
                assert costs == sorted(costs, reverse=True)


def test_prune_and_trim_idempotent(small_corpus, medium_corpus):
    params = CostParams(10, 1)
    for p in [FIG1, *small_corpus[::3], *medium_corpus]:
        g = build_graph(p)
        for base in _heuristics(p, params, g):
            once = prune(p, base, g)
            assert prune(p, once, g).rects == once.rects
            t1 = trim(p, once, g)
            assert trim(p, t1, g).rects == t1.rects
            # after trim each rectangle is the bounding box of what only it covers
            idx = CoverageIndex(p, t1.rects, g)
            for s in idx.order:
                assert bounding_box(idx.cells[c] for c in idx.unique(s)) == idx.slots[s]
            # nothing becomes fully redundant
            assert prune(p, t1, g).rects == t1.rects
