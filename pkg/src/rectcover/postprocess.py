"""Cost-aware local improvement of covers.

Every routine takes a valid cover and returns a valid cover that costs no
more.  Rectangles are processed in the cover's own order, so results are
deterministic but order-dependent.

The coverage index counts, per cell, how many cover rectangles contain it.
Cells are the base rectangles, further cut along the cover's own
coordinates so every cover rectangle is an exact union of cells.  Bounding
boxes, trims, gap partitions and joins never introduce new coordinates, so
one cell set serves a whole stage.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .cost import CostParams
from .covers import Cover, partition_cover
from .decomposition import BaseRectGraph, build_graph
from .geometry import Polygon, Rect, bounding_box, polygons_from_rects

__all__ = [
    "CoverageIndex", "prune", "trim", "bb_split", "partition_split", "simple_join",
    "full_join", "run_pipeline", "PipelineResult", "STAGES", "gaps",
]


def _refine(cells: Iterable[Rect], xs: Sequence[int], ys: Sequence[int]) -> list[Rect]:
    out = []
    for c in cells:
        cx = [c.xmin] + xs[bisect_right(xs, c.xmin):bisect_left(xs, c.xmax)] + [c.xmax]
        cy = [c.ymin] + ys[bisect_right(ys, c.ymin):bisect_left(ys, c.ymax)] + [c.ymax]
        for y0, y1 in zip(cy, cy[1:]):
            for x0, x1 in zip(cx, cx[1:]):
                out.append(Rect(x0, y0, x1, y1))
    return out


class CoverageIndex:
    """Per-cell containment counters for a cover under modification.

    Cover rectangles live in slots; ``order`` lists the live slots in cover
    order.
    """

    def __init__(self, p: Polygon, rects: Sequence[Rect], graph: Optional[BaseRectGraph] = None):
        g = graph if graph is not None else build_graph(p)
        xs = sorted({v for r in rects for v in (r.xmin, r.xmax)})
        ys = sorted({v for r in rects for v in (r.ymin, r.ymax)})
        self.cells: list[Rect] = _refine(g.nodes, xs, ys)
        self._b = np.array([tuple(c) for c in self.cells], dtype=np.int64).reshape(-1, 4)
        self._area = (self._b[:, 2] - self._b[:, 0]) * (self._b[:, 3] - self._b[:, 1])
        self.count = np.zeros(len(self.cells), dtype=np.int64)
        self.slots: list[Optional[Rect]] = []
        self.members: list[np.ndarray] = []
        self.order: list[int] = []
        for r in rects:
            self.order.append(self._add(r))

    def cells_in(self, r: Rect) -> np.ndarray:
        b = self._b
        return np.flatnonzero((b[:, 0] >= r.xmin) & (b[:, 2] <= r.xmax) & (b[:, 1] >= r.ymin) & (b[:, 3] <= r.ymax))

    def inside(self, r: Rect) -> bool:
        """``r`` lies inside the polygon (valid for rectangles on cell coordinates)."""
        return int(self._area[self.cells_in(r)].sum()) == r.area

    def _add(self, r: Rect) -> int:
        m = self.cells_in(r)
        self.count[m] += 1
        self.slots.append(r)
        self.members.append(m)
        return len(self.slots) - 1

    def _drop(self, s: int) -> None:
        self.count[self.members[s]] -= 1
        self.slots[s] = None

    def unique(self, s: int) -> np.ndarray:
        m = self.members[s]
        return m[self.count[m] == 1]

    def redundant(self, s: int) -> bool:
        return bool((self.count[self.members[s]] >= 2).all())

    def remove(self, s: int) -> None:
        self._drop(s)
        self.order.remove(s)

    def replace(self, s: int, rects: Sequence[Rect]) -> list[int]:
        """Put ``rects`` where slot ``s`` was; returns their slots."""
        pos = self.order.index(s)
        new = [self._add(r) for r in rects]
        self._drop(s)
        self.order[pos:pos + 1] = new
        return new

    def rects(self) -> list[Rect]:
        return [self.slots[s] for s in self.order]

    def valid(self) -> bool:
        return bool((self.count >= 1).all())


def gaps(index: CoverageIndex, cells: Iterable[int]) -> list[list[int]]:
    """Split cells into groups connected through shared boundary of positive length."""
    cells = [int(c) for c in cells]
    cs = index.cells
    by_xmin: dict[int, list[int]] = {}
    by_ymin: dict[int, list[int]] = {}
    for c in cells:
        by_xmin.setdefault(cs[c].xmin, []).append(c)
        by_ymin.setdefault(cs[c].ymin, []).append(c)
    parent = {c: c for c in cells}

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    for c in cells:
        r = cs[c]
        for d in by_xmin.get(r.xmax, ()):
            if cs[d].ymin < r.ymax and cs[d].ymax > r.ymin:
                parent[find(d)] = find(c)
        for d in by_ymin.get(r.ymax, ()):
            if cs[d].xmin < r.xmax and cs[d].xmax > r.xmin:
                parent[find(d)] = find(c)
    groups: dict[int, list[int]] = {}
    for c in cells:
        groups.setdefault(find(c), []).append(c)
    return sorted(groups.values(), key=lambda g: cs[min(g, key=lambda c: cs[c].row_major_key())].row_major_key())


def _cost(params: CostParams, rects: Iterable[Rect]) -> Fraction:
    return sum((params.cost(r) for r in rects), Fraction(0))


def prune(p: Polygon, cover: Cover, graph: Optional[BaseRectGraph] = None) -> Cover:
    """Drop every rectangle whose cells are all covered by some other rectangle."""
    idx = CoverageIndex(p, cover.rects, graph)
    for s in list(idx.order):
        if idx.redundant(s):
            idx.remove(s)
    return Cover.of(idx.rects(), cover.params)


def trim(p: Polygon, cover: Cover, graph: Optional[BaseRectGraph] = None) -> Cover:
    """Shrink each rectangle to the bounding box of the cells only it covers."""
    idx = CoverageIndex(p, cover.rects, graph)
    for s in list(idx.order):
        u = idx.unique(s)
        if len(u) == 0:
            continue
        bb = bounding_box(idx.cells[c] for c in u)
        if bb != idx.slots[s]:
            idx.replace(s, [bb])
    return Cover.of(idx.rects(), cover.params)


def _split(p: Polygon, cover: Cover, params: Optional[CostParams], graph: Optional[BaseRectGraph],
           cover_gap: Callable[[CoverageIndex, list[int], CostParams], list[Rect]]) -> Cover:
    params = params or cover.params
    idx = CoverageIndex(p, cover.rects, graph)
    for s in list(idx.order):
        r = idx.slots[s]
        new = []
        for gap in gaps(idx, idx.unique(s)):
            new += cover_gap(idx, gap, params)
        if _cost(params, new) < params.cost(r):
            idx.replace(s, new)
    return Cover.of(idx.rects(), params)


def _bb_gap(idx: CoverageIndex, gap: list[int], params: CostParams) -> list[Rect]:
    return [bounding_box(idx.cells[c] for c in gap)]


def _par_gap(idx: CoverageIndex, gap: list[int], params: CostParams) -> list[Rect]:
    cells = [idx.cells[c] for c in gap]
    bb = bounding_box(cells)
    if sum(c.area for c in cells) == bb.area:
        return [bb]
    (poly,) = polygons_from_rects(cells)
    return list(partition_cover(poly, params).rects)


def bb_split(p: Polygon, cover: Cover, params: Optional[CostParams] = None,
             graph: Optional[BaseRectGraph] = None) -> Cover:
    """Replace a rectangle by the bounding boxes of its gaps when strictly cheaper."""
    return _split(p, cover, params, graph, _bb_gap)


def partition_split(p: Polygon, cover: Cover, params: Optional[CostParams] = None,
                    graph: Optional[BaseRectGraph] = None) -> Cover:
    """Replace a rectangle by minimum partitions of its gaps when strictly cheaper."""
    return _split(p, cover, params, graph, _par_gap)


def _join(a: Rect, b: Rect) -> Rect:
    return Rect(min(a.xmin, b.xmin), min(a.ymin, b.ymin), max(a.xmax, b.xmax), max(a.ymax, b.ymax))


def simple_join(p: Polygon, cover: Cover, params: Optional[CostParams] = None,
                graph: Optional[BaseRectGraph] = None) -> Cover:
    """Join consecutive aligned rectangles, first along rows, then along columns."""
    params = params or cover.params
    idx = CoverageIndex(p, cover.rects, graph)
    for horizontal in (True, False):
        buckets: dict[tuple[int, int], list[int]] = {}
        for s in idx.order:
            r = idx.slots[s]
            key = (r.ymin, r.ymax) if horizontal else (r.xmin, r.xmax)
            buckets.setdefault(key, []).append(s)
        for key in sorted(buckets):
            if horizontal:
                seq = sorted(buckets[key], key=lambda s: (idx.slots[s].xmin, idx.slots[s].xmax))
            else:
                seq = sorted(buckets[key], key=lambda s: (idx.slots[s].ymin, idx.slots[s].ymax))
            prev = seq[0]
            for s in seq[1:]:
                a, b = idx.slots[prev], idx.slots[s]
                j = _join(a, b)
                if params.cost(j) < params.cost(a) + params.cost(b) and idx.inside(j):
                    (prev,) = idx.replace(prev, [j])
                    idx.remove(s)
                else:
                    prev = s
    return Cover.of(idx.rects(), params)


def full_join(p: Polygon, cover: Cover, params: Optional[CostParams] = None,
              graph: Optional[BaseRectGraph] = None) -> Cover:
    """Greedily join each rectangle with any later one when strictly cheaper.

    The cost test runs before the containment test.  After an accepted join
    the grown rectangle is tried against all remaining successors again.
    """
    params = params or cover.params
    idx = CoverageIndex(p, cover.rects, graph)
    i = 0
    while i < len(idx.order):
        s = idx.order[i]
        j = i + 1
        while j < len(idx.order):
            t = idx.order[j]
            a, b = idx.slots[s], idx.slots[t]
            joined = _join(a, b)
            if params.cost(joined) < params.cost(a) + params.cost(b) and idx.inside(joined):
                idx.remove(t)
                (s,) = idx.replace(s, [joined])
                j = i + 1
            else:
                j += 1
        i += 1
    return Cover.of(idx.rects(), params)


STAGES: dict[str, Callable] = {
    "prune": lambda p, c, params, g: prune(p, c, g),
    "trim": lambda p, c, params, g: trim(p, c, g),
    "bbsplit": bb_split,
    "parsplit": partition_split,
    "join": simple_join,
    "fulljoin": full_join,
}


@dataclass(frozen=True)
class PipelineResult:
    cover: Cover
    trace: tuple[tuple[str, Fraction], ...]


def run_pipeline(p: Polygon, cover: Cover, params: Optional[CostParams] = None,
                 stages: Sequence[str] = (), graph: Optional[BaseRectGraph] = None) -> PipelineResult:
    """Apply ``stages`` left to right; the trace starts with the input cost."""
    unknown = [s for s in stages if s not in STAGES]
    if unknown:
        raise ValueError(f"unknown postprocessing stage(s): {', '.join(unknown)}; "
                         f"expected one of {', '.join(STAGES)}")
    params = params or cover.params
    g = graph if graph is not None else build_graph(p)
    cur = cover.with_params(params)
    trace = [("input", cur.total_cost)]
    for name in stages:
        nxt = STAGES[name](p, cur, params, g)
        if nxt.total_cost > cur.total_cost:
            raise AssertionError(f"stage {name} increased the cost")
        cur = nxt
        trace.append((name, cur.total_cost))
    return PipelineResult(cur, tuple(trace))
