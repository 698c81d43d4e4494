"""Covers, their validation, and the three cover heuristics.

* :func:`partition_cover` -- minimum-cardinality partition via a maximum
  independent set of non-conflicting chords.
* :func:`strip_cover` -- one maximal rectangle per base rectangle without a
  top neighbour.
* :func:`greedy_cover` -- greedy weighted set cover over the base-rectangle
  powerset.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .cost import CostParams, rect_cost
from .decomposition import (
    DEFAULT_GREEDY_CAP,
    BaseRectGraph,
    _EdgeArrays,
    _first_hit,
    build_graph,
    concave_vertices,
    enumerate_powerset,
    trace_faces,
)
from .geometry import Polygon, Rect, rect_in_polygon, row_major

__all__ = [
    "CostParams", "Cover", "Chord", "rect_cost", "validate_cover", "partition_cover",
    "partition_details", "strip_cover", "greedy_cover", "UNIT_COST",
]

UNIT_COST = CostParams(1, 0)


@dataclass(frozen=True)
class Cover:
    rects: tuple[Rect, ...]
    params: CostParams
    total_cost: Fraction

    @classmethod
    def of(cls, rects: Iterable[Rect], params: Optional[CostParams] = None) -> "Cover":
        rects = tuple(rects)
        params = params or UNIT_COST
        return cls(rects, params, sum((params.cost(r) for r in rects), Fraction(0)))

    def with_params(self, params: CostParams) -> "Cover":
        return Cover.of(self.rects, params)

    def __len__(self) -> int:
        return len(self.rects)

    @property
    def total_area(self) -> int:
        return sum(r.area for r in self.rects)


class Chord(NamedTuple):
    """Axis-parallel interior segment between two concave vertices."""

    a: tuple[int, int]
    b: tuple[int, int]

    @property
    def horizontal(self) -> bool:
        return self.a[1] == self.b[1]


def _union_area(rects: Sequence[Rect], clip: Rect) -> int:
    parts = [Rect(max(r.xmin, clip.xmin), max(r.ymin, clip.ymin), min(r.xmax, clip.xmax), min(r.ymax, clip.ymax))
             for r in rects if r.overlaps(clip)]
    xs = sorted({v for r in parts for v in (r.xmin, r.xmax)})
    area = 0
    for x0, x1 in zip(xs, xs[1:]):
        spans = sorted((r.ymin, r.ymax) for r in parts if r.xmin <= x0 and r.xmax >= x1)
        covered, top = 0, None
        for lo, hi in spans:
            if top is None or lo > top:
                covered += hi - lo
                top = hi
            elif hi > top:
                covered += hi - top
                top = hi
        area += covered * (x1 - x0)
    return area


def validate_cover(p: Polygon, cover: Cover | Sequence[Rect], graph: Optional[BaseRectGraph] = None) -> bool:
    """Both cover conditions: every rectangle inside ``p``, union equal to ``p``."""
    rects = cover.rects if isinstance(cover, Cover) else tuple(cover)
    if not all(rect_in_polygon(r, p) for r in rects):
        return False
    g = graph if graph is not None else build_graph(p)
    counts = [0] * len(g)
    for r in rects:
        for c in g.cells_in(r):
            counts[c] += 1
    for c, k in enumerate(counts):
        # a cell can also be covered jointly by rectangles that are not base-aligned
        if k == 0 and _union_area(rects, g.nodes[c]) != g.nodes[c].area:
            return False
    return True


# --------------------------------------------------------------------------
# partition


@dataclass(frozen=True)
class PartitionDetails:
    rects: list[Rect]
    concave: int
    horizontal_chords: list[Chord]
    vertical_chords: list[Chord]
    independent: list[Chord]


def _max_independent_chords(hch: list[tuple[int, int, int]], vch: list[tuple[int, int, int]]):
    """Indices of a maximum set of pairwise non-conflicting chords.

    Two chords conflict when they cross or share an endpoint; the conflict
    graph is bipartite, so the complement of a minimum vertex cover (from a
    maximum matching, by Konig's theorem) is a maximum independent set.
    """
    nh, nv = len(hch), len(vch)
    if nh == 0 or nv == 0:
        return list(range(nh)), list(range(nv))
    vx = np.array([c[0] for c in vch])
    vy0 = np.array([c[1] for c in vch])
    vy1 = np.array([c[2] for c in vch])
    adj: list[list[int]] = []
    rows, cols = [], []
    for i, (y, x0, x1) in enumerate(hch):
        js = np.flatnonzero((vx >= x0) & (vx <= x1) & (vy0 <= y) & (vy1 >= y)).tolist()
        adj.append(js)
        rows += [i] * len(js)
        cols += js
    m = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(nh, nv))
    match_h = maximum_bipartite_matching(m, perm_type="column")
    match_v = np.full(nv, -1)
    for i, j in enumerate(match_h.tolist()):
        if j >= 0:
            match_v[j] = i
    # alternating reachability from unmatched horizontal chords
    seen_h = [j < 0 for j in match_h.tolist()]
    seen_v = [False] * nv
    queue = [i for i in range(nh) if seen_h[i]]
    while queue:
        u = queue.pop()
        for v in adj[u]:
            if not seen_v[v]:
                seen_v[v] = True
                w = int(match_v[v])
                if w >= 0 and not seen_h[w]:
                    seen_h[w] = True
                    queue.append(w)
    return [i for i in range(nh) if seen_h[i]], [j for j in range(nv) if not seen_v[j]]


def partition_details(p: Polygon) -> PartitionDetails:
    edges = _EdgeArrays(p)
    cvs = concave_vertices(p)
    concave_pts = {cv.point for cv in cvs}
    hch: set[tuple[int, int, int]] = set()
    vch: set[tuple[int, int, int]] = set()
    if cvs:
        pts = np.array([cv.point for cv in cvs], dtype=np.int64)
        hd = np.array([cv.hdir for cv in cvs], dtype=np.int64)
        vd = np.array([cv.vdir for cv in cvs], dtype=np.int64)
        hlen = _first_hit(pts[:, [0, 1]], hd, edges.vx, edges.vya, edges.vyb).tolist()
        vlen = _first_hit(pts[:, [1, 0]], vd, edges.hy, edges.hxa, edges.hxb).tolist()
        for cv, hl, vl in zip(cvs, hlen, vlen):
            x, y = cv.point
            if (x + cv.hdir * hl, y) in concave_pts:
                hch.add((y, min(x, x + cv.hdir * hl), max(x, x + cv.hdir * hl)))
            if (x, y + cv.vdir * vl) in concave_pts:
                vch.add((x, min(y, y + cv.vdir * vl), max(y, y + cv.vdir * vl)))
    hch_l, vch_l = sorted(hch), sorted(vch)
    hi, vi = _max_independent_chords(hch_l, vch_l)
    chosen_h = [hch_l[i] for i in hi]
    chosen_v = [vch_l[i] for i in vi]
    resolved = {(x, y) for y, x0, x1 in chosen_h for x in (x0, x1)}
    resolved |= {(x, y) for x, y0, y1 in chosen_v for y in (y0, y1)}
    rest = [cv for cv in cvs if cv.point not in resolved]
    vcuts = list(chosen_v)
    if rest:
        # one vertical cut per leftover vertex, stopped by edges and chosen horizontal chords
        by = np.concatenate([edges.hy, np.array([c[0] for c in chosen_h], dtype=np.int64)])
        bx0 = np.concatenate([edges.hxa, np.array([c[1] for c in chosen_h], dtype=np.int64)])
        bx1 = np.concatenate([edges.hxb, np.array([c[2] for c in chosen_h], dtype=np.int64)])
        pts = np.array([(cv.point.y, cv.point.x) for cv in rest], dtype=np.int64)
        vd = np.array([cv.vdir for cv in rest], dtype=np.int64)
        lens = _first_hit(pts, vd, by, bx0, bx1).tolist()
        for cv, L in zip(rest, lens):
            x, y = cv.point
            vcuts.append((x, min(y, y + cv.vdir * L), max(y, y + cv.vdir * L)))
    rects = row_major(trace_faces(edges, chosen_h, sorted(set(vcuts))))

    def chord(c, horizontal):
        if horizontal:
            y, x0, x1 = c
            return Chord((x0, y), (x1, y))
        x, y0, y1 = c
        return Chord((x, y0), (x, y1))

    return PartitionDetails(
        rects, len(cvs),
        [chord(c, True) for c in hch_l], [chord(c, False) for c in vch_l],
        [chord(c, True) for c in chosen_h] + [chord(c, False) for c in chosen_v])


def partition_cover(p: Polygon, params: Optional[CostParams] = None) -> Cover:
    """Minimum-cardinality partition of ``p`` into rectangles."""
    return Cover.of(partition_details(p).rects, params)


# --------------------------------------------------------------------------
# strip cover


def strip_rectangles(g: BaseRectGraph) -> list[Rect]:
    """One maximal rectangle per top-free base rectangle, duplicates removed.

    From a node ``B`` without top neighbour walk left while the next node has
    height at least ``h(B)``, likewise right, then descend ``h(B)`` steps from
    the right end; the rectangle spans the left end's top-left corner to the
    bottom-right corner of where the descent stops.
    """
    out: dict[Rect, None] = {}
    nodes, h = g.nodes, g.height
    for b in g.top_free():
        hb = h[b]
        lft = b
        while g.left[lft] is not None and h[g.left[lft]] >= hb:
            lft = g.left[lft]
        rgt = b
        while g.right[rgt] is not None and h[g.right[rgt]] >= hb:
            rgt = g.right[rgt]
        low = rgt
        for _ in range(hb):
            low = g.bottom[low]
        r = Rect(nodes[lft].xmin, nodes[low].ymin, nodes[low].xmax, nodes[lft].ymax)
        out.setdefault(r)
    return list(out)


def strip_cover(p: Polygon, params: Optional[CostParams] = None,
                graph: Optional[BaseRectGraph] = None) -> Cover:
    g = graph if graph is not None else build_graph(p)
    return Cover.of(strip_rectangles(g), params)


# --------------------------------------------------------------------------
# greedy


def greedy_cover(p: Polygon, params: CostParams, graph: Optional[BaseRectGraph] = None,
                 cap: Optional[int] = DEFAULT_GREEDY_CAP) -> Cover:
    """Greedy weighted set cover: repeatedly take the least cost per newly covered area.

    Ties go to the larger effective area, then to row-major order.  Ratios
    are compared exactly by cross-multiplying integer-scaled costs.
    """
    g = graph if graph is not None else build_graph(p)
    cands = enumerate_powerset(g, None, cap)
    a, b, _ = params.scaled()
    cost = [a + b * r.area for r in cands.rects]
    cell_area = [r.area for r in g.nodes]
    eff = [r.area for r in cands.rects]
    containing: list[list[int]] = [[] for _ in range(len(g))]
    for k, cells in enumerate(cands.covers):
        for c in cells:
            containing[c].append(k)
    keys = [r.row_major_key() for r in cands.rects]
    alive = set(range(len(cands)))
    uncovered = set(range(len(g)))
    chosen: list[Rect] = []
    while alive:
        best = None
        for k in alive:
            if best is None:
                best = k
                continue
            lhs, rhs = cost[k] * eff[best], cost[best] * eff[k]
            if lhs < rhs or (lhs == rhs and (eff[k] > eff[best] or (eff[k] == eff[best] and keys[k] < keys[best]))):
                best = k
        chosen.append(cands.rects[best])
        alive.discard(best)
        for c in cands.covers[best]:
            if c in uncovered:
                uncovered.discard(c)
                for k in containing[c]:
                    eff[k] -= cell_area[c]
                    if eff[k] == 0:
                        alive.discard(k)
    return Cover.of(chosen, params)
