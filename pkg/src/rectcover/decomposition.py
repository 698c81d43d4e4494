"""Grid rectangles, base rectangles, the base-rectangle graph and its powerset.

Base rectangles come from shooting one horizontal and one vertical ray into
the interior from every concave vertex.  Both the base decomposition and the
optimal partition in :mod:`rectcover.covers` are faces of an arrangement of
polygon edges plus interior cuts, so the face extraction lives here as
:func:`trace_faces`.
"""

from __future__ import annotations

from bisect import bisect_left
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .cost import CostParams
from .geometry import Point, Polygon, Rect, point_in_polygon2, row_major


class CandidateCapExceeded(RuntimeError):
    """The rectangle powerset is larger than the configured cap."""

    def __init__(self, cap: int):
        super().__init__(f"rectangle powerset exceeds {cap} candidates")
        self.cap = cap


class ConcaveVertex(NamedTuple):
    point: Point
    ring: int
    hdir: int  # +1: horizontal ray goes right, -1: left
    vdir: int  # +1: vertical ray goes up, -1: down


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


def concave_vertices(p: Polygon) -> list[ConcaveVertex]:
    """Concave vertices of ``p`` with the directions of their interior rays.

    A point where two rings touch is not concave: each interior quadrant
    meeting there has a right angle.
    """
    count: dict[Point, int] = defaultdict(int)
    for ring in p.rings:
        for q in ring:
            count[q] += 1
    out = []
    for k, ring in enumerate(p.rings):
        m = len(ring)
        for i in range(m):
            a, b, c = ring[i - 1], ring[i], ring[(i + 1) % m]
            cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x)
            if cross >= 0 or count[b] > 1:
                continue
            if a.y == b.y:  # incoming horizontal: keep going; outgoing vertical: go backwards
                hdir, vdir = _sign(b.x - a.x), -_sign(c.y - b.y)
            else:
                hdir, vdir = -_sign(c.x - b.x), _sign(b.y - a.y)
            out.append(ConcaveVertex(b, k, hdir, vdir))
    return out


class _EdgeArrays:
    """Polygon edges as numpy columns, split by orientation."""

    def __init__(self, p: Polygon):
        h, v = [], []
        for _, a, b in p.edges():
            if a.y == b.y:
                # leftward edge: interior (on the left of travel) is below
                h.append((a.y, min(a.x, b.x), max(a.x, b.x), b.x < a.x))
            else:
                v.append((a.x, min(a.y, b.y), max(a.y, b.y)))
        harr = np.array(h, dtype=np.int64).reshape(-1, 4)
        varr = np.array(v, dtype=np.int64).reshape(-1, 3)
        self.hy, self.hxa, self.hxb = harr[:, 0], harr[:, 1], harr[:, 2]
        self.hbelow = harr[:, 3].astype(bool)
        self.vx, self.vya, self.vyb = varr[:, 0], varr[:, 1], varr[:, 2]


_CHUNK = 512


def vertex_rays(p: Polygon, cvs: Sequence[ConcaveVertex] | None = None,
                edges: _EdgeArrays | None = None):
    """Horizontal and vertical ray segments from every concave vertex.

    Returns ``(hrays, vrays)`` as lists of ``(y, x0, x1)`` and ``(x, y0, y1)``
    with ``x0 < x1`` / ``y0 < y1``; zero-length rays are dropped and
    coincident rays (chords shot from both ends) appear once.
    """
    if cvs is None:
        cvs = concave_vertices(p)
    if edges is None:
        edges = _EdgeArrays(p)
    if not cvs:
        return [], []
    pts = np.array([cv.point for cv in cvs], dtype=np.int64)
    hd = np.array([cv.hdir for cv in cvs], dtype=np.int64)
    vd = np.array([cv.vdir for cv in cvs], dtype=np.int64)
    # the vertex's own edges sit at distance 0; touching points are not
    # concave, so nothing else can
    hlen = _first_hit(pts[:, [0, 1]], hd, edges.vx, edges.vya, edges.vyb)
    vlen = _first_hit(pts[:, [1, 0]], vd, edges.hy, edges.hxa, edges.hxb)
    hrays, vrays = set(), set()
    for (x, y), d, L in zip(pts.tolist(), hd.tolist(), hlen.tolist()):
        if L > 0:
            hrays.add((y, min(x, x + d * L), max(x, x + d * L)))
    for (x, y), d, L in zip(pts.tolist(), vd.tolist(), vlen.tolist()):
        if L > 0:
            vrays.add((x, min(y, y + d * L), max(y, y + d * L)))
    return sorted(hrays), sorted(vrays)


def _first_hit(origins, dirs, pos, lo, hi) -> np.ndarray:
    out = np.empty(len(origins), dtype=np.int64)
    big = np.iinfo(np.int64).max
    for s in range(0, len(origins), _CHUNK):
        o = origins[s:s + _CHUNK]
        d = dirs[s:s + _CHUNK]
        dist = (pos[None, :] - o[:, 0:1]) * d[:, None]
        hit = (lo[None, :] <= o[:, 1:2]) & (hi[None, :] >= o[:, 1:2]) & (dist > 0)
        out[s:s + _CHUNK] = np.where(hit, dist, big).min(axis=1)
    return out


def trace_faces(edges: _EdgeArrays, hcuts: Iterable[tuple[int, int, int]],
                vcuts: Iterable[tuple[int, int, int]]) -> list[Rect]:
    """Faces of the arrangement of polygon edges plus interior cuts.

    Every face must be a rectangle, i.e. every concave vertex has to be
    resolved by some cut.  Each face is found from its top-left corner: a
    point on a horizontal segment with interior below from which a vertical
    segment descends.
    """
    hcuts = list(hcuts)
    vcuts = list(vcuts)
    hy = np.concatenate([edges.hy, np.array([c[0] for c in hcuts], dtype=np.int64)])
    hxa = np.concatenate([edges.hxa, np.array([c[1] for c in hcuts], dtype=np.int64)])
    hxb = np.concatenate([edges.hxb, np.array([c[2] for c in hcuts], dtype=np.int64)])
    hbelow = np.concatenate([edges.hbelow, np.ones(len(hcuts), dtype=bool)])
    vx = np.concatenate([edges.vx, np.array([c[0] for c in vcuts], dtype=np.int64)])
    vya = np.concatenate([edges.vya, np.array([c[1] for c in vcuts], dtype=np.int64)])
    vyb = np.concatenate([edges.vyb, np.array([c[2] for c in vcuts], dtype=np.int64)])

    # maximal runs, per line, of horizontal segments with interior just below
    runs: dict[int, list[list[int]]] = defaultdict(list)
    order = np.lexsort((hxa, hy))
    for i in order[hbelow[order]].tolist():
        y, a, b = int(hy[i]), int(hxa[i]), int(hxb[i])
        line = runs[y]
        if line and a <= line[-1][1]:
            line[-1][1] = max(line[-1][1], b)
        else:
            line.append([a, b])

    right_nodes: dict[int, list[int]] = {}

    def stops_below(x: int) -> list[int]:
        ys = right_nodes.get(x)
        if ys is None:
            ys = np.unique(hy[(hxa <= x) & (hxb > x)]).tolist()
            right_nodes[x] = ys
        return ys

    faces = []
    for y, line in runs.items():
        down = np.unique(vx[(vya < y) & (vyb >= y)]).tolist()
        for a, b in line:
            i = bisect_left(down, a)
            while i < len(down) and down[i] < b:
                x = down[i]
                x2 = down[i + 1]
                ys = stops_below(x)
                y2 = ys[bisect_left(ys, y) - 1]
                faces.append(Rect(x, y2, x2, y))
                i += 1
    return faces


def base_rectangles(p: Polygon) -> list[Rect]:
    """Base rectangles in row-major order (descending top, ascending left)."""
    edges = _EdgeArrays(p)
    hrays, vrays = vertex_rays(p, edges=edges)
    return row_major(trace_faces(edges, hrays, vrays))


def grid_rectangles(p: Polygon) -> list[Rect]:
    """Hanan-grid cells clipped to the interior, row-major."""
    xs = sorted({q.x for q in p.vertices})
    ys = sorted({q.y for q in p.vertices})
    vedges = [(a.x, min(a.y, b.y), max(a.y, b.y)) for _, a, b in p.edges() if a.x == b.x]
    cells = []
    for j in range(len(ys) - 1, 0, -1):
        y0, y1 = ys[j - 1], ys[j]
        crossings = sorted(x for x, lo, hi in vedges if lo <= y0 and hi >= y1)
        spans = list(zip(crossings[0::2], crossings[1::2]))
        for a, b in spans:
            i0, i1 = bisect_left(xs, a), bisect_left(xs, b)
            for i in range(i0, i1):
                cells.append(Rect(xs[i], y0, xs[i + 1], y1))
    return row_major(cells)


# --------------------------------------------------------------------------
# graph


@dataclass(frozen=True)
class BaseRectGraph:
    """Base rectangles with their left/top/right/bottom neighbours.

    Neighbour lists hold node indices or ``None``.  ``height[i]`` is the
    number of steps on the downward path starting at node ``i``.
    """

    nodes: tuple[Rect, ...]
    left: tuple[Optional[int], ...]
    top: tuple[Optional[int], ...]
    right: tuple[Optional[int], ...]
    bottom: tuple[Optional[int], ...]
    height: tuple[int, ...]
    _bounds: np.ndarray = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.nodes)

    def neighbors(self, i: int) -> list[int]:
        return [j for j in (self.left[i], self.top[i], self.right[i], self.bottom[i]) if j is not None]

    def cells_in(self, r: Rect) -> list[int]:
        """Indices of base rectangles contained in ``r``."""
        b = self._bounds
        mask = (b[:, 0] >= r.xmin) & (b[:, 2] <= r.xmax) & (b[:, 1] >= r.ymin) & (b[:, 3] <= r.ymax)
        return np.flatnonzero(mask).tolist()

    def covered_area(self, r: Rect) -> int:
        b = self._bounds
        mask = (b[:, 0] >= r.xmin) & (b[:, 2] <= r.xmax) & (b[:, 1] >= r.ymin) & (b[:, 3] <= r.ymax)
        return int(((b[mask, 2] - b[mask, 0]) * (b[mask, 3] - b[mask, 1])).sum())

    def is_union_of_cells(self, r: Rect) -> bool:
        """True iff ``r`` is exactly a union of base rectangles (hence inside P)."""
        return self.covered_area(r) == r.area

    def top_free(self) -> list[int]:
        return [i for i in range(len(self.nodes)) if self.top[i] is None]

    def min_area(self) -> int:
        return min(r.area for r in self.nodes)


def graph_from_rects(rects: Sequence[Rect]) -> BaseRectGraph:
    """Graph over an interior-disjoint rectangle set; links need full shared edges."""
    nodes = tuple(rects)
    by_left = {(r.xmin, r.ymin, r.ymax): i for i, r in enumerate(nodes)}
    by_bottom = {(r.ymin, r.xmin, r.xmax): i for i, r in enumerate(nodes)}
    right = tuple(by_left.get((r.xmax, r.ymin, r.ymax)) for r in nodes)
    top = tuple(by_bottom.get((r.ymax, r.xmin, r.xmax)) for r in nodes)
    left: list[Optional[int]] = [None] * len(nodes)
    bottom: list[Optional[int]] = [None] * len(nodes)
    for i, j in enumerate(right):
        if j is not None:
            left[j] = i
    for i, j in enumerate(top):
        if j is not None:
            bottom[j] = i
    height = [0] * len(nodes)
    for i in sorted(range(len(nodes)), key=lambda k: nodes[k].ymin):
        if bottom[i] is not None:
            height[i] = height[bottom[i]] + 1
    bounds = np.array([tuple(r) for r in nodes], dtype=np.int64).reshape(-1, 4)
    return BaseRectGraph(nodes, tuple(left), top, right, tuple(bottom), tuple(height), bounds)


def build_graph(p: Polygon) -> BaseRectGraph:
    return graph_from_rects(base_rectangles(p))


# --------------------------------------------------------------------------
# powerset


@dataclass(frozen=True)
class CandidateSet:
    """Rectangles coverable by base rectangles, with the cells each one covers."""

    rects: tuple[Rect, ...]
    covers: tuple[tuple[int, ...], ...]
    cost: tuple[Fraction, ...]
    params: Optional[CostParams]

    def __len__(self) -> int:
        return len(self.rects)


DEFAULT_GREEDY_CAP = 20_000_000


def enumerate_powerset(g: BaseRectGraph, params: Optional[CostParams] = None,
                       cap: Optional[int] = None) -> CandidateSet:
    """All rectangles that are unions of base rectangles.

    For each top-left node, columns are taken left to right along the
    right-neighbour chain; each column is walked downwards, and a rectangle is
    reported at every depth that all columns so far reach.
    """
    rects: list[Rect] = []
    covers: list[tuple[int, ...]] = []
    nodes = g.nodes
    for i in range(len(nodes)):
        top = nodes[i].ymax
        xmin = nodes[i].xmin
        cols: list[list[int]] = []
        min_y = None
        j = i
        while j is not None:
            col: list[int] = []
            k = j
            reached_floor = False
            while k is not None:
                r = nodes[k]
                if min_y is not None and r.ymin < min_y:
                    break
                col.append(k)
                d = len(col)
                cells = [c for prev in cols for c in prev[:d]] + col
                rects.append(Rect(xmin, r.ymin, nodes[j].xmax, top))
                covers.append(tuple(sorted(cells)))
                if cap is not None and len(rects) > cap:
                    raise CandidateCapExceeded(cap)
                if min_y is not None and r.ymin == min_y:
                    reached_floor = True
                    break
                k = g.bottom[k]
            if not col:
                break
            if not reached_floor:
                min_y = nodes[col[-1]].ymin
            cols.append(col)
            j = g.right[j]
    cost = tuple(params.cost(r) for r in rects) if params is not None else ()
    return CandidateSet(tuple(rects), tuple(covers), cost, params)


def is_maximal_in_graph(g: BaseRectGraph, r: Rect, cells: Iterable[int]) -> bool:
    """No side of ``r`` can be pushed outwards: each side touches a boundary somewhere."""
    cells = list(cells)
    nodes = g.nodes
    left = all(g.left[c] is not None for c in cells if nodes[c].xmin == r.xmin)
    right = all(g.right[c] is not None for c in cells if nodes[c].xmax == r.xmax)
    top = all(g.top[c] is not None for c in cells if nodes[c].ymax == r.ymax)
    bottom = all(g.bottom[c] is not None for c in cells if nodes[c].ymin == r.ymin)
    return not (left or right or top or bottom)


def maximal_rectangles(g: BaseRectGraph, cands: Optional[CandidateSet] = None) -> list[Rect]:
    if cands is None:
        cands = enumerate_powerset(g)
    return [r for r, cells in zip(cands.rects, cands.covers) if is_maximal_in_graph(g, r, cells)]


def pixel_cells(p: Polygon) -> set[tuple[int, int]]:
    """Lower-left corners of the unit pixels inside ``p`` (small polygons only)."""
    bb = p.bbox()
    return {(x, y) for x in range(bb.xmin, bb.xmax) for y in range(bb.ymin, bb.ymax)
            if point_in_polygon2(p, 2 * x + 1, 2 * y + 1)}
