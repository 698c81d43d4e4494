"""Integer rectilinear polygons, rectangles, WKT input/output and SVG rendering.

Coordinates are plain Python ints; ``y`` grows upward, so the *top* of a
rectangle is its larger ``y``.  Polygons are canonicalised on construction:
the outer ring runs counter-clockwise, holes run clockwise, and every ring
starts at its lexicographically smallest vertex.  With that orientation the
polygon interior always lies to the left of a directed edge.
"""

from __future__ import annotations

import colorsys
import re
from bisect import bisect_left as _bl
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import shapely
from shapely.geometry import Polygon as _ShapelyPolygon


class GeometryError(ValueError):
    """Invalid geometric input."""


class WktSyntaxError(GeometryError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class PolygonValidationError(GeometryError):
    pass


class Point(NamedTuple):
    x: int
    y: int


class Rect(NamedTuple):
    """Axis-aligned rectangle ``[xmin, xmax] x [ymin, ymax]``.

    Non-degenerate by convention (``xmin < xmax`` and ``ymin < ymax``); use
    :func:`rect_from_corners` when the input is untrusted.
    """

    xmin: int
    ymin: int
    xmax: int
    ymax: int

    @property
    def top_left(self) -> Point:
        return Point(self.xmin, self.ymax)

    @property
    def bottom_right(self) -> Point:
        return Point(self.xmax, self.ymin)

    @property
    def width(self) -> int:
        return self.xmax - self.xmin

    @property
    def height(self) -> int:
        return self.ymax - self.ymin

    @property
    def area(self) -> int:
        return (self.xmax - self.xmin) * (self.ymax - self.ymin)

    def contains_rect(self, other: "Rect") -> bool:
        return (self.xmin <= other.xmin and other.xmax <= self.xmax
                and self.ymin <= other.ymin and other.ymax <= self.ymax)

    def overlaps(self, other: "Rect") -> bool:
        """True if the interiors intersect."""
        return (self.xmin < other.xmax and other.xmin < self.xmax
                and self.ymin < other.ymax and other.ymin < self.ymax)

    def row_major_key(self) -> tuple[int, int, int, int]:
        # descending top, ascending left, then the bottom-right corner the same way
        return (-self.ymax, self.xmin, -self.ymin, self.xmax)


def rect_from_corners(top_left: tuple[int, int], bottom_right: tuple[int, int]) -> Rect:
    (x1, y1), (x2, y2) = top_left, bottom_right
    if not (x1 < x2 and y1 > y2):
        raise GeometryError(f"degenerate rectangle {top_left} -> {bottom_right}")
    return Rect(x1, y2, x2, y1)


def row_major(rects: Iterable[Rect]) -> list[Rect]:
    return sorted(rects, key=Rect.row_major_key)


def bounding_box(rects: Iterable[Rect]) -> Rect:
    rects = list(rects)
    if not rects:
        raise GeometryError("bounding box of an empty set")
    return Rect(min(r.xmin for r in rects), min(r.ymin for r in rects),
                max(r.xmax for r in rects), max(r.ymax for r in rects))


Ring = tuple[Point, ...]


def _signed_area2(ring: Sequence[tuple[int, int]]) -> int:
    s = 0
    n = len(ring)
    for i in range(n):
        x1, y1 = ring[i]
        x2, y2 = ring[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return s


def _canonical_ring(ring: Sequence[tuple[int, int]], ccw: bool) -> Ring:
    pts = [Point(int(x), int(y)) for x, y in ring]
    if (_signed_area2(pts) > 0) != ccw:
        pts.reverse()
    start = min(range(len(pts)), key=lambda i: pts[i])
    return tuple(pts[start:] + pts[:start])


def _check_ring(ring: Sequence[tuple[int, int]], label: str) -> None:
    n = len(ring)
    if n < 4:
        raise PolygonValidationError(f"{label}: a rectilinear ring needs at least 4 vertices, got {n}")
    if n % 2:
        raise PolygonValidationError(f"{label}: odd number of vertices ({n}) cannot alternate orientation")
    for i in range(n):
        if ring[i - 1] == ring[i]:
            raise PolygonValidationError(f"{label}: repeated vertex {tuple(ring[i])}")
    for i in range(n):
        a, b, c = ring[i - 1], ring[i], ring[(i + 1) % n]
        if a[0] != b[0] and a[1] != b[1]:
            raise PolygonValidationError(f"{label}: non-rectilinear edge {tuple(a)} -> {tuple(b)}")
        if (a[0] == b[0] == c[0]) or (a[1] == b[1] == c[1]):
            raise PolygonValidationError(f"{label}: collinear vertex {tuple(b)}")
    if _signed_area2(ring) == 0:
        raise PolygonValidationError(f"{label}: zero area")


def merge_collinear(ring: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    """Drop repeated and collinear vertices (used for internally traced rings)."""
    pts = [tuple(p) for p in ring]
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        out = []
        n = len(pts)
        for i in range(n):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
            if b == a or (a[0] == b[0] == c[0]) or (a[1] == b[1] == c[1]):
                changed = True
                continue
            out.append(b)
        pts = out
    return pts


@dataclass(frozen=True)
class Polygon:
    """Rectilinear polygon with holes, canonically oriented.

    Construct with :meth:`from_rings`, which validates and canonicalises.
    """

    outer: Ring
    holes: tuple[Ring, ...] = ()

    @classmethod
    def from_rings(cls, outer: Sequence[tuple[int, int]],
                   holes: Iterable[Sequence[tuple[int, int]]] = (),
                   validate: bool = True) -> "Polygon":
        outer = list(outer)
        holes = [list(h) for h in holes]
        # WKT-style closed rings
        for ring in [outer, *holes]:
            if len(ring) > 1 and tuple(ring[0]) == tuple(ring[-1]):
                ring.pop()
        if validate:
            _check_ring(outer, "outer ring")
            for k, h in enumerate(holes):
                _check_ring(h, f"hole {k}")
        poly = cls(_canonical_ring(outer, ccw=True),
                   tuple(_canonical_ring(h, ccw=False) for h in holes))
        if validate:
            shp = poly.to_shapely()
            if not shp.is_valid:
                reason = shapely.is_valid_reason(shp)
                raise PolygonValidationError(f"invalid polygon: {reason}")
        return poly

    @property
    def rings(self) -> tuple[Ring, ...]:
        return (self.outer,) + self.holes

    @property
    def vertices(self) -> list[Point]:
        return [p for ring in self.rings for p in ring]

    @property
    def n(self) -> int:
        """Number of horizontal (equivalently vertical) edges."""
        return sum(len(r) for r in self.rings) // 2

    def edges(self) -> Iterable[tuple[int, Point, Point]]:
        """Directed edges ``(ring index, start, end)``; interior on the left."""
        for k, ring in enumerate(self.rings):
            m = len(ring)
            for i in range(m):
                yield k, ring[i], ring[(i + 1) % m]

    def bbox(self) -> Rect:
        xs = [p.x for p in self.outer]
        ys = [p.y for p in self.outer]
        return Rect(min(xs), min(ys), max(xs), max(ys))

    def is_rectangle(self) -> bool:
        return not self.holes and len(self.outer) == 4

    def to_shapely(self) -> _ShapelyPolygon:
        return _ShapelyPolygon(self.outer, list(self.holes))

    def to_wkt(self) -> str:
        return "POLYGON " + _rings_wkt(self.rings)


def _rings_wkt(rings: Sequence[Ring]) -> str:
    parts = []
    for ring in rings:
        pts = list(ring) + [ring[0]]
        parts.append("(" + ", ".join(f"{p.x} {p.y}" for p in pts) + ")")
    return "(" + ", ".join(parts) + ")"


def to_wkt(polys: Sequence[Polygon]) -> str:
    if len(polys) == 1:
        return polys[0].to_wkt()
    return "MULTIPOLYGON (" + ", ".join(_rings_wkt(p.rings) for p in polys) + ")"


def polygon_area(p: Polygon) -> int:
    return (_signed_area2(p.outer) + sum(_signed_area2(h) for h in p.holes)) // 2


def point_in_polygon2(p: Polygon, x2: int, y2: int) -> bool:
    """Even-odd test for the point ``(x2/2, y2/2)``.

    Doubled coordinates let callers probe cell centres exactly.  The point
    must not lie on the boundary.
    """
    inside = False
    for _, a, b in p.edges():
        if a.x != b.x:
            continue
        ylo, yhi = (a.y, b.y) if a.y < b.y else (b.y, a.y)
        if 2 * ylo <= y2 < 2 * yhi and 2 * a.x > x2:
            inside = not inside
    return inside


def rect_in_polygon(r: Rect, p: Polygon) -> bool:
    """True iff the interior of ``r`` lies in the interior of ``p``."""
    for _, a, b in p.edges():
        if a.y == b.y:
            lo, hi = (a.x, b.x) if a.x < b.x else (b.x, a.x)
            if r.ymin < a.y < r.ymax and lo < r.xmax and hi > r.xmin:
                return False
        else:
            lo, hi = (a.y, b.y) if a.y < b.y else (b.y, a.y)
            if r.xmin < a.x < r.xmax and lo < r.ymax and hi > r.ymin:
                return False
    # nothing crosses the open rectangle, so its centre decides
    return point_in_polygon2(p, r.xmin + r.xmax, r.ymin + r.ymax)


# --------------------------------------------------------------------------
# WKT

_TOKEN = re.compile(r"\s*(?:(?P<num>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)"
                    r"|(?P<word>[A-Za-z]+)|(?P<punct>[(),]))")


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.tokens: list[tuple[str, str, int]] = []
        while True:
            m = _TOKEN.match(text, self.pos)
            if m is None or m.end() == self.pos:
                rest = text[self.pos:]
                if rest.strip():
                    off = len(rest) - len(rest.lstrip())
                    raise WktSyntaxError(f"unexpected character {rest.lstrip()[0]!r}", self.pos + off)
                break
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            self.pos = m.end()
        self.tokens.append(("eof", "", len(text)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.next()
        if val.upper() != value:
            raise WktSyntaxError(f"expected {value!r}, found {val or 'end of input'!r}", pos)


def _parse_int(tok: tuple[str, str, int]) -> int:
    kind, val, pos = tok
    if kind != "num":
        raise WktSyntaxError(f"expected a coordinate, found {val or 'end of input'!r}", pos)
    try:
        return int(val)
    except ValueError:
        pass
    try:
        f = float(val)
    except ValueError:  # pragma: no cover - regex only admits numbers
        raise WktSyntaxError(f"bad number {val!r}", pos) from None
    if not f.is_integer():
        raise GeometryError(f"non-integer coordinate {val!r} at position {pos}")
    return int(f)


def _parse_ring(lex: _Lexer) -> list[tuple[int, int]]:
    lex.expect("(")
    pts = []
    while True:
        x = _parse_int(lex.next())
        y = _parse_int(lex.next())
        pts.append((x, y))
        kind, val, pos = lex.next()
        if val == ")":
            break
        if val != ",":
            raise WktSyntaxError(f"expected ',' or ')', found {val or 'end of input'!r}", pos)
    if len(pts) < 2 or pts[0] != pts[-1]:
        raise PolygonValidationError(f"ring starting at {pts[0]} is not closed")
    return pts


def _parse_polygon_body(lex: _Lexer) -> list[list[tuple[int, int]]]:
    lex.expect("(")
    rings = [_parse_ring(lex)]
    while True:
        kind, val, pos = lex.next()
        if val == ")":
            return rings
        if val != ",":
            raise WktSyntaxError(f"expected ',' or ')', found {val or 'end of input'!r}", pos)
        rings.append(_parse_ring(lex))


def parse_wkt(text: str) -> list[Polygon]:
    """Parse a WKT ``POLYGON`` or ``MULTIPOLYGON`` with integer coordinates."""
    lex = _Lexer(text)
    kind, val, pos = lex.next()
    word = val.upper()
    if word == "POLYGON":
        bodies = [_parse_polygon_body(lex)]
    elif word == "MULTIPOLYGON":
        lex.expect("(")
        bodies = [_parse_polygon_body(lex)]
        while True:
            k2, v2, p2 = lex.next()
            if v2 == ")":
                break
            if v2 != ",":
                raise WktSyntaxError(f"expected ',' or ')', found {v2 or 'end of input'!r}", p2)
            bodies.append(_parse_polygon_body(lex))
    else:
        raise WktSyntaxError(f"expected POLYGON or MULTIPOLYGON, found {val or 'end of input'!r}", pos)
    kind, val, pos = lex.next()
    if kind != "eof":
        raise WktSyntaxError(f"trailing input {val!r}", pos)
    polys = []
    for k, rings in enumerate(bodies):
        try:
            polys.append(Polygon.from_rings(rings[0], rings[1:]))
        except PolygonValidationError as exc:
            if len(bodies) > 1:
                raise PolygonValidationError(f"polygon {k}: {exc}") from None
            raise
    return polys


# --------------------------------------------------------------------------
# SVG


def _color(i: int) -> str:
    r, g, b = colorsys.hsv_to_rgb((i * 0.618033988749895) % 1.0, 0.65, 0.9)
    return f"#{round(r * 255):02x}{round(g * 255):02x}{round(b * 255):02x}"


def serialize_svg(p: Polygon, rects: Sequence[Rect], scale: int = 10) -> bytes:
    """Polygon outline plus one translucent ``rect`` element per rectangle.

    The y axis is flipped so the picture shows "top" at the top.
    """
    bb = p.bbox()
    pad = 1
    w = (bb.width + 2 * pad) * scale
    h = (bb.height + 2 * pad) * scale

    def sx(x):
        return (x - bb.xmin + pad) * scale

    def sy(y):
        return (bb.ymax + pad - y) * scale

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
    ]
    d = " ".join("M " + " L ".join(f"{sx(q.x)} {sy(q.y)}" for q in ring) + " Z" for ring in p.rings)
    lines.append(f'<path d="{d}" fill="#eeeeee" fill-rule="evenodd" stroke="#000000" stroke-width="2"/>')
    for i, r in enumerate(rects):
        lines.append(
            f'<rect x="{sx(r.xmin)}" y="{sy(r.ymax)}" width="{r.width * scale}" height="{r.height * scale}" '
            f'fill="{_color(i)}" fill-opacity="0.4" stroke="{_color(i)}" stroke-opacity="0.6"/>')
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


# --------------------------------------------------------------------------
# unions of interior-disjoint rectangles

_TURN_PREFERENCE = {  # incoming direction -> outgoing directions, rightmost turn first
    (1, 0): [(0, -1), (1, 0), (0, 1)],
    (0, 1): [(1, 0), (0, 1), (-1, 0)],
    (-1, 0): [(0, 1), (-1, 0), (0, -1)],
    (0, -1): [(-1, 0), (0, -1), (1, 0)],
}


def _unit(a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
    return ((b[0] > a[0]) - (b[0] < a[0]), (b[1] > a[1]) - (b[1] < a[1]))


def polygons_from_rects(rects: Iterable[Rect]) -> list[Polygon]:
    """Boundary of a union of interior-disjoint rectangles, one polygon per region.

    Regions are edge-connected, so regions meeting only at a corner are
    separate polygons.  Within a region, tracing takes the rightmost turn at
    vertices where the boundary touches itself, which keeps the outside on
    one ring and each hole on its own ring.
    """
    rects = list(rects)
    if not rects:
        return []
    xs = sorted({v for r in rects for v in (r.xmin, r.xmax)})
    ys = sorted({v for r in rects for v in (r.ymin, r.ymax)})
    segs: dict[tuple[tuple[int, int], tuple[int, int]], int] = {}
    parent = list(range(len(rects)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def add(a, b, k):
        other = segs.pop((b, a), None)
        if other is None:
            segs[(a, b)] = k
        else:
            parent[find(other)] = find(k)

    for k, r in enumerate(rects):
        ix0, ix1 = _bl(xs, r.xmin), _bl(xs, r.xmax)
        iy0, iy1 = _bl(ys, r.ymin), _bl(ys, r.ymax)
        for i in range(ix0, ix1):
            add((xs[i], r.ymin), (xs[i + 1], r.ymin), k)
            add((xs[i + 1], r.ymax), (xs[i], r.ymax), k)
        for j in range(iy0, iy1):
            add((r.xmax, ys[j]), (r.xmax, ys[j + 1]), k)
            add((r.xmin, ys[j + 1]), (r.xmin, ys[j]), k)

    groups: dict[int, dict] = {}
    for (a, b), k in segs.items():
        groups.setdefault(find(k), {}).setdefault(a, {})[_unit(a, b)] = b
    polys = []
    for out_of in groups.values():
        rings = []
        while out_of:
            start = min(out_of)
            (d, cur), = out_of.pop(start).items()
            ring = [start]
            # the lexicographically smallest point is never a pinch point
            while cur != start:
                ring.append(cur)
                choices = out_of[cur]
                for dd in _TURN_PREFERENCE[d]:
                    if dd in choices:
                        break
                else:  # pragma: no cover - boundary segments always chain up
                    raise GeometryError("open boundary while tracing rectangle union")
                nxt = choices.pop(dd)
                if not choices:
                    del out_of[cur]
                cur, d = nxt, dd
            rings.append(merge_collinear(ring))
        (outer,) = [r for r in rings if _signed_area2(r) > 0]
        polys.append(Polygon.from_rings(outer, [r for r in rings if _signed_area2(r) < 0]))
    return sorted(polys, key=lambda p: p.outer[0])
