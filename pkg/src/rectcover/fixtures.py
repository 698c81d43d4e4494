"""Named test polygons and seeded polygon generators."""

from __future__ import annotations

import random
from typing import Iterator, Optional

from .geometry import Polygon, Rect, polygons_from_rects

RECT1 = Polygon.from_rings([(0, 0), (1, 0), (1, 1), (0, 1)])
L6 = Polygon.from_rings([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
PLUS12 = polygons_from_rects([Rect(1, 0, 2, 1), Rect(0, 1, 3, 2), Rect(1, 2, 2, 3)])[0]

# Three optimal covers of the same polygon, as (xmin, ymin, xmax, ymax)
# for cost ratios beta/alpha = 0, 1/3 and 2 respectively.
FIG1_C1 = tuple(Rect(*r) for r in [
    (1, 3, 3, 5), (1, 6, 15, 10), (1, 11, 3, 13), (2, 4, 14, 12), (4, 3, 12, 13),
    (5, 2, 11, 14), (6, 1, 10, 15), (13, 3, 15, 5), (13, 11, 15, 13)])
FIG1_C2 = tuple(Rect(*r) for r in [
    (1, 3, 3, 5), (1, 6, 2, 10), (1, 11, 3, 13), (2, 4, 4, 12), (4, 3, 5, 13),
    (5, 2, 11, 14), (6, 1, 10, 2), (6, 14, 10, 15), (11, 3, 12, 13), (12, 4, 14, 12),
    (13, 3, 15, 5), (13, 11, 15, 13), (14, 6, 15, 10)])
FIG1_C3 = tuple(Rect(*r) for r in [
    (1, 3, 3, 4), (1, 4, 15, 5), (1, 6, 15, 10), (1, 11, 3, 13), (2, 5, 14, 6),
    (2, 10, 14, 11), (3, 11, 13, 12), (4, 3, 12, 4), (4, 12, 12, 13), (5, 2, 11, 3),
    (5, 13, 11, 14), (6, 1, 10, 2), (6, 14, 10, 15), (13, 3, 15, 4), (13, 11, 15, 13)])

# C3 is a partition, so its union is the polygon itself.
FIG1 = polygons_from_rects(FIG1_C3)[0]

# Three interior-disjoint rectangles whose powerset has five elements.
FIG3_RECTS = (Rect(1, 0, 2, 2), Rect(1, 2, 2, 3), Rect(2, 2, 3, 3))


def staircase_band(n_vertices: int, seed: int = 0, max_step: int = 5) -> Polygon:
    """A monotone staircase strip with ``n_vertices`` vertices (a multiple of 4).

    The strip is the union of ``[X_i, X_{i+1}] x [Y_i, Y_{i+2}]`` for random
    increasing ``X`` and ``Y``.  Both its base decomposition and the Hanan
    cells inside it stay linear in size.
    """
    if n_vertices % 4 or n_vertices < 8:
        raise ValueError("staircase needs a multiple of 4 vertices, at least 8")
    m = n_vertices // 4
    rng = random.Random(seed)
    X = [0]
    Y = [0]
    for _ in range(m):
        X.append(X[-1] + rng.randint(1, max_step))
    for _ in range(m + 1):
        Y.append(Y[-1] + rng.randint(1, max_step))
    ring = [(X[0], Y[0])]
    for i in range(1, m):
        ring += [(X[i], Y[i - 1]), (X[i], Y[i])]
    ring += [(X[m], Y[m - 1]), (X[m], Y[m + 1])]
    for i in range(m - 1, 0, -1):
        ring += [(X[i], Y[i + 2]), (X[i], Y[i + 1])]
    ring.append((X[0], Y[2]))
    return Polygon.from_rings(ring)


def random_polygon(rng: random.Random, box: int = 12, max_rects: int = 6) -> Optional[Polygon]:
    """Union of up to ``max_rects`` random integer rectangles in a ``box`` square.

    Returns ``None`` when the union is disconnected.
    """
    k = rng.randint(1, max_rects)
    pixels = set()
    for _ in range(k):
        x0, x1 = sorted(rng.sample(range(box + 1), 2))
        y0, y1 = sorted(rng.sample(range(box + 1), 2))
        pixels.update((x, y) for x in range(x0, x1) for y in range(y0, y1))
    polys = polygons_from_rects(Rect(x, y, x + 1, y + 1) for x, y in pixels)
    if len(polys) != 1:
        return None
    return polys[0]


def random_corpus(count: int, seed: int = 0, max_base: Optional[int] = None, min_base: int = 1,
                  box: int = 12, max_rects: int = 6) -> list[Polygon]:
    """``count`` distinct random polygons with between ``min_base`` and ``max_base`` base rectangles."""
    from .decomposition import base_rectangles

    rng = random.Random(seed)
    out: list[Polygon] = []
    seen = set()
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 200 * count:
            raise RuntimeError("could not generate enough random polygons")
        p = random_polygon(rng, box, max_rects)
        if p is None or p in seen:
            continue
        nb = len(base_rectangles(p))
        if nb < min_base or (max_base is not None and nb > max_base):
            continue
        seen.add(p)
        out.append(p)
    return out


def iter_random(seed: int = 0, **kw) -> Iterator[Polygon]:
    rng = random.Random(seed)
    while True:
        p = random_polygon(rng, **kw)
        if p is not None:
            yield p
