"""Exact weighted cover by branch-and-bound, and LP model export.

Candidates are the rectangles of the base-rectangle powerset: some optimal
cover always uses only those, so the search over them is exact.  The grid
variant searches the powerset of the Hanan grid instead and exists to check
that claim.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction
from typing import Literal, Optional, Sequence

import numpy as np

from .cost import CostParams
from .covers import Cover, greedy_cover, partition_cover
from .decomposition import (
    BaseRectGraph,
    CandidateCapExceeded,
    build_graph,
    enumerate_powerset,
    graph_from_rects,
    grid_rectangles,
    maximal_rectangles,
)
from .geometry import Polygon, Rect, row_major

__all__ = ["solve_exact", "solve_exact_grid", "emit_lp", "lp_name", "SolverLimitExceeded",
           "DEFAULT_EXACT_CAP", "CandidateCapExceeded"]

DEFAULT_EXACT_CAP = 5000


class SolverLimitExceeded(RuntimeError):
    """The search hit its node or time budget before proving optimality."""


class _Search:
    """Depth-first branch-and-bound over candidate rectangles.

    Lower bounds come from the Lagrangian relaxation of the covering rows.
    Multipliers start from a feasible dual: each uncovered cell's area times
    the cheapest cost per still-uncovered area, raised greedily while every
    candidate's reduced cost stays non-negative.  A few subgradient steps,
    warm-started from the parent node, tighten it.  Reduced costs then remove
    every candidate that cannot appear in a cover cheaper than the incumbent.
    """

    ROOT_ITERS = 400
    NODE_ITERS = 60

    def __init__(self, areas: Sequence[int], covers: Sequence[Sequence[int]], costs: Sequence[int],
                 node_limit: Optional[int], deadline: Optional[float]):
        n, k = len(areas), len(costs)
        self.A = np.zeros((k, n), dtype=bool)
        for j, cells in enumerate(covers):
            self.A[j, list(cells)] = True
        self.areas = np.asarray(areas, dtype=np.float64)
        self.costs = np.asarray(costs, dtype=np.float64)
        self.icosts = list(costs)
        self.node_limit = node_limit
        self.deadline = deadline
        self.nodes = 0
        self.eps = 1e-9 * max(1.0, float(self.costs.sum()))

    def run(self, ub: int, ub_sel: list[int]) -> tuple[int, list[int]]:
        self.best, self.best_sel = ub, list(ub_sel)
        n, k = self.A.shape[1], self.A.shape[0]
        self._dfs(np.ones(n, dtype=bool), np.ones(k, dtype=bool), 0, [], None)
        return self.best, self.best_sel

    def _dual_start(self, sub: np.ndarray, costs: np.ndarray, areas: np.ndarray) -> np.ndarray:
        eff = sub @ areas
        ratio = costs / np.where(eff > 0, eff, 1)
        y = areas * np.where(sub, ratio[:, None], np.inf).min(axis=0)
        slack = np.maximum(costs - sub @ y, 0.0)
        for c in np.argsort(sub.sum(axis=0), kind="stable"):
            col = sub[:, c] > 0
            d = slack[col].min()
            if d > 0:
                y[c] += d
                slack[col] -= d
        return y

    def _lagrange(self, sub: np.ndarray, costs: np.ndarray, u: np.ndarray, room: float, iters: int):
        """Best ``(bound, reduced costs, multipliers)`` found; ``room`` is the incumbent gap."""
        best = (-np.inf, None, u)
        lam, stall = 1.0, 0
        for _ in range(iters):
            rc = costs - sub @ u
            neg = rc < 0
            bound = float(u.sum() + rc[neg].sum())
            if bound > best[0] + 1e-12:
                best, stall = (bound, rc, u), 0
            else:
                stall += 1
                if stall >= 8:
                    lam, stall = lam / 2, 0
            if best[0] > room or lam < 1e-4:
                break
            g = 1.0 - neg.astype(np.float64) @ sub
            norm = float(g @ g)
            if norm == 0:
                break
            step = lam * max(room + 1 - bound, 1e-6) / norm
            u = np.maximum(u + step * g, 0.0)
        return best

    def _dfs(self, unc: np.ndarray, alive: np.ndarray, cost: int, sel: list[int],
             u_parent: Optional[np.ndarray]) -> None:
        if not unc.any():
            if cost < self.best:
                self.best, self.best_sel = cost, list(sel)
            return
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise SolverLimitExceeded(f"node limit {self.node_limit} reached")
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SolverLimitExceeded("time limit reached")
        alive = alive & self.A[:, unc].any(axis=1)
        ids = np.flatnonzero(alive)
        sub = self.A[np.ix_(ids, np.flatnonzero(unc))].astype(np.float64)
        if (sub.sum(axis=0) == 0).any():
            return
        costs = self.costs[ids]
        # costs are integers, so only covers of cost <= best - 1 matter
        room = self.best - 1 - cost + self.eps
        u0 = self._dual_start(sub, costs, self.areas[unc])
        if u_parent is not None:
            u0 = np.maximum(u0, u_parent[unc])
        lb, rc, u = self._lagrange(sub, costs, u0, room,
                                   self.ROOT_ITERS if u_parent is None else self.NODE_ITERS)
        if lb > room:
            return
        keep = lb + np.maximum(rc, 0.0) <= room
        ids, sub, rc = ids[keep], sub[keep], rc[keep]
        counts = sub.sum(axis=0)
        if (counts == 0).any():
            return
        full_u = np.zeros(self.A.shape[1])
        full_u[unc] = u
        c = int(np.argmin(counts))
        choice = np.flatnonzero(sub[:, c])
        choice = choice[np.argsort(rc[choice], kind="stable")]
        alive = np.zeros_like(alive)
        alive[ids] = True
        for j in ids[choice].tolist():
            sel.append(j)
            self._dfs(unc & ~self.A[j], alive.copy(), cost + self.icosts[j], sel, full_u)
            sel.pop()
            # later siblings need not consider j again
            alive[j] = False


def _solve(p: Polygon, g: BaseRectGraph, params: CostParams, cap: Optional[int],
           node_limit: Optional[int], time_limit: Optional[float]) -> Cover:
    cands = enumerate_powerset(g, None, cap)
    a, b, d = params.scaled()
    rects = list(cands.rects)
    index = {r: k for k, r in enumerate(rects)}
    costs = [a + b * r.area for r in rects]

    ub, ub_sel = None, []
    for start in (partition_cover(p, params), greedy_cover(p, params, cap=cap)):
        sel = [index.get(r) for r in start.rects]
        if None in sel:
            continue
        c = sum(costs[k] for k in sel)
        if ub is None or c < ub:
            ub, ub_sel = c, sel
    if ub is None:
        # taking every candidate is a cover, so this bound is always beaten
        ub = sum(costs) + 1
    deadline = time.monotonic() + time_limit if time_limit is not None else None
    search = _Search([r.area for r in g.nodes], cands.covers, costs, node_limit, deadline)
    _, sel = search.run(ub, ub_sel)
    return Cover.of(row_major(rects[k] for k in sel), params)


def solve_exact(p: Polygon, params: CostParams, cap: Optional[int] = DEFAULT_EXACT_CAP,
                graph: Optional[BaseRectGraph] = None, node_limit: Optional[int] = None,
                time_limit: Optional[float] = None) -> Cover:
    """Minimum-cost cover over the base-rectangle powerset.

    Raises :class:`CandidateCapExceeded` when the powerset is larger than
    ``cap`` and :class:`SolverLimitExceeded` when a search budget runs out.
    """
    g = graph if graph is not None else build_graph(p)
    return _solve(p, g, params, cap, node_limit, time_limit)


def solve_exact_grid(p: Polygon, params: CostParams, cap: Optional[int] = DEFAULT_EXACT_CAP,
                     node_limit: Optional[int] = None, time_limit: Optional[float] = None) -> Cover:
    """Minimum-cost cover over the Hanan-grid powerset."""
    g = graph_from_rects(row_major(grid_rectangles(p)))
    return _solve(p, g, params, cap, node_limit, time_limit)


# --------------------------------------------------------------------------
# LP export


def _coord(v: int) -> str:
    return f"m{-v}" if v < 0 else str(v)


def lp_name(r: Rect) -> str:
    """``x_{x1}_{y1}_{x2}_{y2}`` from the top-left and bottom-right corners."""
    return "x_" + "_".join(_coord(v) for v in (r.xmin, r.ymax, r.xmax, r.ymin))


def _number(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d == 1:
        digits = max(math.ceil(math.log10(q.denominator)), 1) + 1
        return f"{float(q):.{digits}f}".rstrip("0")
    return repr(float(q))


def _wrap(head: str, terms: Sequence[str], width: int = 250) -> list[str]:
    lines, cur = [], head
    for t in terms:
        if len(cur) + len(t) + 1 > width and cur.strip():
            lines.append(cur)
            cur = "   "
        cur += " " + t
    lines.append(cur)
    return lines


def emit_lp(p: Polygon, params: CostParams, variant: Literal["weighted", "unweighted"] = "weighted",
            graph: Optional[BaseRectGraph] = None, cap: Optional[int] = None) -> bytes:
    """The covering program in CPLEX LP format.

    ``weighted`` has one variable per powerset rectangle with coefficient
    ``alpha + beta * area``; ``unweighted`` has one unit-cost variable per
    maximal rectangle.  There is one ``>= 1`` row per base rectangle.
    """
    if variant not in ("weighted", "unweighted"):
        raise ValueError(f"unknown LP variant {variant!r}")
    g = graph if graph is not None else build_graph(p)
    cands = enumerate_powerset(g, None, cap)
    if variant == "weighted":
        rects = list(cands.rects)
        coef = [params.cost(r) for r in rects]
    else:
        rects = maximal_rectangles(g, cands)
        coef = [Fraction(1)] * len(rects)
    names = [lp_name(r) for r in rects]
    rows: list[list[str]] = [[] for _ in range(len(g))]
    for k, r in enumerate(rects):
        for c in g.cells_in(r):
            rows[c].append(names[k])

    out = [f"\\ {variant} rectangle cover, {len(rects)} variables, {len(g)} constraints", "Minimize"]
    terms = []
    for k, name in enumerate(names):
        terms.append(("" if k == 0 else "+ ") + f"{_number(coef[k])} {name}")
    out += _wrap(" obj:", terms)
    out.append("Subject To")
    for c, vs in enumerate(rows):
        cell = g.nodes[c]
        terms = [("" if i == 0 else "+ ") + v for i, v in enumerate(vs)] + [">= 1"]
        out += _wrap(f" cell_{_coord(cell.xmin)}_{_coord(cell.ymax)}_{_coord(cell.xmax)}_{_coord(cell.ymin)}:", terms)
    out.append("Binary")
    out += _wrap("", names)
    out.append("End")
    return ("\n".join(out) + "\n").encode("ascii")
