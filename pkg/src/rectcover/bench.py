"""Benchmark harness: run algorithm configurations and record per-polygon metrics."""

from __future__ import annotations

import csv
import io
import multiprocessing as mp
import statistics
import time
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence

from .cost import CostParams
from .covers import Cover, greedy_cover, partition_cover, strip_cover, validate_cover
from .decomposition import DEFAULT_GREEDY_CAP, BaseRectGraph, CandidateCapExceeded, build_graph
from .exact import DEFAULT_EXACT_CAP, SolverLimitExceeded, solve_exact
from .geometry import Polygon, parse_wkt
from .postprocess import STAGES, run_pipeline

# label -> (base algorithm, postprocessing stages)
ALGORITHMS: dict[str, tuple[str, tuple[str, ...]]] = {
    "par": ("par", ()),
    "par-j": ("par", ("join",)),
    "par-f": ("par", ("fulljoin",)),
    "strip": ("strip", ()),
    "strip-pt": ("strip", ("prune", "trim")),
    "strip-ptb": ("strip", ("prune", "trim", "bbsplit")),
    "strip-pts": ("strip", ("prune", "trim", "parsplit")),
    "grdy": ("grdy", ()),
    "grdy-pt": ("grdy", ("prune", "trim")),
    "exact": ("exact", ()),
}

BENCH_ALPHAS = (1, 10, 50, 100, 500, 1000)

CSV_HEADER = ("instance,polygon_id,n_vertices,n_holes,n_base_rects,algorithm,alpha,beta,"
              "num_rects,total_area,cost,time_ms,status")

STATUS_OK = "ok"
STATUS_TIMEOUT = "timeout"
STATUS_CAP = "cap"


class Instance(NamedTuple):
    name: str
    polygon_id: int
    polygon: Polygon


@dataclass(frozen=True)
class RunRecord:
    instance: str
    polygon_id: int
    n_vertices: int
    n_holes: int
    n_base_rects: int
    algorithm: str
    alpha: Fraction
    beta: Fraction
    num_rects: Optional[int]
    total_area: Optional[int]
    cost: Optional[Fraction]
    time_ms: Optional[float]
    status: str

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


def load_instances(path: str | Path) -> list[Instance]:
    """Polygons from a WKT file, or from every ``*.wkt`` file in a directory."""
    path = Path(path)
    files = sorted(path.glob("*.wkt")) if path.is_dir() else [path]
    out = []
    for f in files:
        for k, p in enumerate(parse_wkt(f.read_text())):
            out.append(Instance(f.stem, k, p))
    return out


def preprocess_trivial(polys: Sequence[Polygon]) -> tuple[list[tuple[Polygon, Cover]], list[Polygon]]:
    """Split off hole-free rectangles, which their own bounding box covers optimally."""
    trivial, rest = [], []
    for p in polys:
        if p.is_rectangle():
            trivial.append((p, Cover.of([p.bbox()])))
        else:
            rest.append(p)
    return trivial, rest


def parse_label(label: str, post: Sequence[str] = ()) -> tuple[str, tuple[str, ...]]:
    if label not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {label!r}; expected one of {', '.join(ALGORITHMS)}")
    bad = [s for s in post if s not in STAGES]
    if bad:
        raise ValueError(f"unknown postprocessing stage(s): {', '.join(bad)}")
    base, stages = ALGORITHMS[label]
    return base, stages + tuple(post)


def record_label(label: str, post: Sequence[str] = ()) -> str:
    return label + "".join("+" + s for s in post)


def solve(p: Polygon, label: str, params: CostParams, post: Sequence[str] = (),
          graph: Optional[BaseRectGraph] = None, max_candidates: Optional[int] = None) -> Cover:
    """The cover produced by configuration ``label`` (plus extra stages)."""
    base, stages = parse_label(label, post)
    g = graph if graph is not None else build_graph(p)
    if base == "par":
        cover = partition_cover(p, params)
    elif base == "strip":
        cover = strip_cover(p, params, g)
    elif base == "grdy":
        cover = greedy_cover(p, params, g, max_candidates if max_candidates is not None else DEFAULT_GREEDY_CAP)
    else:
        cover = solve_exact(p, params, max_candidates if max_candidates is not None else DEFAULT_EXACT_CAP, g)
    if stages:
        cover = run_pipeline(p, cover, params, stages, g).cover
    return cover


def _timed(p, label, params, post, graph, max_candidates):
    t0 = time.perf_counter()
    cover = solve(p, label, params, post, graph, max_candidates)
    return cover, (time.perf_counter() - t0) * 1000.0


def _child(conn, args):
    try:
        conn.send(("ok", _timed(*args)))
    except CandidateCapExceeded:
        conn.send((STATUS_CAP, None))
    except BaseException as exc:  # reported to the parent
        conn.send(("error", repr(exc)))
    finally:
        conn.close()


def _timed_with_limit(args, timeout_ms: float):
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
    recv, send = ctx.Pipe(duplex=False)
    proc = ctx.Process(target=_child, args=(send, args), daemon=True)
    proc.start()
    send.close()
    try:
        if not recv.poll(timeout_ms / 1000.0):
            return STATUS_TIMEOUT, None
        status, payload = recv.recv()
    finally:
        if proc.is_alive():
            proc.terminate()
        proc.join()
    if status == "error":
        raise RuntimeError(f"solver failed: {payload}")
    return status, payload


def run_one(inst: Instance, label: str, params: CostParams, repeats: int = 1, post: Sequence[str] = (),
            timeout_ms: Optional[float] = None, max_candidates: Optional[int] = None,
            graph: Optional[BaseRectGraph] = None) -> tuple[RunRecord, Optional[Cover]]:
    """One configuration on one polygon; time is the median over ``repeats`` runs."""
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    parse_label(label, post)
    p = inst.polygon
    g = graph if graph is not None else build_graph(p)
    head = dict(instance=inst.name, polygon_id=inst.polygon_id, n_vertices=len(p.vertices), n_holes=len(p.holes),
                n_base_rects=len(g), algorithm=record_label(label, post),
                alpha=params.alpha, beta=params.beta)
    times, cover, status = [], None, STATUS_OK
    args = (p, label, params, tuple(post), g, max_candidates)
    for _ in range(repeats):
        if timeout_ms is None:
            try:
                cover, ms = _timed(*args)
            except CandidateCapExceeded:
                status = STATUS_CAP
                break
            except SolverLimitExceeded:
                status = STATUS_TIMEOUT
                break
        else:
            status, payload = _timed_with_limit(args, timeout_ms)
            if status != STATUS_OK:
                break
            cover, ms = payload
        times.append(ms)
    if status != STATUS_OK:
        return RunRecord(**head, num_rects=None, total_area=None, cost=None, time_ms=None, status=status), None
    if not validate_cover(p, cover, g):
        raise AssertionError(f"{label} produced an invalid cover for {inst.name}#{inst.polygon_id}")
    rec = RunRecord(**head, num_rects=len(cover), total_area=cover.total_area, cost=cover.total_cost,
                    time_ms=statistics.median(times), status=STATUS_OK)
    return rec, cover


def run_config(instances: Sequence[Instance | Polygon], label: str, params: CostParams, repeats: int = 1,
               post: Sequence[str] = (), timeout_ms: Optional[float] = None,
               max_candidates: Optional[int] = None) -> list[RunRecord]:
    """One record per polygon, failures included as explicit rows.

    Bare polygons are named ``polygon`` with their list position as id.
    """
    instances = [x if isinstance(x, Instance) else Instance("polygon", k, x) for k, x in enumerate(instances)]
    return [run_one(inst, label, params, repeats, post, timeout_ms, max_candidates)[0] for inst in instances]


def sort_records(records: Iterable[RunRecord]) -> list[RunRecord]:
    return sorted(records, key=lambda r: (r.instance, r.polygon_id, r.algorithm, r.alpha, r.beta))


# --------------------------------------------------------------------------
# CSV


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def records_to_csv(records: Iterable[RunRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER.split(","))
    for r in records:
        w.writerow([_fmt(getattr(r, f.name)) for f in fields(RunRecord)])
    return buf.getvalue()


_PARSERS = {
    "polygon_id": int, "n_vertices": int, "n_holes": int, "n_base_rects": int,
    "alpha": Fraction, "beta": Fraction, "num_rects": int, "total_area": int,
    "cost": Fraction, "time_ms": float,
}


def records_from_csv(text: str) -> list[RunRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or ",".join(rows[0]) != CSV_HEADER:
        raise ValueError("missing or unexpected CSV header")
    names = rows[0]
    out = []
    for row in rows[1:]:
        vals = {}
        for name, raw in zip(names, row):
            parse = _PARSERS.get(name)
            vals[name] = None if (parse and raw == "") else (parse(raw) if parse else raw)
        out.append(RunRecord(**vals))
    return out


# --------------------------------------------------------------------------
# relative summary


@dataclass(frozen=True)
class RelativeRow:
    instance: str
    polygon_id: int
    algorithm: str
    alpha: Fraction
    beta: Fraction
    rel_cost: float
    rel_time: float


@dataclass(frozen=True)
class RelativeSummary:
    rows: tuple[RelativeRow, ...]
    # (algorithm, alpha, beta) -> (mean relative cost, mean relative time, groups)
    means: dict[tuple[str, Fraction, Fraction], tuple[float, float, int]]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["algorithm", "alpha", "beta", "mean_rel_cost", "mean_rel_time", "groups"])
        for (alg, a, b), (rc, rt, n) in sorted(self.means.items(), key=lambda kv: (kv[0][1], kv[0][2], kv[0][0])):
            w.writerow([alg, a, b, repr(rc), repr(rt), n])
        return buf.getvalue()


# timings below this are treated as this, so ratios stay finite
_MIN_TIME_MS = 1e-3


def summarize(records: Iterable[RunRecord]) -> RelativeSummary:
    """Per (polygon, alpha, beta) group, each value divided by the group's best."""
    groups: dict[tuple, list[RunRecord]] = {}
    for r in records:
        if r.ok:
            groups.setdefault((r.instance, r.polygon_id, r.alpha, r.beta), []).append(r)
    if not groups:
        raise ValueError("no successful records to summarize")
    rows = []
    acc: dict[tuple, list[tuple[float, float]]] = {}
    for (inst, pid, a, b), recs in sorted(groups.items()):
        best_cost = min(r.cost for r in recs)
        best_time = max(min(r.time_ms for r in recs), _MIN_TIME_MS)
        for r in sorted(recs, key=lambda r: r.algorithm):
            rc = float(r.cost / best_cost)
            rt = max(r.time_ms, _MIN_TIME_MS) / best_time
            rows.append(RelativeRow(inst, pid, r.algorithm, a, b, rc, rt))
            acc.setdefault((r.algorithm, a, b), []).append((rc, rt))
    means = {k: (statistics.fmean(v[0] for v in vs), statistics.fmean(v[1] for v in vs), len(vs))
             for k, vs in acc.items()}
    return RelativeSummary(tuple(rows), means)
