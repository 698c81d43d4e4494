"""Command-line interface: ``cover solve`` and ``cover bench``."""

from __future__ import annotations

import argparse
import csv
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .bench import (
    ALGORITHMS,
    BENCH_ALPHAS,
    Instance,
    load_instances,
    preprocess_trivial,
    record_label,
    records_to_csv,
    run_one,
    sort_records,
    summarize,
)
from .cost import CostParams
from .decomposition import CandidateCapExceeded, build_graph, enumerate_powerset
from .exact import emit_lp
from .fixtures import random_corpus, staircase_band
from .geometry import GeometryError, serialize_svg
from .postprocess import STAGES


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _stages(text: str) -> list[str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    bad = [s for s in names if s not in STAGES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown stage(s) {', '.join(bad)}; choose from {', '.join(STAGES)}")
    return names


def _labels(text: str) -> list[str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    bad = [s for s in names if s not in ALGORITHMS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown algorithm(s) {', '.join(bad)}")
    return names


def _instances(source: str, seed: int) -> list[Instance]:
    """A WKT file or directory, or ``random:N`` / ``staircase:N`` generated from ``seed``."""
    kind, _, arg = source.partition(":")
    if kind == "random" and arg.isdigit():
        return [Instance("random", k, p) for k, p in enumerate(random_corpus(int(arg), seed=seed, min_base=2))]
    if kind == "staircase" and arg.isdigit():
        return [Instance(f"staircase{arg}", 0, staircase_band(int(arg), seed=seed))]
    path = Path(source)
    if not path.exists():
        raise FileNotFoundError(f"input not found: {source}")
    return load_instances(path)


def _split_trivial(instances: list[Instance], keep: bool) -> list[Instance]:
    if keep:
        return instances
    trivial, _ = preprocess_trivial([i.polygon for i in instances])
    trivial_ids = {id(p) for p, _ in trivial}
    if trivial:
        print(f"skipping {len(trivial)} rectangular polygon(s), covered by their bounding box",
              file=sys.stderr)
    return [i for i in instances if id(i.polygon) not in trivial_ids]


def _stem(inst: Instance) -> str:
    return f"{inst.name}_{inst.polygon_id}"


def _dump_decomposition(inst: Instance, graph, out: Path, cap: Optional[int]) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / f"{_stem(inst)}_base.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["xmin", "ymin", "xmax", "ymax"])
        w.writerows(graph.nodes)
    try:
        cands = enumerate_powerset(graph, None, cap)
    except CandidateCapExceeded as exc:
        print(f"{_stem(inst)}: powerset not written ({exc})", file=sys.stderr)
        return
    with open(out / f"{_stem(inst)}_powerset.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["xmin", "ymin", "xmax", "ymax"])
        w.writerows(cands.rects)


def _run(args, labels: Sequence[str], alphas: Sequence[Fraction], beta: Fraction) -> int:
    instances = _split_trivial(_instances(args.input, args.seed), args.keep_trivial)
    records = []
    for inst in instances:
        t0 = time.perf_counter()
        g = build_graph(inst.polygon)
        if args.report_decomposition:
            print(f"{_stem(inst)}: {len(g)} base rectangles in {(time.perf_counter() - t0) * 1000:.2f} ms",
                  file=sys.stderr)
        if args.dump_decomposition:
            _dump_decomposition(inst, g, Path(args.dump_decomposition), args.max_candidates)
        for alpha in alphas:
            params = CostParams(alpha, beta)
            if args.emit_lp:
                out = Path(args.emit_lp)
                out.mkdir(parents=True, exist_ok=True)
                for variant in ("weighted", "unweighted"):
                    name = f"{_stem(inst)}_a{alpha}_b{beta}_{variant}.lp".replace("/", "over")
                    (out / name).write_bytes(emit_lp(inst.polygon, params, variant, g, args.max_candidates))
            for label in labels:
                rec, cover = run_one(inst, label, params, args.repeats, args.post, args.timeout_ms,
                                     args.max_candidates, g)
                records.append(rec)
                if args.out_svg and cover is not None:
                    out = Path(args.out_svg)
                    out.mkdir(parents=True, exist_ok=True)
                    name = f"{_stem(inst)}_{record_label(label, args.post)}_a{alpha}_b{beta}.svg"
                    (out / name.replace("/", "over")).write_bytes(serialize_svg(inst.polygon, cover.rects))
    text = records_to_csv(sort_records(records))
    if args.out_csv:
        Path(args.out_csv).write_text(text)
    else:
        sys.stdout.write(text)
    if getattr(args, "summary_csv", None) and any(r.ok for r in records):
        Path(args.summary_csv).write_text(summarize(records).to_csv())
    return 0


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True,
                   help="WKT file, directory of *.wkt files, random:N or staircase:N")
    p.add_argument("--beta", type=_fraction, default=None, help="area cost (rational)")
    p.add_argument("--post", type=_stages, default=[], help="extra postprocessing stages, comma separated")
    p.add_argument("--repeats", type=int, default=1, help="runs per configuration; the median time is kept")
    p.add_argument("--timeout-ms", type=float, default=None, help="per-polygon time limit")
    p.add_argument("--out-csv", default=None, help="write records here instead of stdout")
    p.add_argument("--out-svg", default=None, help="directory for SVG renders of each cover")
    p.add_argument("--emit-lp", default=None, help="directory for LP models of each polygon")
    p.add_argument("--max-candidates", type=int, default=None, help="powerset size limit")
    p.add_argument("--seed", type=int, default=0, help="seed for generated inputs")
    p.add_argument("--keep-trivial", action="store_true", help="also run on rectangular polygons")
    p.add_argument("--report-decomposition", action="store_true",
                   help="print decomposition sizes and times to stderr")
    p.add_argument("--dump-decomposition", default=None,
                   help="directory for base-rectangle and powerset CSV files")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cover", description="Weighted rectangle covers of rectilinear polygons.")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run one configuration")
    _common(solve)
    solve.add_argument("--alg", required=True, choices=list(ALGORITHMS))
    solve.add_argument("--alpha", type=_fraction, default=Fraction(1), help="per-rectangle cost (rational)")

    bench = sub.add_parser("bench", help="sweep alpha over 1, 10, 50, 100, 500, 1000 with beta = 1")
    _common(bench)
    bench.add_argument("--algs", type=_labels, default=[a for a in ALGORITHMS if a != "exact"],
                       help="comma-separated algorithm labels")
    bench.add_argument("--summary-csv", default=None, help="write mean relative cost and time here")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.repeats < 1:
        parser.error("--repeats must be at least 1")
    try:
        if args.command == "solve":
            beta = args.beta if args.beta is not None else Fraction(0)
            CostParams(args.alpha, beta)
            return _run(args, [args.alg], [args.alpha], beta)
        beta = args.beta if args.beta is not None else Fraction(1)
        return _run(args, args.algs, [Fraction(a) for a in BENCH_ALPHAS], beta)
    except (OSError, GeometryError, ValueError) as exc:
        print(f"cover: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
