"""Command-line entry point: ``extrarec <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import harness
from .dataset import ParseError, load_interactions, read_split, split, write_split
from .expertise import canonical_method, compute_expertise
from .graph import build_graph
from .kernels import parse_method

log = logging.getLogger("extrarec")


def _add_data(p, multi_seed=False):
    p.add_argument("--dataset", help="interaction file (MovieLens u.data or edge list)")
    p.add_argument("--format", default="auto", choices=["auto", "movielens", "edges"])
    p.add_argument("--min-rating", type=int, default=None,
                   help="drop ratings below this value (default: keep all)")
    p.add_argument("--train-fraction", type=float, default=0.8)
    if multi_seed:
        p.add_argument("--seed", type=int, nargs="+", default=[0, 1, 2, 3, 4])
    else:
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--split-dir", help="reuse a split written by `extrarec split`")


def _add_kernel(p, multi=False):
    nargs = "+" if multi else None
    p.add_argument("--method", nargs=nargs, default=["MD"] if multi else "MD",
                   help="MD, HC, HHP, BHC or MD<expertise> (MDEL, MDActivity, MDGini, MDSim, MDSim2, ...)")
    p.add_argument("--lambda", dest="lam", type=float, nargs=nargs,
                   default=[] if multi else 1.0)
    p.add_argument("--k", type=int, nargs="+" if multi else None, default=[20] if multi else 20)
    p.add_argument("--mode", default="userDegree", choices=["userDegree", "literalEq3"])
    p.add_argument("--gini", default="standard", choices=["standard", "literal"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="extrarec", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a dataset and print its statistics")
    _add_data(p)
    p.add_argument("--out", help="write statistics JSON here")

    p = sub.add_parser("split", help="write a seeded train/probe split")
    _add_data(p)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("expertise", help="dump per-user expertise as userIdx,k_u,e_u")
    _add_data(p)
    p.add_argument("--method", required=True, help="Activity, EL, InvPop, Gini, Sim, Sim2, Uniform")
    p.add_argument("--gini", default="standard", choices=["standard", "literal"])
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = sub.add_parser("recommend", help="top-K lists as userIdx,rank,itemIdx,score")
    _add_data(p)
    _add_kernel(p)
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = sub.add_parser("eval", help="evaluate one method on one split")
    _add_data(p)
    _add_kernel(p)
    p.add_argument("--hd", default="exact", choices=["exact", "sampled"])
    p.add_argument("--out", help="output directory for report.json / report.csv")

    p = sub.add_parser("sweep", help="lambda sweep over methods, seeds and K")
    _add_data(p, multi_seed=True)
    _add_kernel(p, multi=True)
    p.add_argument("--hd", default="exact", choices=["exact", "sampled"])
    p.add_argument("--cache-dir")
    p.add_argument("--jobs", type=int, default=1, help="parallel cells (threads)")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("reproduce", help="MovieLens F1@20 / coverage table with pass/fail")
    _add_data(p, multi_seed=True)
    p.add_argument("--mode", default="userDegree", choices=["userDegree", "literalEq3"])
    p.add_argument("--gini", default="standard", choices=["standard", "literal"])
    p.add_argument("--cache-dir")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="output directory")
    return parser


def _split_from_args(args):
    if getattr(args, "split_dir", None):
        return read_split(args.split_dir)
    if not args.dataset:
        raise harness.ConfigError("--dataset or --split-dir is required")
    logs = load_interactions(args.dataset, args.format).binarize(args.min_rating)
    return split(logs, args.train_fraction, args.seed)


def _open_out(path):
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        return open(path, "w", newline="")
    return sys.stdout


def cmd_ingest(args):
    if not args.dataset:
        raise harness.ConfigError("--dataset is required")
    logs = load_interactions(args.dataset, args.format).binarize(args.min_rating)
    text = json.dumps(logs.stats(), indent=1)
    print(text)
    if args.out:
        Path(args.out).write_text(text)
    return 0


def cmd_split(args):
    ds = _split_from_args(args)
    write_split(ds, args.out)
    print(json.dumps(ds.header(), indent=1))
    return 0


def cmd_expertise(args):
    ds = _split_from_args(args)
    graph = build_graph(ds)
    vec = compute_expertise(graph, canonical_method(args.method), args.gini)
    fh = _open_out(args.out)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["userIdx", "k_u", "e_u"])
    for u, (k, e) in enumerate(zip(graph.user_degree, vec.values)):
        w.writerow([u, int(k), repr(float(e))])
    if fh is not sys.stdout:
        fh.close()
    return 0


def _fit(args, graph):
    from .estimator import DiffusionRecommender

    spec = parse_method(args.method, args.lam, args.mode)
    est = DiffusionRecommender(method=spec.method, lam=spec.lam, expertise=spec.expertise,
                               mode=spec.mode, gini=args.gini)
    return est.fit(graph)


def cmd_recommend(args):
    ds = _split_from_args(args)
    graph = build_graph(ds)
    est = _fit(args, graph)
    users = np.flatnonzero(graph.user_degree > 0)
    fh = _open_out(args.out)
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["userIdx", "rank", "itemIdx", "score"])
    for start in range(0, len(users), est.batch_size):
        chunk = users[start:start + est.batch_size]
        scores = est.score_users(chunk)
        ranked = est.predict(chunk, args.k)
        for row, u in enumerate(chunk):
            for rank, i in enumerate(ranked[row], start=1):
                if i >= 0:
                    w.writerow([int(u), rank, int(i), repr(float(scores[row, i]))])
    if fh is not sys.stdout:
        fh.close()
    return 0


def cmd_eval(args):
    ds = _split_from_args(args)
    graph = build_graph(ds)
    spec = parse_method(args.method, args.lam, args.mode)
    probe = harness.probe_sets(ds)
    users = harness.evaluated_users(graph, probe)
    e = compute_expertise(graph, spec.expertise, args.gini) if spec.method == "ExTrA" else None
    reports = harness.run_cell(graph, spec, users, probe, [args.k], e, args.hd, args.seed)
    name = Path(args.dataset).name if args.dataset else Path(args.split_dir).name
    lam = spec.lam if spec.uses_lambda else None
    results = [harness.CellResult(name, ds.seed, spec.name, lam, r) for r in reports]
    print(json.dumps([r.row() for r in results], indent=1))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        harness.write_reports_json(results, out / "report.json")
        harness.write_long_csv(results, out / "report.csv")
    return 0


def cmd_sweep(args):
    config = harness.ExperimentConfig(
        dataset_path=args.dataset, train_fraction=args.train_fraction, seeds=args.seed,
        methods=args.method, lambda_grid=args.lam, k_grid=args.k, output_dir=args.out,
        mode=args.mode, gini=args.gini, hd=args.hd, fmt=args.format, min_rating=args.min_rating,
        cache_dir=args.cache_dir, n_jobs=args.jobs,
    )
    if not args.dataset:
        raise harness.ConfigError("--dataset is required")
    results = harness.run_experiment(config)
    sweep = harness.sweep_lambda(config, results)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    harness.write_long_csv(results, out / "results_long.csv")
    harness.write_reports_json(results, out / "reports.json")
    harness.write_sweep_csv(sweep, out / "sweep.csv")
    (out / "best_lambda.json").write_text(json.dumps(sweep["best"], indent=1))
    methods = [m for m in dict.fromkeys(r["method"] for r in sweep["rows"]) if m != "MD"]
    lambdas = sorted({r["lambda"] for r in sweep["rows"] if r["lambda"] is not None})
    for k in sorted(set(args.k)):
        table = harness.pivot_table(sweep["rows"], methods, lambdas, k)
        (out / f"table_K{k}.txt").write_text(table)
        print(f"K={k}\n{table}")
    return 0


def cmd_reproduce(args):
    if not args.dataset:
        raise harness.ConfigError("--dataset is required")
    rows = harness.reproduce_reference(args.dataset, args.seed, args.mode, args.gini,
                                    args.cache_dir, args.jobs, args.format)
    print(harness.format_reproduction(rows))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        harness.write_reproduction_csv(rows, out / "reference_reproduction.csv")
    failed = [r for r in rows if r["gate"] and not r["pass"]]
    if failed:
        print(f"reproduction gate failed on {len(failed)} cell(s)", file=sys.stderr)
        return 1
    return 0


COMMANDS = {
    "ingest": cmd_ingest,
    "split": cmd_split,
    "expertise": cmd_expertise,
    "recommend": cmd_recommend,
    "eval": cmd_eval,
    "sweep": cmd_sweep,
    "reproduce": cmd_reproduce,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ParseError, harness.ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
