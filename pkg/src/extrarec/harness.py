"""End-to-end experiments: ingest, split, expertise, kernel sweep, metrics."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import load_interactions, split
from .estimator import DiffusionRecommender
from .expertise import ExpertiseVector, compute_expertise
from .graph import build_graph
from .kernels import KernelSpec, parse_method
from .metrics import EvalReport, evaluate

log = logging.getLogger(__name__)

METRICS = ("precision", "recall", "f1", "coverage", "intraD", "HD", "HD_stderr")
_REPORT_FIELDS = {
    "precision": "precisionAtK",
    "recall": "recallAtK",
    "f1": "f1AtK",
    "coverage": "coverageAtK",
    "intraD": "intraDAtK",
    "HD": "hammingAtK",
    "HD_stderr": "hammingStdErr",
}

# F1-Score@20 and Diversity-in-top-20 on MovieLens with 80% training links.
REFERENCE_MOVIELENS = {
    ("MD", None): (0.253, 162),
    ("MDEL", 0.5): (0.267, 214), ("MDEL", 0.6): (0.273, 260), ("MDEL", 0.7): (0.280, 334),
    ("MDEL", 0.8): (0.277, 464), ("MDEL", 0.9): (0.231, 716),
    ("MDActivity", 0.5): (0.260, 183), ("MDActivity", 0.6): (0.266, 215),
    ("MDActivity", 0.7): (0.270, 264), ("MDActivity", 0.8): (0.247, 357),
    ("MDActivity", 0.9): (0.202, 550),
    ("MDGini", 0.5): (0.263, 195), ("MDGini", 0.6): (0.269, 230), ("MDGini", 0.7): (0.274, 292),
    ("MDGini", 0.8): (0.272, 399), ("MDGini", 0.9): (0.227, 595),
    ("MDSim", 0.5): (0.264, 196), ("MDSim", 0.6): (0.269, 235), ("MDSim", 0.7): (0.275, 295),
    ("MDSim", 0.8): (0.271, 414), ("MDSim", 0.9): (0.224, 619),
    ("MDSim2", 0.5): (0.279, 286), ("MDSim2", 0.6): (0.286, 345), ("MDSim2", 0.7): (0.287, 426),
    ("MDSim2", 0.8): (0.281, 650), ("MDSim2", 0.9): (0.227, 911),
}
REFERENCE_METHODS = ("MDEL", "MDActivity", "MDGini", "MDSim", "MDSim2")
REFERENCE_LAMBDAS = (0.5, 0.6, 0.7, 0.8, 0.9)
# Cells whose failure makes `reproduce` exit non-zero.
REFERENCE_GATE = (("MD", None), ("MDEL", 0.7), ("MDSim2", 0.7), ("MDSim2", 0.9), ("MDActivity", 0.9))
F1_TOL = 0.02
COVERAGE_RTOL = 0.20


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    dataset_path: str
    train_fraction: float = 0.8
    seeds: list = field(default_factory=lambda: [0, 1, 2, 3, 4])
    methods: list = field(default_factory=lambda: ["MD"])
    lambda_grid: list = field(default_factory=list)
    k_grid: list = field(default_factory=lambda: [20])
    output_dir: str | None = None
    mode: str = "userDegree"
    gini: str = "standard"
    hd: str = "exact"
    fmt: str = "auto"
    min_rating: int | None = None
    cache_dir: str | None = None
    n_jobs: int = 1

    def validate(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train fraction must lie in (0, 1), got {self.train_fraction}")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if not self.methods:
            raise ConfigError("at least one method is required")
        if not self.k_grid or any(int(k) < 1 for k in self.k_grid):
            raise ConfigError("K grid must be non-empty and positive")
        if any(not 0.0 <= lam <= 1.0 for lam in self.lambda_grid):
            raise ConfigError("lambda grid must lie in [0, 1]")
        self.cells()
        return self

    def cells(self) -> list:
        """Kernel specs to evaluate, in output order."""
        out = []
        for name in self.methods:
            try:
                spec = parse_method(name, 1.0, self.mode)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            if not spec.uses_lambda:
                out.append(spec)
                continue
            if not self.lambda_grid:
                raise ConfigError(f"method {name} needs a non-empty lambda grid")
            for lam in sorted(self.lambda_grid):
                out.append(parse_method(name, lam, self.mode))
        return out


@dataclass
class CellResult:
    dataset: str
    seed: int
    method: str
    lam: float | None
    report: EvalReport

    def row(self) -> dict:
        d = {"dataset": self.dataset, "seed": self.seed, "method": self.method,
             "lambda": self.lam}
        d.update(self.report.to_dict())
        return d


def dataset_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()[:16]


class ExpertiseCache:
    """Expertise vectors keyed by (dataset hash, seed, fraction, method).

    Kept in memory, and on disk as ``.npy`` files when ``cache_dir`` is set.
    """

    def __init__(self, cache_dir=None, digest=""):
        self.dir = Path(cache_dir) if cache_dir else None
        self.digest = digest
        self._mem = {}

    def get(self, graph, method, seed, fraction, gini="standard") -> ExpertiseVector:
        tag = method if method != "Gini" else f"Gini-{gini}"
        key = (self.digest, seed, fraction, tag)
        if key in self._mem:
            return self._mem[key]
        path = None
        if self.dir is not None:
            path = self.dir / f"expertise_{self.digest}_s{seed}_f{fraction:g}_{tag}.npy"
            if path.exists():
                vec = ExpertiseVector(method, np.load(path))
                self._mem[key] = vec
                return vec
        vec = compute_expertise(graph, method, gini)
        if path is not None:
            self.dir.mkdir(parents=True, exist_ok=True)
            np.save(path, vec.values)
        self._mem[key] = vec
        return vec


def probe_sets(ds) -> dict:
    probe = {}
    for u, i in ds.probe.tolist():
        probe.setdefault(u, set()).add(i)
    return probe


def evaluated_users(graph, probe) -> np.ndarray:
    """Users with at least one probe and one training link."""
    return np.array(sorted(u for u in probe if graph.user_degree[u] > 0), dtype=np.int64)


def run_cell(graph, spec: KernelSpec, users, probe, k_grid, expertise=None,
             hd="exact", hd_seed=0) -> list:
    est = DiffusionRecommender(method=spec.method, lam=spec.lam, expertise=spec.expertise,
                               mode=spec.mode)
    est.fit(graph, expertise_values=expertise)
    ranked = est.predict(users, max(k_grid))
    reports = []
    for k in sorted(k_grid):
        lists = {int(u): [int(i) for i in row[:k] if i >= 0] for u, row in zip(users, ranked)}
        reports.append(evaluate(lists, probe, graph, k, hd=hd, hd_seed=hd_seed))
    return reports


def run_experiment(config: ExperimentConfig) -> list:
    """One :class:`CellResult` per (seed, method, lambda, K)."""
    config.validate()
    cells = config.cells()
    logs = load_interactions(config.dataset_path, config.fmt).binarize(config.min_rating)
    name = Path(config.dataset_path).name
    cache = ExpertiseCache(config.cache_dir, dataset_digest(config.dataset_path))
    results = []
    for seed in config.seeds:
        ds = split(logs, config.train_fraction, seed)
        graph = build_graph(ds)
        probe = probe_sets(ds)
        users = evaluated_users(graph, probe)
        log.info("seed %s: %d training links, %d evaluated users", seed, graph.n_links, len(users))

        def one(spec):
            e = None
            if spec.method == "ExTrA":
                e = cache.get(graph, spec.expertise, seed, config.train_fraction, config.gini)
            return spec, run_cell(graph, spec, users, probe, config.k_grid, e, config.hd, seed)

        if config.n_jobs != 1:
            from joblib import Parallel, delayed

            # expertise first so threads never race on the cache
            for spec in cells:
                if spec.method == "ExTrA":
                    cache.get(graph, spec.expertise, seed, config.train_fraction, config.gini)
            done = Parallel(n_jobs=config.n_jobs, prefer="threads")(delayed(one)(s) for s in cells)
        else:
            done = [one(s) for s in cells]
        for spec, reports in done:
            lam = spec.lam if spec.uses_lambda else None
            for rep in reports:
                results.append(CellResult(name, int(seed), spec.name, lam, rep))
    return results


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def long_rows(results) -> list:
    rows = []
    for r in results:
        for metric in METRICS:
            value = getattr(r.report, _REPORT_FIELDS[metric])
            if value is None:
                continue
            rows.append([r.dataset, r.seed, r.method, r.lam, r.report.K, metric, value])
    return rows


def write_long_csv(results, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", "seed", "method", "lambda", "K", "metric", "value"])
        for row in long_rows(results):
            w.writerow([_fmt(x) for x in row])


def write_reports_json(results, path) -> None:
    Path(path).write_text(json.dumps([r.row() for r in results], indent=1))


def aggregate(results) -> list:
    """Mean and population std across seeds per (method, lambda, K)."""
    groups = {}
    for r in results:
        groups.setdefault((r.method, r.lam, r.report.K), []).append(r.report)
    out = []
    for (method, lam, k), reps in groups.items():
        row = {"method": method, "lambda": lam, "K": k, "seeds": len(reps)}
        for metric, attr in _REPORT_FIELDS.items():
            vals = [getattr(x, attr) for x in reps if getattr(x, attr) is not None]
            if vals:
                row[metric] = float(np.mean(vals))
                row[metric + "_std"] = float(np.std(vals))
        out.append(row)
    return out


def sweep_lambda(config: ExperimentConfig, results=None) -> dict:
    """Accuracy-diversity curve per method, ordered by lambda.

    Returns ``{"rows": [...], "best": [...]}`` where ``best`` names the
    lambda maximising each metric, per method and K.
    """
    if results is None:
        results = run_experiment(config)
    rows = aggregate(results)
    rows.sort(key=lambda r: (r["method"], -1.0 if r["lambda"] is None else r["lambda"], r["K"]))
    best = []
    by_method = {}
    for r in rows:
        by_method.setdefault((r["method"], r["K"]), []).append(r)
    for (method, k), group in by_method.items():
        for metric in ("f1", "coverage", "intraD", "HD"):
            cand = [g for g in group if metric in g]
            if cand:
                top = max(cand, key=lambda g: g[metric])
                best.append({"method": method, "K": k, "metric": metric,
                             "lambda": top["lambda"], "value": top[metric]})
    return {"rows": rows, "best": best}


def write_sweep_csv(sweep: dict, path) -> None:
    cols = ["method", "lambda", "K", "seeds"]
    for m in METRICS:
        cols += [m, m + "_std"]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for r in sweep["rows"]:
            w.writerow({c: _fmt(r.get(c)) for c in cols})


def pivot_table(rows, methods=REFERENCE_METHODS, lambdas=REFERENCE_LAMBDAS, k=20) -> str:
    """Human-readable lambda x method grid of ``F1 coverage`` means."""
    index = {(r["method"], r["lambda"]): r for r in rows if r["K"] == k}
    buf = io.StringIO()
    buf.write(f"{'lambda':>6} | " + " | ".join(f"{m:>14}" for m in methods) + "\n")
    for lam in lambdas:
        cells = []
        for m in methods:
            r = index.get((m, lam))
            cells.append(f"{r['f1']:.3f} {r['coverage']:>6.0f}" if r else f"{'-':>14}")
        buf.write(f"{lam:>6} | " + " | ".join(f"{c:>14}" for c in cells) + "\n")
    md = index.get(("MD", None))
    if md:
        buf.write(f"MD: ({md['f1']:.3f}, {md['coverage']:.0f})\n")
    return buf.getvalue()


def check_cell(expected, f1_mean, cov_mean) -> dict:
    f1_exp, cov_exp = expected
    f1_ok = abs(f1_mean - f1_exp) <= F1_TOL
    cov_ok = abs(cov_mean - cov_exp) <= COVERAGE_RTOL * cov_exp
    return {"f1_ok": f1_ok, "coverage_ok": cov_ok, "pass": f1_ok and cov_ok}


def reproduce_reference(dataset_path, seeds=(0, 1, 2, 3, 4), mode="userDegree", gini="standard",
                     cache_dir=None, n_jobs=1, fmt="auto") -> list:
    """Measured vs published MovieLens reference cells with pass/fail flags."""
    config = ExperimentConfig(
        dataset_path=str(dataset_path), train_fraction=0.8, seeds=list(seeds),
        methods=["MD", *REFERENCE_METHODS], lambda_grid=list(REFERENCE_LAMBDAS), k_grid=[20],
        mode=mode, gini=gini, cache_dir=cache_dir, n_jobs=n_jobs, fmt=fmt,
    )
    rows = aggregate(run_experiment(config))
    index = {(r["method"], r["lambda"]): r for r in rows}
    out = []
    for key, expected in REFERENCE_MOVIELENS.items():
        r = index[key]
        verdict = check_cell(expected, r["f1"], r["coverage"])
        out.append({
            "method": key[0], "lambda": key[1],
            "ref_f1": expected[0], "ref_coverage": expected[1],
            "f1_mean": r["f1"], "f1_std": r["f1_std"],
            "coverage_mean": r["coverage"], "coverage_std": r["coverage_std"],
            "gate": key in REFERENCE_GATE, **verdict,
        })
    return out


def write_reproduction_csv(rows, path) -> None:
    cols = ["method", "lambda", "ref_f1", "f1_mean", "f1_std", "ref_coverage",
            "coverage_mean", "coverage_std", "f1_ok", "coverage_ok", "pass", "gate"]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({c: _fmt(r[c]) for c in cols})


def format_reproduction(rows) -> str:
    lines = [f"{'method':<11} {'lambda':>6}  {'reference':>12}  {'measured (mean +- std)':>30}  result"]
    for r in rows:
        lam = "" if r["lambda"] is None else f"{r['lambda']:.1f}"
        ref = f"{r['ref_f1']:.3f} {r['ref_coverage']:>5d}"
        meas = (f"{r['f1_mean']:.3f}+-{r['f1_std']:.3f} "
                f"{r['coverage_mean']:>6.1f}+-{r['coverage_std']:<5.1f}")
        flag = "PASS" if r["pass"] else "FAIL"
        lines.append(f"{r['method']:<11} {lam:>6}  {ref:>12}  {meas:>30}  {flag}"
                     + ("  [gate]" if r["gate"] else ""))
    return "\n".join(lines)
