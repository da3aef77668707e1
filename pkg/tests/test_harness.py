import json

import numpy as np
import pytest

from extrarec import harness
from extrarec.harness import ConfigError, ExperimentConfig


@pytest.fixture
def synth(tmp_path):
    """Small MovieLens-format file with a popularity skew."""
    rng = np.random.default_rng(7)
    pop = rng.pareto(1.5, 60) + 0.1
    lines = set()
    for u in range(80):
        n = int(rng.integers(3, 15))
        for i in rng.choice(60, size=n, replace=False, p=pop / pop.sum()):
            lines.add((u + 1, int(i) + 1))
    path = tmp_path / "synth.data"
    path.write_text("".join(f"{u}\t{i}\t{1 + (u * i) % 5}\t{880000000 + u}\n" for u, i in sorted(lines)))
    return path


def config(path, **kw):
    base = dict(dataset_path=str(path), seeds=[0], methods=["MD", "MDEL"], lambda_grid=[0.5, 0.9],
                k_grid=[5, 10])
    base.update(kw)
    return ExperimentConfig(**base)


def test_empty_lambda_grid_rejected(synth):
    with pytest.raises(ConfigError, match="lambda grid"):
        config(synth, lambda_grid=[]).validate()
    config(synth, methods=["MD", "HC"], lambda_grid=[]).validate()


@pytest.mark.parametrize("kw", [
    {"train_fraction": 1.0}, {"seeds": []}, {"methods": []}, {"k_grid": []},
    {"k_grid": [0]}, {"lambda_grid": [1.2]}, {"methods": ["MDBogus"]},
])
def test_config_validation(synth, kw):
    with pytest.raises(ConfigError):
        config(synth, **kw).validate()


def test_cells_layout(synth):
    names = [(c.name, c.lam) for c in config(synth, lambda_grid=[0.9, 0.5]).cells()]
    assert names == [("MD", 1.0), ("MDEL", 0.5), ("MDEL", 0.9)]


def test_run_experiment_shape(synth):
    results = harness.run_experiment(config(synth))
    assert len(results) == 1 * 3 * 2
    md = [r for r in results if r.method == "MD"]
    assert all(r.lam is None for r in md)
    for r in results:
        rep = r.report
        assert 0 <= rep.precisionAtK <= 1 and 0 <= rep.f1AtK <= 1
        assert rep.coverageAtK <= min(60, rep.K * rep.evaluatedUsers)


def test_deterministic_csv(synth, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    harness.write_long_csv(harness.run_experiment(config(synth, seeds=[0, 1])), a)
    harness.write_long_csv(harness.run_experiment(config(synth, seeds=[0, 1], n_jobs=2)), b)
    assert a.read_bytes() == b.read_bytes()
    head = a.read_text().splitlines()[0]
    assert head == "dataset,seed,method,lambda,K,metric,value"


def test_cell_independence(synth):
    full = harness.run_experiment(config(synth, methods=["MD", "MDEL", "MDSim2"]))
    alone = harness.run_experiment(config(synth, methods=["MDSim2"], lambda_grid=[0.9]))
    pick = {(r.method, r.lam, r.report.K): r.report for r in full}
    for r in alone:
        assert pick[(r.method, r.lam, r.report.K)] == r.report


def test_two_seeds_differ(synth):
    results = harness.run_experiment(config(synth, methods=["MD"], seeds=[0, 1], k_grid=[10]))
    by_seed = {r.seed: r.report for r in results}
    assert by_seed[0] != by_seed[1]


def test_expertise_disk_cache(synth, tmp_path):
    cache = tmp_path / "cache"
    a = harness.run_experiment(config(synth, cache_dir=str(cache)))
    assert list(cache.glob("*.npy"))
    b = harness.run_experiment(config(synth, cache_dir=str(cache)))
    assert [r.report for r in a] == [r.report for r in b]


def test_sweep_rows_and_best(synth, tmp_path):
    cfg = config(synth, seeds=[0, 1], k_grid=[10])
    sweep = harness.sweep_lambda(cfg)
    md = [r for r in sweep["rows"] if r["method"] == "MD"]
    assert len(md) == 1 and md[0]["lambda"] is None and md[0]["seeds"] == 2
    el = [r["lambda"] for r in sweep["rows"] if r["method"] == "MDEL"]
    assert el == [0.5, 0.9]
    best = {(b["method"], b["metric"]): b for b in sweep["best"]}
    assert best[("MDEL", "coverage")]["lambda"] in (0.5, 0.9)
    harness.write_sweep_csv(sweep, tmp_path / "s.csv")
    assert len((tmp_path / "s.csv").read_text().splitlines()) == 1 + 3
    table = harness.pivot_table(sweep["rows"], ["MDEL"], [0.5, 0.9], 10)
    assert "MD: (" in table and "0.9" in table


def test_reference_grid_layout():
    cfg = ExperimentConfig("x", methods=list(harness.REFERENCE_METHODS),
                           lambda_grid=list(harness.REFERENCE_LAMBDAS))
    assert len(cfg.cells()) == 25
    assert len(harness.REFERENCE_MOVIELENS) == 26
    assert harness.REFERENCE_MOVIELENS[("MDSim2", 0.7)] == (0.287, 426)
    assert harness.REFERENCE_MOVIELENS[("MDActivity", 0.9)] == (0.202, 550)
    assert harness.REFERENCE_MOVIELENS[("MD", None)] == (0.253, 162)


def test_check_cell():
    assert harness.check_cell((0.253, 162), 0.27, 190)["pass"]
    assert not harness.check_cell((0.253, 162), 0.28, 162)["pass"]
    assert not harness.check_cell((0.253, 162), 0.253, 129)["pass"]


def test_reports_json(synth, tmp_path):
    results = harness.run_experiment(config(synth, methods=["MD"]))
    harness.write_reports_json(results, tmp_path / "r.json")
    rows = json.loads((tmp_path / "r.json").read_text())
    assert rows[0]["method"] == "MD" and "f1AtK" in rows[0]


def test_unreadable_dataset(tmp_path):
    from extrarec.dataset import ParseError

    with pytest.raises(ParseError, match="cannot read"):
        harness.run_experiment(config(tmp_path / "missing.data"))
