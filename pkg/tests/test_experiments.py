import csv
import io
import json
import math

import numpy as np
import pytest

from barrierlab.experiments import (
    ConfigError,
    ExperimentConfig,
    group_seed,
    load_config,
    mean_stderr,
    run_experiment,
    wilson_interval,
)


def rows(rep):
    return list(csv.DictReader(io.StringIO(rep.trials_csv())))


# -- statistics -------------------------------------------------------------

def test_wilson_interval_known_values():
    p = wilson_interval(0, 100)
    assert p.low == 0.0 and 0.03 < p.high < 0.04
    p = wilson_interval(30, 100)
    # closed-form Wilson centre and half width at z = 1.959964
    z = 1.959963984540054
    c = (0.3 + z * z / 200) / (1 + z * z / 100)
    h = z * math.sqrt(0.3 * 0.7 / 100 + z * z / 4e4) / (1 + z * z / 100)
    assert (p.low, p.high) == pytest.approx((c - h, c + h), rel=1e-9)
    assert math.isnan(wilson_interval(0, 0).estimate)


def test_wilson_coverage_on_bernoulli():
    rng = np.random.default_rng(0)
    k = rng.binomial(200, 0.3, size=4000)
    ci = {int(x): wilson_interval(int(x), 200) for x in np.unique(k)}
    cover = np.mean([ci[int(x)].low <= 0.3 <= ci[int(x)].high for x in k])
    assert 0.93 <= cover <= 0.97


def test_mean_stderr():
    m = mean_stderr([1.0, 2.0, 3.0, 4.0])
    assert m.mean == 2.5 and m.stderr == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)


# -- configuration ----------------------------------------------------------------

def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig("nope", (10,))
    with pytest.raises(ConfigError):
        ExperimentConfig("nests", (10,), f=(20.0,))
    with pytest.raises(ConfigError):
        ExperimentConfig("separation", (10,), epsilon=0.7)
    with pytest.raises(ConfigError):
        ExperimentConfig("bounds", (10,), kinds=("P9",))
    cfg = ExperimentConfig("nests", "10, 20", f="1,2")
    assert cfg.d == (10, 20) and cfg.f == (1.0, 2.0)
    assert cfg.replace(trials=7).trials == 7


def test_load_config_ini_and_json(tmp_path):
    ini = tmp_path / "a.ini"
    ini.write_text("experiment = nests\nd = 10,20\ntrials = 5\nradius = 1.5\n")
    cfg = load_config(ini, trials=9)
    assert cfg.d == (10, 20) and cfg.trials == 9 and cfg.radius == 1.5
    js = tmp_path / "b.json"
    js.write_text(json.dumps({"experiment": "bounds", "d": [100], "f": [1, 2]}))
    assert load_config(js).f == (1.0, 2.0)
    bad = tmp_path / "c.ini"
    bad.write_text("experiment = nests\nd = 10\ncolour = red\n")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_group_seed_depends_on_key():
    assert group_seed(0, 1, 2) == group_seed(0, 1, 2)
    assert len({group_seed(0, 1, 2), group_seed(0, 2, 1), group_seed(1, 1, 2)}) == 3


# -- experiments --------------------------------------------------------------------

def test_large_components_accounting():
    rep = run_experiment(ExperimentConfig("large-components", (20,), f=(1.0, 2.0), trials=60, block_size=20))
    assert len(rep.records) == 120
    for row in rep.summary["rows"]:
        assert sum(row["counts"].values()) == row["trials"] == 60
        assert 0 <= row["ci_low"] <= row["ci_high"] <= 1
    assert rep.violations == 0


def test_nests_summary_fields():
    rep = run_experiment(ExperimentConfig("nests", (10,), trials=20, block_size=10, radius=1.0))
    (row,) = rep.summary["rows"]
    assert sum(row["depth_histogram"].values()) + row["indeterminate"] == row["trials"] == 20
    assert row["mean_depth"] >= 0 and row["bound_sqrt_d_over_2"] == pytest.approx(math.sqrt(10) / 2)


def test_separation_run_and_reference_check():
    rep = run_experiment(ExperimentConfig("separation", (50,), m=2, trials=10, block_size=5))
    assert rep.violations == 0
    (row,) = rep.summary["rows"]
    assert row["reference_full_separation"] is True


def test_univariate_roots_small():
    rep = run_experiment(ExperimentConfig("univariate-roots", (4,), trials=400, block_size=100))
    (row,) = rep.summary["rows"]
    assert abs(row["mean"] - 2.0) < 4 * row["stderr"]


def test_bounds_rows_are_deterministic():
    cfg = ExperimentConfig("bounds", (100, 1000), f=(1.0, 2.0), kinds=("P0",))
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert a.trials_csv() == b.trials_csv()
    r = rows(a)
    assert len(r) == 4
    for x in r:
        assert float(x["norm_sq_exact"]) > 0


def test_supnorm_small_batch():
    rep = run_experiment(ExperimentConfig("supnorm-tail", (10,), trials=8, block_size=8))
    (row,) = rep.summary["rows"]
    assert row["median_full"] > 0 and row["median_sub"] > 0
    assert row["median_over_sqrt_log_d"] == pytest.approx(row["median_full"] / math.sqrt(math.log(10)))


def test_barrier_stability_small():
    rep = run_experiment(ExperimentConfig("barrier-stability", (60,), f=(2.0, 5.0), trials=6, block_size=3))
    assert rep.violations == 0
    assert rep.summary["all_pass"] is True


@pytest.mark.parametrize("exp,kw", [
    ("large-components", dict(d=(20,), trials=40, block_size=7)),
    ("nests", dict(d=(10,), trials=12, block_size=5, radius=1.0)),
    ("univariate-roots", dict(d=(8,), trials=50, block_size=9)),
])
def test_worker_count_does_not_change_trials(exp, kw):
    one = run_experiment(ExperimentConfig(exp, workers=1, **kw))
    two = run_experiment(ExperimentConfig(exp, workers=2, **kw))
    assert one.trials_csv() == two.trials_csv()


def test_report_write(tmp_path):
    cfg = ExperimentConfig("univariate-roots", (4,), trials=10, out=str(tmp_path / "o"), format="json")
    rep = run_experiment(cfg)
    names = sorted(p.name for p in (tmp_path / "o").iterdir())
    assert names == ["report.md", "summary.json", "trials.json"]
    doc = json.loads((tmp_path / "o" / "summary.json").read_text())
    assert doc["experiment"] == "univariate-roots" and doc["violations"] == rep.violations
    assert len(json.loads((tmp_path / "o" / "trials.json").read_text())) == 10
    assert "## Configuration" in (tmp_path / "o" / "report.md").read_text()
