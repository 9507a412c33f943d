import json
import math

import numpy as np
import pytest

from torusburn.burn import bound_constants
from torusburn.constants import reference_T
from torusburn.experiments import (
    ExperimentPlan,
    bounds_scaling_experiment,
    cc_normalizer,
    empirical_profile,
    functional_profile_experiment,
    picard_profile_experiment,
    tau_scaling_experiment,
)
from torusburn.torus import ResourceGuardError, TorusSpec


def test_plan_validation():
    with pytest.raises(ValueError):
        ExperimentPlan(1, [100], trials=0)
    with pytest.raises(ValueError):
        ExperimentPlan(1, [100, 100])
    with pytest.raises(ValueError):
        ExperimentPlan(1, [100], process="coupled")
    with pytest.raises(ResourceGuardError):
        ExperimentPlan(3, [10 ** 4]).specs()


def test_cc_normalizer_d1():
    spec = TorusSpec(1, 10 ** 4)
    assert cc_normalizer(spec) == pytest.approx(math.sqrt(1e4 * math.log(1e4) / 2))


def test_tau_report_and_determinism(tmp_path):
    plan = ExperimentPlan(1, [400, 1600], trials=12, seed_base=5)
    a, b = tau_scaling_experiment(plan), tau_scaling_experiment(plan)
    assert a.to_dict() == b.to_dict()
    assert len(a.rows) == 2
    for row in a.rows:
        assert row.normalizer == pytest.approx(reference_T(1) * math.sqrt(row.n))
        assert min(a.samples[row.n]) / row.normalizer >= row.kappa_ratio
        assert row.q05 <= row.q50 <= row.q95
    a.write_json(tmp_path / "r.json")
    a.write_csv(tmp_path / "r.csv")
    assert json.loads((tmp_path / "r.json").read_text())["rows"][0]["n"] == 400
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "n,statistic,value" and len(lines) > 10


def test_parallel_matches_serial():
    serial = tau_scaling_experiment(ExperimentPlan(1, [300], trials=6, process="cc"))
    par = tau_scaling_experiment(ExperimentPlan(1, [300], trials=6, process="cc", jobs=2))
    assert serial.samples == par.samples


def test_cc_samples_dominate_kappa():
    rep = tau_scaling_experiment(ExperimentPlan(2, [30], trials=20, process="cc"))
    assert min(rep.samples[30]) / rep.rows[0].normalizer >= rep.rows[0].kappa_ratio


def test_empirical_profile_lookup():
    spec = TorusSpec(1, 100)
    u = np.array([100, 99, 90, 50, 0])
    t = np.array([0.0, 0.1, 0.25, 0.3, 1.0])
    assert empirical_profile(u, spec, t).tolist() == [1.0, 0.99, 0.9, 0.5, 0.0]


def test_functional_profile_small():
    rep = functional_profile_experiment(ExperimentPlan(1, [500, 5000], trials=10))
    assert rep.grid_points == 256 and rep.t_max == pytest.approx(0.95 * math.pi / 2)
    assert rep.rows[1].mean_sup_deviation < rep.rows[0].mean_sup_deviation < 0.2
    with pytest.raises(ValueError):
        functional_profile_experiment(ExperimentPlan(1, [500], trials=2, process="cc"))


def test_picard_profile_small():
    rep = picard_profile_experiment(ExperimentPlan(1, [3000], trials=5, process="coupled", p_max=3))
    devs = rep.rows[0].mean_sup_deviation
    assert devs[0] == 0.0 and len(devs) == 4 and max(devs) < 0.15


def test_bounds_table():
    rows = bounds_scaling_experiment(1, [100, 400, 2500])
    assert [r.kappa for r in rows] == [10, 20, 50]
    assert all(r.kappa_ratio == 1 for r in rows)
    assert all(r.greedy_ratio <= 1.05 * r.gamma for r in rows)
    rows = bounds_scaling_experiment(2, [10 ** 4], greedy_max_vertices=10)
    assert rows[0].greedy_bound is None
    assert rows[0].kappa_ratio == pytest.approx(bound_constants(2)[0], rel=0.02)
