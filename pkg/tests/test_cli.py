import json
import math

import numpy as np
import pytest

from torusburn.cli import main
from torusburn.render import HUE_END, colorize, hue_of, read_ppm, write_ppm
from torusburn.traceio import read_trace, write_trace
from torusburn.processes import run_rejection_sampling
from torusburn.torus import TorusSpec


def test_simulate_outputs_are_deterministic(tmp_path, capsys):
    args = ["simulate", "--d", "2", "--n", "60", "--seed", "3"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert len(names) == 2
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert "normalized tau" in capsys.readouterr().out


def test_simulate_d2_600(tmp_path):
    assert main(["simulate", "--d", "2", "--n", "600", "--seed", "1", "--out", str(tmp_path)]) == 0
    trace = read_trace(next(tmp_path.glob("*.json")))
    assert 100 <= trace.tau < 1000


def test_guard_exit_code(tmp_path, capsys):
    assert main(["simulate", "--d", "2", "--n", "100000", "--out", str(tmp_path)]) == 3
    assert "resource guard" in capsys.readouterr().err


def test_trace_roundtrip(tmp_path):
    tr = run_rejection_sampling(TorusSpec(2, 30), 4)
    write_trace(tr, tmp_path / "t.json")
    back = read_trace(tmp_path / "t.json")
    assert back.tau == tr.tau and np.array_equal(back.burn_time, tr.burn_time)
    assert np.array_equal(back.unburned_per_step, tr.unburned_per_step)
    assert np.array_equal(back.ignitions, tr.ignitions)


def test_render_full_and_truncated(tmp_path):
    out = tmp_path / "o"
    assert main(["simulate", "--d", "2", "--n", "120", "--seed", "2", "--out", str(out)]) == 0
    trace_path = next(out.glob("*.json"))
    trace = read_trace(trace_path)
    assert main(["render", str(trace_path), "--out", str(tmp_path / "full.ppm")]) == 0
    img = read_ppm(tmp_path / "full.ppm")
    assert img.shape == (120, 120, 3) and not np.any(img.sum(axis=2) == 0)
    assert main(["render", str(trace_path), "--out", str(tmp_path / "k.ppm"), "--at-step", "5"]) == 0
    black = int(np.count_nonzero(read_ppm(tmp_path / "k.ppm").sum(axis=2) == 0))
    assert black == trace.unburned_per_step[5] > 0


def test_render_truncated_simulation(tmp_path):
    out = tmp_path / "o"
    assert main(["simulate", "--d", "2", "--n", "80", "--max-steps", "7", "--out", str(out)]) == 0
    trace_path = next(out.glob("*.json"))
    assert main(["render", str(trace_path), "--out", str(tmp_path / "a.ppm")]) == 0
    black = int(np.count_nonzero(read_ppm(tmp_path / "a.ppm").sum(axis=2) == 0))
    assert black == read_trace(trace_path).unburned_per_step[-1] > 0


def test_render_rejects_non_2d(tmp_path):
    out = tmp_path / "o"
    assert main(["simulate", "--d", "1", "--n", "50", "--out", str(out)]) == 0
    assert main(["render", str(next(out.glob("*.json"))), "--out", str(tmp_path / "x.ppm")]) == 2


def test_hue_ramp_monotone():
    h = hue_of(np.arange(11), 10)
    assert h[0] == 0 and h[-1] == HUE_END and np.all(np.diff(h) > 0)
    img = colorize(np.array([0, 5, 10, -1]), 2)
    assert img[0, 0].tolist() == [255, 0, 0] and img[1, 1].tolist() == [0, 0, 0]


def test_ppm_roundtrip_with_whitespace_bytes(tmp_path):
    img = np.full((3, 4, 3), 10, dtype=np.uint8)
    img[0, 0] = [32, 9, 13]
    write_ppm(tmp_path / "w.ppm", img)
    assert (tmp_path / "w.ppm").read_bytes().startswith(b"P6\n4 3\n255\n")
    assert np.array_equal(read_ppm(tmp_path / "w.ppm"), img)


def test_blasius_outputs(tmp_path):
    assert main(["blasius", "--d", "1", "--out", str(tmp_path)]) == 0
    d, T = (tmp_path / "blasius_d1_T.txt").read_text().splitlines()[1].split()[:2]
    assert abs(float(T) - math.pi / 2) <= 1e-6
    rows = dict(line.split(",") for line in (tmp_path / "blasius_d1_trajectory.csv").read_text().splitlines()[1:])
    assert abs(float(rows["1.00"]) - 1 / math.cos(1.0) ** 2) <= 1e-6


def test_blasius_bad_d(tmp_path):
    assert main(["blasius", "--d", "0", "--out", str(tmp_path)]) == 2


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--d", "2"])
    assert exc.value.code == 2


def test_partition_and_regime(tmp_path):
    assert main(["partition", "--d", "2", "--n", "1024", "--out", str(tmp_path)]) == 0
    doc = json.loads(next(tmp_path.glob("*.json")).read_text())
    assert doc["ok"] and doc["violations"] == 0
    assert main(["partition", "--d", "3", "--n", "8", "--out", str(tmp_path)]) == 2


def test_experiment_subcommands(tmp_path):
    base = ["--d", "1", "--n", "200", "400", "--trials", "3", "--jobs", "1", "--out", str(tmp_path)]
    assert main(["experiment", "tau"] + base) == 0
    assert main(["experiment", "profile"] + base) == 0
    assert main(["experiment", "picard", "--p-max", "2"] + base) == 0
    assert main(["experiment", "bounds", "--d", "2", "--n", "50", "--out", str(tmp_path)]) == 0
    assert len(list(tmp_path.iterdir())) == 5


def test_coupled_simulation_records_levels(tmp_path):
    assert main(["simulate", "--d", "1", "--n", "300", "--process", "coupled", "--p-max", "3",
                 "--no-burn-time", "--out", str(tmp_path)]) == 0
    doc = json.loads(next(tmp_path.glob("*.json")).read_text())
    assert doc["meta"]["inclusion_violations"] == 0 and set(doc["meta"]["levels"]) == {"0", "1", "2", "3"}
    assert doc["burn_time_file"] is None
