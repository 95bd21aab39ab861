#
# Copyright 2026 The dpadapt Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
"""End-to-end tests of the dpadapt command-line tool."""

import csv
import json
import os
import subprocess

import pytest

CLI = os.environ.get("DPADAPT_CLI", "dpadapt")


def run(*args, cwd=None):
    return subprocess.run([CLI, *map(str, args)], capture_output=True,
                          text=True, cwd=cwd)


def write_csv(path, rows, covariates=0):
    header = ["id", "p"] + [f"x{k + 1}" for k in range(covariates)]
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def read_rejections(path):
    with open(path) as f:
        lines = f.read().splitlines()
    assert lines[0].startswith("# dpadapt ")
    json.loads(lines[0].split(" ", 3)[3])
    assert lines[1] == "id,noisy_p,threshold"
    return lines[2:]


def signal_rows(n=400, seed=5):
    import random
    rng = random.Random(seed)
    rows = []
    for i in range(n):
        x = rng.uniform(-1, 1)
        p = rng.random() ** 6 if (x > 0.3 and rng.random() < 0.7) else rng.random()
        rows.append([f"g{i:04d}", repr(p), repr(x)])
    return rows


def test_privacy_matches_closed_form():
    r = run("privacy", "--mu", 0.24, "--epsilon", 0.5)
    assert r.returncode == 0, r.stderr
    out = json.loads(r.stdout)
    from math import erfc, exp, sqrt
    phi = lambda x: 0.5 * erfc(-x / sqrt(2))
    expect = phi(-0.5 / 0.24 + 0.12) - exp(0.5) * phi(-0.5 / 0.24 - 0.12)
    assert out["delta"] == pytest.approx(expect, rel=1e-12)


def test_privacy_inverse_compose_and_calibration():
    r = run("privacy", "--epsilon", 0.5, "--delta", 0.001)
    mu = json.loads(r.stdout)["mu"]
    back = json.loads(run("privacy", "--mu", mu, "--epsilon", 0.5).stdout)
    assert back["delta"] == pytest.approx(0.001, rel=1e-8)
    assert json.loads(run("privacy", "--compose", "3,4").stdout)["mu"] == 5.0
    cal = json.loads(run("privacy", "--delta-g", 3e-5, "--m", 2500,
                         "--mu", 0.25).stdout)
    assert 0.0235 <= 2 ** 0.5 * cal["per_round_sd"] <= 0.0245
    lap = json.loads(run("privacy", "--delta-g", 1e-4, "--m", 500, "--noise",
                         "laplace", "--epsilon", 0.5, "--delta", 0.001).stdout)
    assert lap["lambda"] > 0


def test_contradictory_budget_is_usage_error(tmp_path):
    assert run("privacy", "--mu", 1, "--delta", 0.1).returncode == 1
    write_csv(tmp_path / "d.csv", [["a", "0.1"]])
    r = run("run", "--input", tmp_path / "d.csv", "--out-dir", tmp_path / "o",
            "--method", "bh", "--mu", 1, "--epsilon", 0.5, "--delta", 0.01)
    assert r.returncode == 1
    assert run("bogus").returncode == 1


def test_run_all_ones_rejects_nothing(tmp_path):
    write_csv(tmp_path / "ones.csv", [[f"h{i}", "1.0", str(i)] for i in range(50)],
              covariates=1)
    r = run("run", "--input", tmp_path / "ones.csv", "--out-dir", tmp_path / "o",
            "--method", "dp-adapt", "--mu", 0.5, "--m", 20, "--seed", 1)
    assert r.returncode == 0, r.stderr
    assert read_rejections(tmp_path / "o" / "rejections.csv") == []
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert report["runs"][0]["rejected"] == []
    assert report["seed"] == 1
    assert report["config"]["settings"]["m"] == 20


def test_run_methods_and_report_schema(tmp_path):
    write_csv(tmp_path / "d.csv", signal_rows(), covariates=1)
    for method, extra in [("dp-adapt", ["--mu", 1, "--m", 80]),
                          ("adapt", []), ("bh", []),
                          ("dp-bonf", ["--mu", 1]),
                          ("dp-bh", ["--epsilon", 0.5, "--delta", 0.001,
                                     "--m", 80])]:
        out = tmp_path / method
        r = run("run", "--input", tmp_path / "d.csv", "--out-dir", out,
                "--method", method, "--seed", 3, "--delta-g", 1e-4, *extra)
        assert r.returncode == 0, (method, r.stderr)
        report = json.loads((out / "report.json").read_text())
        assert report["tool"] == "dpadapt"
        assert report["n"] == 400
        run0 = report["runs"][0]
        assert run0["method"] == method
        rows = read_rejections(out / "rejections.csv")
        assert len(rows) == len(run0["rejected"])
        assert sorted(r.split(",")[0] for r in rows) == sorted(run0["rejected"])
    adapt = json.loads((tmp_path / "adapt" / "report.json").read_text())["runs"][0]
    assert len(adapt["rejected"]) > 0
    assert "trajectory" in adapt and "model" in adapt


def test_run_is_reproducible_and_seed_required(tmp_path):
    write_csv(tmp_path / "d.csv", signal_rows(), covariates=1)
    args = ["run", "--input", tmp_path / "d.csv", "--method", "dp-adapt",
            "--mu", 1, "--m", 80]
    assert run(*args, "--out-dir", tmp_path / "x").returncode == 1
    run(*args, "--out-dir", tmp_path / "a", "--seed", 9)
    run(*args, "--out-dir", tmp_path / "b", "--seed", 9)
    for name in ("report.json", "rejections.csv"):
        assert (tmp_path / "a" / name).read_bytes() == \
            (tmp_path / "b" / name).read_bytes()


def test_run_alpha_grid_is_nested(tmp_path):
    write_csv(tmp_path / "d.csv", signal_rows(), covariates=1)
    r = run("run", "--input", tmp_path / "d.csv", "--out-dir", tmp_path / "o",
            "--method", "dp-bonf", "--mu", 2, "--seed", 4,
            "--alpha-grid", "0.05,0.1,0.2")
    assert r.returncode == 0, r.stderr
    sets = [{row.split(",")[0] for row in
             read_rejections(tmp_path / "o" / f"rejections_alpha_{a}.csv")}
            for a in ("0.05", "0.1", "0.2")]
    assert sets[0] <= sets[1] <= sets[2]


def test_preset_and_config_file(tmp_path):
    write_csv(tmp_path / "d.csv", signal_rows(3000), covariates=1)
    r = run("run", "--input", tmp_path / "d.csv", "--out-dir", tmp_path / "o",
            "--method", "dp-adapt", "--preset", "bottomly-like", "--seed", 2)
    assert r.returncode == 0, r.stderr
    report = json.loads((tmp_path / "o" / "report.json").read_text())
    assert len(report["runs"]) == 10
    settings = report["config"]["settings"]
    assert settings["m"] == 2500 and settings["delta_g"] == 3e-5
    assert settings["budget"]["mu"] == 0.25

    (tmp_path / "c.ini").write_text(
        "[run]\nmethod = bh\nalpha = 0.2\nseed = 5\n")
    r = run("--config", tmp_path / "c.ini", "run", "--input", tmp_path / "d.csv",
            "--out-dir", tmp_path / "c", "--alpha", 0.05)
    assert r.returncode == 0, r.stderr
    report = json.loads((tmp_path / "c" / "report.json").read_text())
    assert report["config"]["method"] == "bh"
    assert report["runs"][0]["alpha"] == 0.05


def test_data_errors_exit_2(tmp_path):
    (tmp_path / "bad.csv").write_text("id,p\na,0.1\nb,1.5\n")
    r = run("run", "--input", tmp_path / "bad.csv", "--out-dir", tmp_path / "o",
            "--method", "bh")
    assert r.returncode == 2
    assert "row 2" in r.stderr
    (tmp_path / "empty.csv").write_text("")
    assert run("run", "--input", tmp_path / "empty.csv", "--out-dir",
               tmp_path / "o", "--method", "bh").returncode == 2
    (tmp_path / "nop.csv").write_text("id,x1\na,1\n")
    r = run("run", "--input", tmp_path / "nop.csv", "--out-dir", tmp_path / "o",
            "--method", "bh")
    assert r.returncode == 2 and "p" in r.stderr


def test_simulate_twice_is_identical(tmp_path):
    args = ["simulate", "--scenario", "grid", "--pattern", 1, "--trials", 5,
            "--seed", 7]
    a = run(*args, "--out-dir", tmp_path / "a")
    b = run(*args, "--out-dir", tmp_path / "b", "--workers", 2)
    assert a.returncode == 0, a.stderr
    for name in ("trials.csv", "summary.csv", "manifest.json"):
        assert (tmp_path / "a" / name).read_bytes() == \
            (tmp_path / "b" / name).read_bytes(), name
    lines = (tmp_path / "a" / "trials.csv").read_text().splitlines()
    assert lines[0].startswith("# dpadapt ")
    assert lines[1] == "scenario,method,trial,fdp,power,n_reject,wall_time_ms"
    assert len(lines) == 2 + 5 * 3
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["config"]["base_seed"] == 7


def test_simulate_requires_seed(tmp_path):
    r = run("simulate", "--scenario", "grid", "--out-dir", tmp_path / "a")
    assert r.returncode == 1
