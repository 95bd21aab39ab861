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
"""Smoke tests for the dpadapt Python bindings."""

import math
import random

import pytest

import dpadapt


def signal(n=500, seed=1):
    rng = random.Random(seed)
    p, x = [], []
    for _ in range(n):
        xi = rng.uniform(-1, 1)
        alt = xi > 0.4 and rng.random() < 0.8
        p.append(rng.random() ** 8 if alt else rng.random())
        x.append([xi])
    return p, x


def test_privacy_functions():
    assert dpadapt.compose([3.0, 4.0]) == pytest.approx(5.0)
    delta = dpadapt.gdp_to_delta(0.24, 0.5)
    assert 0 < delta < 1
    assert dpadapt.delta_to_gdp(0.5, delta) == pytest.approx(0.24, abs=1e-8)
    with pytest.raises(ValueError):
        dpadapt.compose([])


def test_bh():
    assert dpadapt.bh([0.01, 0.02, 0.9], 0.1) == [0, 1]
    assert dpadapt.bh([1.0] * 5, 0.1) == []


def test_run_method_private_and_plain():
    p, x = signal()
    out = dpadapt.run_method("dp-adapt", p, x, mu=1.0, m=100, seed=3)
    assert len(out) == 1 and out[0]["is_private"]
    again = dpadapt.run_method("dp-adapt", p, x, mu=1.0, m=100, seed=3)
    assert out == again
    plain = dpadapt.run_method("adapt", p, x)
    assert not plain[0]["is_private"]
    assert len(plain[0]["rejected"]) > 0


def test_alpha_grid_and_errors():
    p, x = signal()
    runs = dpadapt.run_method("dp-bonf", p, mu=2.0, alphas=[0.05, 0.1, 0.2],
                              seed=4)
    sets = [set(r["rejected"]) for r in runs]
    assert sets[0] <= sets[1] <= sets[2]
    with pytest.raises(ValueError):
        dpadapt.run_method("dp-adapt", [1.5] + p[1:], mu=1.0, m=10)
    with pytest.raises(ValueError):
        dpadapt.run_method("nope", p)


def test_simulate_is_deterministic():
    a = dpadapt.simulate("grid", pattern=2, trials=2, seed=11)
    b = dpadapt.simulate("grid", pattern=2, trials=2, seed=11)
    assert a == b
    methods = {s["method"] for s in a["summaries"]}
    assert methods == {"dp-adapt", "adapt", "dp-bh"}
    for s in a["summaries"]:
        assert 0 <= s["fdr"] <= 1 and not math.isnan(s["power"])
