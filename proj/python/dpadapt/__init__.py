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
"""Differentially private adaptive FDR control.

Thin wrappers over the C++ core in ``dpadapt._core``.
"""

import json

from dpadapt._core import (  # noqa: F401
    ContractViolation,
    DataError,
    InvariantViolation,
    NoSolutionError,
    __version__,
    bh,
    compose,
    delta_to_gdp,
    gdp_to_delta,
)
from dpadapt import _core


def run_method(method, p, x=None, *, alpha=0.1, alphas=None, mu=None,
               epsilon=None, delta=None, delta_g=1e-4, m=200,
               kernel="gaussian", noise="gaussian", seed=0,
               zero_noise_for_testing=False):
    """Runs one method and returns a list of outcome dicts, one per alpha.

    ``x`` is an optional list of covariate rows. Several ``alphas`` share a
    single private release.
    """
    grid = list(alphas) if alphas is not None else [alpha]
    rows = [list(r) for r in x] if x is not None else []
    text = _core._run_method(method, list(p), rows, grid, mu, epsilon, delta,
                             delta_g, m, kernel, noise, seed,
                             zero_noise_for_testing)
    return json.loads(text)


def simulate(scenario="no-side-info", *, pattern=1, beta=3.5,
             nulls="uniform", trials=10, seed=0, workers=1):
    """Runs a desk-scale campaign and returns its manifest as a dict."""
    return json.loads(_core._simulate(scenario, pattern, beta, nulls, trials,
                                      seed, workers))
