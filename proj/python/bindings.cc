//
// Copyright 2026 The dpadapt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// pybind11 module `dpadapt._core`. Results cross the boundary as JSON text;
// the Python package decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpadapt/baselines.h"
#include "dpadapt/errors.h"
#include "dpadapt/methods.h"
#include "dpadapt/privacy.h"
#include "dpadapt/rng.h"
#include "dpadapt/simulation.h"
#include "dpadapt/version.h"

namespace py = pybind11;

namespace {

dpadapt::Dataset MakeDataset(std::vector<double> p,
                             const std::vector<std::vector<double>>& x) {
  dpadapt::Dataset data;
  data.p = std::move(p);
  if (!x.empty()) {
    dpadapt::Require(x.size() == data.p.size(),
                     "x must have one row per p-value");
    const std::size_t dim = x.front().size();
    std::vector<double> values;
    values.reserve(x.size() * dim);
    for (const auto& row : x) {
      dpadapt::Require(row.size() == dim, "x rows must have equal length");
      values.insert(values.end(), row.begin(), row.end());
    }
    data.x = dpadapt::CovariateMatrix(dim, std::move(values));
  } else {
    data.x = dpadapt::CovariateMatrix(data.p.size(), 0);
  }
  return data;
}

std::string RunMethodJson(const std::string& method, std::vector<double> p,
                          const std::vector<std::vector<double>>& x,
                          std::vector<double> alphas, std::optional<double> mu,
                          std::optional<double> epsilon,
                          std::optional<double> delta, double delta_g, int m,
                          const std::string& kernel, const std::string& noise,
                          std::uint64_t seed, bool zero_noise_for_testing) {
  dpadapt::MethodSettings s;
  s.kernel_name = kernel;
  s.delta_g = delta_g;
  s.m = m;
  s.noise = dpadapt::ParseNoiseFamily(noise);
  s.zero_noise_for_testing = zero_noise_for_testing;
  if (mu && epsilon) throw dpadapt::ContractViolation("give mu or epsilon/delta");
  if (mu) {
    s.budget = dpadapt::PrivacyBudget::Gdp(*mu);
  } else if (epsilon && delta) {
    s.budget = dpadapt::PrivacyBudget::FromEpsilonDelta(*epsilon, *delta);
    s.bh_epsilon = *epsilon;
    s.bh_delta = *delta;
  }
  if (alphas.empty()) alphas.push_back(s.alpha);
  const dpadapt::Dataset data = MakeDataset(std::move(p), x);
  const auto outcomes = dpadapt::RunMethodAlphaGrid(
      dpadapt::ParseMethod(method), data, s, alphas, dpadapt::Rng(seed));
  nlohmann::json out = nlohmann::json::array();
  for (const auto& o : outcomes) out.push_back(dpadapt::OutcomeToJson(o));
  return out.dump();
}

std::string SimulateJson(const std::string& scenario, int pattern, double beta,
                         const std::string& nulls, int trials,
                         std::uint64_t seed, int workers) {
  const dpadapt::NullDist dist = dpadapt::ParseNullDist(nulls);
  dpadapt::CampaignConfig config;
  if (scenario == "no-side-info") {
    config = dpadapt::DeskNoSideInfoCampaign(dist);
  } else if (scenario == "grid") {
    config = dpadapt::DeskGridCampaign(
        static_cast<dpadapt::GridPattern>(pattern), beta);
    config.scenario.null_dist = dist;
  } else {
    throw dpadapt::ContractViolation("scenario must be no-side-info or grid");
  }
  config.trials = trials;
  config.base_seed = seed;
  config.workers = workers;
  py::gil_scoped_release release;
  return dpadapt::CampaignManifest(dpadapt::RunCampaign(config), false).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Differentially private adaptive FDR control";
  m.attr("__version__") = dpadapt::kVersion;

  py::register_exception<dpadapt::ContractViolation>(m, "ContractViolation",
                                                     PyExc_ValueError);
  py::register_exception<dpadapt::DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<dpadapt::NoSolutionError>(m, "NoSolutionError",
                                                   PyExc_ValueError);
  py::register_exception<dpadapt::InvariantViolation>(m, "InvariantViolation",
                                                      PyExc_RuntimeError);

  m.def("gdp_to_delta", &dpadapt::GdpToDelta, py::arg("mu"), py::arg("epsilon"));
  m.def("delta_to_gdp", &dpadapt::DeltaToGdp, py::arg("epsilon"),
        py::arg("delta"));
  m.def(
      "compose",
      [](const std::vector<double>& mus) {
        std::vector<dpadapt::PrivacyBudget> parts;
        for (double mu : mus) parts.push_back(dpadapt::PrivacyBudget::Gdp(mu));
        return dpadapt::Compose(parts).mu();
      },
      py::arg("mus"));
  m.def(
      "bh",
      [](const std::vector<double>& p, double alpha) {
        return dpadapt::Bh(p, alpha);
      },
      py::arg("p"), py::arg("alpha"));
  m.def("_run_method", &RunMethodJson, py::arg("method"), py::arg("p"),
        py::arg("x"), py::arg("alphas"), py::arg("mu"), py::arg("epsilon"),
        py::arg("delta"), py::arg("delta_g"), py::arg("m"), py::arg("kernel"),
        py::arg("noise"), py::arg("seed"), py::arg("zero_noise_for_testing"));
  m.def("_simulate", &SimulateJson, py::arg("scenario"), py::arg("pattern"),
        py::arg("beta"), py::arg("nulls"), py::arg("trials"), py::arg("seed"),
        py::arg("workers"));
}
