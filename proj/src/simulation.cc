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

#include "dpadapt/simulation.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "dpadapt/errors.h"
#include "dpadapt/io.h"
#include "dpadapt/normal.h"
#include "dpadapt/version.h"

namespace dpadapt {
namespace {

constexpr double kGridHalfWidth = 100.0;

const char* PatternName(GridPattern pattern) {
  switch (pattern) {
    case GridPattern::kI:
      return "I";
    case GridPattern::kII:
      return "II";
    case GridPattern::kIII:
      return "III";
  }
  return "?";
}

double SampleNull(NullDist dist, Rng& rng) {
  switch (dist) {
    case NullDist::kUniform:
      return rng.Uniform();
    case NullDist::kBeta22: {
      // The median of three uniforms is Beta(2, 2).
      const double a = rng.Uniform();
      const double b = rng.Uniform();
      const double c = rng.Uniform();
      return std::max(std::min(a, b), std::min(std::max(a, b), c));
    }
    case NullDist::kPowCubic:
      // Inverse CDF of f(p) = 4 p^3.
      return std::pow(rng.Uniform(), 0.25);
  }
  return rng.Uniform();
}

std::string Na(bool ok, const std::string& value) { return ok ? value : "NA"; }

}  // namespace

const char* NullDistName(NullDist dist) {
  switch (dist) {
    case NullDist::kUniform:
      return "uniform";
    case NullDist::kBeta22:
      return "beta22";
    case NullDist::kPowCubic:
      return "pow-cubic";
  }
  return "?";
}

NullDist ParseNullDist(std::string_view name) {
  for (NullDist d : {NullDist::kUniform, NullDist::kBeta22, NullDist::kPowCubic}) {
    if (name == NullDistName(d)) return d;
  }
  throw ContractViolation("unknown null distribution '" + std::string(name) +
                          "' (expected uniform, beta22, pow-cubic)");
}

void Scenario::Validate() const {
  Require(std::isfinite(beta), "beta must be finite");
  if (kind == ScenarioKind::kNoSideInfo) {
    Require(n >= 1, "n must be positive");
    Require(t >= 0 && t <= n, "t must lie in [0, n]");
  } else {
    Require(grid_side >= 2, "grid side must be at least 2");
  }
}

std::size_t Scenario::size() const {
  return kind == ScenarioKind::kNoSideInfo
             ? static_cast<std::size_t>(n)
             : static_cast<std::size_t>(grid_side) * grid_side;
}

std::string Scenario::Label() const {
  std::ostringstream out;
  if (kind == ScenarioKind::kNoSideInfo) {
    out << "no-side-info/n=" << n << "/t=" << t;
  } else {
    out << "grid/side=" << grid_side << "/pattern=" << PatternName(pattern);
  }
  out << "/beta=" << FormatShortest(beta) << "/nulls=" << NullDistName(null_dist);
  return out.str();
}

nlohmann::json Scenario::ToJson() const {
  nlohmann::json out = {
      {"kind", kind == ScenarioKind::kNoSideInfo ? "no-side-info" : "grid"},
      {"beta", beta},
      {"null_dist", NullDistName(null_dist)},
      {"size", size()}};
  if (kind == ScenarioKind::kNoSideInfo) {
    out["n"] = n;
    out["t"] = t;
  } else {
    out["grid_side"] = grid_side;
    out["pattern"] = PatternName(pattern);
  }
  return out;
}

std::size_t TruthLabels::alternatives() const {
  return static_cast<std::size_t>(
      std::count(alternative.begin(), alternative.end(), 1));
}

SimulatedData GenNoSideInfo(const Scenario& scenario, Rng& rng) {
  Require(scenario.kind == ScenarioKind::kNoSideInfo,
          "scenario is not a no-side-info design");
  scenario.Validate();
  SimulatedData out;
  out.data.p.resize(scenario.n);
  out.data.x = CovariateMatrix(scenario.n, 0);
  out.truth.alternative.assign(scenario.n, 0);
  for (int i = 0; i < scenario.n; ++i) {
    if (i < scenario.t) {
      out.data.p[i] = NormalCdf(rng.Normal() - scenario.beta);
      out.truth.alternative[i] = 1;
    } else {
      out.data.p[i] = SampleNull(scenario.null_dist, rng);
    }
  }
  return out;
}

std::vector<double> GridAxis(int side) {
  Require(side >= 2, "grid side must be at least 2");
  std::vector<double> axis(side);
  for (int k = 0; k < side; ++k) {
    axis[k] = -kGridHalfWidth + 2.0 * kGridHalfWidth * k / (side - 1);
  }
  return axis;
}

bool InGridRegion(GridPattern pattern, double x1, double x2) {
  switch (pattern) {
    case GridPattern::kI:
      return x1 * x1 + x2 * x2 <= 150.0;
    case GridPattern::kII:
      return (x1 - 65.0) * (x1 - 65.0) + (x2 - 65.0) * (x2 - 65.0) <= 150.0;
    case GridPattern::kIII: {
      const double along = x1 + x2;
      const double across = x2 - x1;
      return along * along / (2.0 * 100.0 * 100.0) +
                 across * across / (2.0 * 15.0 * 15.0) <=
             0.1;
    }
  }
  return false;
}

SimulatedData GenGrid(const Scenario& scenario, Rng& rng) {
  Require(scenario.kind == ScenarioKind::kGrid, "scenario is not a grid design");
  scenario.Validate();
  const std::vector<double> axis = GridAxis(scenario.grid_side);
  const std::size_t n = scenario.size();
  SimulatedData out;
  out.data.p.resize(n);
  out.truth.alternative.assign(n, 0);
  std::vector<double> coords;
  coords.reserve(2 * n);
  std::size_t i = 0;
  for (double x2 : axis) {
    for (double x1 : axis) {
      coords.push_back(x1);
      coords.push_back(x2);
      if (InGridRegion(scenario.pattern, x1, x2)) {
        out.truth.alternative[i] = 1;
        out.data.p[i] = NormalCdf(-(scenario.beta + rng.Normal()));
      } else if (scenario.null_dist == NullDist::kUniform) {
        out.data.p[i] = NormalCdf(-rng.Normal());
      } else {
        out.data.p[i] = SampleNull(scenario.null_dist, rng);
      }
      ++i;
    }
  }
  out.data.x = CovariateMatrix(2, std::move(coords));
  return out;
}

SimulatedData Generate(const Scenario& scenario, Rng& rng) {
  return scenario.kind == ScenarioKind::kNoSideInfo ? GenNoSideInfo(scenario, rng)
                                                    : GenGrid(scenario, rng);
}

double FalseDiscoveryProportion(std::span<const std::size_t> rejected,
                                const TruthLabels& truth) {
  std::size_t false_rejections = 0;
  for (std::size_t i : rejected) {
    Require(i < truth.alternative.size(), "rejected index out of range");
    if (!truth.alternative[i]) ++false_rejections;
  }
  return static_cast<double>(false_rejections) /
         static_cast<double>(std::max<std::size_t>(rejected.size(), 1));
}

double Power(std::span<const std::size_t> rejected, const TruthLabels& truth) {
  const std::size_t alternatives = truth.alternatives();
  if (alternatives == 0) return 0.0;
  std::size_t true_rejections = 0;
  for (std::size_t i : rejected) {
    Require(i < truth.alternative.size(), "rejected index out of range");
    if (truth.alternative[i]) ++true_rejections;
  }
  return static_cast<double>(true_rejections) / alternatives;
}

Rng TrialDataStream(std::uint64_t base_seed, int trial) {
  return Rng(base_seed).Split(static_cast<std::uint64_t>(trial)).Split(0);
}

Rng TrialMethodStream(std::uint64_t base_seed, int trial, MethodId method) {
  return Rng(base_seed)
      .Split(static_cast<std::uint64_t>(trial))
      .Split(1 + static_cast<std::uint64_t>(method));
}

MeanSe MeanAndSe(std::span<const double> values) {
  MeanSe out;
  const std::size_t k = values.size();
  if (k == 0) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / k;
  if (k < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(ss / (k - 1)) / std::sqrt(static_cast<double>(k));
  return out;
}

nlohmann::json CampaignConfig::ToJson() const {
  nlohmann::json names = nlohmann::json::array();
  for (MethodId m : methods) names.push_back(MethodName(m));
  return {{"scenario", scenario.ToJson()},
          {"methods", names},
          {"settings", settings.ToJson()},
          {"trials", trials},
          {"base_seed", base_seed}};
}

const MethodSummary& CampaignResult::Summary(MethodId method) const {
  for (const auto& s : summaries) {
    if (s.method == method) return s;
  }
  throw ContractViolation(std::string("method not in campaign: ") +
                          MethodName(method));
}

CampaignResult RunCampaign(const CampaignConfig& config) {
  Require(config.trials >= 1, "a campaign needs at least one trial");
  Require(!config.methods.empty(), "a campaign needs at least one method");
  Require(config.workers >= 1, "worker count must be positive");
  config.scenario.Validate();

  const std::size_t num_methods = config.methods.size();
  CampaignResult result;
  result.config = config;
  result.reports.resize(static_cast<std::size_t>(config.trials) * num_methods);

  auto run_trial = [&](int trial) {
    Rng data_rng = TrialDataStream(config.base_seed, trial);
    const std::uint64_t trial_seed = data_rng.key();
    std::optional<SimulatedData> sim;
    std::string data_error;
    try {
      sim = Generate(config.scenario, data_rng);
    } catch (const std::exception& e) {
      data_error = std::string("data generation: ") + e.what();
    }
    for (std::size_t k = 0; k < num_methods; ++k) {
      TrialReport& report = result.reports[trial * num_methods + k];
      report.method = config.methods[k];
      report.trial = trial;
      report.trial_seed = trial_seed;
      if (!sim) {
        report.failed = true;
        report.error = data_error;
        continue;
      }
      const auto start = std::chrono::steady_clock::now();
      try {
        const MethodOutcome outcome =
            RunMethod(config.methods[k], sim->data, config.settings,
                      TrialMethodStream(config.base_seed, trial, report.method));
        report.fdp = FalseDiscoveryProportion(outcome.rejected, sim->truth);
        report.power = Power(outcome.rejected, sim->truth);
        report.n_reject = static_cast<int>(outcome.rejected.size());
      } catch (const std::exception& e) {
        report.failed = true;
        report.error = e.what();
      }
      report.wall_time_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start)
                                .count();
    }
  };

  const int workers = std::min(config.workers, config.trials);
  if (workers == 1) {
    for (int trial = 0; trial < config.trials; ++trial) run_trial(trial);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int trial = next++; trial < config.trials; trial = next++) {
          run_trial(trial);
        }
      });
    }
    for (auto& thread : pool) thread.join();
  }

  for (std::size_t k = 0; k < num_methods; ++k) {
    MethodSummary summary;
    summary.method = config.methods[k];
    std::vector<double> fdp, power, rejections, times;
    for (int trial = 0; trial < config.trials; ++trial) {
      const TrialReport& r = result.reports[trial * num_methods + k];
      if (r.failed) {
        ++summary.trials_failed;
        continue;
      }
      ++summary.trials_ok;
      fdp.push_back(r.fdp);
      power.push_back(r.power);
      rejections.push_back(r.n_reject);
      times.push_back(r.wall_time_ms);
    }
    const MeanSe f = MeanAndSe(fdp);
    const MeanSe p = MeanAndSe(power);
    summary.fdr = f.mean;
    summary.fdr_se = f.se;
    summary.power = p.mean;
    summary.power_se = p.se;
    summary.mean_rejections = MeanAndSe(rejections).mean;
    summary.mean_wall_time_ms = MeanAndSe(times).mean;
    result.summaries.push_back(summary);
  }
  return result;
}

std::string CampaignLongCsv(const CampaignResult& result, bool with_timing) {
  const std::string scenario = result.config.scenario.Label();
  std::string out = "scenario,method,trial,fdp,power,n_reject,wall_time_ms\n";
  for (const TrialReport& r : result.reports) {
    const bool ok = !r.failed;
    out += scenario + "," + MethodName(r.method) + "," + std::to_string(r.trial) +
           "," + Na(ok, FormatShortest(r.fdp)) + "," +
           Na(ok, FormatShortest(r.power)) + "," +
           Na(ok, std::to_string(r.n_reject)) + "," +
           Na(with_timing, FormatShortest(r.wall_time_ms)) + "\n";
  }
  return out;
}

std::string CampaignSummaryCsv(const CampaignResult& result, bool with_timing) {
  const std::string scenario = result.config.scenario.Label();
  std::string out =
      "scenario,method,trials_ok,trials_failed,fdr,fdr_se,power,power_se,"
      "mean_n_reject,mean_wall_time_ms\n";
  for (const MethodSummary& s : result.summaries) {
    out += scenario + "," + MethodName(s.method) + "," +
           std::to_string(s.trials_ok) + "," + std::to_string(s.trials_failed) +
           "," + FormatShortest(s.fdr) + "," + FormatShortest(s.fdr_se) + "," +
           FormatShortest(s.power) + "," + FormatShortest(s.power_se) + "," +
           FormatShortest(s.mean_rejections) + "," +
           Na(with_timing, FormatShortest(s.mean_wall_time_ms)) + "\n";
  }
  return out;
}

nlohmann::json CampaignManifest(const CampaignResult& result,
                                bool with_timing) {
  nlohmann::json summaries = nlohmann::json::array();
  for (const MethodSummary& s : result.summaries) {
    nlohmann::json row = {{"method", MethodName(s.method)},
                          {"trials_ok", s.trials_ok},
                          {"trials_failed", s.trials_failed},
                          {"fdr", s.fdr},
                          {"fdr_se", s.fdr_se},
                          {"power", s.power},
                          {"power_se", s.power_se},
                          {"mean_n_reject", s.mean_rejections}};
    if (with_timing) row["mean_wall_time_ms"] = s.mean_wall_time_ms;
    summaries.push_back(row);
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const TrialReport& r : result.reports) {
    if (r.failed) {
      failures.push_back({{"method", MethodName(r.method)},
                          {"trial", r.trial},
                          {"error", r.error}});
    }
  }
  return {{"tool", "dpadapt"},
          {"version", kVersion},
          {"config", result.config.ToJson()},
          {"seed", result.config.base_seed},
          {"summaries", summaries},
          {"failures", failures},
          {"timing", with_timing}};
}

CampaignConfig DeskNoSideInfoCampaign(NullDist nulls) {
  CampaignConfig config;
  config.scenario.kind = ScenarioKind::kNoSideInfo;
  config.scenario.n = 10000;
  config.scenario.t = 50;
  config.scenario.beta = 4.0;
  config.scenario.null_dist = nulls;
  config.methods = {MethodId::kDpAdapt, MethodId::kDpBh, MethodId::kDpBonf};
  MethodSettings& s = config.settings;
  s.alpha = 0.1;
  s.kernel_name = "gaussian";
  s.bh_eta = 1e-4;
  s.bh_epsilon = 0.5;
  s.bh_delta = 1e-3;
  s.bh_nu = 0.5 * s.alpha / config.scenario.n;
  s.delta_g = s.bh_eta;
  s.m = 200;
  // Matches the DP-BH Laplace noise variance.
  s.budget = PrivacyBudget::Gdp(4.0 * s.bh_epsilon /
                                std::sqrt(10.0 * std::log(1.0 / s.bh_delta)));
  config.trials = 100;
  return config;
}

CampaignConfig DeskGridCampaign(GridPattern pattern, double beta) {
  CampaignConfig config;
  config.scenario.kind = ScenarioKind::kGrid;
  config.scenario.grid_side = 50;
  config.scenario.pattern = pattern;
  config.scenario.beta = beta;
  config.methods = {MethodId::kDpAdapt, MethodId::kAdapt, MethodId::kDpBh};
  MethodSettings& s = config.settings;
  s.alpha = 0.1;
  s.kernel_name = "gaussian";
  s.delta_g = 1e-4;
  s.budget = PrivacyBudget::Gdp(0.24);
  // 5% of the grid, as in the full-scale design.
  s.m = static_cast<int>(config.scenario.size() / 20);
  s.bh_eta = 1e-4;
  s.bh_epsilon = 0.5;
  s.bh_delta = 1e-3;
  s.bh_nu = 0.5 * s.alpha / config.scenario.size();
  config.trials = 100;
  return config;
}

}  // namespace dpadapt
