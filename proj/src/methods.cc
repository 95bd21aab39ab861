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

#include "dpadapt/methods.h"

#include <algorithm>
#include <cmath>

#include "dpadapt/baselines.h"
#include "dpadapt/errors.h"
#include "dpadapt/selection.h"

namespace dpadapt {
namespace {

constexpr const char* kDpBonfNote =
    "reconstructed mechanism: Gaussian noise on every transformed p-value "
    "under the full budget, rejection at alpha / n";

MethodOutcome NewOutcome(MethodId method, double alpha) {
  MethodOutcome out;
  out.method = method;
  out.alpha = alpha;
  return out;
}

std::vector<RejectionRow> RowsForAdapt(const RejectionReport& report) {
  std::vector<RejectionRow> rows;
  const auto& s = report.final_thresholds.s;
  for (std::size_t k = 0; k < report.selected.size(); ++k) {
    if (report.noisy_p[k] <= s[k]) {
      rows.push_back({report.selected[k], report.noisy_p[k], s[k]});
    }
  }
  std::sort(rows.begin(), rows.end(),
            [](const RejectionRow& a, const RejectionRow& b) {
              return a.index < b.index;
            });
  return rows;
}

MethodOutcome FromAdaptReport(MethodId method, double alpha,
                              RejectionReport report) {
  MethodOutcome out = NewOutcome(method, alpha);
  out.rejected = report.rejected;
  out.rows = RowsForAdapt(report);
  out.is_private = report.is_private;
  out.warnings = report.warnings;
  out.adapt = std::move(report);
  return out;
}

DpAdaptConfig AdaptConfig(const MethodSettings& settings) {
  DpAdaptConfig config;
  config.kernel = MakeKernel(settings.kernel_name);
  config.delta_g = settings.delta_g;
  config.budget = settings.budget;
  config.m = settings.m;
  config.alpha = settings.alpha;
  config.s0 = settings.s0;
  config.noise = settings.noise;
  config.zero_noise_for_testing = settings.zero_noise_for_testing;
  return config;
}

BHConfig BhConfig(const MethodSettings& settings, std::size_t n) {
  BHConfig config;
  config.nu = settings.bh_nu > 0.0 ? settings.bh_nu
                                   : 0.5 * settings.alpha / static_cast<double>(n);
  config.eta = settings.bh_eta;
  config.alpha = settings.alpha;
  config.epsilon = settings.bh_epsilon;
  config.delta = settings.bh_delta;
  config.m = settings.m;
  config.zero_noise_for_testing = settings.zero_noise_for_testing;
  return config;
}

}  // namespace

const char* MethodName(MethodId method) {
  switch (method) {
    case MethodId::kDpAdapt:
      return "dp-adapt";
    case MethodId::kAdapt:
      return "adapt";
    case MethodId::kDpBh:
      return "dp-bh";
    case MethodId::kDpBonf:
      return "dp-bonf";
    case MethodId::kBh:
      return "bh";
  }
  return "unknown";
}

MethodId ParseMethod(std::string_view name) {
  for (MethodId m : {MethodId::kDpAdapt, MethodId::kAdapt, MethodId::kDpBh,
                     MethodId::kDpBonf, MethodId::kBh}) {
    if (name == MethodName(m)) return m;
  }
  throw ContractViolation("unknown method '" + std::string(name) +
                          "' (expected dp-adapt, adapt, dp-bh, dp-bonf, bh)");
}

bool IsPrivate(MethodId method) {
  return method == MethodId::kDpAdapt || method == MethodId::kDpBh ||
         method == MethodId::kDpBonf;
}

nlohmann::json MethodSettings::ToJson() const {
  nlohmann::json budget_json = {{"mu", budget.mu()}};
  if (budget.approx_dp()) {
    budget_json["epsilon"] = budget.approx_dp()->epsilon;
    budget_json["delta"] = budget.approx_dp()->delta;
  }
  budget_json["specified_as"] =
      budget.specified_as_epsilon_delta() ? "epsilon-delta" : "mu";
  return {{"alpha", alpha},
          {"kernel", kernel_name},
          {"delta_g", delta_g},
          {"budget", budget_json},
          {"noise", NoiseFamilyName(noise)},
          {"m", m},
          {"s0", s0},
          {"em_iterations", em.iterations},
          {"em_refit_every", em.refit_every},
          {"em_ridge", em.ridge},
          {"em_adaptive_support", em.adaptive_support},
          {"em_basis", static_cast<int>(em.basis)},
          {"bh_nu", bh_nu},
          {"bh_eta", bh_eta},
          {"bh_epsilon", bh_epsilon},
          {"bh_delta", bh_delta},
          {"zero_noise_for_testing", zero_noise_for_testing}};
}

std::vector<MethodOutcome> RunMethodAlphaGrid(MethodId method,
                                              const Dataset& data,
                                              const MethodSettings& settings,
                                              std::span<const double> alphas,
                                              const Rng& rng) {
  Require(!alphas.empty(), "at least one alpha is required");
  for (double a : alphas) {
    Require(a > 0.0 && a < 1.0, "alpha must lie in (0, 1)");
  }
  data.Validate();
  const std::size_t n = data.size();
  std::vector<MethodOutcome> outcomes;

  switch (method) {
    case MethodId::kDpAdapt: {
      const DpAdaptConfig config = AdaptConfig(settings);
      const LaplaceCalibration noise = PeelingNoise(config);
      const SelectionResult selection = PeelForAdapt(data, config, rng);
      for (double alpha : alphas) {
        GreedyTwoGroupUpdater updater(settings.em);
        RejectionReport report =
            RunAdaptOnSelection(data, selection, alpha, settings.s0, updater);
        report.warnings = noise.warnings;
        MethodOutcome out = FromAdaptReport(method, alpha, std::move(report));
        out.details = {{"per_round_noise_scale", noise.noise.scale()},
                       {"noise", NoiseFamilyName(noise.noise.family())}};
        outcomes.push_back(std::move(out));
      }
      break;
    }
    case MethodId::kAdapt: {
      for (double alpha : alphas) {
        GreedyTwoGroupUpdater updater(settings.em);
        outcomes.push_back(FromAdaptReport(
            method, alpha,
            RunAdaptNonPrivate(data, alpha, updater, settings.s0)));
      }
      break;
    }
    case MethodId::kDpBh: {
      BHConfig config = BhConfig(settings, n);
      const DpBhResult peeled = DpBh(data.p, config, rng);
      for (double alpha : alphas) {
        MethodOutcome out = NewOutcome(method, alpha);
        out.rejected = DpBhRethreshold(peeled, n, config, alpha);
        const double correction =
            DpBhLaplaceScale(config) * std::log(6.0 * config.m / alpha);
        const double cutoff =
            std::exp(std::log(alpha * out.rejected.size() / n) - correction);
        for (std::size_t j = 0; j < out.rejected.size(); ++j) {
          out.rows.push_back(
              {peeled.selected[j], std::exp(peeled.noisy_f[j]), cutoff});
        }
        std::sort(out.rows.begin(), out.rows.end(),
                  [](const RejectionRow& a, const RejectionRow& b) {
                    return a.index < b.index;
                  });
        out.is_private = peeled.is_private;
        out.details = {{"laplace_scale", peeled.lambda},
                       {"correction", correction},
                       {"nu", config.nu}};
        outcomes.push_back(std::move(out));
      }
      break;
    }
    case MethodId::kDpBonf: {
      DpBonfConfig config;
      config.kernel = MakeKernel(settings.kernel_name);
      config.delta_g = settings.delta_g;
      config.budget = settings.budget;
      config.alpha = settings.alpha;
      config.zero_noise_for_testing = settings.zero_noise_for_testing;
      const DpBonfResult released = DpBonf(data.p, config, rng);
      for (double alpha : alphas) {
        MethodOutcome out = NewOutcome(method, alpha);
        out.rejected = DpBonfRethreshold(released, alpha);
        for (std::size_t i : out.rejected) {
          out.rows.push_back({i, released.noisy_p[i], alpha / n});
        }
        out.is_private = released.is_private;
        out.details = {{"noise_sd", released.noise_sd},
                       {"reconstruction", kDpBonfNote}};
        outcomes.push_back(std::move(out));
      }
      break;
    }
    case MethodId::kBh: {
      for (double alpha : alphas) {
        MethodOutcome out = NewOutcome(method, alpha);
        out.rejected = Bh(data.p, alpha);
        const double cutoff = alpha * out.rejected.size() / n;
        for (std::size_t i : out.rejected) {
          out.rows.push_back({i, data.p[i], cutoff});
        }
        outcomes.push_back(std::move(out));
      }
      break;
    }
  }
  return outcomes;
}

MethodOutcome RunMethod(MethodId method, const Dataset& data,
                        const MethodSettings& settings, const Rng& rng) {
  const double alpha[] = {settings.alpha};
  return std::move(RunMethodAlphaGrid(method, data, settings, alpha, rng)[0]);
}

nlohmann::json OutcomeToJson(const MethodOutcome& outcome,
                             std::span<const std::string> ids) {
  auto label = [&](std::size_t i) -> nlohmann::json {
    if (ids.empty()) return i;
    Require(i < ids.size(), "rejected index has no id");
    return ids[i];
  };
  nlohmann::json rejected = nlohmann::json::array();
  for (std::size_t i : outcome.rejected) rejected.push_back(label(i));
  nlohmann::json out = {{"method", MethodName(outcome.method)},
                        {"alpha", outcome.alpha},
                        {"n_reject", outcome.rejected.size()},
                        {"rejected", rejected},
                        {"is_private", outcome.is_private},
                        {"warnings", outcome.warnings},
                        {"details", outcome.details}};
  if (outcome.adapt) {
    const RejectionReport& r = *outcome.adapt;
    nlohmann::json trajectory = nlohmann::json::array();
    for (const TrajectoryRow& row : r.trajectory) {
      trajectory.push_back({{"t", row.t},
                            {"A", row.a_count},
                            {"R", row.r_count},
                            {"fdr_hat", row.fdr_hat}});
    }
    nlohmann::json selected = nlohmann::json::array();
    for (std::size_t i : r.selected) selected.push_back(label(i));
    out["trajectory"] = trajectory;
    out["stop_t"] = r.stop_t;
    out["exhausted"] = r.exhausted;
    out["selected"] = selected;
    out["model"] = r.model;
  }
  return out;
}

}  // namespace dpadapt
