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

#include "dpadapt/engine.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dpadapt/errors.h"

namespace dpadapt {
namespace {

// Membership is decided on the masked minimum. For v >= 0.5 the subtraction
// 1 - v is exact, so "v >= 1 - s" and "1 - v <= s" agree bit for bit.
double MaskedMin(double v) { return std::min(v, 1.0 - v); }

bool IsMasked(double v, double s) { return MaskedMin(v) <= s; }

struct Counts {
  int a = 0;
  int r = 0;
};

Counts CountFromScratch(std::span<const double> values,
                        std::span<const double> s) {
  Counts c;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] <= s[k]) ++c.r;
    if (1.0 - values[k] <= s[k] && values[k] >= 0.5) ++c.a;
  }
  return c;
}

void CheckNewThresholds(std::span<const double> old_s,
                        std::span<const double> new_s, int step) {
  if (new_s.size() != old_s.size()) {
    throw InvariantViolation("updater returned the wrong number of thresholds");
  }
  for (std::size_t k = 0; k < new_s.size(); ++k) {
    if (!(new_s[k] >= 0.0 && new_s[k] < 0.5)) {
      throw InvariantViolation("updater returned a threshold outside [0, 0.5)");
    }
    if (new_s[k] > old_s[k]) {
      std::ostringstream msg;
      msg << "threshold for slot " << k << " increased at step " << step
          << " (" << old_s[k] << " -> " << new_s[k] << ")";
      throw MonotonicityViolation(msg.str());
    }
  }
}

}  // namespace

MaskedPValue::MaskedPValue(std::size_t id, double masked_min,
                           std::optional<double> revealed)
    : id_(id), masked_min_(masked_min), revealed_(revealed) {
  Require(masked_min >= 0.0 && masked_min <= 0.5,
          "masked minimum must lie in [0, 0.5]");
  Require(!revealed || *revealed == masked_min ||
              *revealed == 1.0 - masked_min,
          "revealed value must be one of the masked pair");
}

double FdrHat(int a_count, int r_count) {
  return (1.0 + a_count) / std::max(r_count, 1);
}

RejectionReport RunMaskedLoop(std::span<const double> values,
                              std::span<const std::size_t> ids,
                              const CovariateMatrix& x, double alpha,
                              double s0, ThresholdUpdater& updater) {
  Require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  Require(s0 > 0.0 && s0 < 0.5, "initial threshold must lie in (0, 0.5)");
  Require(ids.size() == values.size(), "ids and values differ in length");
  Require(x.dim() == 0 || x.rows() == values.size(),
          "covariate rows do not match the loop size");
  for (double v : values) {
    Require(v >= 0.0 && v <= 1.0, "p-value outside [0, 1]");
  }

  const std::size_t m = values.size();
  RejectionReport report;
  report.selected.assign(ids.begin(), ids.end());
  report.noisy_p.assign(values.begin(), values.end());

  std::vector<double> s(m, s0);
  Counts running = CountFromScratch(values, s);
  std::vector<MaskedPValue> views;
  views.reserve(m);

  for (int t = 0;; ++t) {
    const Counts fresh = CountFromScratch(values, s);
    if (fresh.a != running.a || fresh.r != running.r) {
      throw InvariantViolation("incremental A_t/R_t disagree with recount");
    }
    const double fdr = FdrHat(fresh.a, fresh.r);
    report.trajectory.push_back({t, fresh.a, fresh.r, fdr});
    report.stop_t = t;

    if (fdr <= alpha) {
      for (std::size_t k = 0; k < m; ++k) {
        if (values[k] <= s[k]) report.rejected.push_back(ids[k]);
      }
      break;
    }
    if (fresh.a + fresh.r == 0) {
      report.exhausted = true;
      break;
    }

    views.clear();
    for (std::size_t k = 0; k < m; ++k) {
      const double v = values[k];
      views.emplace_back(k, MaskedMin(v),
                         IsMasked(v, s[k]) ? std::nullopt
                                           : std::optional<double>(v));
    }
    const UpdaterInput input{views, x, s, t, fresh.a, fresh.r};
    std::optional<std::vector<double>> next = updater.Update(input);
    if (!next) {
      report.exhausted = true;
      break;
    }
    CheckNewThresholds(s, *next, t);

    int unmasked = 0;
    for (std::size_t k = 0; k < m; ++k) {
      const double v = values[k];
      if (IsMasked(v, s[k]) && !IsMasked(v, (*next)[k])) {
        ++unmasked;
        if (v < 0.5) {
          --running.r;
        } else {
          --running.a;
        }
      }
    }
    if (unmasked == 0) {
      std::ostringstream msg;
      msg << "updater did not shrink the candidate set at step " << t;
      throw StallError(msg.str());
    }
    s = std::move(*next);
  }

  std::sort(report.rejected.begin(), report.rejected.end());
  report.final_thresholds = {s, report.stop_t, report.trajectory.back().a_count,
                             report.trajectory.back().r_count};
  report.model = updater.Diagnostics();
  return report;
}

LaplaceCalibration PeelingNoise(const DpAdaptConfig& config) {
  if (config.zero_noise_for_testing) {
    return {NoiseSpec::ZeroForTesting(config.noise), {}};
  }
  if (config.noise == NoiseFamily::kGaussian) {
    return {MirrorPeelNoise(config.delta_g, config.budget.mu(), config.m), {}};
  }
  Require(config.budget.specified_as_epsilon_delta(),
          "Laplace noise needs a budget given as (epsilon, delta)");
  const ApproxDp& ed = *config.budget.approx_dp();
  return CalibrateLaplace(config.delta_g, config.m, ed.epsilon, ed.delta);
}

SelectionResult PeelForAdapt(const Dataset& data, const DpAdaptConfig& config,
                             const Rng& rng) {
  Require(config.kernel != nullptr, "a transform kernel is required");
  data.Validate();
  const LaplaceCalibration noise = PeelingNoise(config);
  return MirrorPeel(data.p, *config.kernel, noise.noise, config.m, rng);
}

RejectionReport RunAdaptOnSelection(const Dataset& data,
                                    const SelectionResult& selection,
                                    double alpha, double s0,
                                    ThresholdUpdater& updater) {
  std::vector<std::size_t> ids;
  std::vector<double> values;
  ids.reserve(selection.m());
  values.reserve(selection.m());
  for (const auto& pair : selection.pairs) {
    ids.push_back(pair.index);
    values.push_back(pair.noisy_p);
  }
  const CovariateMatrix x =
      data.x.dim() == 0 ? CovariateMatrix(ids.size(), 0) : data.x.Select(ids);
  RejectionReport report = RunMaskedLoop(values, ids, x, alpha, s0, updater);
  report.is_private = selection.is_private;
  return report;
}

RejectionReport RunDpAdapt(const Dataset& data, const DpAdaptConfig& config,
                           ThresholdUpdater& updater, const Rng& rng) {
  Require(config.kernel != nullptr, "a transform kernel is required");
  const LaplaceCalibration noise = PeelingNoise(config);
  data.Validate();
  const SelectionResult selection =
      MirrorPeel(data.p, *config.kernel, noise.noise, config.m, rng);
  RejectionReport report =
      RunAdaptOnSelection(data, selection, config.alpha, config.s0, updater);
  report.warnings = noise.warnings;
  return report;
}

RejectionReport RunAdaptNonPrivate(const Dataset& data, double alpha,
                                   ThresholdUpdater& updater, double s0) {
  data.Validate();
  std::vector<std::size_t> ids(data.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  const CovariateMatrix x =
      data.x.dim() == 0 ? CovariateMatrix(data.size(), 0) : data.x;
  RejectionReport report = RunMaskedLoop(data.p, ids, x, alpha, s0, updater);
  report.is_private = false;
  return report;
}

}  // namespace dpadapt
