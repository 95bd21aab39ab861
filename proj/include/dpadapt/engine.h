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

// The adaptive masked-p-value loop, with and without private pre-selection.
//
// The loop only ever hands a ThresholdUpdater MaskedPValue views. A view
// carries min(p~, 1 - p~) and, only when s(x) < p~ < 1 - s(x), the value
// itself; nothing else about an unrevealed p~ is reachable from the updater.

#ifndef DPADAPT_ENGINE_H_
#define DPADAPT_ENGINE_H_

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "dpadapt/data.h"
#include "dpadapt/privacy.h"
#include "dpadapt/rng.h"
#include "dpadapt/selection.h"
#include "dpadapt/transform.h"

namespace dpadapt {

inline constexpr double kDefaultInitialThreshold = 0.45;

class MaskedPValue {
 public:
  MaskedPValue(std::size_t id, double masked_min,
               std::optional<double> revealed);

  // Position of the hypothesis in the loop (0..m-1).
  std::size_t id() const { return id_; }
  double masked_min() const { return masked_min_; }
  const std::optional<double>& revealed() const { return revealed_; }
  bool is_masked() const { return !revealed_.has_value(); }

  bool operator==(const MaskedPValue&) const = default;

 private:
  std::size_t id_;
  double masked_min_;
  std::optional<double> revealed_;
};

// Everything an updater may condition on at step t.
struct UpdaterInput {
  std::span<const MaskedPValue> pvalues;
  // Row k holds the covariates of pvalues[k].
  const CovariateMatrix& x;
  std::span<const double> thresholds;
  int step = 0;
  int a_count = 0;  // A_t
  int r_count = 0;  // R_t
};

class ThresholdUpdater {
 public:
  virtual ~ThresholdUpdater() = default;

  // Returns s_{t+1}, which must satisfy s_{t+1} <= s_t pointwise and must
  // unmask at least one hypothesis. nullopt means nothing can be removed.
  virtual std::optional<std::vector<double>> Update(
      const UpdaterInput& input) = 0;

  // Serialized under the report's "model" key.
  virtual nlohmann::json Diagnostics() const { return nullptr; }
};

struct ThresholdState {
  std::vector<double> s;
  int t = 0;
  int a_count = 0;
  int r_count = 0;
};

struct TrajectoryRow {
  int t;
  int a_count;
  int r_count;
  double fdr_hat;
};

struct RejectionReport {
  // Dataset indices, ascending.
  std::vector<std::size_t> rejected;
  std::vector<TrajectoryRow> trajectory;
  int stop_t = 0;
  // True when the loop ended because nothing was left to unmask.
  bool exhausted = false;
  ThresholdState final_thresholds;
  // Loop slot k refers to dataset index selected[k] with value noisy_p[k].
  std::vector<std::size_t> selected;
  std::vector<double> noisy_p;
  bool is_private = false;
  std::vector<std::string> warnings;
  nlohmann::json model;
};

// (1 + A) / max(R, 1).
double FdrHat(int a_count, int r_count);

// Runs the masked loop on already-released values. `ids` maps loop slots to
// dataset indices and `x` holds one covariate row per slot.
RejectionReport RunMaskedLoop(std::span<const double> values,
                              std::span<const std::size_t> ids,
                              const CovariateMatrix& x, double alpha,
                              double s0, ThresholdUpdater& updater);

struct DpAdaptConfig {
  std::shared_ptr<const TransformKernel> kernel;
  double delta_g = 1e-4;
  PrivacyBudget budget = PrivacyBudget::Gdp(1.0);
  int m = 1;
  double alpha = 0.1;
  double s0 = kDefaultInitialThreshold;
  NoiseFamily noise = NoiseFamily::kGaussian;
  // Zero-scale noise; the output is flagged non-private.
  bool zero_noise_for_testing = false;
};

// Per-round peeling noise implied by the config, plus any regime warnings.
LaplaceCalibration PeelingNoise(const DpAdaptConfig& config);

// Step (1) alone: the private pre-selection. Thresholding at several alpha
// levels afterwards is post-processing of this one release.
SelectionResult PeelForAdapt(const Dataset& data, const DpAdaptConfig& config,
                             const Rng& rng);

// The loop over a finished selection.
RejectionReport RunAdaptOnSelection(const Dataset& data,
                                    const SelectionResult& selection,
                                    double alpha, double s0,
                                    ThresholdUpdater& updater);

// Mirror peeling followed by the masked loop.
RejectionReport RunDpAdapt(const Dataset& data, const DpAdaptConfig& config,
                           ThresholdUpdater& updater, const Rng& rng);

// The same loop over all n raw p-values, no noise, no peeling.
RejectionReport RunAdaptNonPrivate(const Dataset& data, double alpha,
                                   ThresholdUpdater& updater,
                                   double s0 = kDefaultInitialThreshold);

}  // namespace dpadapt

#endif  // DPADAPT_ENGINE_H_
