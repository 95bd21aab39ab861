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

// Synthetic scenarios, per-trial metrics, and Monte Carlo campaigns.
//
// Generators return ground truth separately from the Dataset handed to the
// methods, so labels cannot reach a procedure by construction.

#ifndef DPADAPT_SIMULATION_H_
#define DPADAPT_SIMULATION_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "dpadapt/data.h"
#include "dpadapt/methods.h"
#include "dpadapt/rng.h"

namespace dpadapt {

enum class ScenarioKind { kNoSideInfo, kGrid };
enum class NullDist { kUniform, kBeta22, kPowCubic };
enum class GridPattern { kI = 1, kII = 2, kIII = 3 };

const char* NullDistName(NullDist dist);
NullDist ParseNullDist(std::string_view name);

struct Scenario {
  ScenarioKind kind = ScenarioKind::kNoSideInfo;
  int n = 10000;  // NoSideInfo only; the grid has grid_side^2 points
  int t = 50;     // NoSideInfo true effects
  GridPattern pattern = GridPattern::kI;
  double beta = 4.0;
  NullDist null_dist = NullDist::kUniform;
  int grid_side = 50;

  void Validate() const;
  std::size_t size() const;
  std::string Label() const;
  nlohmann::json ToJson() const;
};

struct TruthLabels {
  // 1 for H1.
  std::vector<char> alternative;

  std::size_t alternatives() const;
};

struct SimulatedData {
  Dataset data;
  TruthLabels truth;
};

// Alternatives first: p_i = Phi(xi_i - beta) for i < t, then nulls.
SimulatedData GenNoSideInfo(const Scenario& scenario, Rng& rng);

// Row-major grid over linspace(-100, 100, side)^2 with x1 varying fastest.
// Alternatives: p = 1 - Phi(z), z ~ N(beta, 1).
SimulatedData GenGrid(const Scenario& scenario, Rng& rng);

SimulatedData Generate(const Scenario& scenario, Rng& rng);

// Region membership for the grid patterns. Pattern III is the ellipse
// (x1 + x2)^2 / (2 * 100^2) + (x2 - x1)^2 / (2 * 15^2) <= 0.1.
bool InGridRegion(GridPattern pattern, double x1, double x2);
std::vector<double> GridAxis(int side);

// V / max(R, 1).
double FalseDiscoveryProportion(std::span<const std::size_t> rejected,
                                const TruthLabels& truth);
// True rejections / |H1|, 0 when H1 is empty.
double Power(std::span<const std::size_t> rejected, const TruthLabels& truth);

// Random streams of a campaign. Data and method arms of one trial are
// independent, and every arm sees the same data.
Rng TrialDataStream(std::uint64_t base_seed, int trial);
Rng TrialMethodStream(std::uint64_t base_seed, int trial, MethodId method);

struct TrialReport {
  MethodId method;
  int trial = 0;
  std::uint64_t trial_seed = 0;  // key of the trial's data stream
  bool failed = false;
  std::string error;
  double fdp = 0.0;
  double power = 0.0;
  int n_reject = 0;
  double wall_time_ms = 0.0;
};

struct MethodSummary {
  MethodId method;
  int trials_ok = 0;
  int trials_failed = 0;
  double fdr = 0.0;
  double fdr_se = 0.0;
  double power = 0.0;
  double power_se = 0.0;
  double mean_rejections = 0.0;
  double mean_wall_time_ms = 0.0;
};

struct CampaignConfig {
  Scenario scenario;
  std::vector<MethodId> methods;
  MethodSettings settings;
  int trials = 100;
  std::uint64_t base_seed = 0;
  int workers = 1;

  nlohmann::json ToJson() const;
};

struct CampaignResult {
  CampaignConfig config;
  // Trial-major, methods in config order.
  std::vector<TrialReport> reports;
  std::vector<MethodSummary> summaries;

  const MethodSummary& Summary(MethodId method) const;
};

// Mean and standard error (sample sd / sqrt(k)); se is 0 for k < 2.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};
MeanSe MeanAndSe(std::span<const double> values);

// Runs every trial and method; failures are recorded, not thrown. The result
// does not depend on `workers` or on completion order.
CampaignResult RunCampaign(const CampaignConfig& config);

// Long format: scenario, method, trial, fdp, power, n_reject, wall_time_ms.
// Wall time is "NA" unless `with_timing`, which keeps reruns byte-identical.
// Failed trials carry NA metrics.
std::string CampaignLongCsv(const CampaignResult& result, bool with_timing);
std::string CampaignSummaryCsv(const CampaignResult& result, bool with_timing);
nlohmann::json CampaignManifest(const CampaignResult& result,
                                bool with_timing);

// Desk-scale defaults.
CampaignConfig DeskNoSideInfoCampaign(NullDist nulls);
CampaignConfig DeskGridCampaign(GridPattern pattern, double beta);

}  // namespace dpadapt

#endif  // DPADAPT_SIMULATION_H_
