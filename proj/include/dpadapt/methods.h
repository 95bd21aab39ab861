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

// Uniform entry point for the five testing procedures, shared by the CLI and
// the simulation harness.

#ifndef DPADAPT_METHODS_H_
#define DPADAPT_METHODS_H_

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "dpadapt/data.h"
#include "dpadapt/engine.h"
#include "dpadapt/privacy.h"
#include "dpadapt/rng.h"
#include "dpadapt/transform.h"
#include "dpadapt/twogroup.h"

namespace dpadapt {

// Values are stable: they key the per-method random streams.
enum class MethodId { kDpAdapt = 0, kAdapt = 1, kDpBh = 2, kDpBonf = 3, kBh = 4 };

const char* MethodName(MethodId method);
// Throws ContractViolation for unknown names.
MethodId ParseMethod(std::string_view name);
bool IsPrivate(MethodId method);

struct MethodSettings {
  double alpha = 0.1;
  std::string kernel_name = "gaussian";
  double delta_g = 1e-4;
  PrivacyBudget budget = PrivacyBudget::Gdp(1.0);
  NoiseFamily noise = NoiseFamily::kGaussian;
  int m = 200;  // peeling size for dp-adapt and dp-bh
  double s0 = kDefaultInitialThreshold;
  EmSchedule em;
  // dp-bh parameters. bh_nu == 0 means 0.5 alpha / n.
  double bh_nu = 0.0;
  double bh_eta = 1e-4;
  double bh_epsilon = 0.5;
  double bh_delta = 1e-3;
  bool zero_noise_for_testing = false;

  nlohmann::json ToJson() const;
};

struct RejectionRow {
  std::size_t index;
  double noisy_p;    // the released (or, for non-private arms, raw) value
  double threshold;  // the cutoff it was compared against
};

struct MethodOutcome {
  MethodId method = MethodId::kBh;
  double alpha = 0.0;
  // Ascending dataset indices.
  std::vector<std::size_t> rejected;
  std::vector<RejectionRow> rows;
  bool is_private = false;
  std::vector<std::string> warnings;
  // The loop report for dp-adapt and adapt.
  std::optional<RejectionReport> adapt;
  nlohmann::json details;
};

// One outcome per alpha. Private arms release once and rethreshold, so the
// whole grid costs a single privacy budget.
std::vector<MethodOutcome> RunMethodAlphaGrid(MethodId method,
                                              const Dataset& data,
                                              const MethodSettings& settings,
                                              std::span<const double> alphas,
                                              const Rng& rng);

MethodOutcome RunMethod(MethodId method, const Dataset& data,
                        const MethodSettings& settings, const Rng& rng);

// Serializes an outcome. Rejections are reported by `ids` when given (one
// per dataset row) and by row index otherwise.
nlohmann::json OutcomeToJson(const MethodOutcome& outcome,
                             std::span<const std::string> ids = {});

}  // namespace dpadapt

#endif  // DPADAPT_METHODS_H_
