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

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "dpadapt/errors.h"
#include "dpadapt/rng.h"
#include "dpadapt/simulation.h"

namespace dpadapt {
namespace {

Dataset GridData(std::uint64_t seed) {
  Scenario s;
  s.kind = ScenarioKind::kGrid;
  s.grid_side = 30;
  s.beta = 3.5;
  Rng rng(seed);
  return Generate(s, rng).data;
}

MethodSettings Settings() {
  MethodSettings s;
  s.budget = PrivacyBudget::Gdp(0.24);
  s.m = 60;
  return s;
}

TEST(MethodNameTest, RoundTrip) {
  for (MethodId id : {MethodId::kDpAdapt, MethodId::kAdapt, MethodId::kDpBh,
                      MethodId::kDpBonf, MethodId::kBh}) {
    EXPECT_EQ(ParseMethod(MethodName(id)), id);
  }
  EXPECT_THROW(ParseMethod("storey"), ContractViolation);
  EXPECT_TRUE(IsPrivate(MethodId::kDpBh));
  EXPECT_FALSE(IsPrivate(MethodId::kAdapt));
}

TEST(RunMethodTest, AlphaGridMatchesSingleRuns) {
  const Dataset data = GridData(71);
  const std::vector<double> alphas{0.05, 0.1, 0.2};
  for (MethodId id : {MethodId::kDpAdapt, MethodId::kDpBh, MethodId::kDpBonf,
                      MethodId::kBh, MethodId::kAdapt}) {
    const auto grid = RunMethodAlphaGrid(id, data, Settings(), alphas, Rng(3));
    ASSERT_EQ(grid.size(), 3u);
    for (std::size_t k = 0; k < alphas.size(); ++k) {
      MethodSettings s = Settings();
      s.alpha = alphas[k];
      const MethodOutcome single = RunMethod(id, data, s, Rng(3));
      EXPECT_EQ(grid[k].rejected, single.rejected) << MethodName(id) << " " << alphas[k];
      EXPECT_EQ(grid[k].is_private, IsPrivate(id));
    }
  }
}

TEST(RunMethodTest, RowsMatchRejections) {
  const Dataset data = GridData(72);
  const auto out = RunMethod(MethodId::kDpAdapt, data, Settings(), Rng(4));
  ASSERT_EQ(out.rows.size(), out.rejected.size());
  for (std::size_t k = 0; k < out.rows.size(); ++k) {
    EXPECT_EQ(out.rows[k].index, out.rejected[k]);
    EXPECT_LE(out.rows[k].noisy_p, out.rows[k].threshold);
  }
  const auto json = OutcomeToJson(out);
  EXPECT_EQ(json["method"], "dp-adapt");
  EXPECT_TRUE(json.contains("trajectory"));
  EXPECT_TRUE(json.contains("model"));
  EXPECT_EQ(json["is_private"], true);
}

TEST(RunMethodTest, ZeroNoiseIsFlagged) {
  const Dataset data = GridData(73);
  MethodSettings s = Settings();
  s.zero_noise_for_testing = true;
  for (MethodId id : {MethodId::kDpAdapt, MethodId::kDpBh, MethodId::kDpBonf}) {
    EXPECT_FALSE(RunMethod(id, data, s, Rng(5)).is_private) << MethodName(id);
  }
}

TEST(RunMethodTest, DpBonfIsLabelledAsReconstruction) {
  const Dataset data = GridData(74);
  const auto out = RunMethod(MethodId::kDpBonf, data, Settings(), Rng(6));
  EXPECT_TRUE(OutcomeToJson(out)["details"].contains("reconstruction"));
}

}  // namespace
}  // namespace dpadapt
