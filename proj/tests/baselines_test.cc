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

#include "dpadapt/baselines.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "dpadapt/errors.h"
#include "dpadapt/normal.h"
#include "dpadapt/rng.h"
#include "dpadapt/transform.h"
#include "testing.h"

namespace dpadapt {
namespace {

bool IsSubset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Step-up BH over the m smallest p-values with the full-n denominator.
std::vector<std::size_t> TruncatedBhOracle(const std::vector<double>& p, int m,
                                           double alpha) {
  const std::size_t n = p.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::size_t k = 0;
  for (std::size_t j = 1; j <= static_cast<std::size_t>(m); ++j) {
    if (p[order[j - 1]] <= alpha * j / n) k = j;
  }
  std::vector<std::size_t> out(order.begin(), order.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> SignalInstance(Rng& rng, std::size_t n, std::size_t t,
                                   double beta) {
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = i < t ? NormalCdf(rng.Normal() - beta) : rng.Uniform();
  }
  return p;
}

TEST(BhTest, Examples) {
  EXPECT_EQ(Bh(std::vector<double>{0.01, 0.02, 0.9}, 0.1),
            (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(Bh(std::vector<double>(10, 1.0), 0.1).empty());
  EXPECT_EQ(Bh(std::vector<double>{0.1}, 0.1), (std::vector<std::size_t>{0}));
  EXPECT_THROW(Bh(std::vector<double>{0.1}, 1.0), ContractViolation);
}

TEST(BhTest, MatchesBruteForceOracle) {
  Rng rng(41);
  for (int rep = 0; rep < 300; ++rep) {
    const auto p = SignalInstance(rng, 60, 10, 3.0 * rng.Uniform());
    ASSERT_EQ(Bh(p, 0.1), testing::BhOracle(p, 0.1));
  }
}

TEST(DpBhTest, AllOnesRejectNothing) {
  BHConfig config;
  config.m = 5;
  config.zero_noise_for_testing = true;
  const auto r = DpBh(std::vector<double>(20, 1.0), config, Rng(1));
  EXPECT_TRUE(r.rejected.empty());
  EXPECT_FALSE(r.is_private);
}

TEST(DpBhTest, ZeroNoiseIsTruncatedBh) {
  Rng rng(42);
  for (int rep = 0; rep < 500; ++rep) {
    const auto p = SignalInstance(rng, 200, 20, 1 + 3 * rng.Uniform());
    BHConfig config;
    config.m = 50;
    config.nu = 0.5 * 0.1 / 200;
    config.zero_noise_for_testing = true;
    const auto r = DpBh(p, config, Rng(rep));
    ASSERT_EQ(r.rejected, TruncatedBhOracle(p, 50, 0.1)) << "instance " << rep;
    const auto textbook = testing::BhOracle(p, 0.1);
    if (textbook.size() <= 50) {
      ASSERT_EQ(r.rejected, textbook);
    }
  }
}

TEST(DpBhTest, RejectsOnlyPeeled) {
  Rng rng(43);
  const auto p = SignalInstance(rng, 1000, 40, 4.0);
  BHConfig config;
  config.m = 60;
  config.nu = 0.5 * 0.1 / 1000;
  const auto r = DpBh(p, config, Rng(2));
  EXPECT_TRUE(r.is_private);
  const std::set<std::size_t> peeled(r.selected.begin(), r.selected.end());
  EXPECT_EQ(peeled.size(), 60u);
  for (std::size_t i : r.rejected) EXPECT_TRUE(peeled.count(i));
  EXPECT_NEAR(r.lambda, 1e-4 * std::sqrt(600 * std::log(1000.0)) / 0.5, 1e-15);
  EXPECT_NEAR(r.correction, r.lambda * std::log(6 * 60 / 0.1), 1e-15);
}

TEST(DpBhTest, MonotoneInAlpha) {
  Rng rng(44);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = SignalInstance(rng, 500, 30, 3.5);
    BHConfig config;
    config.m = 50;
    config.nu = 1e-5;
    const auto r = DpBh(p, config, Rng(rep));
    std::vector<std::size_t> prev;
    for (double a : {0.01, 0.03, 0.05, 0.1, 0.2}) {
      const auto cur = DpBhRethreshold(r, p.size(), config, a);
      ASSERT_TRUE(IsSubset(prev, cur));
      prev = cur;
    }
  }
}

TEST(DpBhTest, ConfigValidation) {
  BHConfig config;
  config.m = 11;
  EXPECT_THROW(DpBh(std::vector<double>(10, 0.5), config, Rng(0)),
               ContractViolation);
  config.m = 5;
  config.nu = 0.0;
  EXPECT_THROW(DpBh(std::vector<double>(10, 0.5), config, Rng(0)),
               ContractViolation);
}

TEST(DpBonfTest, Examples) {
  DpBonfConfig config;
  config.kernel = MakeKernel("gaussian");
  config.zero_noise_for_testing = true;
  EXPECT_TRUE(DpBonf(std::vector<double>(50, 0.5), config, Rng(0)).rejected.empty());
  Rng rng(45);
  for (int rep = 0; rep < 200; ++rep) {
    const auto p = SignalInstance(rng, 100, 10, 4.0);
    const auto r = DpBonf(p, config, Rng(rep));
    ASSERT_EQ(r.rejected, testing::BonferroniOracle(p, 0.1));
    ASSERT_FALSE(r.is_private);
  }
}

TEST(DpBonfTest, NoiseCalibration) {
  EXPECT_NEAR(DpBonfNoise(1e-4, 0.24, 10000).scale(), 100 * 1e-4 / 0.24, 1e-15);
  EXPECT_EQ(DpBonfNoise(0.0, 0.24, 10).scale(), 0.0);
}

TEST(DpBonfTest, PowerMatchesClosedForm) {
  // Alternatives p = Phi(xi - beta), so the noisy latent is N(-beta, 1 + sd^2).
  const std::size_t n = 10000, t = 50;
  const double beta = 4.0, alpha = 0.1;
  DpBonfConfig config;
  config.kernel = MakeKernel("gaussian");
  config.delta_g = 1e-4;
  config.budget = PrivacyBudget::Gdp(0.24);
  const double sd = DpBonfNoise(config.delta_g, 0.24, n).scale();
  const double expected =
      NormalCdf((NormalQuantile(alpha / n) + beta) / std::sqrt(1 + sd * sd));
  Rng rng(46);
  double hits = 0;
  const int trials = 40;
  for (int rep = 0; rep < trials; ++rep) {
    const auto p = SignalInstance(rng, n, t, beta);
    const auto r = DpBonf(p, config, rng.Split(rep));
    for (std::size_t i : r.rejected) hits += i < t;
    std::vector<std::size_t> prev;
    for (double a : {0.05, 0.1, 0.2}) {
      const auto cur = DpBonfRethreshold(r, a);
      ASSERT_TRUE(IsSubset(prev, cur));
      prev = cur;
    }
  }
  const double power = hits / (trials * t);
  const double se = std::sqrt(expected * (1 - expected) / (trials * t));
  EXPECT_NEAR(power, expected, 4 * se);
}

}  // namespace
}  // namespace dpadapt
