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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dpadapt/errors.h"

namespace dpadapt {
namespace {

void RequirePValues(std::span<const double> pvalues) {
  for (double p : pvalues) {
    Require(p >= 0.0 && p <= 1.0, "p-values must lie in [0, 1]");
  }
}

}  // namespace

std::vector<std::size_t> Bh(std::span<const double> pvalues, double alpha) {
  Require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  RequirePValues(pvalues);
  const std::size_t n = pvalues.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pvalues[a] < pvalues[b];
  });
  std::size_t k = 0;
  for (std::size_t i = n; i >= 1; --i) {
    if (pvalues[order[i - 1]] <= alpha * static_cast<double>(i) / n) {
      k = i;
      break;
    }
  }
  std::vector<std::size_t> rejected(order.begin(), order.begin() + k);
  std::sort(rejected.begin(), rejected.end());
  return rejected;
}

void BHConfig::Validate(std::size_t n) const {
  Require(nu > 0.0 && nu < 1.0, "nu must lie in (0, 1)");
  Require(eta > 0.0, "eta must be positive");
  Require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  Require(epsilon > 0.0, "epsilon must be positive");
  Require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  Require(m >= 1, "m must be at least 1");
  Require(static_cast<std::size_t>(m) <= n,
          "m must not exceed the number of hypotheses");
}

double DpBhLaplaceScale(const BHConfig& config) {
  if (config.zero_noise_for_testing) return 0.0;
  return config.eta * std::sqrt(10.0 * config.m * std::log(1.0 / config.delta)) /
         config.epsilon;
}

DpBhResult DpBh(std::span<const double> pvalues, const BHConfig& config,
                const Rng& rng) {
  const std::size_t n = pvalues.size();
  config.Validate(n);
  RequirePValues(pvalues);

  DpBhResult out;
  out.lambda = DpBhLaplaceScale(config);
  out.correction = out.lambda * std::log(6.0 * config.m / config.alpha);
  out.is_private = out.lambda > 0.0;
  const NoiseSpec noise = out.is_private
                              ? NoiseSpec::Laplace(out.lambda)
                              : NoiseSpec::ZeroForTesting(NoiseFamily::kLaplace);

  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = std::log(std::max(config.nu, pvalues[i]));
  }
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (int j = 0; j < config.m; ++j) {
    Rng round = rng.Split(static_cast<std::uint64_t>(j));
    std::size_t best_pos = 0;
    double best = 0.0;
    for (std::size_t pos = 0; pos < pool.size(); ++pos) {
      const double value = f[pool[pos]] + noise.Sample(round);
      if (pos == 0 || value < best ||
          (value == best && pool[pos] < pool[best_pos])) {
        best = value;
        best_pos = pos;
      }
    }
    const std::size_t winner = pool[best_pos];
    out.selected.push_back(winner);
    out.noisy_f.push_back(f[winner] + noise.Sample(round));
    pool[best_pos] = pool.back();
    pool.pop_back();
  }
  out.rejected = DpBhRethreshold(out, n, config, config.alpha);
  return out;
}

std::vector<std::size_t> DpBhRethreshold(const DpBhResult& peeled,
                                         std::size_t n, const BHConfig& config,
                                         double alpha) {
  Require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  const double correction =
      DpBhLaplaceScale(config) * std::log(6.0 * config.m / alpha);
  std::size_t k = 0;
  for (std::size_t j = peeled.noisy_f.size(); j >= 1; --j) {
    const double bound =
        std::log(alpha * static_cast<double>(j) / n) - correction;
    if (peeled.noisy_f[j - 1] <= bound) {
      k = j;
      break;
    }
  }
  std::vector<std::size_t> rejected(peeled.selected.begin(),
                                    peeled.selected.begin() + k);
  std::sort(rejected.begin(), rejected.end());
  return rejected;
}

NoiseSpec DpBonfNoise(double delta_g, double mu, std::size_t n) {
  Require(delta_g >= 0.0, "sensitivity must be non-negative");
  Require(mu > 0.0, "mu must be positive");
  Require(n >= 1, "need at least one hypothesis");
  const double sd = std::sqrt(static_cast<double>(n)) * delta_g / mu;
  return sd > 0.0 ? NoiseSpec::Gaussian(sd) : NoiseSpec::ZeroForTesting();
}

DpBonfResult DpBonf(std::span<const double> pvalues,
                    const DpBonfConfig& config, const Rng& rng) {
  Require(config.kernel != nullptr, "a transform kernel is required");
  Require(config.alpha > 0.0 && config.alpha < 1.0,
          "alpha must lie in (0, 1)");
  Require(!pvalues.empty(), "need at least one hypothesis");
  RequirePValues(pvalues);
  const std::size_t n = pvalues.size();
  const NoiseSpec noise =
      config.zero_noise_for_testing
          ? NoiseSpec::ZeroForTesting()
          : DpBonfNoise(config.delta_g, config.budget.mu(), n);
  DpBonfResult out;
  out.noise_sd = noise.scale();
  out.is_private = noise.is_private();
  Rng stream = rng;
  out.noisy_p.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.noisy_p[i] = NoisyPValue(pvalues[i], *config.kernel, noise, stream);
  }
  out.rejected = DpBonfRethreshold(out, config.alpha);
  return out;
}

std::vector<std::size_t> DpBonfRethreshold(const DpBonfResult& released,
                                           double alpha) {
  Require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  const double cutoff = alpha / static_cast<double>(released.noisy_p.size());
  std::vector<std::size_t> rejected;
  for (std::size_t i = 0; i < released.noisy_p.size(); ++i) {
    if (released.noisy_p[i] <= cutoff) rejected.push_back(i);
  }
  return rejected;
}

}  // namespace dpadapt
