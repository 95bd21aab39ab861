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

#include "dpadapt/selection.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpadapt/errors.h"

namespace dpadapt {
namespace {

void CheckPValues(std::span<const double> pvalues) {
  for (double p : pvalues) {
    Require(p >= 0.0 && p <= 1.0, "p-value outside [0, 1]");
  }
}

}  // namespace

SelectedPValue ReportNoisyMin(std::span<const double> pvalues,
                              const TransformKernel& kernel,
                              const NoiseSpec& noise, Rng& rng) {
  Require(!pvalues.empty(), "report noisy min needs a non-empty list");
  CheckPValues(pvalues);
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < pvalues.size(); ++j) {
    const double noisy = PerturbPValue(pvalues[j], kernel, noise.Sample(rng));
    if (noisy < best_value) {
      best_value = noisy;
      best = j;
    }
  }
  return {best, PerturbPValue(pvalues[best], kernel, noise.Sample(rng))};
}

SelectedPValue ReportNoisyMin(std::span<const double> pvalues,
                              const TransformKernel& kernel, double delta_g,
                              double mu, Rng& rng) {
  return ReportNoisyMin(pvalues, kernel, CalibrateGaussian(delta_g, mu), rng);
}

SelectionResult MirrorPeel(std::span<const double> pvalues,
                           const TransformKernel& kernel,
                           const NoiseSpec& per_round, int m, const Rng& rng) {
  Require(m > 0, "peeling size m must be positive");
  Require(static_cast<std::size_t>(m) <= pvalues.size(),
          "peeling size m exceeds the number of hypotheses");
  CheckPValues(pvalues);

  const std::size_t n = pvalues.size();
  // G^{-1} of the masked values does not change between rounds.
  std::vector<double> masked_latent(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double masked = std::min(pvalues[i], 1.0 - pvalues[i]);
    masked_latent[i] = kernel.Quantile(ClampProbability(masked));
  }
  std::vector<char> in_pool(n, 1);

  SelectionResult result;
  result.is_private = per_round.is_private();
  result.pairs.reserve(m);
  for (int round = 0; round < m; ++round) {
    Rng round_rng = rng.Split(static_cast<std::uint64_t>(round));
    std::size_t best = n;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_pool[i]) continue;
      const double noisy =
          kernel.Cdf(masked_latent[i] + per_round.Sample(round_rng));
      if (best == n || noisy < best_value) {
        best_value = noisy;
        best = i;
      }
    }
    in_pool[best] = 0;
    const double released =
        PerturbPValue(pvalues[best], kernel, per_round.Sample(round_rng));
    result.pairs.push_back({best, released});
  }
  return result;
}

NoiseSpec MirrorPeelNoise(double delta_g, double mu, int m) {
  Require(m > 0, "peeling size m must be positive");
  return CalibrateGaussian(delta_g, mu / std::sqrt(static_cast<double>(m)));
}

SelectionResult MirrorPeel(std::span<const double> pvalues,
                           const TransformKernel& kernel, double delta_g,
                           double mu, int m, const Rng& rng) {
  return MirrorPeel(pvalues, kernel, MirrorPeelNoise(delta_g, mu, m), m, rng);
}

std::vector<PrivacyBudget> MirrorPeelRoundBudgets(double mu, int m) {
  Require(m > 0, "peeling size m must be positive");
  return std::vector<PrivacyBudget>(
      m, PrivacyBudget::Gdp(mu / std::sqrt(static_cast<double>(m))));
}

}  // namespace dpadapt
