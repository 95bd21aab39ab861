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

// Comparison procedures: Benjamini-Hochberg, its private peeling variant,
// and a private Bonferroni arm.

#ifndef DPADAPT_BASELINES_H_
#define DPADAPT_BASELINES_H_

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "dpadapt/privacy.h"
#include "dpadapt/rng.h"
#include "dpadapt/transform.h"

namespace dpadapt {

// Step-up BH: rejects every p <= max{p_(i) : p_(i) <= alpha i / n}.
// Returns indices in ascending order.
std::vector<std::size_t> Bh(std::span<const double> pvalues, double alpha);

struct BHConfig {
  double nu = 5e-6;     // truncation, f = log max(nu, p)
  double eta = 1e-4;    // multiplicative sensitivity
  double alpha = 0.1;
  double epsilon = 0.5;
  double delta = 1e-3;
  int m = 500;          // peeling invocations
  // Zero noise and zero correction term; output is flagged non-private.
  bool zero_noise_for_testing = false;

  void Validate(std::size_t n) const;
};

// eta * sqrt(10 m log(1/delta)) / epsilon, or 0 in test mode.
double DpBhLaplaceScale(const BHConfig& config);

struct DpBhResult {
  // Ascending dataset indices; always a prefix of the peeling order.
  std::vector<std::size_t> rejected;
  // Peeling order and released noisy f values.
  std::vector<std::size_t> selected;
  std::vector<double> noisy_f;
  double lambda = 0.0;
  double correction = 0.0;  // lambda * log(6 m / alpha)
  bool is_private = true;
};

// Laplace peeling of the m smallest log-truncated p-values, then a scan
// j = m..1 that rejects the first j selections at the first j with
// f~_j <= log(alpha j / n) - correction. Round j draws from rng.Split(j).
DpBhResult DpBh(std::span<const double> pvalues, const BHConfig& config,
                const Rng& rng);

// Same peeling release, rethresholded at another alpha. Only the scan
// depends on alpha, so this is post-processing of `peeled`.
std::vector<std::size_t> DpBhRethreshold(const DpBhResult& peeled,
                                         std::size_t n, const BHConfig& config,
                                         double alpha);

struct DpBonfConfig {
  std::shared_ptr<const TransformKernel> kernel;
  double delta_g = 1e-4;
  PrivacyBudget budget = PrivacyBudget::Gdp(1.0);
  double alpha = 0.1;
  bool zero_noise_for_testing = false;
};

// Reconstructed private Bonferroni: every p-value is released once as
// G(G^{-1}(p) + Z) with Gaussian Z of sd sqrt(n) delta_g / mu (n releases
// composed to the full budget), and p~ <= alpha / n is rejected.
struct DpBonfResult {
  std::vector<std::size_t> rejected;
  // The released value of every hypothesis.
  std::vector<double> noisy_p;
  double noise_sd = 0.0;
  bool is_private = true;
};

DpBonfResult DpBonf(std::span<const double> pvalues,
                    const DpBonfConfig& config, const Rng& rng);

// Indices with noisy_p <= alpha / n; post-processing of the release.
std::vector<std::size_t> DpBonfRethreshold(const DpBonfResult& released,
                                           double alpha);

// Per-release noise of the reconstruction above.
NoiseSpec DpBonfNoise(double delta_g, double mu, std::size_t n);

}  // namespace dpadapt

#endif  // DPADAPT_BASELINES_H_
