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

// Private selection: Report Noisy Min and Mirror Peeling.

#ifndef DPADAPT_SELECTION_H_
#define DPADAPT_SELECTION_H_

#include <cstddef>
#include <span>
#include <vector>

#include "dpadapt/privacy.h"
#include "dpadapt/rng.h"
#include "dpadapt/transform.h"

namespace dpadapt {

struct SelectedPValue {
  std::size_t index;
  double noisy_p;
};

struct SelectionResult {
  // In selection order; indices are distinct.
  std::vector<SelectedPValue> pairs;
  // False when the noise had zero scale (test mode).
  bool is_private = true;

  std::size_t m() const { return pairs.size(); }
};

// Perturbs every value as G(G^{-1}(p_j) + Z_j), returns the argmin (lowest
// index on ties) together with a fresh, independently noised release of the
// winner's value. Draws n + 1 noise values from `rng`. Throws on an empty
// list or a value outside [0, 1].
SelectedPValue ReportNoisyMin(std::span<const double> pvalues,
                              const TransformKernel& kernel,
                              const NoiseSpec& noise, Rng& rng);

// Gaussian noise with variance 8 delta_g^2 / mu^2.
SelectedPValue ReportNoisyMin(std::span<const double> pvalues,
                              const TransformKernel& kernel, double delta_g,
                              double mu, Rng& rng);

// m rounds of report noisy min on the masked values min(p, 1 - p) over the
// remaining pool, each round with noise `per_round`. The released value for
// the round winner perturbs the original p (not its masked minimum). Round j
// draws from rng.Split(j), so results depend only on the seed.
SelectionResult MirrorPeel(std::span<const double> pvalues,
                           const TransformKernel& kernel,
                           const NoiseSpec& per_round, int m, const Rng& rng);

// Gaussian mirror peeling under a total mu-GDP budget: each round runs at
// mu / sqrt(m), i.e. noise variance 8 m delta_g^2 / mu^2.
SelectionResult MirrorPeel(std::span<const double> pvalues,
                           const TransformKernel& kernel, double delta_g,
                           double mu, int m, const Rng& rng);

// Per-round noise for Gaussian mirror peeling.
NoiseSpec MirrorPeelNoise(double delta_g, double mu, int m);

// The m per-round budgets mu / sqrt(m); they compose back to mu.
std::vector<PrivacyBudget> MirrorPeelRoundBudgets(double mu, int m);

}  // namespace dpadapt

#endif  // DPADAPT_SELECTION_H_
