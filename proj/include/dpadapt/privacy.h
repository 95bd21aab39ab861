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

// Privacy budgets, noise calibration, composition, and the conversion between
// mu-GDP and (epsilon, delta)-DP.

#ifndef DPADAPT_PRIVACY_H_
#define DPADAPT_PRIVACY_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpadapt/rng.h"

namespace dpadapt {

struct ApproxDp {
  double epsilon;
  double delta;
};

// A mu-GDP budget, optionally carrying an (epsilon, delta) pair on the curve
// delta = Phi(-eps/mu + mu/2) - e^eps Phi(-eps/mu - mu/2).
class PrivacyBudget {
 public:
  static PrivacyBudget Gdp(double mu);
  // Attaches the delta implied by `epsilon`.
  static PrivacyBudget GdpAtEpsilon(double mu, double epsilon);
  // Solves for mu; remembers that the budget was specified as (eps, delta).
  static PrivacyBudget FromEpsilonDelta(double epsilon, double delta);

  double mu() const { return mu_; }
  const std::optional<ApproxDp>& approx_dp() const { return approx_dp_; }
  bool specified_as_epsilon_delta() const { return from_epsilon_delta_; }

 private:
  PrivacyBudget(double mu, std::optional<ApproxDp> approx, bool from_ed)
      : mu_(mu), approx_dp_(approx), from_epsilon_delta_(from_ed) {}

  double mu_;
  std::optional<ApproxDp> approx_dp_;
  bool from_epsilon_delta_ = false;
};

// sqrt(sum mu_i^2). Throws ContractViolation on an empty list.
PrivacyBudget Compose(std::span<const PrivacyBudget> budgets);

// delta(epsilon) for a mu-GDP mechanism; in [0, 1).
double GdpToDelta(double mu, double epsilon);

// Smallest-error mu in (1e-8, 50] with GdpToDelta(mu, epsilon) == delta.
// Bisection to machine resolution on mu. Throws NoSolutionError when delta
// lies outside [GdpToDelta(1e-8, eps), GdpToDelta(50, eps)].
double DeltaToGdp(double epsilon, double delta);

enum class NoiseFamily { kGaussian, kLaplace };

const char* NoiseFamilyName(NoiseFamily family);
NoiseFamily ParseNoiseFamily(const std::string& name);

// Additive noise on the G^{-1} scale. `scale` is the standard deviation for
// Gaussian noise and the Laplace scale lambda otherwise. A zero scale is only
// produced by ZeroForTesting() or by calibrating a zero sensitivity, and is
// reported as non-private.
class NoiseSpec {
 public:
  static NoiseSpec Gaussian(double sd);
  static NoiseSpec Laplace(double lambda);
  static NoiseSpec ZeroForTesting(NoiseFamily family = NoiseFamily::kGaussian);

  NoiseFamily family() const { return family_; }
  double scale() const { return scale_; }
  bool is_private() const { return scale_ > 0.0; }

  double Sample(Rng& rng) const;

 private:
  NoiseSpec(NoiseFamily family, double scale) : family_(family), scale_(scale) {}

  NoiseFamily family_;
  double scale_;
};

// Report-noisy-min calibration: sd = sqrt(8) * delta_g / mu.
NoiseSpec CalibrateGaussian(double delta_g, double mu);

struct LaplaceCalibration {
  NoiseSpec noise;
  // Non-empty when (epsilon, delta, m) is outside epsilon <= 0.5,
  // delta <= 0.1, m >= 10. The mechanism is still well defined there; only
  // the (epsilon, delta) certificate no longer applies.
  std::vector<std::string> warnings;
};

// lambda = delta_g * sqrt(10 m log(1/delta)) / epsilon. delta_g == 0 gives a
// zero-scale (non-private) spec.
LaplaceCalibration CalibrateLaplace(double delta_g, int m, double epsilon,
                                    double delta);

}  // namespace dpadapt

#endif  // DPADAPT_PRIVACY_H_
