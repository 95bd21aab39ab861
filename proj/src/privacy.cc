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

#include "dpadapt/privacy.h"

#include <cmath>
#include <sstream>

#include "dpadapt/errors.h"
#include "dpadapt/normal.h"

namespace dpadapt {
namespace {

constexpr double kMuLower = 1e-8;
constexpr double kMuUpper = 50.0;

bool PositiveFinite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

PrivacyBudget PrivacyBudget::Gdp(double mu) {
  Require(PositiveFinite(mu), "mu must be positive and finite");
  return PrivacyBudget(mu, std::nullopt, false);
}

PrivacyBudget PrivacyBudget::GdpAtEpsilon(double mu, double epsilon) {
  const double delta = GdpToDelta(mu, epsilon);
  return PrivacyBudget(mu, ApproxDp{epsilon, delta}, false);
}

PrivacyBudget PrivacyBudget::FromEpsilonDelta(double epsilon, double delta) {
  const double mu = DeltaToGdp(epsilon, delta);
  return PrivacyBudget(mu, ApproxDp{epsilon, delta}, true);
}

PrivacyBudget Compose(std::span<const PrivacyBudget> budgets) {
  Require(!budgets.empty(), "compose needs at least one budget");
  double sum_sq = 0.0;
  for (const auto& b : budgets) sum_sq += b.mu() * b.mu();
  return PrivacyBudget::Gdp(std::sqrt(sum_sq));
}

double GdpToDelta(double mu, double epsilon) {
  Require(PositiveFinite(mu), "mu must be positive and finite");
  Require(PositiveFinite(epsilon), "epsilon must be positive and finite");
  const double a = -epsilon / mu + mu / 2.0;
  const double b = -epsilon / mu - mu / 2.0;
  // delta = Phi(a) * (1 - exp(eps + log Phi(b) - log Phi(a))); the log form
  // avoids cancelling two nearly equal tail probabilities when eps/mu is
  // large.
  const double log_ratio = epsilon + NormalLogCdf(b) - NormalLogCdf(a);
  const double delta = NormalCdf(a) * -std::expm1(log_ratio);
  if (!(delta > 0.0)) return 0.0;
  return delta < 1.0 ? delta : std::nextafter(1.0, 0.0);
}

double DeltaToGdp(double epsilon, double delta) {
  Require(PositiveFinite(epsilon), "epsilon must be positive and finite");
  Require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  double lo = kMuLower;
  double hi = kMuUpper;
  if (delta < GdpToDelta(lo, epsilon) || delta > GdpToDelta(hi, epsilon)) {
    std::ostringstream msg;
    msg << "no mu in (" << kMuLower << ", " << kMuUpper
        << "] gives delta=" << delta << " at epsilon=" << epsilon;
    throw NoSolutionError(msg.str());
  }
  // delta is increasing in mu; stop when the bracket stops shrinking.
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (GdpToDelta(mid, epsilon) < delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double d_lo = std::abs(GdpToDelta(lo, epsilon) - delta);
  const double d_hi = std::abs(GdpToDelta(hi, epsilon) - delta);
  return d_lo < d_hi ? lo : hi;
}

const char* NoiseFamilyName(NoiseFamily family) {
  return family == NoiseFamily::kGaussian ? "gaussian" : "laplace";
}

NoiseFamily ParseNoiseFamily(const std::string& name) {
  if (name == "gaussian") return NoiseFamily::kGaussian;
  if (name == "laplace") return NoiseFamily::kLaplace;
  throw ContractViolation("unknown noise family '" + name + "'");
}

NoiseSpec NoiseSpec::Gaussian(double sd) {
  Require(PositiveFinite(sd), "Gaussian noise sd must be positive");
  return NoiseSpec(NoiseFamily::kGaussian, sd);
}

NoiseSpec NoiseSpec::Laplace(double lambda) {
  Require(PositiveFinite(lambda), "Laplace noise scale must be positive");
  return NoiseSpec(NoiseFamily::kLaplace, lambda);
}

NoiseSpec NoiseSpec::ZeroForTesting(NoiseFamily family) {
  return NoiseSpec(family, 0.0);
}

double NoiseSpec::Sample(Rng& rng) const {
  if (scale_ == 0.0) return 0.0;
  return scale_ * (family_ == NoiseFamily::kGaussian ? rng.Normal()
                                                     : rng.Laplace());
}

NoiseSpec CalibrateGaussian(double delta_g, double mu) {
  Require(PositiveFinite(delta_g), "sensitivity must be positive");
  Require(PositiveFinite(mu), "mu must be positive");
  return NoiseSpec::Gaussian(std::sqrt(8.0) * delta_g / mu);
}

LaplaceCalibration CalibrateLaplace(double delta_g, int m, double epsilon,
                                    double delta) {
  Require(std::isfinite(delta_g) && delta_g >= 0.0,
          "sensitivity must be non-negative");
  Require(m > 0, "m must be positive");
  Require(PositiveFinite(epsilon), "epsilon must be positive");
  Require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  LaplaceCalibration out{NoiseSpec::ZeroForTesting(NoiseFamily::kLaplace), {}};
  if (epsilon > 0.5) out.warnings.push_back("epsilon > 0.5");
  if (delta > 0.1) out.warnings.push_back("delta > 0.1");
  if (m < 10) out.warnings.push_back("m < 10");
  const double lambda =
      delta_g * std::sqrt(10.0 * m * std::log(1.0 / delta)) / epsilon;
  if (lambda > 0.0) out.noise = NoiseSpec::Laplace(lambda);
  return out;
}

}  // namespace dpadapt
