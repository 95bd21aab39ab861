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

#include "dpadapt/transform.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "dpadapt/errors.h"
#include "dpadapt/normal.h"

namespace dpadapt {

double ClampProbability(double p) {
  return std::clamp(p, kPClamp, 1.0 - kPClamp);
}

double GaussianKernel::Density(double x) const { return NormalPdf(x); }
double GaussianKernel::Cdf(double x) const { return NormalCdf(x); }
double GaussianKernel::Quantile(double a) const { return NormalQuantile(a); }
double GaussianKernel::SupportBound() const {
  return std::numeric_limits<double>::infinity();
}

TruncatedNormalKernel::TruncatedNormalKernel(double bound) : bound_(bound) {
  Require(std::isfinite(bound) && bound > 0.0,
          "truncation bound must be positive and finite");
  lower_mass_ = NormalCdf(-bound);
  mass_ = 1.0 - 2.0 * lower_mass_;
}

std::string TruncatedNormalKernel::name() const {
  std::ostringstream out;
  out.precision(17);
  out << "truncnorm:" << bound_;
  return out.str();
}

double TruncatedNormalKernel::Density(double x) const {
  if (std::abs(x) > bound_) return 0.0;
  return NormalPdf(x) / mass_;
}

double TruncatedNormalKernel::Cdf(double x) const {
  if (x <= -bound_) return 0.0;
  if (x >= bound_) return 1.0;
  // Evaluate on the lower half and reflect so G(-x) = 1 - G(x) holds to
  // rounding.
  if (x > 0.0) return 1.0 - Cdf(-x);
  return (NormalCdf(x) - lower_mass_) / mass_;
}

double TruncatedNormalKernel::Quantile(double a) const {
  if (a <= 0.0) return -bound_;
  if (a >= 1.0) return bound_;
  if (a > 0.5) return -Quantile(1.0 - a);
  return std::max(-bound_, NormalQuantile(lower_mass_ + a * mass_));
}

std::shared_ptr<const TransformKernel> MakeKernel(std::string_view spec) {
  if (spec == "gaussian") return std::make_shared<GaussianKernel>();
  constexpr std::string_view kTrunc = "truncnorm:";
  if (spec.substr(0, kTrunc.size()) == kTrunc) {
    const std::string_view arg = spec.substr(kTrunc.size());
    double bound = 0.0;
    const auto [ptr, ec] =
        std::from_chars(arg.data(), arg.data() + arg.size(), bound);
    if (ec != std::errc() || ptr != arg.data() + arg.size()) {
      throw ContractViolation("bad truncation bound in kernel '" +
                              std::string(spec) + "'");
    }
    return std::make_shared<TruncatedNormalKernel>(bound);
  }
  throw ContractViolation("unknown kernel '" + std::string(spec) +
                          "' (expected gaussian or truncnorm:<M>)");
}

double PerturbPValue(double p, const TransformKernel& kernel, double z) {
  Require(p >= 0.0 && p <= 1.0, "p-value outside [0, 1]");
  // G(G^{-1}(p)) is only p up to rounding; keep zero noise an exact identity.
  if (z == 0.0) return p;
  return kernel.Cdf(kernel.Quantile(ClampProbability(p)) + z);
}

double NoisyPValue(double p, const TransformKernel& kernel,
                   const NoiseSpec& noise, Rng& rng) {
  return PerturbPValue(p, kernel, noise.Sample(rng));
}

Sensitivity::Sensitivity(double delta_g) : delta_g_(delta_g) {
  Require(std::isfinite(delta_g) && delta_g > 0.0,
          "sensitivity must be positive and finite");
}

Sensitivity SensitivityOneSidedMean(double bound_m, int n) {
  Require(bound_m > 0.0, "M must be positive");
  Require(n >= 1, "n must be at least 1");
  return Sensitivity(2.0 * bound_m / std::sqrt(static_cast<double>(n)));
}

Sensitivity SensitivityTwoSidedMean(double bound_m, int n, double c) {
  Require(bound_m > 0.0, "M must be positive");
  Require(n >= 1, "n must be at least 1");
  Require(c > 0.0, "C must be positive");
  return Sensitivity(2.0 * bound_m * c / std::sqrt(static_cast<double>(n)));
}

double TwoSidedSensitivityRatio(const TransformKernel& kernel, double t) {
  Require(t < 0.0, "ratio is defined for t < 0");
  const double two_tail = 2.0 * NormalCdf(t);
  const double density = kernel.Density(kernel.Quantile(two_tail));
  if (density <= 0.0) return 0.0;
  return 2.0 * NormalPdf(t) / density;
}

double TwoSidedSensitivityConstant(const TransformKernel& kernel,
                                   double grid_step) {
  Require(grid_step > 0.0 && grid_step < 1.0, "grid step must be in (0, 1)");
  constexpr double kLeft = -40.0;
  const auto ratio = [&](double t) {
    return TwoSidedSensitivityRatio(kernel, t);
  };
  // Grid points t_k = kLeft + k * step, all strictly below zero.
  const long steps = static_cast<long>(std::ceil(-kLeft / grid_step));
  long best_k = 0;
  double best = ratio(kLeft);
  for (long k = 1; k < steps; ++k) {
    const double t = kLeft + k * grid_step;
    if (t >= 0.0) break;
    const double r = ratio(t);
    if (r > best) {
      best = r;
      best_k = k;
    }
  }
  // Golden-section search on the bracket around the best grid point; the
  // right end is kept strictly negative.
  double lo = kLeft + (best_k - 1) * grid_step;
  double hi = std::min(kLeft + (best_k + 1) * grid_step,
                       -std::numeric_limits<double>::min());
  lo = std::max(lo, kLeft);
  constexpr double kInvPhi = 0.61803398874989484820;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = ratio(x1);
  double f2 = ratio(x2);
  for (int iter = 0; iter < 200 && hi - lo > 1e-14; ++iter) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = ratio(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = ratio(x1);
    }
  }
  return std::max({best, f1, f2, ratio(hi)});
}

double SensitivityChiSquared(double bound_m, int n, double c1, double c2,
                             double delta_exp) {
  Require(bound_m >= 0.0, "M must be non-negative");
  Require(n >= 1, "n must be at least 1");
  Require(delta_exp > 0.0 && delta_exp < 0.5,
          "delta exponent must lie in (0, 1/2)");
  Require(c1 > 0.0 && c2 > 0.0, "constants must be positive");
  const double r = bound_m * bound_m / n;
  return c1 * r + c2 / (0.5 - delta_exp) * std::pow(r, 0.5 - delta_exp);
}

}  // namespace dpadapt
