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

// Transform kernels (g, G, G^{-1}) and the noisy p-value mechanism
// p~ = G(G^{-1}(p) + Z), plus sensitivity calculators for common tests.

#ifndef DPADAPT_TRANSFORM_H_
#define DPADAPT_TRANSFORM_H_

#include <memory>
#include <string>
#include <string_view>

#include "dpadapt/privacy.h"
#include "dpadapt/rng.h"

namespace dpadapt {

// p-values are clamped to [kPClamp, 1 - kPClamp] before G^{-1} so the
// Gaussian kernel never returns an infinite latent value.
inline constexpr double kPClamp = 1e-15;

double ClampProbability(double p);

// A symmetric density g on (-U, U) with CDF G and quantile G^{-1}.
// Implementations must satisfy G(-x) = 1 - G(x).
class TransformKernel {
 public:
  virtual ~TransformKernel() = default;

  // Name as accepted by MakeKernel().
  virtual std::string name() const = 0;
  virtual double Density(double x) const = 0;
  virtual double Cdf(double x) const = 0;
  virtual double Quantile(double a) const = 0;
  // U; +inf for unbounded support.
  virtual double SupportBound() const = 0;
};

// G = Phi.
class GaussianKernel final : public TransformKernel {
 public:
  std::string name() const override { return "gaussian"; }
  double Density(double x) const override;
  double Cdf(double x) const override;
  double Quantile(double a) const override;
  double SupportBound() const override;
};

// Standard normal truncated to [-M, M].
class TruncatedNormalKernel final : public TransformKernel {
 public:
  explicit TruncatedNormalKernel(double bound);

  std::string name() const override;
  double Density(double x) const override;
  double Cdf(double x) const override;
  double Quantile(double a) const override;
  double SupportBound() const override { return bound_; }

 private:
  double bound_;
  double lower_mass_;  // Phi(-M)
  double mass_;        // Phi(M) - Phi(-M)
};

// "gaussian" or "truncnorm:<M>".
std::shared_ptr<const TransformKernel> MakeKernel(std::string_view spec);

// p~ = G(G^{-1}(clamp(p)) + z) for an explicit latent perturbation z; z == 0
// returns p unchanged.
double PerturbPValue(double p, const TransformKernel& kernel, double z);

// p~ = G(G^{-1}(clamp(p)) + Z), Z drawn from `noise`. Throws
// ContractViolation for p outside [0, 1].
double NoisyPValue(double p, const TransformKernel& kernel,
                   const NoiseSpec& noise, Rng& rng);

// Sensitivity of a p-value on the G^{-1} scale.
class Sensitivity {
 public:
  explicit Sensitivity(double delta_g);
  double value() const { return delta_g_; }

 private:
  double delta_g_;
};

// One-sided bounded-mean test with G = Phi: 2M / sqrt(n).
Sensitivity SensitivityOneSidedMean(double bound_m, int n);

// Two-sided bounded-mean test with a truncated normal kernel on [-M, M]:
// 2 M C / sqrt(n), C bounding 2 phi(t) / g(G^{-1}(2 Phi(t))) on t < 0.
Sensitivity SensitivityTwoSidedMean(double bound_m, int n, double c);

// The ratio 2 phi(t) / g(G^{-1}(2 Phi(t))) for t < 0.
double TwoSidedSensitivityRatio(const TransformKernel& kernel, double t);

// max of TwoSidedSensitivityRatio over t in [-40, 0): scan on a `grid_step`
// grid, then golden-section refinement around the best grid point.
double TwoSidedSensitivityConstant(const TransformKernel& kernel,
                                   double grid_step = 1e-3);

// Degenerate U-statistic test with G = Phi:
// C1 M^2/n + C2 / (1/2 - delta_exp) * (M^2/n)^(1/2 - delta_exp).
// The constants are not certified: they default to 1 as illustrative values.
// Returns a bare value because M = 0 gives a zero bound.
double SensitivityChiSquared(double bound_m, int n, double c1 = 1.0,
                             double c2 = 1.0, double delta_exp = 0.25);

}  // namespace dpadapt

#endif  // DPADAPT_TRANSFORM_H_
