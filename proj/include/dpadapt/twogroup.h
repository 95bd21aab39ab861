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

// Two-group working model on partially masked p-values and the greedy
// local-null-probability threshold updater.
//
// Model: H | x ~ Bernoulli(pi(x)), pi(x) = logistic(w . phi(x));
//        p | H = 0 ~ Uniform(0, 1);
//        p | H = 1 ~ Beta(a(x), 1), density a p^(a - 1),
//        a(x) = clamp(exp(v . phi(x)), [0.05, 1]).
//
// A masked observation is the unordered pair {p, 1 - p}. Its likelihood is
// pi (f1(p) + f1(1 - p)) + 2 (1 - pi); a revealed one contributes
// pi f1(p) + 1 - pi.
//
// Support. After private pre-selection every value in the loop has a small
// masked minimum, nulls included, so the plain model above sees only
// "signal-like" pairs and pushes pi to 1 everywhere. The fit therefore
// carries a support half-width c in (0, 0.5]: both densities are
// conditioned on min(p, 1 - p) <= c, i.e. f0 = 1 / (2c) and
// f1 / M1 with M1(a) = c^a + 1 - (1 - c)^a. c = 0.5 is exactly the plain
// model. The updater sets c to the largest masked minimum it is shown.
//
// E-step. For revealed i, H_i = pi f1(p) / (pi f1(p) + (1 - pi) f0 M1)
// and E[log f1(p_i)] = log f1(p_i). For masked i,
//   H_i = pi (f1(p) + f1(1-p)) / (pi (f1(p) + f1(1-p)) + 2 (1 - pi) f0 M1),
// and E[log f1] is the f1-weighted average of log f1(p) and log f1(1 - p).
// Because log f1(q) = log a + (a - 1) log q, that average only needs
//   ell_i = w_i log p + (1 - w_i) log(1 - p),  w_i = f1(p) / (f1(p) + f1(1-p)),
// with w_i taken from the current fit. ell_i = log p_i for revealed i.
//
// M-step. Two decoupled problems solved by damped Newton:
//   max_w sum H_i log pi_i + (1 - H_i) log(1 - pi_i)
//   max_v sum H_i (log a_i + (a_i - 1) ell_i - log M1(a_i)).
// Steps are only accepted if they increase the M-step objective, so the
// observed-data log-likelihood never decreases across iterations.

#ifndef DPADAPT_TWOGROUP_H_
#define DPADAPT_TWOGROUP_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "dpadapt/data.h"
#include "dpadapt/engine.h"

namespace dpadapt {

inline constexpr double kShapeMin = 0.05;
inline constexpr double kShapeMax = 1.0;
// Linear predictors of pi are clamped to +-kLogitBound so pi stays in (0, 1).
inline constexpr double kLogitBound = 35.0;

enum class BasisKind {
  kAuto,       // by covariate dimension: 0 -> intercept, 2 -> quadratic,
               // anything else -> linear
  kIntercept,  // 1
  kLinear,     // 1, z_1, ..., z_d
  kQuadratic,  // 1, z_1, z_2, z_1^2, z_2^2, z_1 z_2 (two covariates only)
};

// Row-major n x k matrix of features phi(x_i).
class DesignMatrix {
 public:
  DesignMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {values_.data() + i * cols_, cols_};
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

// Feature map phi with covariates standardized by column mean and sd.
class FeatureMap {
 public:
  static FeatureMap Fit(const CovariateMatrix& x,
                        BasisKind kind = BasisKind::kAuto);

  BasisKind kind() const { return kind_; }
  std::size_t size() const;
  DesignMatrix Design(const CovariateMatrix& x) const;
  // Design with `rows` intercept-only rows, for covariate-free data.
  static DesignMatrix InterceptOnly(std::size_t rows);

  nlohmann::json ToJson() const;

 private:
  BasisKind kind_ = BasisKind::kIntercept;
  std::vector<double> mean_;
  std::vector<double> scale_;
};

struct TwoGroupFit {
  std::vector<double> pi_weights;
  std::vector<double> f1_weights;
  // Support half-width c; see the module comment. Not fitted.
  double support = 0.5;
  // Penalty (ridge / 2) |w_{1..}|^2 on the non-intercept pi weights. Zero
  // gives plain maximum likelihood.
  double ridge = 0.0;
  int em_iters = 0;
  // Observed-data log-likelihood minus the ridge penalty, before the first
  // and after each iteration.
  std::vector<double> loglik_trace;

  // logit(pi) = logit(0.1) and log(a) = log(0.5); other weights zero.
  static TwoGroupFit Initial(std::size_t features);

  double Pi(std::span<const double> phi) const;
  double Shape(std::span<const double> phi) const;
  // log f0 on the support, -log(2c).
  double LogNullDensity() const;

  nlohmann::json ToJson() const;
};

// a p^(a - 1), with p clamped into [1e-15, 1 - 1e-15].
double AltDensity(double p, double shape);

// M1(a) = P(min(p, 1 - p) <= c) under Beta(a, 1); 1 for c >= 0.5.
double AltSupportMass(double shape, double support);

struct EStepResult {
  std::vector<double> h;         // responsibilities, in [0, 1]
  std::vector<double> log_stat;  // ell_i
};

EStepResult EStep(std::span<const MaskedPValue> pvalues,
                  const DesignMatrix& design, const TwoGroupFit& fit);

// One M-step from `current`, given E-step output.
TwoGroupFit MStep(const DesignMatrix& design, const EStepResult& estep,
                  const TwoGroupFit& current);

double ObservedLogLikelihood(std::span<const MaskedPValue> pvalues,
                             const DesignMatrix& design,
                             const TwoGroupFit& fit);

// k EM iterations from `init`. Throws ContractViolation for k < 1 or empty
// input.
TwoGroupFit EmFit(std::span<const MaskedPValue> pvalues,
                  const DesignMatrix& design, const TwoGroupFit& init, int k);

// P(H = 0 | x, p') = (1 - pi) / (pi f1(p') + 1 - pi), with f0 and f1
// conditioned on the fit's support (no change for c = 0.5).
double NullProbability(std::span<const double> phi, double p_prime,
                       const TwoGroupFit& fit);

// log of the null odds, log((1 - pi) f0 / (pi f1(p'))). A strictly
// increasing function of NullProbability that does not saturate when pi is
// close to 0 or 1.
double NullLogOdds(std::span<const double> phi, double p_prime,
                   const TwoGroupFit& fit);

// Among masked hypotheses (the rejection candidates), lowers the threshold of
// the one with the largest null probability at p' = masked_min, ranked by
// NullLogOdds, to just below its masked minimum. Ties go to the lowest slot.
// nullopt when no candidate can be removed.
std::optional<std::vector<double>> GreedyUpdate(
    std::span<const double> thresholds, std::span<const MaskedPValue> pvalues,
    const DesignMatrix& design, const TwoGroupFit& fit);

struct EmSchedule {
  int iterations = 5;
  // Refit after this many removals; 0 means max(1, floor(m / 20)).
  int refit_every = 0;
  BasisKind basis = BasisKind::kAuto;
  // Use the largest masked minimum as the support half-width; false pins
  // c = 0.5.
  bool adaptive_support = true;
  // Ridge on the pi weights. Perfectly separable covariate regions otherwise
  // send the logistic weights off to infinity along an arbitrary direction.
  double ridge = 0.3;
};

// Largest masked minimum, floored at kMinSupport; 0.5 caps it.
inline constexpr double kMinSupport = 1e-12;
double SupportFromMasked(std::span<const MaskedPValue> pvalues);

// Greedy updater that refits the two-group model on the schedule above.
class GreedyTwoGroupUpdater final : public ThresholdUpdater {
 public:
  explicit GreedyTwoGroupUpdater(EmSchedule schedule = {});

  std::optional<std::vector<double>> Update(const UpdaterInput& input) override;
  nlohmann::json Diagnostics() const override;

  const std::optional<TwoGroupFit>& fit() const { return fit_; }
  int refits() const { return refits_; }

 private:
  EmSchedule schedule_;
  std::optional<FeatureMap> features_;
  std::optional<DesignMatrix> design_;
  std::optional<TwoGroupFit> fit_;
  std::vector<double> scores_;  // NullLogOdds under fit_
  int refit_every_ = 1;
  int removals_ = 0;
  int refits_ = 0;
};

}  // namespace dpadapt

#endif  // DPADAPT_TWOGROUP_H_
