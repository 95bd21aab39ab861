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

#include "dpadapt/twogroup.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "dpadapt/errors.h"
#include "dpadapt/transform.h"

namespace dpadapt {
namespace {

constexpr int kNewtonMaxIter = 25;
constexpr double kNewtonGradTol = 1e-8;
constexpr double kRidge = 1e-6;
constexpr int kMaxHalvings = 40;
// exp() cap for the unclamped shape when forming Newton directions.
constexpr double kShapeLogCap = 50.0;

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

double LogClamped(double p) { return std::log(ClampProbability(p)); }

double ClampedLogit(std::span<const double> w, std::span<const double> phi) {
  return std::clamp(Dot(w, phi), -kLogitBound, kLogitBound);
}

double ClampedShape(std::span<const double> v, std::span<const double> phi) {
  return std::clamp(std::exp(std::min(Dot(v, phi), kShapeLogCap)), kShapeMin,
                    kShapeMax);
}

// log(pi) and log(1 - pi) for a clamped logit.
double LogPi(double eta) { return -std::log1p(std::exp(-eta)); }
double LogOneMinusPi(double eta) { return -std::log1p(std::exp(eta)); }

double RidgePenalty(std::span<const double> w, double ridge) {
  double ss = 0.0;
  for (std::size_t j = 1; j < w.size(); ++j) ss += w[j] * w[j];
  return 0.5 * ridge * ss;
}

double PiObjective(const DesignMatrix& design, std::span<const double> h,
                   double ridge, std::span<const double> w) {
  double q = -RidgePenalty(w, ridge);
  for (std::size_t i = 0; i < design.rows(); ++i) {
    const double eta = ClampedLogit(w, design.row(i));
    q += h[i] * LogPi(eta) + (1.0 - h[i]) * LogOneMinusPi(eta);
  }
  return q;
}

// log M1(a) and its first two derivatives in a.
struct SupportMassTerms {
  double log_mass;
  double d1;  // M1'(a) / M1(a)
  double d2;  // M1''(a) / M1(a)
};

SupportMassTerms MassTerms(double a, double support) {
  if (support >= 0.5) return {0.0, 0.0, 0.0};
  const double log_c = std::log(support);
  const double log_1mc = std::log1p(-support);
  const double lower = std::exp(a * log_c);
  const double upper = std::exp(a * log_1mc);
  // c^a + 1 - (1 - c)^a without cancellation for small c.
  const double mass = lower - std::expm1(a * log_1mc);
  return {std::log(mass), (lower * log_c - upper * log_1mc) / mass,
          (lower * log_c * log_c - upper * log_1mc * log_1mc) / mass};
}

double ShapeObjective(const DesignMatrix& design, std::span<const double> h,
                      std::span<const double> ell, double support,
                      std::span<const double> v) {
  double q = 0.0;
  for (std::size_t i = 0; i < design.rows(); ++i) {
    const double a = ClampedShape(v, design.row(i));
    q += h[i] * (std::log(a) + (a - 1.0) * ell[i] -
                 MassTerms(a, support).log_mass);
  }
  return q;
}

// Fills gradient and negative Hessian of an objective at `params`.
using DerivativeFn = std::function<void(const std::vector<double>& params,
                                        Eigen::VectorXd& grad,
                                        Eigen::MatrixXd& neg_hess)>;
using ObjectiveFn = std::function<double(const std::vector<double>& params)>;

// Damped Newton ascent. Only steps that strictly increase `objective` are
// taken, so the result is never worse than the start.
std::vector<double> NewtonAscent(std::vector<double> params,
                                 const ObjectiveFn& objective,
                                 const DerivativeFn& derivatives) {
  const Eigen::Index k = static_cast<Eigen::Index>(params.size());
  Eigen::VectorXd grad(k);
  Eigen::MatrixXd neg_hess(k, k);
  double current = objective(params);
  for (int iter = 0; iter < kNewtonMaxIter; ++iter) {
    derivatives(params, grad, neg_hess);
    if (!grad.allFinite() || grad.norm() < kNewtonGradTol) break;
    Eigen::VectorXd direction;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(neg_hess);
    bool ok = ldlt.info() == Eigen::Success && ldlt.isPositive() &&
              (ldlt.vectorD().array() > 0.0).all();
    if (ok) {
      direction = ldlt.solve(grad);
      ok = direction.allFinite();
    }
    if (!ok) {
      // Singular or indefinite system: fall back to a small ridge.
      const Eigen::MatrixXd ridged =
          neg_hess + kRidge * Eigen::MatrixXd::Identity(k, k);
      Eigen::LDLT<Eigen::MatrixXd> ridge_ldlt(ridged);
      direction = ridge_ldlt.solve(grad);
      if (ridge_ldlt.info() != Eigen::Success || !direction.allFinite()) {
        direction = grad;
      }
    }
    if (direction.dot(grad) <= 0.0) direction = grad;

    bool improved = false;
    double step = 1.0;
    std::vector<double> trial(params.size());
    for (int h = 0; h < kMaxHalvings; ++h, step *= 0.5) {
      for (Eigen::Index j = 0; j < k; ++j) {
        trial[j] = params[j] + step * direction[j];
      }
      const double value = objective(trial);
      if (std::isfinite(value) && value > current) {
        params = trial;
        current = value;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return params;
}

}  // namespace

FeatureMap FeatureMap::Fit(const CovariateMatrix& x, BasisKind kind) {
  FeatureMap map;
  const std::size_t d = x.dim();
  if (kind == BasisKind::kAuto) {
    kind = d == 0   ? BasisKind::kIntercept
           : d == 2 ? BasisKind::kQuadratic
                    : BasisKind::kLinear;
  }
  Require(kind != BasisKind::kQuadratic || d == 2,
          "the quadratic basis needs exactly two covariates");
  Require(kind == BasisKind::kIntercept || d > 0,
          "a non-intercept basis needs covariates");
  map.kind_ = kind;
  map.mean_.assign(d, 0.0);
  map.scale_.assign(d, 1.0);
  const std::size_t n = x.rows();
  if (n == 0) return map;
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += x.row(i)[j];
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dev = x.row(i)[j] - mean;
      ss += dev * dev;
    }
    const double sd = std::sqrt(ss / n);
    map.mean_[j] = mean;
    map.scale_[j] = sd > 0.0 ? sd : 1.0;
  }
  return map;
}

std::size_t FeatureMap::size() const {
  switch (kind_) {
    case BasisKind::kIntercept:
      return 1;
    case BasisKind::kQuadratic:
      return 6;
    default:
      return 1 + mean_.size();
  }
}

DesignMatrix FeatureMap::Design(const CovariateMatrix& x) const {
  Require(kind_ == BasisKind::kIntercept || x.dim() == mean_.size(),
          "covariate dimension does not match the feature map");
  DesignMatrix out(x.rows(), size());
  std::vector<double> z(mean_.size());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto phi = out.row(i);
    phi[0] = 1.0;
    if (kind_ == BasisKind::kIntercept) continue;
    const auto raw = x.row(i);
    for (std::size_t j = 0; j < z.size(); ++j) {
      z[j] = (raw[j] - mean_[j]) / scale_[j];
    }
    for (std::size_t j = 0; j < z.size(); ++j) phi[1 + j] = z[j];
    if (kind_ == BasisKind::kQuadratic) {
      phi[3] = z[0] * z[0];
      phi[4] = z[1] * z[1];
      phi[5] = z[0] * z[1];
    }
  }
  return out;
}

DesignMatrix FeatureMap::InterceptOnly(std::size_t rows) {
  DesignMatrix out(rows, 1);
  for (std::size_t i = 0; i < rows; ++i) out.row(i)[0] = 1.0;
  return out;
}

nlohmann::json FeatureMap::ToJson() const {
  const char* names[] = {"auto", "intercept", "linear", "quadratic"};
  return {{"basis", names[static_cast<int>(kind_)]},
          {"mean", mean_},
          {"scale", scale_}};
}

TwoGroupFit TwoGroupFit::Initial(std::size_t features) {
  Require(features >= 1, "at least the intercept feature is required");
  TwoGroupFit fit;
  fit.pi_weights.assign(features, 0.0);
  fit.f1_weights.assign(features, 0.0);
  fit.pi_weights[0] = std::log(0.1 / 0.9);
  fit.f1_weights[0] = std::log(0.5);
  return fit;
}

double TwoGroupFit::Pi(std::span<const double> phi) const {
  return 1.0 / (1.0 + std::exp(-ClampedLogit(pi_weights, phi)));
}

double TwoGroupFit::Shape(std::span<const double> phi) const {
  return ClampedShape(f1_weights, phi);
}

double TwoGroupFit::LogNullDensity() const {
  return support >= 0.5 ? 0.0 : -std::log(2.0 * support);
}

nlohmann::json TwoGroupFit::ToJson() const {
  return {{"pi_weights", pi_weights},
          {"f1_weights", f1_weights},
          {"support", support},
          {"em_iters", em_iters},
          {"loglik_trace", loglik_trace}};
}

double AltDensity(double p, double shape) {
  return shape * std::exp((shape - 1.0) * LogClamped(p));
}

double AltSupportMass(double shape, double support) {
  Require(support > 0.0, "support must be positive");
  return std::exp(MassTerms(shape, support).log_mass);
}

EStepResult EStep(std::span<const MaskedPValue> pvalues,
                  const DesignMatrix& design, const TwoGroupFit& fit) {
  Require(design.rows() == pvalues.size(), "design rows must match p-values");
  EStepResult out;
  out.h.resize(pvalues.size());
  out.log_stat.resize(pvalues.size());
  const double null_scale = std::exp(fit.LogNullDensity());
  for (std::size_t i = 0; i < pvalues.size(); ++i) {
    const auto phi = design.row(i);
    const double pi = fit.Pi(phi);
    const double a = fit.Shape(phi);
    // (1 - pi) f0 M1: the null term on the alternative's scale.
    const double null_term = (1.0 - pi) * null_scale *
                             std::exp(MassTerms(a, fit.support).log_mass);
    if (pvalues[i].revealed()) {
      const double p = *pvalues[i].revealed();
      const double f = AltDensity(p, a);
      out.h[i] = pi * f / (pi * f + null_term);
      out.log_stat[i] = LogClamped(p);
    } else {
      const double p = pvalues[i].masked_min();
      const double fp = AltDensity(p, a);
      const double fq = AltDensity(1.0 - p, a);
      const double alt = pi * (fp + fq);
      out.h[i] = alt / (alt + 2.0 * null_term);
      const double w = fp / (fp + fq);
      out.log_stat[i] = w * LogClamped(p) + (1.0 - w) * LogClamped(1.0 - p);
    }
  }
  return out;
}

TwoGroupFit MStep(const DesignMatrix& design, const EStepResult& estep,
                  const TwoGroupFit& current) {
  const std::size_t n = design.rows();
  const std::size_t k = design.cols();
  Require(estep.h.size() == n && estep.log_stat.size() == n,
          "E-step output does not match the design");
  const std::span<const double> h = estep.h;
  const std::span<const double> ell = estep.log_stat;

  TwoGroupFit next = current;

  next.pi_weights = NewtonAscent(
      current.pi_weights,
      [&](const std::vector<double>& w) {
        return PiObjective(design, h, current.ridge, w);
      },
      [&](const std::vector<double>& w, Eigen::VectorXd& grad,
          Eigen::MatrixXd& neg_hess) {
        grad.setZero(k);
        neg_hess.setZero(k, k);
        for (std::size_t i = 0; i < n; ++i) {
          const auto phi = design.row(i);
          const double pi =
              1.0 / (1.0 + std::exp(-ClampedLogit(w, phi)));
          const Eigen::Map<const Eigen::VectorXd> x(phi.data(), k);
          grad += (h[i] - pi) * x;
          neg_hess.noalias() += pi * (1.0 - pi) * x * x.transpose();
        }
        for (std::size_t j = 1; j < k; ++j) {
          grad[j] -= current.ridge * w[j];
          neg_hess(j, j) += current.ridge;
        }
      });

  next.f1_weights = NewtonAscent(
      current.f1_weights,
      [&](const std::vector<double>& v) {
        return ShapeObjective(design, h, ell, current.support, v);
      },
      [&](const std::vector<double>& v, Eigen::VectorXd& grad,
          Eigen::MatrixXd& neg_hess) {
        grad.setZero(k);
        neg_hess.setZero(k, k);
        for (std::size_t i = 0; i < n; ++i) {
          const auto phi = design.row(i);
          const double a = std::exp(std::min(Dot(v, phi), kShapeLogCap));
          const SupportMassTerms mass = MassTerms(a, current.support);
          const Eigen::Map<const Eigen::VectorXd> x(phi.data(), k);
          // Derivatives in u = log a of log a + (a - 1) ell - log M1(a).
          const double first = 1.0 + a * ell[i] - a * mass.d1;
          const double second =
              a * ell[i] - a * mass.d1 - a * a * (mass.d2 - mass.d1 * mass.d1);
          grad += h[i] * first * x;
          // Curvature floored at zero keeps the system positive semidefinite.
          neg_hess.noalias() += (h[i] * std::max(-second, 0.0)) * x * x.transpose();
        }
      });
  return next;
}

double ObservedLogLikelihood(std::span<const MaskedPValue> pvalues,
                             const DesignMatrix& design,
                             const TwoGroupFit& fit) {
  Require(design.rows() == pvalues.size(), "design rows must match p-values");
  const double f0 = std::exp(fit.LogNullDensity());
  double ll = 0.0;
  for (std::size_t i = 0; i < pvalues.size(); ++i) {
    const auto phi = design.row(i);
    const double pi = fit.Pi(phi);
    const double a = fit.Shape(phi);
    const double mass = std::exp(MassTerms(a, fit.support).log_mass);
    if (pvalues[i].revealed()) {
      ll += std::log(pi * AltDensity(*pvalues[i].revealed(), a) / mass +
                     (1.0 - pi) * f0);
    } else {
      const double p = pvalues[i].masked_min();
      ll += std::log(pi * (AltDensity(p, a) + AltDensity(1.0 - p, a)) / mass +
                     2.0 * (1.0 - pi) * f0);
    }
  }
  return ll;
}

TwoGroupFit EmFit(std::span<const MaskedPValue> pvalues,
                  const DesignMatrix& design, const TwoGroupFit& init, int k) {
  Require(k >= 1, "EM needs at least one iteration");
  Require(!pvalues.empty(), "EM needs at least one p-value");
  Require(init.pi_weights.size() == design.cols() &&
              init.f1_weights.size() == design.cols(),
          "initial fit does not match the design");
  TwoGroupFit fit = init;
  Require(init.ridge >= 0.0, "ridge must be non-negative");
  auto objective = [&](const TwoGroupFit& f) {
    return ObservedLogLikelihood(pvalues, design, f) -
           RidgePenalty(f.pi_weights, f.ridge);
  };
  fit.loglik_trace.assign(1, objective(fit));
  for (int r = 0; r < k; ++r) {
    const EStepResult estep = EStep(pvalues, design, fit);
    std::vector<double> trace = std::move(fit.loglik_trace);
    fit = MStep(design, estep, fit);
    trace.push_back(objective(fit));
    fit.loglik_trace = std::move(trace);
    ++fit.em_iters;
  }
  return fit;
}

double NullProbability(std::span<const double> phi, double p_prime,
                       const TwoGroupFit& fit) {
  const double pi = fit.Pi(phi);
  const double a = fit.Shape(phi);
  const double f1 =
      AltDensity(p_prime, a) / std::exp(MassTerms(a, fit.support).log_mass);
  const double null_term = (1.0 - pi) * std::exp(fit.LogNullDensity());
  return null_term / (pi * f1 + null_term);
}

double NullLogOdds(std::span<const double> phi, double p_prime,
                   const TwoGroupFit& fit) {
  const double a = fit.Shape(phi);
  const double log_f1 = std::log(a) + (a - 1.0) * LogClamped(p_prime) -
                        MassTerms(a, fit.support).log_mass;
  // log((1 - pi) / pi) = -eta.
  return -ClampedLogit(fit.pi_weights, phi) + fit.LogNullDensity() - log_f1;
}

double SupportFromMasked(std::span<const MaskedPValue> pvalues) {
  double c = kMinSupport;
  for (const MaskedPValue& v : pvalues) c = std::max(c, v.masked_min());
  return std::min(c, 0.5);
}

namespace {

std::optional<std::vector<double>> RemoveHighestScore(
    std::span<const double> thresholds, std::span<const MaskedPValue> pvalues,
    std::span<const double> scores) {
  std::size_t best = pvalues.size();
  for (std::size_t k = 0; k < pvalues.size(); ++k) {
    const MaskedPValue& v = pvalues[k];
    // A zero masked minimum can never be pushed out of the rejection region.
    if (!v.is_masked() || v.masked_min() <= 0.0) continue;
    if (best == pvalues.size() || scores[k] > scores[best]) best = k;
  }
  if (best == pvalues.size()) return std::nullopt;
  std::vector<double> next(thresholds.begin(), thresholds.end());
  next[best] = std::nextafter(pvalues[best].masked_min(), 0.0);
  return next;
}

}  // namespace

std::optional<std::vector<double>> GreedyUpdate(
    std::span<const double> thresholds, std::span<const MaskedPValue> pvalues,
    const DesignMatrix& design, const TwoGroupFit& fit) {
  Require(thresholds.size() == pvalues.size() &&
              design.rows() == pvalues.size(),
          "thresholds, p-values and design must align");
  for (std::size_t k = 0; k < pvalues.size(); ++k) {
    Require(pvalues[k].is_masked() ==
                (pvalues[k].masked_min() <= thresholds[k]),
            "masking state disagrees with the thresholds");
  }
  std::vector<double> scores(pvalues.size(), 0.0);
  for (std::size_t k = 0; k < pvalues.size(); ++k) {
    if (pvalues[k].is_masked()) {
      scores[k] = NullLogOdds(design.row(k), pvalues[k].masked_min(), fit);
    }
  }
  return RemoveHighestScore(thresholds, pvalues, scores);
}

GreedyTwoGroupUpdater::GreedyTwoGroupUpdater(EmSchedule schedule)
    : schedule_(schedule) {
  Require(schedule.iterations >= 1, "EM needs at least one iteration");
  Require(schedule.refit_every >= 0, "refit cadence must be non-negative");
}

std::optional<std::vector<double>> GreedyTwoGroupUpdater::Update(
    const UpdaterInput& input) {
  const std::size_t m = input.pvalues.size();
  if (!design_) {
    features_ = FeatureMap::Fit(input.x, schedule_.basis);
    design_ = input.x.dim() == 0 ? FeatureMap::InterceptOnly(m)
                                 : features_->Design(input.x);
    fit_ = TwoGroupFit::Initial(design_->cols());
    fit_->ridge = schedule_.ridge;
    if (schedule_.adaptive_support) fit_->support = SupportFromMasked(input.pvalues);
    refit_every_ = schedule_.refit_every > 0
                       ? schedule_.refit_every
                       : std::max(1, static_cast<int>(m / 20));
  }
  Require(design_->rows() == m, "updater reused across loops of different size");

  if (removals_ % refit_every_ == 0 && refits_ * refit_every_ <= removals_) {
    fit_ = EmFit(input.pvalues, *design_, *fit_, schedule_.iterations);
    ++refits_;
    scores_.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      scores_[k] =
          NullLogOdds(design_->row(k), input.pvalues[k].masked_min(), *fit_);
    }
  }
  std::optional<std::vector<double>> next =
      RemoveHighestScore(input.thresholds, input.pvalues, scores_);
  if (next) ++removals_;
  return next;
}

nlohmann::json GreedyTwoGroupUpdater::Diagnostics() const {
  nlohmann::json out = {{"family", "logistic-pi/beta(a,1)-f1/uniform-f0"},
                        {"em_iterations_per_refit", schedule_.iterations},
                        {"refit_every", refit_every_},
                        {"refits", refits_},
                        {"removals", removals_}};
  if (features_) out["features"] = features_->ToJson();
  if (fit_) out["fit"] = fit_->ToJson();
  return out;
}

}  // namespace dpadapt
