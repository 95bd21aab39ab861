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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dpadapt/engine.h"
#include "dpadapt/rng.h"

namespace dpadapt {
namespace {

std::vector<MaskedPValue> Revealed(const std::vector<double>& p) {
  std::vector<MaskedPValue> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.emplace_back(i, std::min(p[i], 1 - p[i]), p[i]);
  }
  return out;
}

// Beta(a, 1) draws have p = U^{1/a}.
std::vector<MaskedPValue> RandomMasked(Rng& rng, std::size_t n, double pi,
                                       double a, double s) {
  std::vector<MaskedPValue> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = rng.Uniform() < pi ? std::pow(rng.Uniform(), 1 / a)
                                        : rng.Uniform();
    const double mm = std::min(p, 1 - p);
    out.emplace_back(i, mm, mm <= s ? std::nullopt : std::optional<double>(p));
  }
  return out;
}

double GoldenMax(const std::function<double(double)>& f, double lo, double hi) {
  const double g = 0.5 * (std::sqrt(5.0) - 1);
  double a = lo, b = hi;
  while (b - a > 1e-12) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    (f(c) > f(d) ? b : a) = f(c) > f(d) ? d : c;
  }
  return 0.5 * (a + b);
}

TEST(TwoGroupFitTest, InitialAndDensity) {
  const TwoGroupFit fit = TwoGroupFit::Initial(3);
  const std::vector<double> phi{1.0, 0.3, -2.0};
  EXPECT_NEAR(fit.Pi(phi), 0.1, 1e-15);
  EXPECT_NEAR(fit.Shape(phi), 0.5, 1e-15);
  // Beta(a, 1) integrates to one.
  for (double a : {0.05, 0.3, 1.0}) {
    double total = 0;
    const int k = 200000;
    for (int j = 0; j < k; ++j) {
      const double lo = static_cast<double>(j) / k, hi = (j + 1.0) / k;
      total += std::pow(hi, a) - std::pow(lo, a);
      (void)AltDensity(0.5 * (lo + hi), a);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_NEAR(AltSupportMass(a, 0.5), 1.0, 1e-15);
  }
  EXPECT_NEAR(AltSupportMass(0.5, 0.1),
              std::pow(0.1, 0.5) + 1 - std::pow(0.9, 0.5), 1e-15);
}

TEST(MStepTest, InterceptShapeIsWeightedMle) {
  Rng rng(31);
  std::vector<double> p(400);
  for (double& v : p) v = std::pow(rng.Uniform(), 1 / 0.3);
  const auto pv = Revealed(p);
  const DesignMatrix design = FeatureMap::InterceptOnly(p.size());
  const TwoGroupFit init = TwoGroupFit::Initial(1);
  const EStepResult e = EStep(pv, design, init);
  const TwoGroupFit next = MStep(design, e, init);

  double sh = 0, shl = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sh += e.h[i];
    shl += e.h[i] * std::log(p[i]);
  }
  const double closed = -sh / shl;
  const double golden = GoldenMax(
      [&](double a) { return sh * std::log(a) + (a - 1) * shl; }, 0.05, 1.0);
  const std::vector<double> one{1.0};
  EXPECT_NEAR(next.Shape(one), closed, 1e-7);
  EXPECT_NEAR(golden, closed, 1e-7);
}

TEST(EStepTest, FoldPointMatchesRevealed) {
  const DesignMatrix design = FeatureMap::InterceptOnly(2);
  const std::vector<MaskedPValue> pv{MaskedPValue(0, 0.5, std::nullopt),
                                     MaskedPValue(1, 0.5, 0.5)};
  TwoGroupFit fit = TwoGroupFit::Initial(1);
  fit.pi_weights[0] = 0.4;
  const EStepResult e = EStep(pv, design, fit);
  EXPECT_NEAR(e.h[0], e.h[1], 1e-15);
  EXPECT_NEAR(e.log_stat[0], e.log_stat[1], 1e-15);
}

TEST(EmFitTest, ObservedLikelihoodAscends) {
  Rng rng(32);
  for (int rep = 0; rep < 40; ++rep) {
    const auto pv = RandomMasked(rng, 150, 0.1 + 0.5 * rng.Uniform(),
                                 0.1 + 0.6 * rng.Uniform(), 0.45 * rng.Uniform());
    CovariateMatrix x(pv.size(), 2);
    for (std::size_t i = 0; i < pv.size(); ++i) {
      x.row(i)[0] = rng.Normal();
      x.row(i)[1] = rng.Normal();
    }
    const FeatureMap map = FeatureMap::Fit(x);
    const DesignMatrix design = map.Design(x);
    TwoGroupFit fit = TwoGroupFit::Initial(map.size());
    double prev = ObservedLogLikelihood(pv, design, fit);
    for (int it = 0; it < 5; ++it) {
      fit = EmFit(pv, design, fit, 1);
      const double cur = ObservedLogLikelihood(pv, design, fit);
      ASSERT_GE(cur, prev - 1e-10) << "instance " << rep << " iteration " << it;
      prev = cur;
    }
    for (double h : EStep(pv, design, fit).h) {
      ASSERT_GE(h, 0.0);
      ASSERT_LE(h, 1.0);
    }
  }
}

TEST(EmFitTest, TraceHasOneEntryPerIteration) {
  Rng rng(33);
  const auto pv = RandomMasked(rng, 100, 0.3, 0.3, 0.3);
  const DesignMatrix design = FeatureMap::InterceptOnly(pv.size());
  const TwoGroupFit fit = EmFit(pv, design, TwoGroupFit::Initial(1), 5);
  EXPECT_EQ(fit.em_iters, 5);
  EXPECT_FALSE(fit.loglik_trace.empty());
  EXPECT_TRUE(std::is_sorted(fit.loglik_trace.begin(), fit.loglik_trace.end()));
}

TEST(NullProbabilityTest, Examples) {
  const std::vector<double> one{1.0};
  TwoGroupFit fit = TwoGroupFit::Initial(1);
  fit.pi_weights[0] = -1e6;  // pi -> 0 (clamped logit)
  EXPECT_NEAR(NullProbability(one, 0.1, fit), 1.0, 1e-12);
  fit.pi_weights[0] = 0.8;
  fit.f1_weights[0] = 0.0;  // a = 1
  EXPECT_NEAR(NullProbability(one, 0.2, fit), 1 - fit.Pi(one), 1e-15);
  fit.pi_weights[0] = 0.0;
  fit.f1_weights[0] = std::log(0.5);
  EXPECT_NEAR(NullProbability(one, 0.04, fit),
              0.5 / (0.5 * 0.5 * std::pow(0.04, -0.5) + 0.5), 1e-15);
}

TEST(NullProbabilityTest, AgreesWithLogOddsAndIsMonotone) {
  const std::vector<double> one{1.0};
  TwoGroupFit fit = TwoGroupFit::Initial(1);
  fit.f1_weights[0] = std::log(0.3);
  for (double support : {0.5, 0.2, 0.01}) {
    fit.support = support;
    double prev = 0.0;
    for (int k = 1; k <= 500; ++k) {
      const double pp = 0.5 * k / 500.0;
      const double np = NullProbability(one, pp, fit);
      EXPECT_GE(np, prev);
      EXPECT_NEAR(std::log(np / (1 - np)), NullLogOdds(one, pp, fit), 1e-9);
      prev = np;
    }
  }
}

TEST(GreedyUpdateTest, SingleAndPairCandidates) {
  const TwoGroupFit fit = TwoGroupFit::Initial(1);
  {
    const std::vector<MaskedPValue> pv{MaskedPValue(0, 0.2, std::nullopt),
                                       MaskedPValue(1, 0.48, 0.52)};
    const std::vector<double> s{0.45, 0.45};
    const auto next = GreedyUpdate(s, pv, FeatureMap::InterceptOnly(2), fit);
    ASSERT_TRUE(next);
    EXPECT_LT((*next)[0], 0.2);
    EXPECT_EQ((*next)[1], 0.45);
  }
  {
    const std::vector<MaskedPValue> pv{MaskedPValue(0, 0.01, std::nullopt),
                                       MaskedPValue(1, 0.04, std::nullopt)};
    const std::vector<double> s{0.45, 0.45};
    const auto next = GreedyUpdate(s, pv, FeatureMap::InterceptOnly(2), fit);
    ASSERT_TRUE(next);
    EXPECT_EQ((*next)[0], 0.45);
    EXPECT_EQ((*next)[1], std::nextafter(0.04, 0.0));
  }
  const std::vector<MaskedPValue> none{MaskedPValue(0, 0.48, 0.48)};
  const std::vector<double> s{0.45};
  EXPECT_FALSE(GreedyUpdate(s, none, FeatureMap::InterceptOnly(1), fit));
}

TEST(GreedyUpdateTest, RemovalOrderMatchesFullRecompute) {
  Rng rng(34);
  const std::size_t n = 200;
  CovariateMatrix x(n, 1);
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    x.row(i)[0] = rng.Normal();
    p[i] = rng.Uniform() < 0.3 ? std::pow(rng.Uniform(), 4.0) : rng.Uniform();
  }
  const FeatureMap map = FeatureMap::Fit(x);
  const DesignMatrix design = map.Design(x);
  TwoGroupFit fit = TwoGroupFit::Initial(map.size());
  fit.pi_weights = {-1.0, 0.8};
  fit.f1_weights = {std::log(0.3), 0.2};

  std::vector<double> s(n, 0.45);
  std::vector<std::size_t> order;
  for (;;) {
    std::vector<MaskedPValue> pv;
    for (std::size_t i = 0; i < n; ++i) {
      const double mm = std::min(p[i], 1 - p[i]);
      pv.emplace_back(i, mm, mm <= s[i] ? std::nullopt : std::optional<double>(p[i]));
    }
    const auto next = GreedyUpdate(s, pv, design, fit);
    if (!next) break;
    std::size_t changed = n;
    for (std::size_t i = 0; i < n; ++i) {
      if ((*next)[i] != s[i]) {
        ASSERT_EQ(changed, n) << "more than one threshold moved";
        changed = i;
      }
    }
    ASSERT_LT(changed, n);
    order.push_back(changed);
    s = *next;
  }

  // Oracle: sort every initial candidate by null probability, descending.
  std::vector<std::size_t> expect;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::min(p[i], 1 - p[i]) <= 0.45) expect.push_back(i);
  }
  std::vector<double> np(n);
  for (std::size_t i : expect) {
    np[i] = NullProbability(design.row(i), std::min(p[i], 1 - p[i]), fit);
  }
  std::stable_sort(expect.begin(), expect.end(),
                   [&](std::size_t a, std::size_t b) { return np[a] > np[b]; });
  EXPECT_EQ(order, expect);
}

TEST(GreedyUpdaterTest, RefitsOnSchedule) {
  Rng rng(35);
  std::vector<double> values(100);
  for (double& v : values) v = rng.Uniform();
  std::vector<std::size_t> ids(100);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  EmSchedule schedule;
  schedule.refit_every = 10;
  GreedyTwoGroupUpdater u(schedule);
  const auto r = RunMaskedLoop(values, ids, CovariateMatrix(100, 0), 0.1, 0.45, u);
  ASSERT_GT(r.stop_t, 0);
  EXPECT_EQ(u.refits(), (r.stop_t - 1) / 10 + 1);
  EXPECT_TRUE(r.model.contains("fit"));
}

}  // namespace
}  // namespace dpadapt
