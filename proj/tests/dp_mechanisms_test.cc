// Copyright 2026 The Aggloc Authors
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

#include "aggloc/dp_mechanisms.h"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"
#include "test_util.h"

namespace aggloc {
namespace {

using ::aggloc::testing::OracleKeepK;
using ::aggloc::testing::RandomTruth;
using ::aggloc::testing::TruthFromRois;
using ::aggloc::testing::ValueOrDie;

NoiseSpec Scm(double epsilon, ScaleRule rule, uint64_t seed = 1) {
  NoiseSpec spec;
  spec.mechanism = Mechanism::kScm;
  spec.epsilon = epsilon;
  spec.scale_rule = rule;
  spec.seed = seed;
  return spec;
}

NoiseSpec Fpa(double epsilon, int64_t k, uint64_t seed = 1) {
  NoiseSpec spec;
  spec.mechanism = Mechanism::kFpa;
  spec.epsilon = epsilon;
  spec.k = k;
  spec.seed = seed;
  return spec;
}

NoiseSpec Rr(double p, uint64_t seed = 1) {
  NoiseSpec spec;
  spec.mechanism = Mechanism::kRr;
  spec.p = p;
  spec.seed = seed;
  return spec;
}

AggregateSeries Constant(int rois, int epochs, int64_t value) {
  AggregateSeries a;
  a.cells = CountMatrix::Constant(rois, epochs, value);
  a.user_count = 100;
  return a;
}

TEST(NoiseSpecTest, ParametersMatchMechanism) {
  EXPECT_OK(Scm(1.0, ScaleRule::kUnit).Validate());
  EXPECT_OK(Fpa(1.0, 3).Validate());
  EXPECT_OK(Rr(0.3).Validate());

  NoiseSpec s = Scm(1.0, ScaleRule::kUnit);
  s.scale_rule.reset();
  EXPECT_FALSE(s.Validate().ok());
  s = Scm(0.0, ScaleRule::kUnit);
  EXPECT_FALSE(s.Validate().ok());
  s = Scm(-1.0, ScaleRule::kUnit);
  EXPECT_FALSE(s.Validate().ok());
  s = Scm(1.0, ScaleRule::kUnit);
  s.k = 2;
  EXPECT_FALSE(s.Validate().ok());
  s = Scm(1.0, ScaleRule::kSensitivity);
  s.delta_sensitivity = 0;
  EXPECT_FALSE(s.Validate().ok());

  NoiseSpec f = Fpa(1.0, 0);
  EXPECT_FALSE(f.Validate().ok());
  f = Fpa(1.0, 2);
  f.delta_sensitivity = 3;
  EXPECT_FALSE(f.Validate().ok());

  NoiseSpec r = Rr(0.0);
  EXPECT_FALSE(r.Validate().ok());
  r = Rr(1.0);
  EXPECT_FALSE(r.Validate().ok());
  r = Rr(0.5);
  r.epsilon = 1.0;
  EXPECT_FALSE(r.Validate().ok());
}

TEST(NoiseSpecTest, NamesRoundTrip) {
  for (Mechanism m : {Mechanism::kScm, Mechanism::kFpa, Mechanism::kRr}) {
    EXPECT_EQ(ValueOrDie(ParseMechanism(MechanismName(m))), m);
  }
  for (ScaleRule r : {ScaleRule::kUnit, ScaleRule::kHorizon,
                      ScaleRule::kSensitivity, ScaleRule::kFull}) {
    EXPECT_EQ(ValueOrDie(ParseScaleRule(ScaleRuleName(r))), r);
  }
  EXPECT_FALSE(ParseMechanism("laplace").ok());
  EXPECT_FALSE(ParseScaleRule("").ok());
}

TEST(LaplaceTest, MomentsMatchScale) {
  Rng rng(5);
  const int n = 200000;
  const double scale = 2.0;
  double sum = 0;
  double abs_sum = 0;
  double sq_sum = 0;
  for (int i = 0; i < n; ++i) {
    const double x = ValueOrDie(LaplaceSample(scale, rng));
    sum += x;
    abs_sum += std::abs(x);
    sq_sum += x * x;
  }
  // Standard errors: mean 0.0063, E|x| 0.0045, variance 0.055.
  EXPECT_NEAR(sum / n, 0.0, 0.03);
  EXPECT_NEAR(abs_sum / n, scale, 0.025);
  EXPECT_NEAR(sq_sum / n, 2 * scale * scale, 0.3);
}

TEST(LaplaceTest, RejectsBadScale) {
  Rng rng(1);
  EXPECT_FALSE(LaplaceSample(0.0, rng).ok());
  EXPECT_FALSE(LaplaceSample(-1.0, rng).ok());
  EXPECT_FALSE(
      LaplaceSample(std::numeric_limits<double>::infinity(), rng).ok());
}

TEST(SensitivityTest, LargestNonNullActivity) {
  const std::vector<GroundTruthMatrix> users = {
      TruthFromRois("a", 3, {1, 2, 0, 1}),
      TruthFromRois("b", 3, {0, 0, 2, 2}),
  };
  EXPECT_EQ(ComputeSensitivity(users, {0, 4}), 3);
  EXPECT_EQ(ComputeSensitivity(users, {2, 4}), 2);
  EXPECT_EQ(ComputeSensitivity(users, {2, 2}), 0);
}

TEST(ScmScaleTest, EachRule) {
  EXPECT_DOUBLE_EQ(ValueOrDie(ScmScale(Scm(0.5, ScaleRule::kUnit), 4, 10)),
                   2.0);
  EXPECT_DOUBLE_EQ(ValueOrDie(ScmScale(Scm(0.5, ScaleRule::kHorizon), 4, 10)),
                   20.0);
  EXPECT_DOUBLE_EQ(ValueOrDie(ScmScale(Scm(0.5, ScaleRule::kFull), 4, 10)),
                   80.0);
  NoiseSpec s = Scm(0.5, ScaleRule::kSensitivity);
  EXPECT_FALSE(ScmScale(s, 4, 10).ok());
  s.delta_sensitivity = 7;
  EXPECT_DOUBLE_EQ(ValueOrDie(ScmScale(s, 4, 10)), 14.0);
  EXPECT_FALSE(ScmScale(Fpa(1.0, 2), 4, 10).ok());
}

TEST(ScmPerturbTest, DeterministicPerSeed) {
  const AggregateSeries a = Constant(3, 20, 10);
  const NoisyRelease x = ValueOrDie(ScmPerturb(a, Scm(1.0, ScaleRule::kUnit)));
  const NoisyRelease y = ValueOrDie(ScmPerturb(a, Scm(1.0, ScaleRule::kUnit)));
  const NoisyRelease z =
      ValueOrDie(ScmPerturb(a, Scm(1.0, ScaleRule::kUnit, 2)));
  EXPECT_EQ(x.series.cells, y.series.cells);
  EXPECT_NE(x.series.cells, z.series.cells);
  EXPECT_EQ(x.series.user_count, 100);
  EXPECT_EQ(x.series.provenance.seed, 1u);
}

TEST(ScmPerturbTest, NoiseMagnitudeAndIndependence) {
  const int epochs = 20000;
  const AggregateSeries a = Constant(2, epochs, 50);
  const double eps = 0.25;
  const NoisyRelease r =
      ValueOrDie(ScmPerturb(a, Scm(eps, ScaleRule::kUnit, 99)));
  for (int s = 0; s < 2; ++s) {
    double abs_sum = 0;
    double lag = 0;
    double sq = 0;
    for (int t = 0; t < epochs; ++t) {
      const double e = r.series.cells(s, t) - 50.0;
      abs_sum += std::abs(e);
      sq += e * e;
      if (t > 0) lag += e * (r.series.cells(s, t - 1) - 50.0);
    }
    // E|noise| = 1/eps = 4, standard error 0.028.
    EXPECT_NEAR(abs_sum / epochs, 1.0 / eps, 0.15);
    EXPECT_LT(std::abs(lag / sq), 0.04);
  }
  // Rows draw from distinct streams.
  EXPECT_NE(r.series.cells.row(0), r.series.cells.row(1));
}

TEST(ScmPerturbTest, ScaleShrinksWithEpsilon) {
  const AggregateSeries a = Constant(4, 500, 20);
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {0.01, 0.1, 1.0, 10.0}) {
    const NoisyRelease r =
        ValueOrDie(ScmPerturb(a, Scm(eps, ScaleRule::kUnit, 3)));
    const double mad =
        (r.series.cells.array() - 20.0).abs().mean();
    EXPECT_LT(mad, prev);
    prev = mad;
  }
}

TEST(ScmPerturbTest, InfiniteEpsilonReleasesExactCounts) {
  const AggregateSeries a = Constant(2, 5, 7);
  const NoisyRelease r = ValueOrDie(ScmPerturb(
      a, Scm(std::numeric_limits<double>::infinity(), ScaleRule::kUnit)));
  EXPECT_EQ(r.series.cells, a.cells.cast<double>());
}

TEST(ScmPerturbTest, AccountPerRule) {
  const AggregateSeries a = Constant(4, 10, 1);
  const NoisyRelease unit =
      ValueOrDie(ScmPerturb(a, Scm(0.5, ScaleRule::kUnit)));
  EXPECT_DOUBLE_EQ(unit.account.per_slot_epsilon, 0.5);
  EXPECT_DOUBLE_EQ(unit.account.composed_epsilon, 20.0);
  const NoisyRelease horizon =
      ValueOrDie(ScmPerturb(a, Scm(0.5, ScaleRule::kHorizon)));
  EXPECT_DOUBLE_EQ(horizon.account.per_slot_epsilon, 0.05);
  EXPECT_DOUBLE_EQ(horizon.account.composed_epsilon, 2.0);
  const NoisyRelease full =
      ValueOrDie(ScmPerturb(a, Scm(0.5, ScaleRule::kFull)));
  EXPECT_DOUBLE_EQ(full.account.composed_epsilon, 0.5);
  NoiseSpec s = Scm(0.5, ScaleRule::kSensitivity);
  s.delta_sensitivity = 5;
  const NoisyRelease sens = ValueOrDie(ScmPerturb(a, s));
  EXPECT_DOUBLE_EQ(sens.account.per_slot_epsilon, 0.1);
  EXPECT_DOUBLE_EQ(sens.account.composed_epsilon, 0.5);
  EXPECT_FALSE(sens.account.composition_note.empty());
}

TEST(FourierKeepKTest, MatchesNaiveDft) {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> u(-5.0, 20.0);
  for (int n = 1; n <= 33; ++n) {
    std::vector<double> x(n);
    for (double& v : x) v = u(gen);
    for (int k = 1; k <= n; ++k) {
      const std::vector<double> got =
          ValueOrDie(FourierKeepK(x, k, 0.0, nullptr));
      const std::vector<double> want = OracleKeepK(x, k);
      ASSERT_EQ(got.size(), want.size());
      for (int t = 0; t < n; ++t) {
        EXPECT_NEAR(got[t], want[t], 1e-9) << "n=" << n << " k=" << k;
      }
    }
  }
}

TEST(FourierKeepKTest, ProjectionIsIdempotent) {
  std::mt19937_64 gen(29);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> x(168);
  for (double& v : x) v = u(gen);
  for (int k : {1, 5, 20, 84, 85, 168}) {
    const auto once = ValueOrDie(FourierKeepK(x, k, 0.0, nullptr));
    const auto twice = ValueOrDie(FourierKeepK(once, k, 0.0, nullptr));
    for (size_t t = 0; t < x.size(); ++t) EXPECT_NEAR(once[t], twice[t], 1e-9);
  }
  // Keeping every distinct frequency reproduces the input.
  const auto all = ValueOrDie(FourierKeepK(x, 85, 0.0, nullptr));
  for (size_t t = 0; t < x.size(); ++t) EXPECT_NEAR(all[t], x[t], 1e-9);
}

TEST(FourierKeepKTest, SingleCoefficientKeepsTheMean) {
  const std::vector<double> x = {1, 2, 3, 4, 5, 6};
  const auto y = ValueOrDie(FourierKeepK(x, 1, 0.0, nullptr));
  for (double v : y) EXPECT_NEAR(v, 3.5, 1e-12);
  const std::vector<double> flat(24, 9.0);
  for (double v : ValueOrDie(FourierKeepK(flat, 1, 0.0, nullptr))) {
    EXPECT_NEAR(v, 9.0, 1e-12);
  }
}

TEST(FourierKeepKTest, RejectsBadArguments) {
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> empty;
  EXPECT_FALSE(FourierKeepK(x, 0, 0.0, nullptr).ok());
  EXPECT_FALSE(FourierKeepK(x, 4, 0.0, nullptr).ok());
  EXPECT_FALSE(FourierKeepK(empty, 1, 0.0, nullptr).ok());
  EXPECT_FALSE(FourierKeepK(x, 1, 1.0, nullptr).ok());
}

TEST(FpaPerturbTest, NoiselessReleaseIsRowwiseProjection) {
  std::mt19937_64 gen(31);
  std::uniform_int_distribution<int> count(0, 30);
  AggregateSeries a;
  a.cells.resize(3, 48);
  for (int s = 0; s < 3; ++s) {
    for (int t = 0; t < 48; ++t) a.cells(s, t) = count(gen);
  }
  a.user_count = 30;
  const NoisyRelease r = ValueOrDie(
      FpaPerturb(a, Fpa(std::numeric_limits<double>::infinity(), 6)));
  for (int s = 0; s < 3; ++s) {
    std::vector<double> row(48);
    for (int t = 0; t < 48; ++t) row[t] = static_cast<double>(a.cells(s, t));
    const auto want = OracleKeepK(row, 6);
    for (int t = 0; t < 48; ++t) EXPECT_NEAR(r.series.cells(s, t), want[t], 1e-9);
  }
}

TEST(FpaPerturbTest, NoisyDeterministicAndAccounted) {
  const AggregateSeries a = Constant(5, 24, 12);
  const NoisyRelease x = ValueOrDie(FpaPerturb(a, Fpa(0.5, 4, 8)));
  const NoisyRelease y = ValueOrDie(FpaPerturb(a, Fpa(0.5, 4, 8)));
  EXPECT_EQ(x.series.cells, y.series.cells);
  EXPECT_NE(x.series.cells, a.cells.cast<double>());
  EXPECT_DOUBLE_EQ(x.account.per_slot_epsilon, 0.5);
  EXPECT_DOUBLE_EQ(x.account.composed_epsilon, 2.5);
  EXPECT_FALSE(FpaPerturb(a, Fpa(0.5, 25)).ok());
  EXPECT_FALSE(FpaPerturb(a, Scm(0.5, ScaleRule::kUnit)).ok());
}

TEST(RrTest, EstimatorIsUnbiased) {
  std::mt19937_64 gen(37);
  std::vector<GroundTruthMatrix> users;
  for (int u = 0; u < 50; ++u) {
    users.push_back(RandomTruth("u" + std::to_string(u), 3, 10, 0.3, gen));
  }
  const AggregateSeries truth = ValueOrDie(Aggregate(users, {0, 10}));
  const int trials = 400;
  RealMatrix mean = RealMatrix::Zero(3, 10);
  for (int seed = 0; seed < trials; ++seed) {
    const NoisyRelease r =
        ValueOrDie(RrPerturbAndEstimate(users, {0, 10}, Rr(0.3, seed)));
    mean += r.series.cells;
    // A debiased count lies in [-n p / (1 - p), n].
    EXPECT_GE(r.series.cells.minCoeff(), -50 * 0.3 / 0.7 - 1e-9);
    EXPECT_LE(r.series.cells.maxCoeff(), 50 + 1e-9);
  }
  mean /= trials;
  // Per-cell standard error is at most 0.26 here; 1.3 is five of them.
  const RealMatrix diff = mean - truth.cells.cast<double>();
  EXPECT_LT(diff.cwiseAbs().maxCoeff(), 1.3);
}

TEST(RrTest, AccountAndValidation) {
  const std::vector<GroundTruthMatrix> users = {
      TruthFromRois("a", 3, {1, 2, 0, 1}),
  };
  const NoisyRelease r =
      ValueOrDie(RrPerturbAndEstimate(users, {1, 4}, Rr(0.5)));
  EXPECT_NEAR(r.account.per_slot_epsilon, std::log(4.0), 1e-12);
  EXPECT_NEAR(r.account.composed_epsilon, 3 * std::log(4.0), 1e-12);
  EXPECT_EQ(r.series.cells.cols(), 3);
  EXPECT_FALSE(RrPerturbAndEstimate(users, {0, 5}, Rr(0.5)).ok());
  EXPECT_FALSE(RrPerturbAndEstimate({}, {0, 1}, Rr(0.5)).ok());
  EXPECT_FALSE(
      RrPerturbAndEstimate(users, {0, 1}, Scm(1.0, ScaleRule::kUnit)).ok());
}

}  // namespace
}  // namespace aggloc
