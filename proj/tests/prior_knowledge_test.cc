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

#include "aggloc/prior_knowledge.h"

#include <random>

#include "gtest/gtest.h"
#include "test_util.h"

namespace aggloc {
namespace {

using ::aggloc::testing::RandomTruth;
using ::aggloc::testing::TruthFromRois;
using ::aggloc::testing::ValueOrDie;

TEST(FreqRoiTest, VisitFrequenciesOnEveryColumn) {
  // Observation: a, a, b; inference: two epochs.
  const GroundTruthMatrix gt = TruthFromRois("u", 3, {1, 1, 2, 0, 0});
  const TimeFrame frame{5, 3600, 3, 2};
  const PriorMatrix prior = ValueOrDie(FreqRoi(gt, frame));
  EXPECT_EQ(prior.kind, EstimateKind::kProbabilistic);
  EXPECT_EQ(prior.observation_total, 3);
  ASSERT_EQ(prior.cells.cols(), 2);
  for (int t = 0; t < 2; ++t) {
    EXPECT_DOUBLE_EQ(prior.cells(0, t), 0.0);
    EXPECT_DOUBLE_EQ(prior.cells(1, t), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(prior.cells(2, t), 1.0 / 3.0);
  }
}

TEST(FreqRoiTest, SilentUserIsNullEverywhere) {
  const GroundTruthMatrix gt = TruthFromRois("u", 4, {0, 0, 0, 1});
  const PriorMatrix prior = ValueOrDie(FreqRoi(gt, {4, 3600, 3, 1}));
  EXPECT_DOUBLE_EQ(prior.cells(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(prior.cells.col(0).sum(), 1.0);
}

TEST(FreqRoiTest, RejectsShortTruth) {
  const GroundTruthMatrix gt = TruthFromRois("u", 3, {1, 2});
  EXPECT_FALSE(FreqRoi(gt, {4, 3600, 2, 2}).ok());
}

TEST(RoiSeasonalityTest, DailyPhase) {
  // Two observed days with ROI a at hour 9; inference day follows.
  std::vector<int> rois(72, 0);
  rois[9] = 1;
  rois[24 + 9] = 1;
  rois[24 + 10] = 2;
  const GroundTruthMatrix gt = TruthFromRois("u", 3, rois);
  const TimeFrame frame{72, 3600, 48, 24};
  const PriorMatrix prior = ValueOrDie(RoiSeasonality(gt, frame, {24}));
  EXPECT_DOUBLE_EQ(prior.cells(1, 9), 1.0);
  EXPECT_DOUBLE_EQ(prior.cells(0, 10), 0.5);
  EXPECT_DOUBLE_EQ(prior.cells(2, 10), 0.5);
  EXPECT_DOUBLE_EQ(prior.cells(0, 3), 1.0);
  EXPECT_TRUE(IsColumnStochastic(prior.cells));
}

TEST(RoiSeasonalityTest, SingleCycleIsNormalizedSlice) {
  std::mt19937_64 gen(1);
  const GroundTruthMatrix gt = RandomTruth("u", 4, 16, 0.4, gen);
  const TimeFrame frame{16, 3600, 8, 8};
  const PriorMatrix prior = ValueOrDie(RoiSeasonality(gt, frame, {8}));
  const RealMatrix expected = ValueOrDie(NormalizeColumns(gt.Slice({0, 8})));
  EXPECT_TRUE(prior.cells.isApprox(expected, 1e-12));
}

TEST(RoiSeasonalityTest, PhasesUseAbsoluteEpochs) {
  // Observation of 30 epochs with c = 24 keeps epochs [6, 30); inference
  // epoch t reads phase t mod 24.
  std::vector<int> rois(60, 0);
  rois[6] = 2;  // phase 6, kept
  rois[5] = 1;  // phase 5, truncated away
  const GroundTruthMatrix gt = TruthFromRois("u", 3, rois);
  const TimeFrame frame{60, 3600, 30, 30};
  const PriorMatrix prior = ValueOrDie(RoiSeasonality(gt, frame, {24}));
  EXPECT_DOUBLE_EQ(prior.cells(2, 0), 1.0);        // epoch 30, phase 6
  EXPECT_DOUBLE_EQ(prior.cells(0, 53 - 30), 1.0);  // epoch 53, phase 5
  EXPECT_DOUBLE_EQ(prior.cells(1, 53 - 30), 0.0);
}

TEST(RoiSeasonalityTest, PeriodicColumns) {
  std::mt19937_64 gen(2);
  const GroundTruthMatrix gt = RandomTruth("u", 5, 96, 0.2, gen);
  const TimeFrame frame{96, 3600, 48, 48};
  const PriorMatrix prior = ValueOrDie(RoiSeasonality(gt, frame, {24}));
  for (int t = 0; t + 24 < 48; ++t) {
    EXPECT_EQ(prior.cells.col(t), prior.cells.col(t + 24));
  }
}

TEST(RoiSeasonalityTest, RejectsCycleLongerThanObservation) {
  const GroundTruthMatrix gt = TruthFromRois("u", 3, std::vector<int>(10, 1));
  EXPECT_FALSE(RoiSeasonality(gt, {10, 3600, 5, 5}, {6}).ok());
  EXPECT_FALSE(RoiSeasonality(gt, {10, 3600, 5, 5}, {0}).ok());
}

TEST(TimeSeasonalityTest, UniformWhenActive) {
  std::vector<int> rois(72, 0);
  rois[8] = 1;
  rois[24 + 8] = 3;
  const GroundTruthMatrix gt = TruthFromRois("u", 4, rois);
  const PriorMatrix prior =
      ValueOrDie(TimeSeasonality(gt, {72, 3600, 48, 24}, {24}));
  for (int t = 0; t < 24; ++t) {
    if (t == 8) {
      EXPECT_DOUBLE_EQ(prior.cells(0, t), 0.0);
      for (int s = 1; s < 4; ++s) EXPECT_DOUBLE_EQ(prior.cells(s, t), 1.0 / 3);
    } else {
      EXPECT_DOUBLE_EQ(prior.cells(0, t), 1.0) << t;
    }
  }
  EXPECT_TRUE(IsColumnStochastic(prior.cells));
}

TEST(TimeSeasonalityTest, SilentUserIsNullEverywhere) {
  const GroundTruthMatrix gt = TruthFromRois("u", 4, std::vector<int>(48, 0));
  const PriorMatrix prior =
      ValueOrDie(TimeSeasonality(gt, {48, 3600, 24, 24}, {24}));
  EXPECT_DOUBLE_EQ(prior.cells.row(0).sum(), 24.0);
}

TEST(PopularRoisTest, ThresholdIsInclusive) {
  KnowledgeMatrix p;
  p.kind = EstimateKind::kProbabilistic;
  p.cells = RealMatrix(3, 1);
  p.cells << 0.5, 0.3, 0.2;
  const KnowledgeMatrix pop = ValueOrDie(PopularRois(p, 0.5));
  EXPECT_EQ(pop.kind, EstimateKind::kAssignment);
  EXPECT_DOUBLE_EQ(pop.cells(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(pop.cells(1, 0), 0.0);
  p.cells << 0.6, 0.4, 0.0;
  EXPECT_DOUBLE_EQ(ValueOrDie(PopularRois(p, 0.5)).cells(0, 0), 1.0);
  p.cells << 0.1, 0.45, 0.45;
  EXPECT_EQ(ValueOrDie(PopularRois(p, 0.5)).cells.sum(), 0.0);
  EXPECT_FALSE(PopularRois(p, 0.0).ok());
  EXPECT_FALSE(PopularRois(p, 1.5).ok());
}

TEST(PopularRoisTest, MonotoneInThreshold) {
  std::mt19937_64 gen(3);
  KnowledgeMatrix p;
  p.kind = EstimateKind::kProbabilistic;
  p.cells = RealMatrix(6, 10);
  for (int t = 0; t < 10; ++t) {
    const auto col = ::aggloc::testing::RandomDistribution(6, gen, 0.3);
    for (int s = 0; s < 6; ++s) p.cells(s, t) = col[s];
  }
  RealMatrix previous = ValueOrDie(PopularRois(p, 0.05)).cells;
  for (double delta = 0.1; delta <= 1.0; delta += 0.05) {
    const RealMatrix current = ValueOrDie(PopularRois(p, delta)).cells;
    EXPECT_TRUE((current.array() <= previous.array()).all()) << delta;
    previous = current;
  }
}

TEST(AllRoisTest, CeilingOfProbabilities) {
  KnowledgeMatrix p;
  p.kind = EstimateKind::kProbabilistic;
  p.cells = RealMatrix(3, 2);
  p.cells << 0.0001, 1.0,
             0.0,    0.0,
             0.9999, 0.0;
  const KnowledgeMatrix all = ValueOrDie(AllRois(p));
  RealMatrix expected(3, 2);
  expected << 1, 1,
              0, 0,
              1, 0;
  EXPECT_EQ(all.cells, expected);
  EXPECT_FALSE(AllRois(all).ok());
}

TEST(LastSeasonTest, IndexShiftOracle) {
  std::mt19937_64 gen(4);
  const GroundTruthMatrix gt = RandomTruth("u", 5, 72, 0.3, gen);
  const TimeFrame frame{72, 3600, 48, 24};
  const PriorMatrix prior = ValueOrDie(LastSeason(gt, frame, {24}));
  EXPECT_EQ(prior.kind, EstimateKind::kAssignment);
  for (int t = 48; t < 72; ++t) {
    for (int s = 0; s < 5; ++s) {
      EXPECT_EQ(prior.cells(s, t - 48), gt.cells()(s, t - 24));
    }
  }
}

TEST(LastSeasonTest, WeeklyCycleCopiesPreviousWeek) {
  std::mt19937_64 gen(5);
  const GroundTruthMatrix gt = RandomTruth("u", 4, 336, 0.1, gen);
  const PriorMatrix prior =
      ValueOrDie(LastSeason(gt, {336, 3600, 168, 168}, {168}));
  EXPECT_EQ(prior.cells, gt.Slice({0, 168}).cast<double>());
}

TEST(LastSeasonTest, StaticUserPredictedEverywhere) {
  const GroundTruthMatrix gt = TruthFromRois("u", 3, std::vector<int>(10, 2));
  const PriorMatrix prior = ValueOrDie(LastSeason(gt, {10, 3600, 5, 5}, {1}));
  EXPECT_DOUBLE_EQ(prior.cells.row(2).sum(), 5.0);
  EXPECT_DOUBLE_EQ(prior.cells.sum(), 5.0);
}

TEST(LastSeasonTest, UnderflowIsAnError) {
  const GroundTruthMatrix gt = TruthFromRois("u", 3, std::vector<int>(10, 2));
  EXPECT_EQ(LastSeason(gt, {10, 3600, 5, 5}, {6}).status().code(),
            absl::StatusCode::kOutOfRange);
}

}  // namespace
}  // namespace aggloc
