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

#include "aggloc/mobility_model.h"

#include <algorithm>
#include <random>

#include "gtest/gtest.h"
#include "test_util.h"

namespace aggloc {
namespace {

using ::aggloc::testing::RandomTruth;
using ::aggloc::testing::TruthFromRois;
using ::aggloc::testing::ValueOrDie;

BinaryMatrix Cells(std::initializer_list<std::initializer_list<int>> rows) {
  BinaryMatrix m(rows.size(), rows.begin()->size());
  int r = 0;
  for (const auto& row : rows) {
    int c = 0;
    for (int v : row) m(r, c++) = static_cast<uint8_t>(v);
    ++r;
  }
  return m;
}

TEST(RoiSpaceTest, RejectsDegenerateSpaces) {
  EXPECT_FALSE(RoiSpace::Create({"null"}).ok());
  EXPECT_FALSE(RoiSpace::Create({"null", "a", "a"}).ok());
  const RoiSpace space = ValueOrDie(RoiSpace::Anonymous(4));
  EXPECT_EQ(space.roi_count(), 4);
  EXPECT_EQ(space.null_index(), 0);
  EXPECT_EQ(space.labels()[0], "null");
}

TEST(TimeFrameTest, WindowsAreAdjacent) {
  const TimeFrame frame{672, 3600, 504, 168};
  ASSERT_OK(frame.Validate());
  EXPECT_EQ(frame.observation(), (EpochRange{0, 504}));
  EXPECT_EQ(frame.inference(), (EpochRange{504, 672}));
  EXPECT_FALSE((TimeFrame{100, 3600, 60, 60}).Validate().ok());
  EXPECT_FALSE((TimeFrame{100, 3600, 0, 60}).Validate().ok());
}

TEST(GroundTruthTest, CreateEnforcesNullRow) {
  EXPECT_OK(GroundTruthMatrix::Create("u", Cells({{1, 0}, {0, 1}, {0, 1}})));
  // Null mark next to a real ROI.
  EXPECT_FALSE(GroundTruthMatrix::Create("u", Cells({{1, 0}, {1, 1}})).ok());
  // Empty column.
  EXPECT_FALSE(GroundTruthMatrix::Create("u", Cells({{0, 0}, {0, 1}})).ok());
  // Non-binary entry.
  EXPECT_FALSE(GroundTruthMatrix::Create("u", Cells({{0, 0}, {2, 1}})).ok());
}

TEST(GroundTruthTest, FromPresenceFillsNullRow) {
  const GroundTruthMatrix gt = ValueOrDie(
      GroundTruthMatrix::FromPresence("u", Cells({{1, 1, 0}, {0, 1, 0}, {0, 0, 0}})));
  EXPECT_EQ(gt.cells(), Cells({{1, 0, 1}, {0, 1, 0}, {0, 0, 0}}));
  EXPECT_EQ(gt.ActivityCount({0, 3}), 1);
  EXPECT_EQ(gt.ObservationCount({0, 3}), 3);
}

TEST(BuildProfileTest, NormalizesColumns) {
  const GroundTruthMatrix gt = ValueOrDie(
      GroundTruthMatrix::Create("u", Cells({{1, 0}, {0, 1}, {0, 1}})));
  const MobilityProfile profile = ValueOrDie(BuildProfile(gt));
  EXPECT_DOUBLE_EQ(profile.cells(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(profile.cells(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(profile.cells(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(profile.cells(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(profile.cells(2, 1), 0.5);
  EXPECT_TRUE(IsColumnStochastic(profile.cells));
}

TEST(BuildProfileTest, UnitColumnsAreFixedPoints) {
  const GroundTruthMatrix gt = TruthFromRois("u", 4, {0, 1, 3, 2, 0});
  const MobilityProfile profile = ValueOrDie(BuildProfile(gt));
  EXPECT_EQ(profile.cells, gt.cells().cast<double>());
}

TEST(BuildProfileTest, ZeroColumnIsAnError) {
  EXPECT_FALSE(NormalizeColumns(Cells({{0, 1}, {0, 0}})).ok());
}

TEST(BuildProfileTest, WindowSelectsColumns) {
  const GroundTruthMatrix gt = TruthFromRois("u", 3, {1, 2, 0, 1});
  const MobilityProfile profile = ValueOrDie(BuildProfile(gt, {1, 3}));
  ASSERT_EQ(profile.cells.cols(), 2);
  EXPECT_DOUBLE_EQ(profile.cells(2, 0), 1.0);
  EXPECT_DOUBLE_EQ(profile.cells(0, 1), 1.0);
}

TEST(AggregateTest, SingleUserIsItsSlice) {
  const GroundTruthMatrix gt = TruthFromRois("u", 3, {1, 2, 0, 1});
  const std::vector<GroundTruthMatrix> users = {gt};
  const AggregateSeries agg = ValueOrDie(Aggregate(users, {1, 4}));
  EXPECT_EQ(agg.cells, gt.Slice({1, 4}).cast<int64_t>());
  EXPECT_EQ(agg.user_count, 1);
}

TEST(AggregateTest, CountsCoPresence) {
  std::vector<int> rois(6, 0);
  rois[5] = 1;
  const std::vector<GroundTruthMatrix> users = {TruthFromRois("a", 3, rois),
                                                TruthFromRois("b", 3, rois)};
  const AggregateSeries agg = ValueOrDie(Aggregate(users, {0, 6}));
  EXPECT_EQ(agg.cells(1, 5), 2);
  EXPECT_EQ(agg.cells(0, 0), 2);
}

TEST(AggregateTest, MatchesPerCellLoopOracle) {
  std::mt19937_64 gen(11);
  std::vector<GroundTruthMatrix> users;
  for (int u = 0; u < 10; ++u) {
    users.push_back(RandomTruth("u" + std::to_string(u), 3, 4, 0.4, gen));
  }
  const AggregateSeries agg = ValueOrDie(Aggregate(users, {0, 4}));
  for (int s = 0; s < 3; ++s) {
    for (int t = 0; t < 4; ++t) {
      int64_t expected = 0;
      for (const GroundTruthMatrix& u : users) expected += u.cells()(s, t);
      EXPECT_EQ(agg.cells(s, t), expected) << s << "," << t;
    }
  }
}

TEST(AggregateTest, ColumnSumsCountPresenceMarks) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> users_dist(1, 10);
    std::uniform_int_distribution<int> rois_dist(2, 8);
    std::uniform_int_distribution<int> epochs_dist(1, 16);
    const int n = users_dist(gen);
    const int rois = rois_dist(gen);
    const int epochs = epochs_dist(gen);
    std::vector<GroundTruthMatrix> users;
    for (int u = 0; u < n; ++u) {
      users.push_back(RandomTruth(std::to_string(u), rois, epochs, 0.3, gen));
    }
    const AggregateSeries agg = ValueOrDie(Aggregate(users, {0, epochs}));
    for (int t = 0; t < epochs; ++t) {
      int64_t marks = 0;
      for (const GroundTruthMatrix& u : users) {
        for (int s = 0; s < rois; ++s) marks += u.cells()(s, t);
      }
      EXPECT_EQ(agg.cells.col(t).sum(), marks);
      EXPECT_GE(agg.cells.col(t).sum(), n);
    }
    // Permutation invariance.
    std::shuffle(users.begin(), users.end(), gen);
    EXPECT_EQ(ValueOrDie(Aggregate(users, {0, epochs})).cells, agg.cells);
  }
}

TEST(AggregateTest, NullRowToggle) {
  const std::vector<GroundTruthMatrix> users = {
      TruthFromRois("a", 3, {0, 1}), TruthFromRois("b", 3, {0, 0})};
  const AggregateSeries agg =
      ValueOrDie(Aggregate(users, {0, 2}, AggregateOptions{false}));
  EXPECT_EQ(agg.cells.row(0).sum(), 0);
  EXPECT_EQ(agg.cells(1, 1), 1);
  EXPECT_FALSE(agg.includes_null);
}

TEST(AggregateTest, RejectsShapeMismatchAndBadWindow) {
  const std::vector<GroundTruthMatrix> users = {TruthFromRois("a", 3, {0, 1}),
                                                TruthFromRois("b", 4, {0, 1})};
  EXPECT_FALSE(Aggregate(users, {0, 2}).ok());
  const std::vector<GroundTruthMatrix> one = {TruthFromRois("a", 3, {0, 1})};
  EXPECT_FALSE(Aggregate(one, {1, 3}).ok());
  EXPECT_FALSE(Aggregate({}, {0, 1}).ok());
}

TEST(AggregateProfileTest, NormalizesCounts) {
  AggregateSeries agg;
  agg.cells = CountMatrix(2, 1);
  agg.cells << 2, 8;
  const AggregateProfile p = BuildAggregateProfile(agg);
  EXPECT_DOUBLE_EQ(p.cells(0, 0), 0.2);
  EXPECT_DOUBLE_EQ(p.cells(1, 0), 0.8);
}

TEST(AggregateProfileTest, ClampsNoisyColumns) {
  NoisyAggregateSeries noisy;
  noisy.cells = RealMatrix(2, 2);
  noisy.cells << -1, -2,
                  3, -1;
  const AggregateProfile p = BuildAggregateProfile(noisy);
  EXPECT_DOUBLE_EQ(p.cells(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(p.cells(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(p.cells(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(p.cells(1, 1), 0.5);
}

TEST(AggregateProfileTest, AlwaysColumnStochastic) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> noise(0.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    RealMatrix cells(5, 7);
    for (Eigen::Index i = 0; i < cells.size(); ++i) cells(i) = noise(gen);
    EXPECT_TRUE(IsColumnStochastic(BuildAggregateProfile(cells).cells));
  }
}

}  // namespace
}  // namespace aggloc
