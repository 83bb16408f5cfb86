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

#include "aggloc/triplet_io.h"

#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace aggloc {
namespace {

using ::aggloc::testing::RandomTruth;
using ::aggloc::testing::TruthFromRois;
using ::aggloc::testing::ValueOrDie;

TEST(GroundTruthTripletsTest, WritesNullMarks) {
  const std::vector<GroundTruthMatrix> users = {
      TruthFromRois("a", 3, {2, 0}),
  };
  std::ostringstream out;
  ASSERT_OK(WriteGroundTruthTriplets(users, out));
  EXPECT_EQ(out.str(), "entity_id,roi_index,epoch_index\na,2,0\na,0,1\n");
}

TEST(GroundTruthTripletsTest, RoundTripRandomCorpus) {
  std::mt19937_64 gen(43);
  std::vector<GroundTruthMatrix> users;
  for (int u = 0; u < 12; ++u) {
    users.push_back(RandomTruth("user" + std::to_string(u), 6, 30, 0.2, gen));
  }
  std::ostringstream out;
  ASSERT_OK(WriteGroundTruthTriplets(users, out));
  std::istringstream in(out.str());
  const auto back = ValueOrDie(ReadGroundTruthTriplets(in, {6, 30}));
  ASSERT_EQ(back.size(), users.size());
  // Readers sort by id: user0, user1, user10, user11, user2, ...
  for (const GroundTruthMatrix& b : back) {
    const auto it = std::find_if(users.begin(), users.end(), [&](const auto& u) {
      return u.user_id() == b.user_id();
    });
    ASSERT_NE(it, users.end());
    EXPECT_EQ(it->cells(), b.cells());
  }
}

TEST(GroundTruthTripletsTest, MissingNullMarksAreRecomputed) {
  std::istringstream in(
      "entity_id,roi_index,epoch_index\n"
      "b,1,0\n"
      "a,2,2\n");
  const auto users = ValueOrDie(ReadGroundTruthTriplets(in));
  ASSERT_EQ(users.size(), 2u);
  EXPECT_EQ(users[0].user_id(), "a");
  EXPECT_EQ(users[0].roi_count(), 3);
  EXPECT_EQ(users[0].epoch_count(), 3);
  EXPECT_EQ(users[0].cells()(kNullRoi, 0), 1);
  EXPECT_EQ(users[1].cells()(kNullRoi, 2), 1);
}

TEST(GroundTruthTripletsTest, RejectsBadRows) {
  std::istringstream header("user,roi,epoch\n");
  EXPECT_FALSE(ReadGroundTruthTriplets(header).ok());
  std::istringstream negative("entity_id,roi_index,epoch_index\na,-1,0\n");
  EXPECT_FALSE(ReadGroundTruthTriplets(negative).ok());
  std::istringstream outside("entity_id,roi_index,epoch_index\na,5,0\n");
  EXPECT_EQ(ReadGroundTruthTriplets(outside, {3, 2}).status().code(),
            absl::StatusCode::kOutOfRange);
}

TEST(RealTripletsTest, RoundTripIsExact) {
  std::mt19937_64 gen(47);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<NamedMatrix> matrices;
  for (int m = 0; m < 4; ++m) {
    RealMatrix cells = RealMatrix::Zero(5, 9);
    for (int i = 0; i < 12; ++i) cells(i % 5, (i * 7) % 9) = u(gen) / 3.0;
    matrices.push_back({"m" + std::to_string(m), cells});
  }
  std::ostringstream out;
  ASSERT_OK(WriteRealTriplets(matrices, out));
  std::istringstream in(out.str());
  const auto back = ValueOrDie(ReadRealTriplets(in, {5, 9}));
  ASSERT_EQ(back.size(), matrices.size());
  for (size_t m = 0; m < back.size(); ++m) {
    EXPECT_EQ(back[m].entity_id, matrices[m].entity_id);
    EXPECT_EQ(back[m].cells, matrices[m].cells);
  }
}

TEST(KnowledgeTripletsTest, WritesNonZeroCells) {
  KnowledgeMatrix k;
  k.user_id = "u";
  k.cells = RealMatrix::Zero(2, 2);
  k.cells(1, 0) = 0.25;
  k.cells(0, 1) = 1.0;
  std::ostringstream out;
  ASSERT_OK(WriteKnowledgeTriplets(std::vector<KnowledgeMatrix>{k}, out));
  EXPECT_EQ(out.str(),
            "entity_id,roi_index,epoch_index,value\nu,1,0,0.25\nu,0,1,1\n");
}

}  // namespace
}  // namespace aggloc
