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

#ifndef AGGLOC_INFERENCE_ATTACKS_H_
#define AGGLOC_INFERENCE_ATTACKS_H_

// Inference strategies that fuse a per-user prior with the released
// aggregates into a posterior over the inference window.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "aggloc/mobility_model.h"
#include "aggloc/prior_knowledge.h"

namespace aggloc {

// Total order over users used to break ties in the greedy attacks: more
// location reports in the observation window first, then user id
// ascending. Users are referred to by their index in the input span.
class UserOrdering {
 public:
  static UserOrdering ByTotalReports(std::span<const GroundTruthMatrix> users,
                                     EpochRange observation);
  static UserOrdering FromReports(std::span<const std::string> user_ids,
                                  std::span<const int64_t> reports);

  // User indices, highest priority first.
  const std::vector<int>& order() const { return order_; }
  // Position of `user` in order().
  int rank(int user) const { return rank_[user]; }
  int size() const { return static_cast<int>(order_.size()); }

 private:
  std::vector<int> order_;
  std::vector<int> rank_;
};

// Column-wise Bayesian update: prior times aggregate profile, renormalized.
// Columns where the product vanishes keep the prior column; all-zero prior
// columns are treated as uniform.
absl::StatusOr<PosteriorMatrix> Bayes(const PriorMatrix& prior,
                                      const AggregateProfile& profile);

struct GreedyAttackResult {
  std::vector<PosteriorMatrix> posteriors;  // same order as the priors
  // MAX_ROI: cells whose count exceeded the number of users and was capped.
  int64_t clamped_cells = 0;
  // MAX_USER: aggregate counts no user could absorb.
  int64_t unconsumed_mass = 0;
};

// For every (s, t') assigns the a_{s,t'} users with the highest prior
// probability of being at s. Ties fall back to `ordering`.
absl::StatusOr<GreedyAttackResult> MaxRoi(std::span<const PriorMatrix> priors,
                                          const AggregateSeries& aggregate,
                                          const UserOrdering& ordering);

// For every epoch walks users in `ordering` and assigns each to all of its
// positive-prior ROIs whose aggregate is not yet consumed, stopping once the
// epoch's total count is covered.
absl::StatusOr<GreedyAttackResult> MaxUser(std::span<const PriorMatrix> priors,
                                           const AggregateSeries& aggregate,
                                           const UserOrdering& ordering);

// Normalizes assignment columns into distributions; empty columns put all
// mass on the null ROI.
absl::StatusOr<PosteriorMatrix> AssignmentToProfile(
    const PosteriorMatrix& assignment);

// Integer counts for the greedy attacks: round half up, clamp to
// [0, user_count].
AggregateSeries SanitizeCounts(const NoisyAggregateSeries& noisy);

}  // namespace aggloc

#endif  // AGGLOC_INFERENCE_ATTACKS_H_
