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

#include "aggloc/inference_attacks.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace aggloc {
namespace {

absl::Status CheckGreedyInputs(std::span<const PriorMatrix> priors,
                               const AggregateSeries& aggregate,
                               const UserOrdering& ordering) {
  if (priors.empty()) {
    return absl::InvalidArgumentError("greedy attack needs at least one user");
  }
  if (ordering.size() != static_cast<int>(priors.size())) {
    return absl::InvalidArgumentError(absl::StrCat(
        "ordering covers ", ordering.size(), " users, priors cover ",
        priors.size()));
  }
  for (const PriorMatrix& prior : priors) {
    if (prior.kind != EstimateKind::kProbabilistic) {
      return absl::InvalidArgumentError(absl::StrCat(
          "greedy attacks need probabilistic priors; user ", prior.user_id,
          " has an assignment prior"));
    }
    if (prior.cells.rows() != aggregate.cells.rows() ||
        prior.cells.cols() != aggregate.cells.cols()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "prior of user ", prior.user_id, " is ", prior.cells.rows(), "x",
          prior.cells.cols(), ", aggregate is ", aggregate.cells.rows(), "x",
          aggregate.cells.cols()));
    }
  }
  if ((aggregate.cells.array() < 0).any()) {
    return absl::InvalidArgumentError(
        "aggregate counts must be non-negative; sanitize noisy releases first");
  }
  return absl::OkStatus();
}

std::vector<PosteriorMatrix> EmptyAssignments(
    std::span<const PriorMatrix> priors) {
  std::vector<PosteriorMatrix> out;
  out.reserve(priors.size());
  for (const PriorMatrix& prior : priors) {
    PosteriorMatrix post;
    post.user_id = prior.user_id;
    post.kind = EstimateKind::kAssignment;
    post.cells = RealMatrix::Zero(prior.cells.rows(), prior.cells.cols());
    out.push_back(std::move(post));
  }
  return out;
}

}  // namespace

UserOrdering UserOrdering::ByTotalReports(
    std::span<const GroundTruthMatrix> users, EpochRange observation) {
  std::vector<std::string> ids;
  std::vector<int64_t> reports;
  ids.reserve(users.size());
  reports.reserve(users.size());
  for (const GroundTruthMatrix& user : users) {
    ids.push_back(user.user_id());
    reports.push_back(user.ActivityCount(observation));
  }
  return FromReports(ids, reports);
}

UserOrdering UserOrdering::FromReports(std::span<const std::string> user_ids,
                                       std::span<const int64_t> reports) {
  UserOrdering out;
  const int n = static_cast<int>(user_ids.size());
  out.order_.resize(n);
  std::iota(out.order_.begin(), out.order_.end(), 0);
  std::sort(out.order_.begin(), out.order_.end(), [&](int a, int b) {
    if (reports[a] != reports[b]) return reports[a] > reports[b];
    if (user_ids[a] != user_ids[b]) return user_ids[a] < user_ids[b];
    return a < b;
  });
  out.rank_.resize(n);
  for (int r = 0; r < n; ++r) out.rank_[out.order_[r]] = r;
  return out;
}

absl::StatusOr<PosteriorMatrix> Bayes(const PriorMatrix& prior,
                                      const AggregateProfile& profile) {
  if (prior.kind != EstimateKind::kProbabilistic) {
    return absl::InvalidArgumentError(absl::StrCat(
        "BAYES needs a probabilistic prior; user ", prior.user_id,
        " has an assignment prior"));
  }
  if (prior.cells.rows() != profile.cells.rows() ||
      prior.cells.cols() != profile.cells.cols()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "prior is ", prior.cells.rows(), "x", prior.cells.cols(),
        ", aggregate profile is ", profile.cells.rows(), "x",
        profile.cells.cols()));
  }
  PosteriorMatrix post;
  post.user_id = prior.user_id;
  post.kind = EstimateKind::kProbabilistic;
  post.cells.resize(prior.cells.rows(), prior.cells.cols());
  for (Eigen::Index t = 0; t < prior.cells.cols(); ++t) {
    const auto prior_col = prior.cells.col(t);
    if (prior_col.sum() <= 0.0) {
      post.cells.col(t) = profile.cells.col(t);
      ++post.flagged_columns;
      continue;
    }
    Eigen::VectorXd product = prior_col.cwiseProduct(profile.cells.col(t));
    const double evidence = product.sum();
    if (evidence > 0.0) {
      post.cells.col(t) = product / evidence;
    } else {
      post.cells.col(t) = prior_col;
      ++post.flagged_columns;
    }
  }
  return post;
}

absl::StatusOr<GreedyAttackResult> MaxRoi(std::span<const PriorMatrix> priors,
                                          const AggregateSeries& aggregate,
                                          const UserOrdering& ordering) {
  if (absl::Status s = CheckGreedyInputs(priors, aggregate, ordering);
      !s.ok()) {
    return s;
  }
  const int users = static_cast<int>(priors.size());
  GreedyAttackResult result;
  result.posteriors = EmptyAssignments(priors);

  std::vector<int> candidates(users);
  for (Eigen::Index t = 0; t < aggregate.cells.cols(); ++t) {
    for (Eigen::Index s = 0; s < aggregate.cells.rows(); ++s) {
      int64_t wanted = aggregate.cells(s, t);
      if (wanted == 0) continue;
      if (wanted > users) {
        wanted = users;
        ++result.clamped_cells;
      }
      std::iota(candidates.begin(), candidates.end(), 0);
      const auto more_likely = [&](int a, int b) {
        const double pa = priors[a].cells(s, t);
        const double pb = priors[b].cells(s, t);
        if (pa != pb) return pa > pb;
        return ordering.rank(a) < ordering.rank(b);
      };
      const auto cut = candidates.begin() + wanted;
      if (cut != candidates.end()) {
        std::nth_element(candidates.begin(), cut, candidates.end(),
                         more_likely);
      }
      for (auto it = candidates.begin(); it != cut; ++it) {
        result.posteriors[*it].cells(s, t) = 1.0;
      }
    }
  }
  return result;
}

absl::StatusOr<GreedyAttackResult> MaxUser(std::span<const PriorMatrix> priors,
                                           const AggregateSeries& aggregate,
                                           const UserOrdering& ordering) {
  if (absl::Status s = CheckGreedyInputs(priors, aggregate, ordering);
      !s.ok()) {
    return s;
  }
  GreedyAttackResult result;
  result.posteriors = EmptyAssignments(priors);
  const Eigen::Index rois = aggregate.cells.rows();

  std::vector<int64_t> consumed(rois);
  for (Eigen::Index t = 0; t < aggregate.cells.cols(); ++t) {
    const int64_t released = aggregate.cells.col(t).sum();
    std::fill(consumed.begin(), consumed.end(), 0);
    int64_t assigned = 0;
    for (const int u : ordering.order()) {
      if (assigned == released) break;
      const auto prior_col = priors[u].cells.col(t);
      for (Eigen::Index i = 0; i < rois; ++i) {
        if (prior_col(i) > 0.0 && consumed[i] < aggregate.cells(i, t)) {
          result.posteriors[u].cells(i, t) = 1.0;
          ++consumed[i];
          ++assigned;
        }
      }
    }
    result.unconsumed_mass += released - assigned;
  }
  return result;
}

absl::StatusOr<PosteriorMatrix> AssignmentToProfile(
    const PosteriorMatrix& assignment) {
  if (assignment.kind != EstimateKind::kAssignment ||
      !IsBinary(assignment.cells)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "assignment of user ", assignment.user_id, " is not binary"));
  }
  PosteriorMatrix out = assignment;
  out.kind = EstimateKind::kProbabilistic;
  for (Eigen::Index t = 0; t < out.cells.cols(); ++t) {
    const double marks = out.cells.col(t).sum();
    if (marks > 0.0) {
      out.cells.col(t) /= marks;
    } else {
      out.cells(kNullRoi, t) = 1.0;
    }
  }
  return out;
}

AggregateSeries SanitizeCounts(const NoisyAggregateSeries& noisy) {
  AggregateSeries out;
  out.user_count = noisy.user_count;
  out.cells = noisy.cells.unaryExpr([&](double v) {
    const double rounded = std::floor(v + 0.5);
    return static_cast<int64_t>(
        std::clamp(rounded, 0.0, static_cast<double>(noisy.user_count)));
  });
  return out;
}

}  // namespace aggloc
