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
#include <cmath>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"

namespace aggloc {

absl::StatusOr<RoiSpace> RoiSpace::Create(std::vector<std::string> labels) {
  if (labels.size() < 2) {
    return absl::InvalidArgumentError(
        "RoiSpace needs at least the null ROI and one real ROI");
  }
  std::set<std::string> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size()) {
    return absl::InvalidArgumentError("RoiSpace labels must be unique");
  }
  return RoiSpace(std::move(labels));
}

absl::StatusOr<RoiSpace> RoiSpace::Anonymous(int roi_count) {
  if (roi_count < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("roi_count must be >= 2, got ", roi_count));
  }
  std::vector<std::string> labels;
  labels.reserve(roi_count);
  labels.emplace_back("null");
  for (int i = 1; i < roi_count; ++i) labels.push_back(absl::StrCat(i));
  return RoiSpace(std::move(labels));
}

absl::Status TimeFrame::Validate() const {
  if (total_epochs <= 0 || epoch_seconds <= 0 || observation_epochs <= 0 ||
      inference_epochs <= 0) {
    return absl::InvalidArgumentError(
        "time frame fields must all be positive");
  }
  if (observation_epochs + inference_epochs > total_epochs) {
    return absl::InvalidArgumentError(absl::StrCat(
        "observation (", observation_epochs, ") + inference (",
        inference_epochs, ") epochs exceed the frame (", total_epochs, ")"));
  }
  return absl::OkStatus();
}

absl::StatusOr<GroundTruthMatrix> GroundTruthMatrix::Create(
    std::string user_id, BinaryMatrix cells) {
  if (cells.rows() < 2 || cells.cols() < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "ground truth of user ", user_id, " has invalid shape ", cells.rows(),
        "x", cells.cols()));
  }
  for (Eigen::Index t = 0; t < cells.cols(); ++t) {
    int non_null = 0;
    for (Eigen::Index s = 0; s < cells.rows(); ++s) {
      const uint8_t v = cells(s, t);
      if (v > 1) {
        return absl::InvalidArgumentError(absl::StrCat(
            "ground truth of user ", user_id, " is not binary at (", s, ",",
            t, ")"));
      }
      if (s != kNullRoi) non_null += v;
    }
    const bool null_set = cells(kNullRoi, t) == 1;
    if (null_set == (non_null > 0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "ground truth of user ", user_id, ": null mark at epoch ", t,
          (null_set ? " coexists with a real ROI" : " is missing")));
    }
  }
  return GroundTruthMatrix(std::move(user_id), std::move(cells));
}

absl::StatusOr<GroundTruthMatrix> GroundTruthMatrix::FromPresence(
    std::string user_id, BinaryMatrix cells) {
  if (cells.rows() >= 2) {
    for (Eigen::Index t = 0; t < cells.cols(); ++t) {
      const bool active =
          (cells.col(t).tail(cells.rows() - 1).array() != 0).any();
      cells(kNullRoi, t) = active ? 0 : 1;
    }
  }
  return Create(std::move(user_id), std::move(cells));
}

BinaryMatrix GroundTruthMatrix::Slice(EpochRange window) const {
  return cells_.middleCols(window.begin, window.size());
}

int64_t GroundTruthMatrix::ActivityCount(EpochRange window) const {
  return cells_.middleCols(window.begin, window.size())
      .bottomRows(cells_.rows() - 1)
      .cast<int64_t>()
      .sum();
}

int64_t GroundTruthMatrix::ObservationCount(EpochRange window) const {
  return cells_.middleCols(window.begin, window.size()).cast<int64_t>().sum();
}

absl::StatusOr<RealMatrix> NormalizeColumns(const BinaryMatrix& cells) {
  RealMatrix out = cells.cast<double>();
  for (Eigen::Index t = 0; t < out.cols(); ++t) {
    const double total = out.col(t).sum();
    if (total <= 0.0) {
      return absl::FailedPreconditionError(
          absl::StrCat("column ", t, " has no presence mark"));
    }
    out.col(t) /= total;
  }
  return out;
}

absl::StatusOr<MobilityProfile> BuildProfile(const GroundTruthMatrix& truth) {
  return BuildProfile(truth, {0, truth.epoch_count()});
}

absl::StatusOr<MobilityProfile> BuildProfile(const GroundTruthMatrix& truth,
                                             EpochRange window) {
  if (window.begin < 0 || window.end > truth.epoch_count() || window.empty()) {
    return absl::OutOfRangeError("profile window outside the ground truth");
  }
  absl::StatusOr<RealMatrix> cells = NormalizeColumns(truth.Slice(window));
  if (!cells.ok()) return cells.status();
  return MobilityProfile{truth.user_id(), *std::move(cells)};
}

absl::StatusOr<AggregateSeries> Aggregate(
    std::span<const GroundTruthMatrix> users, EpochRange window,
    const AggregateOptions& options) {
  if (users.empty()) {
    return absl::InvalidArgumentError("cannot aggregate an empty user set");
  }
  const int rois = users.front().roi_count();
  const int64_t epochs = users.front().epoch_count();
  if (window.begin < 0 || window.end > epochs || window.empty()) {
    return absl::OutOfRangeError(absl::StrCat(
        "aggregation window [", window.begin, ",", window.end,
        ") outside the frame of ", epochs, " epochs"));
  }
  AggregateSeries out;
  out.cells = CountMatrix::Zero(rois, window.size());
  out.user_count = static_cast<int64_t>(users.size());
  out.includes_null = options.include_null;
  for (const GroundTruthMatrix& user : users) {
    if (user.roi_count() != rois || user.epoch_count() != epochs) {
      return absl::InvalidArgumentError(absl::StrCat(
          "user ", user.user_id(), " has shape ", user.roi_count(), "x",
          user.epoch_count(), ", expected ", rois, "x", epochs));
    }
    out.cells += user.Slice(window).cast<int64_t>();
  }
  if (!options.include_null) out.cells.row(kNullRoi).setZero();
  return out;
}

AggregateProfile BuildAggregateProfile(const RealMatrix& counts) {
  AggregateProfile out;
  out.cells = counts.cwiseMax(0.0);
  const double uniform = 1.0 / static_cast<double>(out.cells.rows());
  for (Eigen::Index t = 0; t < out.cells.cols(); ++t) {
    const double total = out.cells.col(t).sum();
    if (total > 0.0) {
      out.cells.col(t) /= total;
    } else {
      out.cells.col(t).setConstant(uniform);
    }
  }
  return out;
}

AggregateProfile BuildAggregateProfile(const AggregateSeries& aggregate) {
  return BuildAggregateProfile(RealMatrix(aggregate.cells.cast<double>()));
}

AggregateProfile BuildAggregateProfile(const NoisyAggregateSeries& aggregate) {
  return BuildAggregateProfile(aggregate.cells);
}

bool IsColumnStochastic(const RealMatrix& cells, double tolerance) {
  if ((cells.array() < -tolerance).any() ||
      (cells.array() > 1.0 + tolerance).any()) {
    return false;
  }
  for (Eigen::Index t = 0; t < cells.cols(); ++t) {
    if (std::abs(cells.col(t).sum() - 1.0) > tolerance) return false;
  }
  return true;
}

bool IsBinary(const RealMatrix& cells) {
  return ((cells.array() == 0.0) || (cells.array() == 1.0)).all();
}

}  // namespace aggloc
