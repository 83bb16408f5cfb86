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

#include <cmath>

#include "absl/strings/str_cat.h"
#include "aggloc/status_macros.h"

namespace aggloc {
namespace {

absl::Status CheckFrame(const GroundTruthMatrix& truth,
                        const TimeFrame& frame) {
  AGGLOC_RETURN_IF_ERROR(frame.Validate());
  if (truth.epoch_count() < frame.inference().end) {
    return absl::InvalidArgumentError(absl::StrCat(
        "ground truth of user ", truth.user_id(), " covers ",
        truth.epoch_count(), " epochs, time frame needs ",
        frame.inference().end));
  }
  return absl::OkStatus();
}

// Last whole number of cycles inside the observation window.
absl::StatusOr<EpochRange> SeasonalWindow(const TimeFrame& frame,
                                          SeasonalitySpec season) {
  const int64_t c = season.cycle_epochs;
  if (c <= 0 || c > frame.observation_epochs) {
    return absl::InvalidArgumentError(
        absl::StrCat("seasonality cycle ", c, " must be in [1, ",
                     frame.observation_epochs, "]"));
  }
  const int64_t usable = (frame.observation_epochs / c) * c;
  return EpochRange{frame.observation_epochs - usable,
                    frame.observation_epochs};
}

// Marks per (ROI, phase) summed over the window.
RealMatrix PhaseCounts(const GroundTruthMatrix& truth, EpochRange window,
                       int64_t cycle) {
  RealMatrix counts = RealMatrix::Zero(truth.roi_count(), cycle);
  for (int64_t t = window.begin; t < window.end; ++t) {
    counts.col(t % cycle) += truth.cells().col(t).cast<double>();
  }
  return counts;
}

}  // namespace

std::string_view EstimateKindName(EstimateKind kind) {
  return kind == EstimateKind::kProbabilistic ? "probabilistic" : "assignment";
}

absl::StatusOr<PriorMatrix> FreqRoi(const GroundTruthMatrix& truth,
                                    const TimeFrame& frame) {
  AGGLOC_RETURN_IF_ERROR(CheckFrame(truth, frame));
  const EpochRange observed = frame.observation();
  const BinaryMatrix slice = truth.Slice(observed);
  const Eigen::VectorXd visits = slice.cast<double>().rowwise().sum();
  const double total = visits.sum();  // M; never zero, every column is marked

  PriorMatrix prior;
  prior.user_id = truth.user_id();
  prior.kind = EstimateKind::kProbabilistic;
  prior.observation_total = static_cast<int64_t>(total);
  prior.cells = (visits / total).replicate(1, frame.inference_epochs);
  return prior;
}

absl::StatusOr<PriorMatrix> RoiSeasonality(const GroundTruthMatrix& truth,
                                           const TimeFrame& frame,
                                           SeasonalitySpec season) {
  AGGLOC_RETURN_IF_ERROR(CheckFrame(truth, frame));
  AGGLOC_ASSIGN_OR_RETURN(const EpochRange window,
                          SeasonalWindow(frame, season));
  const int64_t c = season.cycle_epochs;
  RealMatrix phases = PhaseCounts(truth, window, c);

  PriorMatrix prior;
  prior.user_id = truth.user_id();
  prior.kind = EstimateKind::kProbabilistic;
  prior.observation_total = static_cast<int64_t>(phases.sum());
  for (int64_t i = 0; i < c; ++i) {
    const double reports = phases.col(i).sum();
    if (reports > 0.0) phases.col(i) /= reports;
  }
  const EpochRange inference = frame.inference();
  prior.cells.resize(truth.roi_count(), inference.size());
  for (int64_t t = inference.begin; t < inference.end; ++t) {
    auto column = prior.cells.col(t - inference.begin);
    column = phases.col(t % c);
    if (column.sum() <= 0.0) ++prior.flagged_columns;
  }
  return prior;
}

absl::StatusOr<PriorMatrix> TimeSeasonality(const GroundTruthMatrix& truth,
                                            const TimeFrame& frame,
                                            SeasonalitySpec season) {
  AGGLOC_RETURN_IF_ERROR(CheckFrame(truth, frame));
  AGGLOC_ASSIGN_OR_RETURN(const EpochRange window,
                          SeasonalWindow(frame, season));
  const int64_t c = season.cycle_epochs;
  const RealMatrix phases = PhaseCounts(truth, window, c);
  const int real_rois = truth.roi_count() - 1;

  PriorMatrix prior;
  prior.user_id = truth.user_id();
  prior.kind = EstimateKind::kProbabilistic;
  prior.observation_total = static_cast<int64_t>(phases.sum());
  const EpochRange inference = frame.inference();
  prior.cells = RealMatrix::Zero(truth.roi_count(), inference.size());
  for (int64_t t = inference.begin; t < inference.end; ++t) {
    auto column = prior.cells.col(t - inference.begin);
    const double active_reports = phases.col(t % c).tail(real_rois).sum();
    if (active_reports > 0.0) {
      column.tail(real_rois).setConstant(1.0 / real_rois);
    } else {
      column(kNullRoi) = 1.0;
    }
  }
  return prior;
}

absl::StatusOr<KnowledgeMatrix> PopularRois(const KnowledgeMatrix& estimate,
                                            double delta) {
  if (estimate.kind != EstimateKind::kProbabilistic) {
    return absl::InvalidArgumentError("POP needs a probabilistic input");
  }
  if (!(delta > 0.0 && delta <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("POP threshold must be in (0, 1], got ", delta));
  }
  KnowledgeMatrix out = estimate;
  out.kind = EstimateKind::kAssignment;
  out.cells = (estimate.cells.array() >= delta).cast<double>();
  return out;
}

absl::StatusOr<KnowledgeMatrix> AllRois(const KnowledgeMatrix& estimate) {
  if (estimate.kind != EstimateKind::kProbabilistic) {
    return absl::InvalidArgumentError("ALL needs a probabilistic input");
  }
  KnowledgeMatrix out = estimate;
  out.kind = EstimateKind::kAssignment;
  out.cells = estimate.cells.array().ceil().min(1.0).max(0.0);
  return out;
}

absl::StatusOr<PriorMatrix> LastSeason(const GroundTruthMatrix& truth,
                                       const TimeFrame& frame,
                                       SeasonalitySpec season) {
  AGGLOC_RETURN_IF_ERROR(CheckFrame(truth, frame));
  const int64_t c = season.cycle_epochs;
  const EpochRange inference = frame.inference();
  if (c <= 0 || inference.begin - c < 0) {
    return absl::OutOfRangeError(absl::StrCat(
        "last-season window underflows: first inference epoch ",
        inference.begin, " minus cycle ", c));
  }
  PriorMatrix prior;
  prior.user_id = truth.user_id();
  prior.kind = EstimateKind::kAssignment;
  prior.cells =
      truth.Slice({inference.begin - c, inference.end - c}).cast<double>();
  prior.observation_total = static_cast<int64_t>(prior.cells.sum());
  return prior;
}

}  // namespace aggloc
