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

#ifndef AGGLOC_PRIOR_KNOWLEDGE_H_
#define AGGLOC_PRIOR_KNOWLEDGE_H_

// Adversarial prior knowledge built from the observation-period slice of a
// user's ground truth. Every prior covers the inference window of the
// TimeFrame, so its shape is roi_count x inference_epochs.

#include <cstdint>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "aggloc/mobility_model.h"

namespace aggloc {

enum class EstimateKind {
  kProbabilistic,  // columns are distributions over ROIs
  kAssignment,     // binary predictions of presence
};

std::string_view EstimateKindName(EstimateKind kind);

// Per-user knowledge over the inference window: the adversary's prior, or
// the posterior an inference attack produces from it.
struct KnowledgeMatrix {
  std::string user_id;
  EstimateKind kind = EstimateKind::kProbabilistic;
  RealMatrix cells;
  // M: presence marks the prior was built from. Zero for posteriors.
  int64_t observation_total = 0;
  // Probabilistic columns left all-zero (no evidence) or replaced by a
  // fallback during inference.
  int64_t flagged_columns = 0;
};

using PriorMatrix = KnowledgeMatrix;
using PosteriorMatrix = KnowledgeMatrix;

// Seasonality cycle c in epochs: 24 for daily, 168 for weekly, 1 for the
// previous epoch (hourly granularity).
struct SeasonalitySpec {
  int64_t cycle_epochs = 168;
};

// How often the user visits each ROI over the whole observation window,
// copied onto every inference epoch.
absl::StatusOr<PriorMatrix> FreqRoi(const GroundTruthMatrix& truth,
                                    const TimeFrame& frame);

// Per-phase ROI distribution. Phases are absolute epoch indices modulo the
// cycle, so inference epoch t' reads phase t' mod c. The observation window
// is truncated to its last whole number of cycles.
absl::StatusOr<PriorMatrix> RoiSeasonality(const GroundTruthMatrix& truth,
                                           const TimeFrame& frame,
                                           SeasonalitySpec season);

// Uniform over the non-null ROIs at phases where the user reported any real
// ROI during observation, and a unit mass on null elsewhere.
absl::StatusOr<PriorMatrix> TimeSeasonality(const GroundTruthMatrix& truth,
                                            const TimeFrame& frame,
                                            SeasonalitySpec season);

// Assignment: 1 where the probabilistic entry is >= delta.
absl::StatusOr<KnowledgeMatrix> PopularRois(const KnowledgeMatrix& estimate,
                                            double delta = 0.5);

// Assignment: ceiling of each probabilistic entry.
absl::StatusOr<KnowledgeMatrix> AllRois(const KnowledgeMatrix& estimate);

// Assignment copied from the ground truth one cycle earlier:
// P(s, t') = L(s, t' - c), with t' an absolute epoch index.
absl::StatusOr<PriorMatrix> LastSeason(const GroundTruthMatrix& truth,
                                       const TimeFrame& frame,
                                       SeasonalitySpec season);

}  // namespace aggloc

#endif  // AGGLOC_PRIOR_KNOWLEDGE_H_
