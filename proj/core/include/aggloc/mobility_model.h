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

#ifndef AGGLOC_MOBILITY_MODEL_H_
#define AGGLOC_MOBILITY_MODEL_H_

// Matrix data model: per-user ground truth, mobility profiles and the
// aggregate location time-series released over an inference window.
//
// Rows are ROIs and columns are epochs. Row 0 is always the null ROI, which
// carries a presence mark whenever the user reported nothing in an epoch.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "Eigen/Core"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "aggloc/noise_spec.h"

namespace aggloc {

using BinaryMatrix = Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic>;
using CountMatrix = Eigen::Matrix<int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using RealMatrix = Eigen::MatrixXd;

inline constexpr int kNullRoi = 0;
inline constexpr double kStochasticTolerance = 1e-9;

// Half-open range of epoch indices [begin, end).
struct EpochRange {
  int64_t begin = 0;
  int64_t end = 0;

  int64_t size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool operator==(const EpochRange&) const = default;
};

class RoiSpace {
 public:
  // `labels[0]` names the null ROI.
  static absl::StatusOr<RoiSpace> Create(std::vector<std::string> labels);
  // Labels "null", "1", "2", ...
  static absl::StatusOr<RoiSpace> Anonymous(int roi_count);

  int roi_count() const { return static_cast<int>(labels_.size()); }
  int null_index() const { return kNullRoi; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  explicit RoiSpace(std::vector<std::string> labels)
      : labels_(std::move(labels)) {}

  std::vector<std::string> labels_;
};

// Epoch layout of a collection: the observation window is the prefix
// [0, observation_epochs) and the inference window follows it directly.
struct TimeFrame {
  int64_t total_epochs = 0;
  int64_t epoch_seconds = 3600;
  int64_t observation_epochs = 0;
  int64_t inference_epochs = 0;

  absl::Status Validate() const;
  EpochRange observation() const { return {0, observation_epochs}; }
  EpochRange inference() const {
    return {observation_epochs, observation_epochs + inference_epochs};
  }
};

// Binary ROI x epoch presence matrix of one user.
class GroundTruthMatrix {
 public:
  // Validates every invariant: binary entries, at least one mark per column,
  // and the null row set exactly where no other ROI is marked.
  static absl::StatusOr<GroundTruthMatrix> Create(std::string user_id,
                                                  BinaryMatrix cells);
  // Recomputes the null row from the non-null rows, then validates.
  static absl::StatusOr<GroundTruthMatrix> FromPresence(std::string user_id,
                                                        BinaryMatrix cells);

  const std::string& user_id() const { return user_id_; }
  const BinaryMatrix& cells() const { return cells_; }
  int roi_count() const { return static_cast<int>(cells_.rows()); }
  int64_t epoch_count() const { return cells_.cols(); }

  // Columns restricted to `window`; the window must lie inside the matrix.
  BinaryMatrix Slice(EpochRange window) const;
  // Number of non-null presence marks inside `window`.
  int64_t ActivityCount(EpochRange window) const;
  // Number of presence marks inside `window`, null row included.
  int64_t ObservationCount(EpochRange window) const;

 private:
  GroundTruthMatrix(std::string user_id, BinaryMatrix cells)
      : user_id_(std::move(user_id)), cells_(std::move(cells)) {}

  std::string user_id_;
  BinaryMatrix cells_;
};

struct MobilityProfile {
  std::string user_id;
  RealMatrix cells;  // column-stochastic
};

struct AggregateSeries {
  CountMatrix cells;  // roi_count x inference epochs
  int64_t user_count = 0;
  bool includes_null = true;
};

struct AggregateProfile {
  RealMatrix cells;  // column-stochastic
};

// Perturbed release A'. Entries are real and may be negative.
struct NoisyAggregateSeries {
  RealMatrix cells;
  int64_t user_count = 0;
  NoiseSpec provenance;
};

struct AggregateOptions {
  // When false the released null row is zeroed; the null ROI then carries no
  // evidence for inference.
  bool include_null = true;
};

// Normalizes every column of a ground-truth matrix (or a slice of one).
absl::StatusOr<RealMatrix> NormalizeColumns(const BinaryMatrix& cells);
absl::StatusOr<MobilityProfile> BuildProfile(const GroundTruthMatrix& truth);
absl::StatusOr<MobilityProfile> BuildProfile(const GroundTruthMatrix& truth,
                                             EpochRange window);

absl::StatusOr<AggregateSeries> Aggregate(
    std::span<const GroundTruthMatrix> users, EpochRange window,
    const AggregateOptions& options = {});

AggregateProfile BuildAggregateProfile(const AggregateSeries& aggregate);
// Negative entries are clamped to zero before normalizing; columns with a
// non-positive clamped sum become uniform over all ROIs.
AggregateProfile BuildAggregateProfile(const NoisyAggregateSeries& aggregate);
AggregateProfile BuildAggregateProfile(const RealMatrix& counts);

bool IsColumnStochastic(const RealMatrix& cells,
                        double tolerance = kStochasticTolerance);
bool IsBinary(const RealMatrix& cells);

}  // namespace aggloc

#endif  // AGGLOC_MOBILITY_MODEL_H_
