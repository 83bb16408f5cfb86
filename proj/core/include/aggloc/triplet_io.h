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

#ifndef AGGLOC_TRIPLET_IO_H_
#define AGGLOC_TRIPLET_IO_H_

// Sparse CSV interchange for per-entity matrices.
//
//   entity_id,roi_index,epoch_index          binary matrices
//   entity_id,roi_index,epoch_index,value    real matrices
//
// One row per non-zero cell; rows are grouped by entity in output order.
// Ground truth files list null-ROI marks explicitly, but readers recompute
// the null row, so files that omit them load identically.

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "aggloc/mobility_model.h"
#include "aggloc/prior_knowledge.h"

namespace aggloc {

struct MatrixShape {
  // Inferred from the largest index seen when unset.
  std::optional<int> roi_count;
  std::optional<int64_t> epoch_count;
};

struct NamedMatrix {
  std::string entity_id;
  RealMatrix cells;
};

absl::Status WriteGroundTruthTriplets(std::span<const GroundTruthMatrix> users,
                                      std::ostream& out);
// Epoch indices are written relative to the first epoch of the matrices.
absl::Status WriteKnowledgeTriplets(std::span<const KnowledgeMatrix> estimates,
                                    std::ostream& out);
absl::Status WriteRealTriplets(std::span<const NamedMatrix> matrices,
                               std::ostream& out);

// Entities come back sorted by id; all share one shape.
absl::StatusOr<std::vector<GroundTruthMatrix>> ReadGroundTruthTriplets(
    std::istream& in, MatrixShape shape = {});
absl::StatusOr<std::vector<NamedMatrix>> ReadRealTriplets(
    std::istream& in, MatrixShape shape = {});

}  // namespace aggloc

#endif  // AGGLOC_TRIPLET_IO_H_
