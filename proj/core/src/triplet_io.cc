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
#include <cmath>
#include <map>
#include <tuple>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "aggloc/status_macros.h"

namespace aggloc {
namespace {

constexpr absl::string_view kBinaryHeader = "entity_id,roi_index,epoch_index";
constexpr absl::string_view kRealHeader =
    "entity_id,roi_index,epoch_index,value";

struct Triplet {
  int roi = 0;
  int64_t epoch = 0;
  double value = 1.0;
};

using TripletTable = std::map<std::string, std::vector<Triplet>>;

absl::Status CheckStream(std::ostream& out) {
  if (!out) return absl::DataLossError("triplet write failed");
  return absl::OkStatus();
}

absl::StatusOr<TripletTable> ReadTable(std::istream& in, bool with_value,
                                       MatrixShape& shape) {
  const absl::string_view header = with_value ? kRealHeader : kBinaryHeader;
  std::string line;
  if (!std::getline(in, line) || absl::StripAsciiWhitespace(line) != header) {
    return absl::InvalidArgumentError(
        absl::StrCat("triplet file must start with '", header, "'"));
  }
  TripletTable table;
  int max_roi = -1;
  int64_t max_epoch = -1;
  int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const absl::string_view view = absl::StripAsciiWhitespace(line);
    if (view.empty()) continue;
    std::vector<absl::string_view> f = absl::StrSplit(view, ',');
    if (f.size() != (with_value ? 4u : 3u)) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": wrong field count"));
    }
    for (auto& p : f) p = absl::StripAsciiWhitespace(p);
    Triplet t;
    if (f[0].empty() || !absl::SimpleAtoi(f[1], &t.roi) ||
        !absl::SimpleAtoi(f[2], &t.epoch) || t.roi < 0 || t.epoch < 0 ||
        (with_value &&
         (!absl::SimpleAtod(f[3], &t.value) || !std::isfinite(t.value)))) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": malformed triplet '", view, "'"));
    }
    max_roi = std::max(max_roi, t.roi);
    max_epoch = std::max(max_epoch, t.epoch);
    table[std::string(f[0])].push_back(t);
  }
  if (!shape.roi_count) shape.roi_count = std::max(max_roi + 1, 2);
  if (!shape.epoch_count) shape.epoch_count = std::max<int64_t>(max_epoch + 1, 1);
  if (max_roi >= *shape.roi_count || max_epoch >= *shape.epoch_count) {
    return absl::OutOfRangeError(absl::StrCat(
        "triplet index (", max_roi, ", ", max_epoch, ") outside shape ",
        *shape.roi_count, " x ", *shape.epoch_count));
  }
  return table;
}

}  // namespace

absl::Status WriteGroundTruthTriplets(std::span<const GroundTruthMatrix> users,
                                      std::ostream& out) {
  out << kBinaryHeader << '\n';
  for (const GroundTruthMatrix& user : users) {
    const BinaryMatrix& cells = user.cells();
    for (int64_t t = 0; t < cells.cols(); ++t) {
      for (int s = 0; s < cells.rows(); ++s) {
        if (cells(s, t) != 0) out << user.user_id() << ',' << s << ',' << t << '\n';
      }
    }
  }
  return CheckStream(out);
}

absl::Status WriteRealTriplets(std::span<const NamedMatrix> matrices,
                               std::ostream& out) {
  out << kRealHeader << '\n';
  for (const NamedMatrix& m : matrices) {
    for (int64_t t = 0; t < m.cells.cols(); ++t) {
      for (int64_t s = 0; s < m.cells.rows(); ++s) {
        const double v = m.cells(s, t);
        if (v != 0.0) {
          out << absl::StrFormat("%s,%d,%d,%.17g\n", m.entity_id, s, t, v);
        }
      }
    }
  }
  return CheckStream(out);
}

absl::Status WriteKnowledgeTriplets(std::span<const KnowledgeMatrix> estimates,
                                    std::ostream& out) {
  std::vector<NamedMatrix> named;
  named.reserve(estimates.size());
  for (const KnowledgeMatrix& k : estimates) {
    named.push_back({k.user_id, k.cells});
  }
  return WriteRealTriplets(named, out);
}

absl::StatusOr<std::vector<GroundTruthMatrix>> ReadGroundTruthTriplets(
    std::istream& in, MatrixShape shape) {
  AGGLOC_ASSIGN_OR_RETURN(TripletTable table, ReadTable(in, false, shape));
  std::vector<GroundTruthMatrix> users;
  users.reserve(table.size());
  for (auto& [id, triplets] : table) {
    BinaryMatrix cells = BinaryMatrix::Zero(*shape.roi_count, *shape.epoch_count);
    for (const Triplet& t : triplets) cells(t.roi, t.epoch) = 1;
    AGGLOC_ASSIGN_OR_RETURN(GroundTruthMatrix user,
                            GroundTruthMatrix::FromPresence(id, std::move(cells)));
    users.push_back(std::move(user));
  }
  return users;
}

absl::StatusOr<std::vector<NamedMatrix>> ReadRealTriplets(std::istream& in,
                                                          MatrixShape shape) {
  AGGLOC_ASSIGN_OR_RETURN(TripletTable table, ReadTable(in, true, shape));
  std::vector<NamedMatrix> out;
  out.reserve(table.size());
  for (auto& [id, triplets] : table) {
    NamedMatrix m{id, RealMatrix::Zero(*shape.roi_count, *shape.epoch_count)};
    for (const Triplet& t : triplets) m.cells(t.roi, t.epoch) = t.value;
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace aggloc
