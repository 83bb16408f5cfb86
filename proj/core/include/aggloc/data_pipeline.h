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

#ifndef AGGLOC_DATA_PIPELINE_H_
#define AGGLOC_DATA_PIPELINE_H_

// Turns raw location reports into per-user ground truth matrices, splits
// the collection into observation and inference windows, and generates
// synthetic corpora for testing without private datasets.
//
// Input CSV schemas (header row required, UTF-8):
//   GPS traces:   user_id,timestamp,lat,lon
//   Trip records: user_id,t_in,station_in,t_out,station_out
//   Stations:     station_id,roi_index      (roi_index >= 1; 0 is null)
// Timestamps are integer epoch-seconds.

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "aggloc/mobility_model.h"

namespace aggloc {

struct GeoPoint {
  double latitude = 0.0;
  double longitude = 0.0;
};

struct RawTraceRecord {
  std::string user_id;
  int64_t timestamp = 0;
  std::variant<std::string, GeoPoint> location;  // station id or coordinates
};

// Regular latitude/longitude grid. Cell (row, col) covers
// [min + row * height, min + (row + 1) * height) in latitude and likewise in
// longitude, and maps to ROI 1 + row * cols + col.
struct GridSpec {
  double min_latitude = 0.0;
  double max_latitude = 0.0;
  double min_longitude = 0.0;
  double max_longitude = 0.0;
  int rows = 0;
  int cols = 0;

  absl::Status Validate() const;
  int roi_count() const { return rows * cols + 1; }
  // Nullopt outside the half-open bounds.
  std::optional<int> RoiOf(GeoPoint point) const;
};

using StationDictionary = std::unordered_map<std::string, int>;

struct IngestOptions {
  int64_t start_time = 0;  // epoch-seconds of epoch 0
  int64_t total_epochs = 0;
  int64_t epoch_seconds = 3600;
  std::optional<GridSpec> grid;
  // Used when `grid` is empty; every station-id location is looked up here.
  StationDictionary stations;
  int roi_count = 0;  // station mode; derived from the dictionary when 0
};

struct IngestStats {
  int64_t records = 0;
  int64_t accepted = 0;
  int64_t duplicates = 0;
  int64_t out_of_window = 0;
  int64_t out_of_grid = 0;
  int64_t unknown_station = 0;
  int64_t wrong_location_kind = 0;
};

struct IngestResult {
  std::vector<GroundTruthMatrix> users;  // sorted by user id
  IngestStats stats;
};

// Single-pass fold of a record stream into ground truth. Reports landing in
// the same (user, ROI, epoch) collapse to one mark; epochs without any
// report get the null mark.
class Ingestor {
 public:
  static absl::StatusOr<Ingestor> Create(IngestOptions options);

  void Add(const RawTraceRecord& record);
  const IngestStats& stats() const { return stats_; }
  absl::StatusOr<IngestResult> Finish() &&;

 private:
  explicit Ingestor(IngestOptions options) : options_(std::move(options)) {}

  IngestOptions options_;
  int roi_count_ = 0;
  IngestStats stats_;
  // Per user: (epoch, roi) marks.
  std::map<std::string, std::set<std::pair<int64_t, int>>> marks_;
};

absl::StatusOr<IngestResult> Ingest(std::span<const RawTraceRecord> records,
                                    IngestOptions options);

using RecordSink = std::function<void(const RawTraceRecord&)>;

// Stream parsers. Trip rows emit one record per endpoint.
absl::Status ReadGpsCsv(std::istream& in, const RecordSink& sink);
absl::Status ReadTripCsv(std::istream& in, const RecordSink& sink);
absl::StatusOr<StationDictionary> ReadStationDictionary(std::istream& in);

struct WindowSplit {
  EpochRange observation;
  EpochRange inference;
};

// Observation is the first `observation_weeks`, inference the following
// `inference_weeks`.
absl::StatusOr<WindowSplit> SplitWeeks(int64_t total_epochs,
                                       int64_t epoch_seconds,
                                       int observation_weeks,
                                       int inference_weeks);

// The n users with the most non-null marks; ties go to the smaller id.
// Output is sorted by that ranking.
absl::StatusOr<std::vector<GroundTruthMatrix>> TopUsers(
    std::span<const GroundTruthMatrix> users, int64_t n);

enum class SynthModel { kCommuter, kCab };

std::string_view SynthModelName(SynthModel model);
absl::StatusOr<SynthModel> ParseSynthModel(std::string_view name);

struct SynthModelSpec {
  SynthModel model = SynthModel::kCommuter;
  int user_count = 100;
  int roi_count = 26;  // includes the null ROI
  int weeks = 4;
  // Probability that a scheduled report follows the personal routine rather
  // than landing on a uniformly random non-null ROI.
  double regularity = 0.9;
  uint64_t seed = 1;

  absl::Status Validate() const;
};

inline constexpr int64_t kHoursPerWeek = 168;

// Hourly synthetic corpus, deterministic under `spec.seed`.
//
// Commuters: home/work/leisure ROIs plus fixed departure hours. Weekdays
// schedule home -> work in the morning and work -> home in the evening;
// Saturday has one home -> leisure outing; Sunday is empty.
//
// Cabs: a 16-hour daily shift on a near-square grid of the non-null ROIs;
// each active hour reports the current cell, then the cab keeps heading in
// its direction (or turns at the border) or jumps to a random cell.
absl::StatusOr<std::vector<GroundTruthMatrix>> Synthesize(
    const SynthModelSpec& spec, int threads = 1);

}  // namespace aggloc

#endif  // AGGLOC_DATA_PIPELINE_H_
