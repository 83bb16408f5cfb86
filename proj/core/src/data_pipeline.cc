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

#include "aggloc/data_pipeline.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "aggloc/parallel.h"
#include "aggloc/random.h"
#include "aggloc/status_macros.h"

namespace aggloc {
namespace {

// Index of the half-open cell [min + i*step, min + (i+1)*step) holding
// `value`. The floating-point estimate is corrected against the exact cell
// boundaries.
std::optional<int> CellIndex(double value, double min, double max, int cells) {
  if (!(value >= min) || !(value < max)) return std::nullopt;
  const double step = (max - min) / cells;
  const auto lower = [&](int i) { return min + i * step; };
  int i = std::clamp(static_cast<int>(std::floor((value - min) / step)), 0,
                     cells - 1);
  if (value < lower(i) && i > 0) --i;
  if (i + 1 < cells && value >= lower(i + 1)) ++i;
  return i;
}

absl::StatusOr<std::vector<absl::string_view>> SplitRow(absl::string_view line,
                                                       size_t fields,
                                                       int64_t line_no) {
  std::vector<absl::string_view> parts = absl::StrSplit(line, ',');
  if (parts.size() != fields) {
    return absl::InvalidArgumentError(
        absl::StrCat("line ", line_no, ": expected ", fields, " fields, got ",
                     parts.size()));
  }
  for (absl::string_view& p : parts) p = absl::StripAsciiWhitespace(p);
  return parts;
}

absl::Status ForEachDataLine(
    std::istream& in, absl::string_view expected_header,
    const std::function<absl::Status(absl::string_view, int64_t)>& row) {
  std::string line;
  if (!std::getline(in, line)) {
    return absl::InvalidArgumentError(
        absl::StrCat("missing header '", expected_header, "'"));
  }
  if (absl::StripAsciiWhitespace(line) != expected_header) {
    return absl::InvalidArgumentError(absl::StrCat(
        "header '", absl::StripAsciiWhitespace(line), "' should be '",
        expected_header, "'"));
  }
  int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view view = absl::StripAsciiWhitespace(line);
    if (view.empty()) continue;
    AGGLOC_RETURN_IF_ERROR(row(view, line_no));
  }
  return absl::OkStatus();
}

absl::Status BadField(int64_t line_no, absl::string_view what,
                      absl::string_view value) {
  return absl::InvalidArgumentError(
      absl::StrCat("line ", line_no, ": bad ", what, " '", value, "'"));
}

}  // namespace

absl::Status GridSpec::Validate() const {
  if (rows <= 0 || cols <= 0) {
    return absl::InvalidArgumentError("grid rows and cols must be positive");
  }
  if (!(max_latitude > min_latitude) || !(max_longitude > min_longitude)) {
    return absl::InvalidArgumentError("grid max must exceed min on both axes");
  }
  return absl::OkStatus();
}

std::optional<int> GridSpec::RoiOf(GeoPoint point) const {
  const std::optional<int> row =
      CellIndex(point.latitude, min_latitude, max_latitude, rows);
  const std::optional<int> col =
      CellIndex(point.longitude, min_longitude, max_longitude, cols);
  if (!row || !col) return std::nullopt;
  return 1 + *row * cols + *col;
}

absl::StatusOr<Ingestor> Ingestor::Create(IngestOptions options) {
  if (options.total_epochs <= 0 || options.epoch_seconds <= 0) {
    return absl::InvalidArgumentError(
        "ingest needs positive total_epochs and epoch_seconds");
  }
  int roi_count = 0;
  if (options.grid.has_value()) {
    AGGLOC_RETURN_IF_ERROR(options.grid->Validate());
    roi_count = options.grid->roi_count();
  } else {
    int max_index = 0;
    for (const auto& [station, roi] : options.stations) {
      if (roi < 1) {
        return absl::InvalidArgumentError(absl::StrCat(
            "station ", station, " maps to ROI ", roi, "; 0 is reserved"));
      }
      max_index = std::max(max_index, roi);
    }
    roi_count = options.roi_count > 0 ? options.roi_count : max_index + 1;
    if (max_index >= roi_count) {
      return absl::InvalidArgumentError(absl::StrCat(
          "station ROI ", max_index, " does not fit ", roi_count, " ROIs"));
    }
    if (roi_count < 2) {
      return absl::InvalidArgumentError(
          "station mode needs a non-empty station dictionary");
    }
  }
  Ingestor ingestor(std::move(options));
  ingestor.roi_count_ = roi_count;
  return ingestor;
}

void Ingestor::Add(const RawTraceRecord& record) {
  ++stats_.records;
  const int64_t offset = record.timestamp - options_.start_time;
  if (offset < 0 ||
      offset >= options_.total_epochs * options_.epoch_seconds) {
    ++stats_.out_of_window;
    return;
  }
  const int64_t epoch = offset / options_.epoch_seconds;
  int roi = 0;
  if (options_.grid.has_value()) {
    const GeoPoint* point = std::get_if<GeoPoint>(&record.location);
    if (point == nullptr) {
      ++stats_.wrong_location_kind;
      return;
    }
    const std::optional<int> cell = options_.grid->RoiOf(*point);
    if (!cell) {
      ++stats_.out_of_grid;
      return;
    }
    roi = *cell;
  } else {
    const std::string* station = std::get_if<std::string>(&record.location);
    if (station == nullptr) {
      ++stats_.wrong_location_kind;
      return;
    }
    const auto it = options_.stations.find(*station);
    if (it == options_.stations.end()) {
      ++stats_.unknown_station;
      return;
    }
    roi = it->second;
  }
  if (marks_[record.user_id].emplace(epoch, roi).second) {
    ++stats_.accepted;
  } else {
    ++stats_.duplicates;
  }
}

absl::StatusOr<IngestResult> Ingestor::Finish() && {
  IngestResult result;
  result.stats = stats_;
  result.users.reserve(marks_.size());
  for (auto& [user, marks] : marks_) {
    BinaryMatrix cells = BinaryMatrix::Zero(roi_count_, options_.total_epochs);
    for (const auto& [epoch, roi] : marks) cells(roi, epoch) = 1;
    AGGLOC_ASSIGN_OR_RETURN(
        GroundTruthMatrix truth,
        GroundTruthMatrix::FromPresence(user, std::move(cells)));
    result.users.push_back(std::move(truth));
  }
  marks_.clear();
  return result;
}

absl::StatusOr<IngestResult> Ingest(std::span<const RawTraceRecord> records,
                                    IngestOptions options) {
  AGGLOC_ASSIGN_OR_RETURN(Ingestor ingestor,
                          Ingestor::Create(std::move(options)));
  for (const RawTraceRecord& record : records) ingestor.Add(record);
  return std::move(ingestor).Finish();
}

absl::Status ReadGpsCsv(std::istream& in, const RecordSink& sink) {
  return ForEachDataLine(
      in, "user_id,timestamp,lat,lon",
      [&](absl::string_view line, int64_t line_no) -> absl::Status {
        AGGLOC_ASSIGN_OR_RETURN(auto f, SplitRow(line, 4, line_no));
        RawTraceRecord record;
        record.user_id = std::string(f[0]);
        GeoPoint point;
        if (f[0].empty()) return BadField(line_no, "user_id", f[0]);
        if (!absl::SimpleAtoi(f[1], &record.timestamp)) {
          return BadField(line_no, "timestamp", f[1]);
        }
        if (!absl::SimpleAtod(f[2], &point.latitude)) {
          return BadField(line_no, "lat", f[2]);
        }
        if (!absl::SimpleAtod(f[3], &point.longitude)) {
          return BadField(line_no, "lon", f[3]);
        }
        record.location = point;
        sink(record);
        return absl::OkStatus();
      });
}

absl::Status ReadTripCsv(std::istream& in, const RecordSink& sink) {
  return ForEachDataLine(
      in, "user_id,t_in,station_in,t_out,station_out",
      [&](absl::string_view line, int64_t line_no) -> absl::Status {
        AGGLOC_ASSIGN_OR_RETURN(auto f, SplitRow(line, 5, line_no));
        if (f[0].empty()) return BadField(line_no, "user_id", f[0]);
        int64_t t_in = 0;
        int64_t t_out = 0;
        if (!absl::SimpleAtoi(f[1], &t_in)) {
          return BadField(line_no, "t_in", f[1]);
        }
        if (!absl::SimpleAtoi(f[3], &t_out)) {
          return BadField(line_no, "t_out", f[3]);
        }
        sink(RawTraceRecord{std::string(f[0]), t_in, std::string(f[2])});
        sink(RawTraceRecord{std::string(f[0]), t_out, std::string(f[4])});
        return absl::OkStatus();
      });
}

absl::StatusOr<StationDictionary> ReadStationDictionary(std::istream& in) {
  StationDictionary out;
  AGGLOC_RETURN_IF_ERROR(ForEachDataLine(
      in, "station_id,roi_index",
      [&](absl::string_view line, int64_t line_no) -> absl::Status {
        AGGLOC_ASSIGN_OR_RETURN(auto f, SplitRow(line, 2, line_no));
        int roi = 0;
        if (!absl::SimpleAtoi(f[1], &roi) || roi < 1) {
          return BadField(line_no, "roi_index", f[1]);
        }
        if (!out.emplace(std::string(f[0]), roi).second) {
          return BadField(line_no, "duplicate station_id", f[0]);
        }
        return absl::OkStatus();
      }));
  return out;
}

absl::StatusOr<WindowSplit> SplitWeeks(int64_t total_epochs,
                                       int64_t epoch_seconds,
                                       int observation_weeks,
                                       int inference_weeks) {
  constexpr int64_t kWeekSeconds = 7 * 24 * 3600;
  if (epoch_seconds <= 0 || kWeekSeconds % epoch_seconds != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "epoch length ", epoch_seconds, "s does not divide a week"));
  }
  if (observation_weeks <= 0 || inference_weeks <= 0) {
    return absl::InvalidArgumentError("split weeks must be positive");
  }
  const int64_t per_week = kWeekSeconds / epoch_seconds;
  const int64_t observed = observation_weeks * per_week;
  const int64_t inferred = inference_weeks * per_week;
  if (observed + inferred > total_epochs) {
    return absl::OutOfRangeError(absl::StrCat(
        observation_weeks, "+", inference_weeks, " weeks need ",
        observed + inferred, " epochs, frame has ", total_epochs));
  }
  return WindowSplit{{0, observed}, {observed, observed + inferred}};
}

absl::StatusOr<std::vector<GroundTruthMatrix>> TopUsers(
    std::span<const GroundTruthMatrix> users, int64_t n) {
  if (n < 0 || n > static_cast<int64_t>(users.size())) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cannot keep ", n, " of ", users.size(), " users"));
  }
  std::vector<int64_t> activity(users.size());
  for (size_t i = 0; i < users.size(); ++i) {
    activity[i] = users[i].ActivityCount({0, users[i].epoch_count()});
  }
  std::vector<size_t> order(users.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (activity[a] != activity[b]) return activity[a] > activity[b];
    return users[a].user_id() < users[b].user_id();
  });
  std::vector<GroundTruthMatrix> out;
  out.reserve(n);
  for (int64_t i = 0; i < n; ++i) out.push_back(users[order[i]]);
  return out;
}

std::string_view SynthModelName(SynthModel model) {
  return model == SynthModel::kCommuter ? "commuter" : "cab";
}

absl::StatusOr<SynthModel> ParseSynthModel(std::string_view name) {
  if (name == "commuter") return SynthModel::kCommuter;
  if (name == "cab") return SynthModel::kCab;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown synthetic model '", std::string(name), "' (commuter, cab)"));
}

absl::Status SynthModelSpec::Validate() const {
  if (user_count <= 0) {
    return absl::InvalidArgumentError("synthetic user_count must be positive");
  }
  if (roi_count < 3) {
    return absl::InvalidArgumentError(
        "synthetic roi_count must be >= 3 (null plus two real ROIs)");
  }
  if (weeks <= 0) {
    return absl::InvalidArgumentError("synthetic weeks must be positive");
  }
  if (!(regularity >= 0.0 && regularity <= 1.0)) {
    return absl::InvalidArgumentError("regularity must be in [0, 1]");
  }
  return absl::OkStatus();
}

namespace {

// Draws one scheduled report: the routine ROI with probability
// `regularity`, otherwise a uniform non-null ROI. Always consumes two
// variates so the stream layout does not depend on the outcome.
int ScheduledRoi(int routine, double regularity, int real_rois, Rng& rng) {
  const bool follow = rng.Uniform01() < regularity;
  const int random_roi = static_cast<int>(rng.UniformInt(1, real_rois));
  return follow ? routine : random_roi;
}

BinaryMatrix SynthesizeCommuter(const SynthModelSpec& spec, Rng& rng) {
  const int real_rois = spec.roi_count - 1;
  const int64_t epochs = spec.weeks * kHoursPerWeek;
  BinaryMatrix cells = BinaryMatrix::Zero(spec.roi_count, epochs);

  const int home = static_cast<int>(rng.UniformInt(1, real_rois));
  int work = static_cast<int>(rng.UniformInt(1, real_rois - 1));
  if (work >= home) ++work;
  const int leisure = static_cast<int>(rng.UniformInt(1, real_rois));
  const int64_t depart = rng.UniformInt(6, 9);
  const int64_t back = rng.UniformInt(16, 19);
  const int64_t outing = rng.UniformInt(10, 15);

  // (hour of week, routine ROI)
  std::vector<std::pair<int64_t, int>> schedule;
  for (int64_t day = 0; day < 5; ++day) {
    schedule.emplace_back(day * 24 + depart, home);
    schedule.emplace_back(day * 24 + depart + 1, work);
    schedule.emplace_back(day * 24 + back, work);
    schedule.emplace_back(day * 24 + back + 1, home);
  }
  schedule.emplace_back(5 * 24 + outing, home);
  schedule.emplace_back(5 * 24 + outing + 1, leisure);

  for (int week = 0; week < spec.weeks; ++week) {
    for (const auto& [hour, routine] : schedule) {
      const int roi = ScheduledRoi(routine, spec.regularity, real_rois, rng);
      cells(roi, week * kHoursPerWeek + hour) = 1;
    }
  }
  return cells;
}

BinaryMatrix SynthesizeCab(const SynthModelSpec& spec, Rng& rng) {
  const int real_rois = spec.roi_count - 1;
  const int grid_rows = std::max(
      1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(real_rois)))));
  const int grid_cols = (real_rois + grid_rows - 1) / grid_rows;
  const int64_t epochs = spec.weeks * kHoursPerWeek;
  BinaryMatrix cells = BinaryMatrix::Zero(spec.roi_count, epochs);

  constexpr std::array<std::pair<int, int>, 4> kMoves = {
      {{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
  const auto step = [&](int cell, int dir) -> std::optional<int> {
    const int r = cell / grid_cols + kMoves[dir].first;
    const int c = cell % grid_cols + kMoves[dir].second;
    if (r < 0 || r >= grid_rows || c < 0 || c >= grid_cols) return std::nullopt;
    const int next = r * grid_cols + c;
    if (next >= real_rois) return std::nullopt;
    return next;
  };

  const int64_t shift_start = rng.UniformInt(0, 23);
  constexpr int64_t kShiftHours = 16;
  int cell = static_cast<int>(rng.UniformInt(0, real_rois - 1));
  int dir = static_cast<int>(rng.UniformInt(0, 3));
  for (int64_t t = 0; t < epochs; ++t) {
    const int64_t hour = t % 24;
    const int64_t into_shift = (hour - shift_start + 24) % 24;
    if (into_shift >= kShiftHours) continue;
    cells(1 + cell, t) = 1;
    const bool follow = rng.Uniform01() < spec.regularity;
    const int jump = static_cast<int>(rng.UniformInt(0, real_rois - 1));
    const int turn = static_cast<int>(rng.UniformInt(0, 3));
    if (!follow) {
      cell = jump;
      dir = turn;
      continue;
    }
    for (int attempt = 0; attempt < 4; ++attempt) {
      if (const std::optional<int> next = step(cell, dir)) {
        cell = *next;
        break;
      }
      dir = (dir + turn + attempt + 1) % 4;
    }
  }
  return cells;
}

}  // namespace

absl::StatusOr<std::vector<GroundTruthMatrix>> Synthesize(
    const SynthModelSpec& spec, int threads) {
  AGGLOC_RETURN_IF_ERROR(spec.Validate());
  const int width =
      std::max(5, static_cast<int>(std::to_string(spec.user_count).size()));
  std::vector<absl::StatusOr<GroundTruthMatrix>> built(
      spec.user_count, absl::UnknownError("not generated"));
  ParallelFor(spec.user_count, threads, [&](int64_t u) {
    Rng rng = Rng::ForStream(spec.seed, static_cast<uint64_t>(u));
    BinaryMatrix cells = spec.model == SynthModel::kCommuter
                             ? SynthesizeCommuter(spec, rng)
                             : SynthesizeCab(spec, rng);
    built[u] = GroundTruthMatrix::FromPresence(
        absl::StrFormat("u%0*d", width, u + 1),
        std::move(cells));
  });
  std::vector<GroundTruthMatrix> users;
  users.reserve(spec.user_count);
  for (auto& user : built) {
    if (!user.ok()) return user.status();
    users.push_back(*std::move(user));
  }
  return users;
}

}  // namespace aggloc
