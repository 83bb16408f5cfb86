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

#ifndef AGGLOC_EXPERIMENT_CONFIG_H_
#define AGGLOC_EXPERIMENT_CONFIG_H_

// Experiment configuration: a flat text file of `key = value` lines with
// dotted keys. `#` starts a comment; blank lines are ignored; unknown or
// repeated keys are errors. See README.md for the key reference.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "aggloc/data_pipeline.h"
#include "aggloc/noise_spec.h"

namespace aggloc {

enum class DatasetSource { kSynth, kIngest, kTriplets };
enum class IngestFormat { kGps, kTrips };
enum class PriorKind { kFreqRoi, kRoiSeas, kTimeSeas, kLastSeas };
enum class Projection { kNone, kPop, kAll };
enum class AttackKind { kNone, kBayes, kMaxRoi, kMaxUser };
enum class Goal { kProfiling, kLocalization };

std::string_view PriorKindName(PriorKind kind);
std::string_view ProjectionName(Projection projection);
std::string_view AttackKindName(AttackKind kind);
std::string_view GoalName(Goal goal);

struct IngestConfig {
  std::string path;
  IngestFormat format = IngestFormat::kGps;
  std::string stations_path;  // trips only
  std::optional<GridSpec> grid;  // gps only
  int64_t start_time = 0;
  // Length of the collection; defaults to observation + inference weeks.
  std::optional<int> weeks;
};

struct TripletConfig {
  std::string path;
  std::optional<int> roi_count;
  std::optional<int64_t> epoch_count;
};

struct ExperimentConfig {
  DatasetSource source = DatasetSource::kSynth;
  SynthModelSpec synth;
  IngestConfig ingest;
  TripletConfig triplets;

  int64_t epoch_seconds = 3600;
  int observation_weeks = 3;
  int inference_weeks = 1;
  int64_t top_users = 0;  // 0 keeps everyone
  // Users with fewer non-null marks in the inference window are left out of
  // the scored rows. They still contribute to the aggregates.
  int64_t min_activity = 0;

  PriorKind prior = PriorKind::kFreqRoi;
  int64_t cycle_epochs = 168;
  Projection prior_projection = Projection::kNone;
  double prior_delta = 0.5;

  AttackKind attack = AttackKind::kBayes;
  Projection attack_projection = Projection::kNone;
  double attack_delta = 0.5;
  Goal goal = Goal::kProfiling;
  bool include_null = true;

  std::optional<NoiseSpec> defense;  // seed is filled from `seed`

  std::string output_dir = "out";
  uint64_t seed = 1;
  int threads = 1;

  // Effective settings, sorted by key. Leaves out `threads` and
  // `output.dir`, which never change results.
  std::vector<std::pair<std::string, std::string>> Canonical() const;
};

using ConfigEntries = std::map<std::string, std::string, std::less<>>;

// Splits the file format into entries.
absl::StatusOr<ConfigEntries> ParseConfigEntries(std::string_view text);
// Builds and validates a config. Errors are always configuration errors.
absl::StatusOr<ExperimentConfig> ConfigFromEntries(const ConfigEntries& entries);
absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view text);
absl::StatusOr<ConfigEntries> ReadConfigFile(const std::string& path);

// True for every key ConfigFromEntries accepts.
bool IsConfigKey(std::string_view key);

}  // namespace aggloc

#endif  // AGGLOC_EXPERIMENT_CONFIG_H_
