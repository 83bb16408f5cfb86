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

#include "aggloc/experiment_config.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "aggloc/status_macros.h"

namespace aggloc {
namespace {

constexpr std::array<std::string_view, 45> kKeys = {
    "aggregate.include_null",
    "attack.delta",
    "attack.kind",
    "attack.projection",
    "dataset.source",
    "defense.epsilon",
    "defense.k",
    "defense.mechanism",
    "defense.p",
    "defense.scale_rule",
    "defense.sensitivity",
    "goal",
    "ingest.format",
    "ingest.grid.cols",
    "ingest.grid.max_lat",
    "ingest.grid.max_lon",
    "ingest.grid.min_lat",
    "ingest.grid.min_lon",
    "ingest.grid.rows",
    "ingest.path",
    "ingest.start",
    "ingest.stations",
    "ingest.weeks",
    "output.dir",
    "prior.cycle",
    "prior.delta",
    "prior.kind",
    "prior.projection",
    "seed",
    "split.inference_weeks",
    "split.observation_weeks",
    "synth.model",
    "synth.regularity",
    "synth.rois",
    "synth.seed",
    "synth.users",
    "synth.weeks",
    "threads",
    "timeframe.epoch_seconds",
    "triplets.epochs",
    "triplets.path",
    "triplets.rois",
    "users.min_activity",
    "users.top",
    "version",
};
static_assert(std::is_sorted(kKeys.begin(), kKeys.end()));

std::string FormatDouble(double value) {
  std::array<char, 64> buffer;
  const auto result =
      std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), result.ptr);
}

template <typename Enum, size_t N>
absl::StatusOr<Enum> ParseChoice(
    std::string_view key, std::string_view value,
    const std::array<std::pair<std::string_view, Enum>, N>& choices) {
  for (const auto& [name, e] : choices) {
    if (name == value) return e;
  }
  std::string allowed;
  for (const auto& [name, e] : choices) {
    absl::StrAppend(&allowed, allowed.empty() ? "" : ", ", std::string(name));
  }
  return absl::InvalidArgumentError(absl::StrCat(
      std::string(key), ": '", std::string(value), "' is not one of ",
      allowed));
}

template <typename Enum, size_t N>
std::string_view ChoiceName(
    Enum e, const std::array<std::pair<std::string_view, Enum>, N>& choices) {
  for (const auto& [name, candidate] : choices) {
    if (candidate == e) return name;
  }
  return "unknown";
}

constexpr std::array<std::pair<std::string_view, DatasetSource>, 3> kSources =
    {{{"synth", DatasetSource::kSynth},
      {"ingest", DatasetSource::kIngest},
      {"triplets", DatasetSource::kTriplets}}};
constexpr std::array<std::pair<std::string_view, IngestFormat>, 2> kFormats = {
    {{"gps", IngestFormat::kGps}, {"trips", IngestFormat::kTrips}}};
constexpr std::array<std::pair<std::string_view, PriorKind>, 4> kPriors = {
    {{"freq_roi", PriorKind::kFreqRoi},
     {"roi_seas", PriorKind::kRoiSeas},
     {"time_seas", PriorKind::kTimeSeas},
     {"last_seas", PriorKind::kLastSeas}}};
constexpr std::array<std::pair<std::string_view, Projection>, 3> kProjections =
    {{{"none", Projection::kNone},
      {"pop", Projection::kPop},
      {"all", Projection::kAll}}};
constexpr std::array<std::pair<std::string_view, AttackKind>, 4> kAttacks = {
    {{"none", AttackKind::kNone},
     {"bayes", AttackKind::kBayes},
     {"max_roi", AttackKind::kMaxRoi},
     {"max_user", AttackKind::kMaxUser}}};
constexpr std::array<std::pair<std::string_view, Goal>, 2> kGoals = {
    {{"profiling", Goal::kProfiling}, {"localization", Goal::kLocalization}}};
constexpr std::array<std::pair<std::string_view, SynthModel>, 2> kModels = {
    {{"commuter", SynthModel::kCommuter}, {"cab", SynthModel::kCab}}};

// Typed access to config entries.
class EntryReader {
 public:
  explicit EntryReader(const ConfigEntries& entries) : entries_(entries) {}

  const std::string* Find(std::string_view key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }
  bool Has(std::string_view key) const { return Find(key) != nullptr; }

  absl::Status String(std::string_view key, std::string& out) const {
    if (const std::string* v = Find(key)) {
      if (v->empty()) return Bad(key, *v, "a non-empty value");
      out = *v;
    }
    return absl::OkStatus();
  }

  template <typename Int>
  absl::Status Integer(std::string_view key, Int& out) const {
    if (const std::string* v = Find(key)) {
      Int parsed{};
      if (!absl::SimpleAtoi(*v, &parsed)) return Bad(key, *v, "an integer");
      out = parsed;
    }
    return absl::OkStatus();
  }

  template <typename Int>
  absl::Status Integer(std::string_view key, std::optional<Int>& out) const {
    if (Has(key)) {
      Int parsed{};
      AGGLOC_RETURN_IF_ERROR(Integer(key, parsed));
      out = parsed;
    }
    return absl::OkStatus();
  }

  absl::Status Real(std::string_view key, double& out) const {
    if (const std::string* v = Find(key)) {
      double parsed = 0.0;
      if (!absl::SimpleAtod(*v, &parsed) || std::isnan(parsed)) {
        return Bad(key, *v, "a number");
      }
      out = parsed;
    }
    return absl::OkStatus();
  }

  absl::Status Real(std::string_view key, std::optional<double>& out) const {
    if (Has(key)) {
      double parsed = 0.0;
      AGGLOC_RETURN_IF_ERROR(Real(key, parsed));
      out = parsed;
    }
    return absl::OkStatus();
  }

  absl::Status Bool(std::string_view key, bool& out) const {
    if (const std::string* v = Find(key)) {
      if (!absl::SimpleAtob(*v, &out)) return Bad(key, *v, "true or false");
    }
    return absl::OkStatus();
  }

  template <typename Enum, size_t N>
  absl::Status Choice(
      std::string_view key,
      const std::array<std::pair<std::string_view, Enum>, N>& choices,
      Enum& out) const {
    if (const std::string* v = Find(key)) {
      AGGLOC_ASSIGN_OR_RETURN(out, ParseChoice(key, *v, choices));
    }
    return absl::OkStatus();
  }

 private:
  static absl::Status Bad(std::string_view key, const std::string& value,
                          std::string_view expected) {
    return absl::InvalidArgumentError(
        absl::StrCat(std::string(key), ": expected ", std::string(expected),
                     ", got '", value, "'"));
  }

  const ConfigEntries& entries_;
};

absl::Status Require(bool condition, std::string_view message) {
  if (condition) return absl::OkStatus();
  return absl::InvalidArgumentError(std::string(message));
}

absl::Status ReadGrid(const EntryReader& r, IngestConfig& ingest) {
  constexpr std::array<std::string_view, 6> kGridKeys = {
      "ingest.grid.min_lat", "ingest.grid.max_lat", "ingest.grid.min_lon",
      "ingest.grid.max_lon", "ingest.grid.rows",    "ingest.grid.cols"};
  const auto present = std::count_if(kGridKeys.begin(), kGridKeys.end(),
                                     [&](auto k) { return r.Has(k); });
  if (present == 0) return absl::OkStatus();
  AGGLOC_RETURN_IF_ERROR(Require(present == 6,
                                 "ingest.grid.* needs all of min_lat, "
                                 "max_lat, min_lon, max_lon, rows, cols"));
  GridSpec grid;
  AGGLOC_RETURN_IF_ERROR(r.Real("ingest.grid.min_lat", grid.min_latitude));
  AGGLOC_RETURN_IF_ERROR(r.Real("ingest.grid.max_lat", grid.max_latitude));
  AGGLOC_RETURN_IF_ERROR(r.Real("ingest.grid.min_lon", grid.min_longitude));
  AGGLOC_RETURN_IF_ERROR(r.Real("ingest.grid.max_lon", grid.max_longitude));
  AGGLOC_RETURN_IF_ERROR(r.Integer("ingest.grid.rows", grid.rows));
  AGGLOC_RETURN_IF_ERROR(r.Integer("ingest.grid.cols", grid.cols));
  AGGLOC_RETURN_IF_ERROR(grid.Validate());
  ingest.grid = grid;
  return absl::OkStatus();
}

absl::Status ReadDefense(const EntryReader& r, ExperimentConfig& config) {
  std::string mechanism = "none";
  AGGLOC_RETURN_IF_ERROR(r.String("defense.mechanism", mechanism));
  if (mechanism == "none") {
    for (std::string_view key :
         {"defense.epsilon", "defense.scale_rule", "defense.k", "defense.p",
          "defense.sensitivity"}) {
      if (r.Has(key)) {
        return absl::InvalidArgumentError(
            absl::StrCat(std::string(key), " set without defense.mechanism"));
      }
    }
    return absl::OkStatus();
  }
  NoiseSpec spec;
  AGGLOC_ASSIGN_OR_RETURN(spec.mechanism, ParseMechanism(mechanism));
  AGGLOC_RETURN_IF_ERROR(r.Real("defense.epsilon", spec.epsilon));
  if (const std::string* rule = r.Find("defense.scale_rule")) {
    AGGLOC_ASSIGN_OR_RETURN(spec.scale_rule, ParseScaleRule(*rule));
  }
  AGGLOC_RETURN_IF_ERROR(r.Integer("defense.k", spec.k));
  AGGLOC_RETURN_IF_ERROR(r.Real("defense.p", spec.p));
  AGGLOC_RETURN_IF_ERROR(r.Integer("defense.sensitivity", spec.delta_sensitivity));
  spec.seed = config.seed;
  AGGLOC_RETURN_IF_ERROR(spec.Validate());
  config.defense = spec;
  return absl::OkStatus();
}

absl::Status CheckCombination(const ExperimentConfig& c,
                              bool attack_settings_set) {
  AGGLOC_RETURN_IF_ERROR(Require(c.epoch_seconds > 0,
                                 "timeframe.epoch_seconds must be positive"));
  AGGLOC_RETURN_IF_ERROR(Require(c.threads >= 1, "threads must be >= 1"));
  AGGLOC_RETURN_IF_ERROR(
      Require(c.top_users >= 0, "users.top must be >= 0 (0 keeps all)"));
  AGGLOC_RETURN_IF_ERROR(
      Require(c.min_activity >= 0, "users.min_activity must be >= 0"));
  AGGLOC_RETURN_IF_ERROR(
      Require(c.cycle_epochs >= 1, "prior.cycle must be >= 1"));
  AGGLOC_RETURN_IF_ERROR(Require(c.prior_delta > 0.0 && c.prior_delta <= 1.0,
                                 "prior.delta must be in (0, 1]"));
  AGGLOC_RETURN_IF_ERROR(Require(c.attack_delta > 0.0 && c.attack_delta <= 1.0,
                                 "attack.delta must be in (0, 1]"));
  AGGLOC_RETURN_IF_ERROR(Require(
      c.output_dir.find_first_not_of(" \t") != std::string::npos,
      "output.dir must not be blank"));
  if (c.source == DatasetSource::kSynth) {
    AGGLOC_RETURN_IF_ERROR(c.synth.Validate());
    AGGLOC_RETURN_IF_ERROR(Require(
        c.epoch_seconds == 3600, "synthetic corpora are hourly; "
                                 "timeframe.epoch_seconds must be 3600"));
  }
  if (c.source == DatasetSource::kIngest) {
    AGGLOC_RETURN_IF_ERROR(
        Require(!c.ingest.path.empty(), "ingest.path is required"));
    if (c.ingest.format == IngestFormat::kGps) {
      AGGLOC_RETURN_IF_ERROR(Require(c.ingest.grid.has_value(),
                                     "gps ingest needs ingest.grid.*"));
      AGGLOC_RETURN_IF_ERROR(Require(c.ingest.stations_path.empty(),
                                     "ingest.stations is for trips input"));
    } else {
      AGGLOC_RETURN_IF_ERROR(Require(!c.ingest.stations_path.empty(),
                                     "trips ingest needs ingest.stations"));
      AGGLOC_RETURN_IF_ERROR(Require(!c.ingest.grid.has_value(),
                                     "ingest.grid.* is for gps input"));
    }
    AGGLOC_RETURN_IF_ERROR(Require(!c.ingest.weeks || *c.ingest.weeks > 0,
                                   "ingest.weeks must be positive"));
  }
  if (c.source == DatasetSource::kTriplets) {
    AGGLOC_RETURN_IF_ERROR(
        Require(!c.triplets.path.empty(), "triplets.path is required"));
  }

  const bool assignment_prior = c.prior == PriorKind::kLastSeas;
  AGGLOC_RETURN_IF_ERROR(
      Require(!assignment_prior || c.prior_projection == Projection::kNone,
              "last_seas is already an assignment; prior.projection must be "
              "none"));
  const bool greedy =
      c.attack == AttackKind::kMaxRoi || c.attack == AttackKind::kMaxUser;
  AGGLOC_RETURN_IF_ERROR(Require(
      !(greedy || c.attack == AttackKind::kNone) || !attack_settings_set,
      "attack.projection and attack.delta only apply to bayes"));
  if (c.goal == Goal::kProfiling) {
    AGGLOC_RETURN_IF_ERROR(
        Require(c.prior_projection == Projection::kNone &&
                    c.attack_projection == Projection::kNone,
                "profiling scores distributions; projections must be none"));
  } else {
    AGGLOC_RETURN_IF_ERROR(Require(
        assignment_prior || c.prior_projection != Projection::kNone,
        "localization scores assignments; set prior.projection to pop or all "
        "(or use last_seas)"));
    AGGLOC_RETURN_IF_ERROR(Require(
        c.attack != AttackKind::kBayes ||
            c.attack_projection != Projection::kNone,
        "localization with bayes needs attack.projection pop or all"));
  }
  AGGLOC_RETURN_IF_ERROR(
      Require(!c.defense.has_value() || c.attack != AttackKind::kNone,
              "a defense is only evaluated against an attack"));
  return absl::OkStatus();
}

}  // namespace

std::string_view PriorKindName(PriorKind kind) {
  return ChoiceName(kind, kPriors);
}
std::string_view ProjectionName(Projection projection) {
  return ChoiceName(projection, kProjections);
}
std::string_view AttackKindName(AttackKind kind) {
  return ChoiceName(kind, kAttacks);
}
std::string_view GoalName(Goal goal) { return ChoiceName(goal, kGoals); }

bool IsConfigKey(std::string_view key) {
  return std::binary_search(kKeys.begin(), kKeys.end(), key);
}

absl::StatusOr<ConfigEntries> ParseConfigEntries(std::string_view text) {
  ConfigEntries entries;
  int line_no = 0;
  for (absl::string_view line :
       absl::StrSplit(absl::string_view(text.data(), text.size()), '\n')) {
    ++line_no;
    if (const size_t hash = line.find('#'); hash != line.npos) {
      line = line.substr(0, hash);
    }
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == line.npos) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_no, ": expected 'key = value', got '", line, "'"));
    }
    const std::string key(absl::StripAsciiWhitespace(line.substr(0, eq)));
    const std::string value(absl::StripAsciiWhitespace(line.substr(eq + 1)));
    if (!IsConfigKey(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": unknown key '", key, "'"));
    }
    if (!entries.emplace(key, value).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": '", key, "' set twice"));
    }
  }
  return entries;
}

absl::StatusOr<ExperimentConfig> ConfigFromEntries(
    const ConfigEntries& entries) {
  for (const auto& [key, value] : entries) {
    if (!IsConfigKey(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown key '", key, "'"));
    }
  }
  const EntryReader r(entries);
  ExperimentConfig c;
  int version = 1;
  AGGLOC_RETURN_IF_ERROR(r.Integer("version", version));
  AGGLOC_RETURN_IF_ERROR(
      Require(version == 1, "unsupported config version (expected 1)"));

  AGGLOC_RETURN_IF_ERROR(r.Integer("seed", c.seed));
  AGGLOC_RETURN_IF_ERROR(r.Integer("threads", c.threads));
  AGGLOC_RETURN_IF_ERROR(r.String("output.dir", c.output_dir));

  AGGLOC_RETURN_IF_ERROR(r.Choice("dataset.source", kSources, c.source));
  const auto only_for = [&](std::string_view prefix,
                            DatasetSource source) -> absl::Status {
    if (c.source == source) return absl::OkStatus();
    for (const auto& [key, value] : entries) {
      if (key.rfind(prefix, 0) == 0) {
        return absl::InvalidArgumentError(absl::StrCat(
            key, " does not apply to dataset.source = ",
            std::string(ChoiceName(c.source, kSources))));
      }
    }
    return absl::OkStatus();
  };
  AGGLOC_RETURN_IF_ERROR(only_for("synth.", DatasetSource::kSynth));
  AGGLOC_RETURN_IF_ERROR(only_for("ingest.", DatasetSource::kIngest));
  AGGLOC_RETURN_IF_ERROR(only_for("triplets.", DatasetSource::kTriplets));

  c.synth.seed = c.seed;
  AGGLOC_RETURN_IF_ERROR(r.Choice("synth.model", kModels, c.synth.model));
  AGGLOC_RETURN_IF_ERROR(r.Integer("synth.users", c.synth.user_count));
  AGGLOC_RETURN_IF_ERROR(r.Integer("synth.rois", c.synth.roi_count));
  AGGLOC_RETURN_IF_ERROR(r.Integer("synth.weeks", c.synth.weeks));
  AGGLOC_RETURN_IF_ERROR(r.Real("synth.regularity", c.synth.regularity));
  AGGLOC_RETURN_IF_ERROR(r.Integer("synth.seed", c.synth.seed));

  AGGLOC_RETURN_IF_ERROR(r.String("ingest.path", c.ingest.path));
  AGGLOC_RETURN_IF_ERROR(r.Choice("ingest.format", kFormats, c.ingest.format));
  AGGLOC_RETURN_IF_ERROR(r.String("ingest.stations", c.ingest.stations_path));
  AGGLOC_RETURN_IF_ERROR(r.Integer("ingest.start", c.ingest.start_time));
  AGGLOC_RETURN_IF_ERROR(r.Integer("ingest.weeks", c.ingest.weeks));
  AGGLOC_RETURN_IF_ERROR(ReadGrid(r, c.ingest));

  AGGLOC_RETURN_IF_ERROR(r.String("triplets.path", c.triplets.path));
  AGGLOC_RETURN_IF_ERROR(r.Integer("triplets.rois", c.triplets.roi_count));
  AGGLOC_RETURN_IF_ERROR(r.Integer("triplets.epochs", c.triplets.epoch_count));

  AGGLOC_RETURN_IF_ERROR(r.Integer("timeframe.epoch_seconds", c.epoch_seconds));
  AGGLOC_RETURN_IF_ERROR(
      r.Integer("split.observation_weeks", c.observation_weeks));
  AGGLOC_RETURN_IF_ERROR(r.Integer("split.inference_weeks", c.inference_weeks));
  AGGLOC_RETURN_IF_ERROR(Require(c.observation_weeks > 0 && c.inference_weeks > 0,
                                 "split weeks must be positive"));
  AGGLOC_RETURN_IF_ERROR(r.Integer("users.top", c.top_users));
  AGGLOC_RETURN_IF_ERROR(r.Integer("users.min_activity", c.min_activity));

  AGGLOC_RETURN_IF_ERROR(r.Choice("prior.kind", kPriors, c.prior));
  AGGLOC_RETURN_IF_ERROR(r.Integer("prior.cycle", c.cycle_epochs));
  AGGLOC_RETURN_IF_ERROR(
      r.Choice("prior.projection", kProjections, c.prior_projection));
  AGGLOC_RETURN_IF_ERROR(r.Real("prior.delta", c.prior_delta));

  AGGLOC_RETURN_IF_ERROR(r.Choice("attack.kind", kAttacks, c.attack));
  c.attack_projection =
      c.attack == AttackKind::kBayes ? c.prior_projection : Projection::kNone;
  c.attack_delta = c.prior_delta;
  AGGLOC_RETURN_IF_ERROR(
      r.Choice("attack.projection", kProjections, c.attack_projection));
  AGGLOC_RETURN_IF_ERROR(r.Real("attack.delta", c.attack_delta));
  AGGLOC_RETURN_IF_ERROR(r.Choice("goal", kGoals, c.goal));
  AGGLOC_RETURN_IF_ERROR(r.Bool("aggregate.include_null", c.include_null));

  AGGLOC_RETURN_IF_ERROR(ReadDefense(r, c));
  AGGLOC_RETURN_IF_ERROR(CheckCombination(
      c, r.Has("attack.projection") || r.Has("attack.delta")));
  return c;
}

absl::StatusOr<ExperimentConfig> ParseConfig(std::string_view text) {
  AGGLOC_ASSIGN_OR_RETURN(ConfigEntries entries, ParseConfigEntries(text));
  return ConfigFromEntries(entries);
}

absl::StatusOr<ConfigEntries> ReadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot open config file '", path, "'"));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfigEntries(buffer.str());
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::Canonical()
    const {
  std::vector<std::pair<std::string, std::string>> out;
  const auto add = [&](std::string key, std::string value) {
    out.emplace_back(std::move(key), std::move(value));
  };
  add("dataset.source", std::string(ChoiceName(source, kSources)));
  switch (source) {
    case DatasetSource::kSynth:
      add("synth.model", std::string(SynthModelName(synth.model)));
      add("synth.users", absl::StrCat(synth.user_count));
      add("synth.rois", absl::StrCat(synth.roi_count));
      add("synth.weeks", absl::StrCat(synth.weeks));
      add("synth.regularity", FormatDouble(synth.regularity));
      add("synth.seed", absl::StrCat(synth.seed));
      break;
    case DatasetSource::kIngest:
      add("ingest.path", ingest.path);
      add("ingest.format", std::string(ChoiceName(ingest.format, kFormats)));
      if (!ingest.stations_path.empty()) {
        add("ingest.stations", ingest.stations_path);
      }
      if (ingest.grid) {
        add("ingest.grid.min_lat", FormatDouble(ingest.grid->min_latitude));
        add("ingest.grid.max_lat", FormatDouble(ingest.grid->max_latitude));
        add("ingest.grid.min_lon", FormatDouble(ingest.grid->min_longitude));
        add("ingest.grid.max_lon", FormatDouble(ingest.grid->max_longitude));
        add("ingest.grid.rows", absl::StrCat(ingest.grid->rows));
        add("ingest.grid.cols", absl::StrCat(ingest.grid->cols));
      }
      add("ingest.start", absl::StrCat(ingest.start_time));
      if (ingest.weeks) add("ingest.weeks", absl::StrCat(*ingest.weeks));
      break;
    case DatasetSource::kTriplets:
      add("triplets.path", triplets.path);
      if (triplets.roi_count) {
        add("triplets.rois", absl::StrCat(*triplets.roi_count));
      }
      if (triplets.epoch_count) {
        add("triplets.epochs", absl::StrCat(*triplets.epoch_count));
      }
      break;
  }
  add("timeframe.epoch_seconds", absl::StrCat(epoch_seconds));
  add("split.observation_weeks", absl::StrCat(observation_weeks));
  add("split.inference_weeks", absl::StrCat(inference_weeks));
  add("users.top", absl::StrCat(top_users));
  add("users.min_activity", absl::StrCat(min_activity));
  add("prior.kind", std::string(PriorKindName(prior)));
  add("prior.cycle", absl::StrCat(cycle_epochs));
  add("prior.projection", std::string(ProjectionName(prior_projection)));
  add("prior.delta", FormatDouble(prior_delta));
  add("attack.kind", std::string(AttackKindName(attack)));
  if (attack == AttackKind::kBayes) {
    add("attack.projection", std::string(ProjectionName(attack_projection)));
    add("attack.delta", FormatDouble(attack_delta));
  }
  add("goal", std::string(GoalName(goal)));
  add("aggregate.include_null", include_null ? "true" : "false");
  if (defense) {
    add("defense.mechanism", std::string(MechanismName(defense->mechanism)));
    if (defense->epsilon) add("defense.epsilon", FormatDouble(*defense->epsilon));
    if (defense->scale_rule) {
      add("defense.scale_rule", std::string(ScaleRuleName(*defense->scale_rule)));
    }
    if (defense->k) add("defense.k", absl::StrCat(*defense->k));
    if (defense->p) add("defense.p", FormatDouble(*defense->p));
    if (defense->delta_sensitivity) {
      add("defense.sensitivity", absl::StrCat(*defense->delta_sensitivity));
    }
  } else {
    add("defense.mechanism", "none");
  }
  add("seed", absl::StrCat(seed));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace aggloc
