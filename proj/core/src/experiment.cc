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

#include "aggloc/experiment.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "aggloc/data_pipeline.h"
#include "aggloc/inference_attacks.h"
#include "aggloc/parallel.h"
#include "aggloc/prior_knowledge.h"
#include "aggloc/status_macros.h"
#include "aggloc/triplet_io.h"
#include "nlohmann/json.hpp"

namespace aggloc {
namespace {

using Json = nlohmann::json;
namespace fs = std::filesystem;

absl::Status Tag(const absl::Status& status, std::string_view stage) {
  if (status.ok()) return status;
  return absl::Status(status.code(), absl::StrCat(std::string(stage), ": ",
                                                  status.message()));
}

template <typename T>
absl::StatusOr<T> Tag(absl::StatusOr<T> value, std::string_view stage) {
  if (value.ok()) return value;
  return Tag(value.status(), stage);
}

// Evaluates fn(i) for every index in parallel; the lowest failing index
// decides the error.
template <typename T, typename Fn>
absl::StatusOr<std::vector<T>> ParallelMap(int64_t n, int threads, Fn&& fn) {
  std::vector<std::optional<T>> slots(n);
  std::vector<absl::Status> errors(n);
  ParallelFor(n, threads, [&](int64_t i) {
    absl::StatusOr<T> result = fn(i);
    if (result.ok()) {
      slots[i] = *std::move(result);
    } else {
      errors[i] = result.status();
    }
  });
  std::vector<T> out;
  out.reserve(n);
  for (int64_t i = 0; i < n; ++i) {
    if (!errors[i].ok()) return errors[i];
    out.push_back(*std::move(slots[i]));
  }
  return out;
}

std::string FormatDouble(double value) {
  std::array<char, 64> buffer;
  const auto result =
      std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), result.ptr);
}

absl::StatusOr<std::ifstream> OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open '", path, "'"));
  }
  return in;
}

absl::StatusOr<std::vector<GroundTruthMatrix>> IngestUsers(
    const ExperimentConfig& config) {
  constexpr int64_t kWeekSeconds = 7 * 24 * 3600;
  if (kWeekSeconds % config.epoch_seconds != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "epoch length ", config.epoch_seconds, "s does not divide a week"));
  }
  const int weeks = config.ingest.weeks.value_or(config.observation_weeks +
                                                 config.inference_weeks);
  IngestOptions options;
  options.start_time = config.ingest.start_time;
  options.epoch_seconds = config.epoch_seconds;
  options.total_epochs = weeks * (kWeekSeconds / config.epoch_seconds);
  options.grid = config.ingest.grid;
  if (config.ingest.format == IngestFormat::kTrips) {
    AGGLOC_ASSIGN_OR_RETURN(std::ifstream stations,
                            OpenInput(config.ingest.stations_path));
    AGGLOC_ASSIGN_OR_RETURN(options.stations, ReadStationDictionary(stations));
  }
  AGGLOC_ASSIGN_OR_RETURN(Ingestor ingestor,
                          Ingestor::Create(std::move(options)));
  AGGLOC_ASSIGN_OR_RETURN(std::ifstream in, OpenInput(config.ingest.path));
  const RecordSink sink = [&](const RawTraceRecord& r) { ingestor.Add(r); };
  AGGLOC_RETURN_IF_ERROR(config.ingest.format == IngestFormat::kGps
                             ? ReadGpsCsv(in, sink)
                             : ReadTripCsv(in, sink));
  AGGLOC_ASSIGN_OR_RETURN(IngestResult result, std::move(ingestor).Finish());
  return std::move(result.users);
}

absl::StatusOr<RealMatrix> Project(const KnowledgeMatrix& estimate,
                                   Projection projection, double delta) {
  switch (projection) {
    case Projection::kNone:
      return estimate.cells;
    case Projection::kPop: {
      AGGLOC_ASSIGN_OR_RETURN(KnowledgeMatrix out,
                              PopularRois(estimate, delta));
      return out.cells;
    }
    case Projection::kAll: {
      AGGLOC_ASSIGN_OR_RETURN(KnowledgeMatrix out, AllRois(estimate));
      return out.cells;
    }
  }
  return absl::InternalError("unhandled projection");
}

absl::StatusOr<PriorMatrix> BasePrior(const ExperimentConfig& config,
                                      const GroundTruthMatrix& user,
                                      const TimeFrame& frame) {
  const SeasonalitySpec season{config.cycle_epochs};
  switch (config.prior) {
    case PriorKind::kFreqRoi:
      return FreqRoi(user, frame);
    case PriorKind::kRoiSeas:
      return RoiSeasonality(user, frame, season);
    case PriorKind::kTimeSeas:
      return TimeSeasonality(user, frame, season);
    case PriorKind::kLastSeas:
      return LastSeason(user, frame, season);
  }
  return absl::InternalError("unhandled prior kind");
}

struct AttackOutput {
  std::vector<RealMatrix> estimates;  // scored matrices, one per user
  int64_t flagged_columns = 0;
  int64_t clamped_cells = 0;
  int64_t unconsumed_mass = 0;
};

absl::StatusOr<AttackOutput> Attack(const ExperimentConfig& config,
                                    std::span<const PriorMatrix> inputs,
                                    std::span<const RealMatrix> prior_estimates,
                                    const AggregateSeries& counts,
                                    const AggregateProfile& profile,
                                    const UserOrdering& ordering) {
  const int64_t n = static_cast<int64_t>(inputs.size());
  AttackOutput out;
  switch (config.attack) {
    case AttackKind::kNone:
      out.estimates.assign(prior_estimates.begin(), prior_estimates.end());
      return out;
    case AttackKind::kBayes: {
      AGGLOC_ASSIGN_OR_RETURN(
          std::vector<PosteriorMatrix> posteriors,
          ParallelMap<PosteriorMatrix>(n, config.threads, [&](int64_t i) {
            return Bayes(inputs[i], profile);
          }));
      for (const PosteriorMatrix& p : posteriors) {
        out.flagged_columns += p.flagged_columns;
      }
      AGGLOC_ASSIGN_OR_RETURN(
          out.estimates,
          ParallelMap<RealMatrix>(n, config.threads, [&](int64_t i) {
            return Project(posteriors[i], config.attack_projection,
                           config.attack_delta);
          }));
      return out;
    }
    case AttackKind::kMaxRoi:
    case AttackKind::kMaxUser: {
      AGGLOC_ASSIGN_OR_RETURN(GreedyAttackResult result,
                              config.attack == AttackKind::kMaxRoi
                                  ? MaxRoi(inputs, counts, ordering)
                                  : MaxUser(inputs, counts, ordering));
      out.clamped_cells = result.clamped_cells;
      out.unconsumed_mass = result.unconsumed_mass;
      if (config.goal == Goal::kLocalization) {
        for (PosteriorMatrix& p : result.posteriors) {
          out.estimates.push_back(std::move(p.cells));
        }
        return out;
      }
      AGGLOC_ASSIGN_OR_RETURN(
          out.estimates,
          ParallelMap<RealMatrix>(n, config.threads,
                                  [&](int64_t i) -> absl::StatusOr<RealMatrix> {
                                    AGGLOC_ASSIGN_OR_RETURN(
                                        PosteriorMatrix profile_estimate,
                                        AssignmentToProfile(
                                            result.posteriors[i]));
                                    return profile_estimate.cells;
                                  }));
      return out;
    }
  }
  return absl::InternalError("unhandled attack");
}

// Scores estimates of the scored users.
absl::StatusOr<std::vector<ErrorMeasure>> Score(
    const ExperimentConfig& config, std::span<const GroundTruthMatrix> users,
    std::span<const int64_t> scored, std::span<const RealMatrix> estimates,
    EpochRange window) {
  return ParallelMap<ErrorMeasure>(
      static_cast<int64_t>(scored.size()), config.threads,
      [&](int64_t j) -> absl::StatusOr<ErrorMeasure> {
        const int64_t i = scored[j];
        const BinaryMatrix truth = users[i].Slice(window);
        if (config.goal == Goal::kLocalization) {
          return LocalizationError(truth, estimates[i]);
        }
        AGGLOC_ASSIGN_OR_RETURN(RealMatrix profile, NormalizeColumns(truth));
        return ProfilingError(profile, estimates[i]);
      });
}

std::vector<double> MeanCurve(std::span<const UserRow> rows,
                              std::vector<double> (*pick)(const UserRow&)) {
  std::vector<double> curve;
  if (rows.empty()) return curve;
  curve.assign(pick(rows.front()).size(), 0.0);
  for (const UserRow& row : rows) {
    const std::vector<double> slots = pick(row);
    for (size_t t = 0; t < curve.size(); ++t) curve[t] += slots[t];
  }
  for (double& v : curve) v /= static_cast<double>(rows.size());
  return curve;
}

absl::StatusOr<NoisyRelease> Perturb(const ExperimentConfig& config,
                                     std::span<const GroundTruthMatrix> users,
                                     const AggregateSeries& aggregate,
                                     EpochRange window,
                                     RunDiagnostics& diagnostics) {
  NoiseSpec spec = *config.defense;
  spec.seed = config.seed;
  switch (spec.mechanism) {
    case Mechanism::kScm:
      if (spec.scale_rule == ScaleRule::kSensitivity &&
          !spec.delta_sensitivity.has_value()) {
        const int64_t delta =
            std::max<int64_t>(1, ComputeSensitivity(users, window));
        spec.delta_sensitivity = delta;
        diagnostics.sensitivity = delta;
      }
      return ScmPerturb(aggregate, spec);
    case Mechanism::kFpa:
      return FpaPerturb(aggregate, spec);
    case Mechanism::kRr:
      return RrPerturbAndEstimate(users, window, spec);
  }
  return absl::InternalError("unhandled mechanism");
}

Json SummaryJson(const SeriesSummary& s) {
  return Json{{"mean", s.mean}, {"median", s.median}, {"cdf", s.cdf}};
}

Json AccountJson(const PrivacyAccount& a) {
  return Json{{"per_slot_epsilon", a.per_slot_epsilon},
              {"composed_epsilon", a.composed_epsilon},
              {"composition_note", a.composition_note}};
}

absl::Status WriteFileAtomically(const fs::path& path,
                                 const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << contents;
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      return absl::DataLossError(
          absl::StrCat("cannot write '", tmp.string(), "'"));
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    return absl::DataLossError(
        absl::StrCat("cannot move report into '", path.string(), "'"));
  }
  return absl::OkStatus();
}

absl::Status WriteFiles(
    const std::string& dir,
    const std::vector<std::pair<std::string, std::string>>& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::DataLossError(
        absl::StrCat("cannot create '", dir, "': ", ec.message()));
  }
  std::vector<fs::path> written;
  for (const auto& [name, contents] : files) {
    const fs::path path = fs::path(dir) / name;
    if (absl::Status s = WriteFileAtomically(path, contents); !s.ok()) {
      for (const fs::path& p : written) fs::remove(p, ec);
      return s;
    }
    written.push_back(path);
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<std::vector<GroundTruthMatrix>> LoadUsers(
    const ExperimentConfig& config) {
  std::vector<GroundTruthMatrix> users;
  switch (config.source) {
    case DatasetSource::kSynth: {
      AGGLOC_ASSIGN_OR_RETURN(users,
                              Tag(Synthesize(config.synth, config.threads),
                                  "synth"));
      break;
    }
    case DatasetSource::kIngest: {
      AGGLOC_ASSIGN_OR_RETURN(users, Tag(IngestUsers(config), "ingest"));
      break;
    }
    case DatasetSource::kTriplets: {
      AGGLOC_ASSIGN_OR_RETURN(std::ifstream in,
                              Tag(OpenInput(config.triplets.path), "load"));
      MatrixShape shape{config.triplets.roi_count, config.triplets.epoch_count};
      AGGLOC_ASSIGN_OR_RETURN(
          users, Tag(ReadGroundTruthTriplets(in, shape), "load"));
      break;
    }
  }
  if (users.empty()) {
    return absl::FailedPreconditionError("load: dataset has no users");
  }
  if (config.top_users > 0) {
    AGGLOC_ASSIGN_OR_RETURN(users, Tag(TopUsers(users, config.top_users),
                                       "users.top"));
  }
  return users;
}

SeriesSummary Summarize(std::vector<double> values) {
  SeriesSummary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(n);
  s.median = n % 2 == 1 ? values[n / 2]
                        : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  s.cdf.reserve(101);
  for (int q = 0; q <= 100; ++q) {
    // Nearest rank: smallest value with at least q% of the population at or
    // below it.
    const auto rank = static_cast<size_t>(
        std::ceil(static_cast<double>(q) * static_cast<double>(n) / 100.0));
    s.cdf.push_back(values[std::clamp<size_t>(rank, 1, n) - 1]);
  }
  return s;
}

absl::StatusOr<AttackReport> RunExperiment(
    const ExperimentConfig& config, std::span<const GroundTruthMatrix> users) {
  if (users.empty()) {
    return absl::FailedPreconditionError("run: no users");
  }
  AGGLOC_ASSIGN_OR_RETURN(
      WindowSplit split,
      Tag(SplitWeeks(users.front().epoch_count(), config.epoch_seconds,
                     config.observation_weeks, config.inference_weeks),
          "split"));
  const TimeFrame frame{users.front().epoch_count(), config.epoch_seconds,
                        split.observation.size(), split.inference.size()};
  const EpochRange window = frame.inference();
  const int64_t n = static_cast<int64_t>(users.size());

  AttackReport report;
  report.config = config.Canonical();
  report.metric = config.goal == Goal::kProfiling
                      ? ErrorMetric::kJsProfile
                      : ErrorMetric::kF1Localization;
  report.attack_name = std::string(AttackKindName(config.attack));
  report.inference_begin = window.begin;
  RunDiagnostics& diag = report.diagnostics;
  diag.users_total = n;

  // Priors: the raw prior, the estimate it is scored as, and the
  // probabilistic input the attacks consume.
  AGGLOC_ASSIGN_OR_RETURN(
      std::vector<PriorMatrix> base,
      Tag(ParallelMap<PriorMatrix>(
              n, config.threads,
              [&](int64_t i) { return BasePrior(config, users[i], frame); }),
          "prior"));
  const bool assignment_prior = config.prior == PriorKind::kLastSeas;
  std::vector<PriorMatrix> inputs;
  if (assignment_prior) {
    AGGLOC_ASSIGN_OR_RETURN(
        inputs, Tag(ParallelMap<PriorMatrix>(
                        n, config.threads,
                        [&](int64_t i) { return AssignmentToProfile(base[i]); }),
                    "prior"));
  } else {
    inputs = base;
  }
  for (const PriorMatrix& p : base) diag.prior_flagged_columns += p.flagged_columns;
  std::vector<RealMatrix> prior_estimates;
  if (assignment_prior) {
    const std::vector<PriorMatrix>& source =
        config.goal == Goal::kLocalization ? base : inputs;
    for (const PriorMatrix& p : source) prior_estimates.push_back(p.cells);
  } else {
    AGGLOC_ASSIGN_OR_RETURN(
        prior_estimates,
        Tag(ParallelMap<RealMatrix>(n, config.threads,
                                    [&](int64_t i) {
                                      return Project(base[i],
                                                     config.prior_projection,
                                                     config.prior_delta);
                                    }),
            "prior"));
  }

  AGGLOC_ASSIGN_OR_RETURN(
      AggregateSeries aggregate,
      Tag(Aggregate(users, window, AggregateOptions{config.include_null}),
          "aggregate"));
  const UserOrdering ordering =
      UserOrdering::ByTotalReports(users, frame.observation());
  AGGLOC_ASSIGN_OR_RETURN(
      AttackOutput raw,
      Tag(Attack(config, inputs, prior_estimates, aggregate,
                 BuildAggregateProfile(aggregate), ordering),
          "attack"));
  diag.posterior_flagged_columns = raw.flagged_columns;
  diag.clamped_cells = raw.clamped_cells;
  diag.unconsumed_mass = raw.unconsumed_mass;

  std::optional<AttackOutput> noisy;
  if (config.defense.has_value()) {
    AGGLOC_ASSIGN_OR_RETURN(
        NoisyRelease release,
        Tag(Perturb(config, users, aggregate, window, diag), "defense"));
    const int64_t first_row = config.include_null ? 0 : 1;
    if (!config.include_null) release.series.cells.row(kNullRoi).setZero();
    const int64_t rows = aggregate.cells.rows() - first_row;
    std::vector<double> y;
    std::vector<double> y_noisy;
    y.reserve(rows * aggregate.cells.cols());
    y_noisy.reserve(rows * aggregate.cells.cols());
    for (int64_t s = first_row; s < aggregate.cells.rows(); ++s) {
      for (int64_t t = 0; t < aggregate.cells.cols(); ++t) {
        y.push_back(static_cast<double>(aggregate.cells(s, t)));
        y_noisy.push_back(release.series.cells(s, t));
      }
    }
    AGGLOC_ASSIGN_OR_RETURN(double mre,
                            Tag(MeanRelativeError(y, y_noisy), "defense"));
    report.defense = DefenseResult{release.account, mre};
    AggregateSeries sanitized = SanitizeCounts(release.series);
    sanitized.includes_null = config.include_null;
    AGGLOC_ASSIGN_OR_RETURN(
        noisy, Tag(Attack(config, inputs, prior_estimates, sanitized,
                          BuildAggregateProfile(release.series), ordering),
                   "attack (noisy release)"));
    diag.noisy_clamped_cells = noisy->clamped_cells;
    diag.noisy_unconsumed_mass = noisy->unconsumed_mass;
  }

  std::vector<int64_t> scored;
  std::vector<int64_t> activity(n);
  for (int64_t i = 0; i < n; ++i) {
    activity[i] = users[i].ActivityCount(window);
    if (activity[i] >= config.min_activity) scored.push_back(i);
  }
  if (scored.empty()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "metrics: no user has users.min_activity = ", config.min_activity,
        " non-null marks in the inference window"));
  }
  diag.users_scored = static_cast<int64_t>(scored.size());

  AGGLOC_ASSIGN_OR_RETURN(
      std::vector<ErrorMeasure> prior_err,
      Tag(Score(config, users, scored, prior_estimates, window), "metrics"));
  AGGLOC_ASSIGN_OR_RETURN(
      std::vector<ErrorMeasure> post_err,
      Tag(Score(config, users, scored, raw.estimates, window), "metrics"));
  std::vector<ErrorMeasure> noisy_err;
  if (noisy.has_value()) {
    AGGLOC_ASSIGN_OR_RETURN(
        noisy_err,
        Tag(Score(config, users, scored, noisy->estimates, window), "metrics"));
  }

  std::map<std::string, std::vector<double>> series;
  for (size_t j = 0; j < scored.size(); ++j) {
    const int64_t i = scored[j];
    UserRow row;
    row.error.user_id = users[i].user_id();
    row.error.metric = report.metric;
    row.error.prior_error = prior_err[j].total;
    row.error.posterior_error = post_err[j].total;
    row.error.per_slot_prior = std::move(prior_err[j].per_slot);
    row.error.per_slot_posterior = std::move(post_err[j].per_slot);
    row.outcome.user_id = users[i].user_id();
    row.outcome.pl = PrivacyLoss(row.error.prior_error, row.error.posterior_error);
    row.inference_activity = activity[i];
    diag.replaced_columns +=
        prior_err[j].replaced_columns + post_err[j].replaced_columns;
    series["prior_error"].push_back(row.error.prior_error);
    series["posterior_error"].push_back(row.error.posterior_error);
    series["pl"].push_back(row.outcome.pl);
    if (noisy.has_value()) {
      row.noisy_error = noisy_err[j].total;
      row.per_slot_noisy = std::move(noisy_err[j].per_slot);
      row.outcome.pg = PrivacyGain(row.error.posterior_error, *row.noisy_error);
      diag.replaced_columns += noisy_err[j].replaced_columns;
      series["noisy_error"].push_back(*row.noisy_error);
      series["pg"].push_back(*row.outcome.pg);
    }
    report.rows.push_back(std::move(row));
  }
  for (auto& [name, values] : series) {
    report.summaries[name] = Summarize(std::move(values));
  }
  report.per_slot_prior = MeanCurve(
      report.rows, [](const UserRow& r) { return r.error.per_slot_prior; });
  report.per_slot_posterior = MeanCurve(
      report.rows, [](const UserRow& r) { return r.error.per_slot_posterior; });
  if (noisy.has_value()) {
    report.per_slot_noisy = MeanCurve(
        report.rows, [](const UserRow& r) { return r.per_slot_noisy; });
  }
  return report;
}

absl::StatusOr<AttackReport> Run(const ExperimentConfig& config) {
  AGGLOC_ASSIGN_OR_RETURN(std::vector<GroundTruthMatrix> users,
                          LoadUsers(config));
  return RunExperiment(config, users);
}

std::string ReportJson(const AttackReport& report) {
  Json config = Json::object();
  for (const auto& [key, value] : report.config) config[key] = value;
  Json users = Json::array();
  for (const UserRow& row : report.rows) {
    Json u{{"user_id", row.error.user_id},
           {"inference_activity", row.inference_activity},
           {"prior_error", row.error.prior_error},
           {"posterior_error", row.error.posterior_error},
           {"pl", row.outcome.pl}};
    if (row.noisy_error) u["noisy_error"] = *row.noisy_error;
    if (row.outcome.pg) u["pg"] = *row.outcome.pg;
    users.push_back(std::move(u));
  }
  Json summaries = Json::object();
  for (const auto& [name, s] : report.summaries) summaries[name] = SummaryJson(s);
  Json per_slot{{"inference_begin", report.inference_begin},
                {"prior", report.per_slot_prior},
                {"posterior", report.per_slot_posterior}};
  if (!report.per_slot_noisy.empty()) per_slot["noisy"] = report.per_slot_noisy;
  const RunDiagnostics& d = report.diagnostics;
  Json diagnostics{{"users_total", d.users_total},
                   {"users_scored", d.users_scored},
                   {"prior_flagged_columns", d.prior_flagged_columns},
                   {"posterior_flagged_columns", d.posterior_flagged_columns},
                   {"replaced_columns", d.replaced_columns},
                   {"clamped_cells", d.clamped_cells},
                   {"unconsumed_mass", d.unconsumed_mass},
                   {"noisy_clamped_cells", d.noisy_clamped_cells},
                   {"noisy_unconsumed_mass", d.noisy_unconsumed_mass}};
  if (d.sensitivity) diagnostics["sensitivity"] = *d.sensitivity;
  Json out{{"format", "aggloc-report"},
           {"version", 1},
           {"config", std::move(config)},
           {"metric", std::string(ErrorMetricName(report.metric))},
           {"attack", report.attack_name},
           {"users", std::move(users)},
           {"summary", std::move(summaries)},
           {"per_slot", std::move(per_slot)},
           {"diagnostics", std::move(diagnostics)}};
  if (report.defense) {
    out["defense"] = Json{{"account", AccountJson(report.defense->account)},
                          {"mre", report.defense->mre}};
  }
  return out.dump(2) + "\n";
}

std::string UserRowsCsv(const AttackReport& report) {
  const bool noisy = !report.rows.empty() && report.rows.front().noisy_error;
  std::string out = "user_id,inference_activity,prior_error,posterior_error,pl";
  if (noisy) out += ",noisy_error,pg";
  out += "\n";
  for (const UserRow& row : report.rows) {
    absl::StrAppend(&out, row.error.user_id, ",", row.inference_activity, ",",
                    FormatDouble(row.error.prior_error), ",",
                    FormatDouble(row.error.posterior_error), ",",
                    FormatDouble(row.outcome.pl));
    if (noisy) {
      absl::StrAppend(&out, ",", FormatDouble(*row.noisy_error), ",",
                      FormatDouble(row.outcome.pg.value_or(0.0)));
    }
    out += "\n";
  }
  return out;
}

std::string PerSlotCsv(const AttackReport& report) {
  const bool noisy = !report.per_slot_noisy.empty();
  std::string out = noisy ? "epoch,prior,posterior,noisy\n"
                          : "epoch,prior,posterior\n";
  for (size_t t = 0; t < report.per_slot_prior.size(); ++t) {
    absl::StrAppend(&out, report.inference_begin + static_cast<int64_t>(t),
                    ",", FormatDouble(report.per_slot_prior[t]), ",",
                    FormatDouble(report.per_slot_posterior[t]));
    if (noisy) absl::StrAppend(&out, ",", FormatDouble(report.per_slot_noisy[t]));
    out += "\n";
  }
  return out;
}

absl::Status WriteReport(const AttackReport& report, const std::string& dir) {
  return WriteFiles(dir, {{"report.json", ReportJson(report)},
                          {"users.csv", UserRowsCsv(report)},
                          {"per_slot.csv", PerSlotCsv(report)}});
}

absl::StatusOr<AttackReport> ParseReportJson(const std::string& json) {
  const Json doc = Json::parse(json, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object() ||
      doc.value("format", "") != "aggloc-report") {
    return absl::InvalidArgumentError("not an aggloc report");
  }
  AttackReport report;
  try {
    for (const auto& [key, value] : doc.at("config").items()) {
      report.config.emplace_back(key, value.get<std::string>());
    }
    const std::string metric = doc.at("metric").get<std::string>();
    if (metric == ErrorMetricName(ErrorMetric::kJsProfile)) {
      report.metric = ErrorMetric::kJsProfile;
    } else if (metric == ErrorMetricName(ErrorMetric::kF1Localization)) {
      report.metric = ErrorMetric::kF1Localization;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown metric '", metric, "'"));
    }
    report.attack_name = doc.at("attack").get<std::string>();
    for (const Json& u : doc.at("users")) {
      UserRow row;
      row.error.user_id = u.at("user_id").get<std::string>();
      row.error.metric = report.metric;
      row.error.prior_error = u.at("prior_error").get<double>();
      row.error.posterior_error = u.at("posterior_error").get<double>();
      row.inference_activity = u.at("inference_activity").get<int64_t>();
      row.outcome.user_id = row.error.user_id;
      row.outcome.pl = u.at("pl").get<double>();
      if (u.contains("noisy_error")) {
        row.noisy_error = u.at("noisy_error").get<double>();
      }
      if (u.contains("pg")) row.outcome.pg = u.at("pg").get<double>();
      report.rows.push_back(std::move(row));
    }
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed report: ", e.what()));
  }
  return report;
}

absl::StatusOr<CdfPoints> EmpiricalCdf(std::span<const double> values) {
  if (values.empty()) {
    return absl::InvalidArgumentError("cannot build a CDF of no values");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  CdfPoints points;
  const double n = static_cast<double>(sorted.size());
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    points.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
  }
  return points;
}

absl::StatusOr<std::map<std::string, CdfPoints>> ReportCdfs(
    const AttackReport& report) {
  if (report.rows.empty()) {
    return absl::InvalidArgumentError("report has no user rows");
  }
  std::vector<double> prior;
  std::vector<double> posterior;
  std::vector<double> noisy;
  for (const UserRow& row : report.rows) {
    prior.push_back(row.error.prior_error);
    posterior.push_back(row.error.posterior_error);
    if (row.noisy_error) noisy.push_back(*row.noisy_error);
  }
  std::map<std::string, CdfPoints> out;
  AGGLOC_ASSIGN_OR_RETURN(out["prior"], EmpiricalCdf(prior));
  AGGLOC_ASSIGN_OR_RETURN(out[report.attack_name], EmpiricalCdf(posterior));
  if (!noisy.empty()) {
    AGGLOC_ASSIGN_OR_RETURN(out[report.attack_name + "_noisy"],
                            EmpiricalCdf(noisy));
  }
  return out;
}

absl::Status EmitCdf(const AttackReport& report, const std::string& dir) {
  AGGLOC_ASSIGN_OR_RETURN(auto cdfs, ReportCdfs(report));
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& [name, points] : cdfs) {
    std::string csv = "error,fraction\n";
    for (const auto& [value, fraction] : points) {
      absl::StrAppend(&csv, FormatDouble(value), ",", FormatDouble(fraction),
                      "\n");
    }
    files.emplace_back(absl::StrCat("cdf_", name, ".csv"), std::move(csv));
  }
  return WriteFiles(dir, files);
}

absl::StatusOr<std::vector<ExperimentConfig>> SweepConfigs(
    const ConfigEntries& base, const std::string& axis,
    const std::vector<std::string>& values) {
  if (!IsConfigKey(axis) || axis == "output.dir" || axis == "threads") {
    return absl::InvalidArgumentError(
        absl::StrCat("'", axis, "' is not a sweepable config key"));
  }
  if (values.empty()) {
    return absl::InvalidArgumentError("sweep needs at least one value");
  }
  const auto dir_it = base.find("output.dir");
  const std::string root = dir_it == base.end() ? "out" : dir_it->second;
  std::vector<ExperimentConfig> configs;
  for (const std::string& value : values) {
    ConfigEntries entries = base;
    entries[axis] = value;
    entries["output.dir"] =
        (fs::path(root) / absl::StrCat(axis, "=", value)).string();
    auto config = ConfigFromEntries(entries);
    if (!config.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(
          axis, " = ", value, ": ", config.status().message()));
    }
    configs.push_back(*std::move(config));
  }
  return configs;
}

absl::StatusOr<std::vector<SweepPoint>> RunSweep(
    std::span<const ExperimentConfig> configs,
    std::span<const std::string> values) {
  if (configs.size() != values.size()) {
    return absl::InvalidArgumentError("one value per sweep config expected");
  }
  std::vector<SweepPoint> points;
  for (size_t i = 0; i < configs.size(); ++i) {
    auto report = Run(configs[i]);
    if (!report.ok()) {
      return absl::Status(report.status().code(),
                          absl::StrCat("sweep value ", values[i], ": ",
                                       report.status().message()));
    }
    points.push_back({values[i], *std::move(report)});
  }
  return points;
}

std::string SweepSummaryCsv(const std::string& axis,
                            std::span<const SweepPoint> points) {
  const bool defense = !points.empty() && points.front().report.defense;
  std::string out = absl::StrCat(
      axis, ",mean_prior_error,mean_posterior_error,mean_pl");
  if (defense) out += ",mean_noisy_error,mean_pg,mre";
  out += "\n";
  for (const SweepPoint& p : points) {
    const auto mean = [&](const std::string& key) {
      const auto it = p.report.summaries.find(key);
      return FormatDouble(it == p.report.summaries.end() ? 0.0
                                                         : it->second.mean);
    };
    absl::StrAppend(&out, p.value, ",", mean("prior_error"), ",",
                    mean("posterior_error"), ",", mean("pl"));
    if (defense) {
      absl::StrAppend(&out, ",", mean("noisy_error"), ",", mean("pg"), ",",
                      FormatDouble(p.report.defense ? p.report.defense->mre
                                                    : 0.0));
    }
    out += "\n";
  }
  return out;
}

}  // namespace aggloc
