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

#ifndef AGGLOC_EXPERIMENT_H_
#define AGGLOC_EXPERIMENT_H_

// End-to-end experiment runner: load users, split the timeline, build
// priors, optionally perturb the aggregates, attack, score, and persist the
// report. Outputs depend only on the configuration (threads included), so
// reruns are byte-identical.
//
// Output directory layout:
//   report.json    config echo, per-user rows, summaries, per-slot curves
//   users.csv      one row per scored user
//   per_slot.csv   population mean error per inference epoch

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "aggloc/dp_mechanisms.h"
#include "aggloc/experiment_config.h"
#include "aggloc/mobility_model.h"
#include "aggloc/privacy_metrics.h"

namespace aggloc {

// Mean, median and the population CDF sampled at 1% quantiles
// (nearest-rank; cdf[q] is the value at quantile q / 100).
struct SeriesSummary {
  double mean = 0.0;
  double median = 0.0;
  std::vector<double> cdf;
};

struct UserRow {
  ErrorReport error;
  PrivacyOutcome outcome;
  int64_t inference_activity = 0;  // non-null marks in the inference window
  // Error of the same attack against the perturbed release.
  std::optional<double> noisy_error;
  std::vector<double> per_slot_noisy;
};

struct RunDiagnostics {
  int64_t users_total = 0;
  int64_t users_scored = 0;
  int64_t prior_flagged_columns = 0;
  int64_t posterior_flagged_columns = 0;
  int64_t replaced_columns = 0;  // zero-mass estimate columns scored as uniform
  int64_t clamped_cells = 0;
  int64_t unconsumed_mass = 0;
  int64_t noisy_clamped_cells = 0;
  int64_t noisy_unconsumed_mass = 0;
  std::optional<int64_t> sensitivity;  // when computed from the data
};

struct DefenseResult {
  PrivacyAccount account;
  double mre = 0.0;
};

struct AttackReport {
  std::vector<std::pair<std::string, std::string>> config;
  ErrorMetric metric = ErrorMetric::kJsProfile;
  std::string attack_name;
  std::vector<UserRow> rows;
  // Keys: prior_error, posterior_error, pl and, with a defense, noisy_error
  // and pg.
  std::map<std::string, SeriesSummary> summaries;
  int64_t inference_begin = 0;
  std::vector<double> per_slot_prior;
  std::vector<double> per_slot_posterior;
  std::vector<double> per_slot_noisy;
  std::optional<DefenseResult> defense;
  RunDiagnostics diagnostics;
};

// Loads the configured dataset and keeps the top users.
absl::StatusOr<std::vector<GroundTruthMatrix>> LoadUsers(
    const ExperimentConfig& config);

absl::StatusOr<AttackReport> RunExperiment(
    const ExperimentConfig& config, std::span<const GroundTruthMatrix> users);
absl::StatusOr<AttackReport> Run(const ExperimentConfig& config);

SeriesSummary Summarize(std::vector<double> values);

std::string ReportJson(const AttackReport& report);
std::string UserRowsCsv(const AttackReport& report);
std::string PerSlotCsv(const AttackReport& report);
// Writes the three report files; leaves nothing behind on failure.
absl::Status WriteReport(const AttackReport& report, const std::string& dir);
// Restores config, metric, attack name and per-user rows.
absl::StatusOr<AttackReport> ParseReportJson(const std::string& json);

// Exact empirical CDF: one (value, fraction of values <= value) point per
// distinct value, ascending.
using CdfPoints = std::vector<std::pair<double, double>>;
absl::StatusOr<CdfPoints> EmpiricalCdf(std::span<const double> values);
// Series "prior", the attack name, and "<attack>_noisy" when present.
absl::StatusOr<std::map<std::string, CdfPoints>> ReportCdfs(
    const AttackReport& report);
// Writes cdf_<series>.csv files with header "error,fraction".
absl::Status EmitCdf(const AttackReport& report, const std::string& dir);

// One config per value of `axis`, each writing to <output.dir>/<axis>=<value>.
absl::StatusOr<std::vector<ExperimentConfig>> SweepConfigs(
    const ConfigEntries& base, const std::string& axis,
    const std::vector<std::string>& values);

struct SweepPoint {
  std::string value;
  AttackReport report;
};

absl::StatusOr<std::vector<SweepPoint>> RunSweep(
    std::span<const ExperimentConfig> configs,
    std::span<const std::string> values);
// Columns: value, mean prior error, mean posterior error, mean PL, and with
// a defense mean noisy error, mean PG and MRE.
std::string SweepSummaryCsv(const std::string& axis,
                            std::span<const SweepPoint> points);

}  // namespace aggloc

#endif  // AGGLOC_EXPERIMENT_H_
