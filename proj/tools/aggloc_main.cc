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

// aggloc: command-line front end for synthesizing and ingesting mobility
// data and for running privacy experiments on aggregate location releases.
//
//   aggloc synth  --config FILE [--seed N] [--out DIR]
//   aggloc ingest --config FILE [--out DIR]
//   aggloc run    --config FILE [--seed N] [--out DIR] [--threads N]
//   aggloc sweep  --config FILE --axis KEY --values V1,V2,... [--out DIR]
//   aggloc cdf    --report FILE [--out DIR]
//
// Exit codes: 0 success, 2 configuration error, 3 data or runtime error.
// AGGLOC_LOG_LEVEL selects verbosity (trace, debug, info, warn, error, off).

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_split.h"
#include "aggloc/data_pipeline.h"
#include "aggloc/experiment.h"
#include "aggloc/experiment_config.h"
#include "aggloc/triplet_io.h"
#include "spdlog/spdlog.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct CommonFlags {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
};

int Fail(int code, const absl::Status& status) {
  spdlog::error("{}", std::string(status.message()));
  return code;
}

void ConfigureLogging() {
  spdlog::set_pattern("[%l] %v");
  if (const char* level = std::getenv("AGGLOC_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(level));
  } else {
    spdlog::set_level(spdlog::level::info);
  }
}

absl::StatusOr<aggloc::ConfigEntries> LoadEntries(const CommonFlags& flags) {
  auto entries = aggloc::ReadConfigFile(flags.config_path);
  if (!entries.ok()) return entries.status();
  if (flags.seed) (*entries)["seed"] = std::to_string(*flags.seed);
  if (flags.out) (*entries)["output.dir"] = *flags.out;
  if (flags.threads) (*entries)["threads"] = std::to_string(*flags.threads);
  return entries;
}

absl::StatusOr<aggloc::ExperimentConfig> LoadConfig(const CommonFlags& flags) {
  auto entries = LoadEntries(flags);
  if (!entries.ok()) return entries.status();
  return aggloc::ConfigFromEntries(*entries);
}

absl::Status WriteTriplets(const std::vector<aggloc::GroundTruthMatrix>& users,
                           const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) return absl::DataLossError("cannot create " + dir);
  const std::filesystem::path path =
      std::filesystem::path(dir) / "ground_truth.csv";
  std::ofstream out(path);
  if (!out) return absl::DataLossError("cannot write " + path.string());
  absl::Status status = aggloc::WriteGroundTruthTriplets(users, out);
  if (status.ok()) {
    spdlog::info("wrote {} users to {}", users.size(), path.string());
  }
  return status;
}

int RunSynth(const CommonFlags& flags) {
  auto config = LoadConfig(flags);
  if (!config.ok()) return Fail(kExitConfig, config.status());
  if (config->source != aggloc::DatasetSource::kSynth) {
    return Fail(kExitConfig, absl::InvalidArgumentError(
                                 "synth needs dataset.source = synth"));
  }
  auto users = aggloc::Synthesize(config->synth, config->threads);
  if (!users.ok()) return Fail(kExitData, users.status());
  if (absl::Status s = WriteTriplets(*users, config->output_dir); !s.ok()) {
    return Fail(kExitData, s);
  }
  return 0;
}

int RunIngest(const CommonFlags& flags) {
  auto config = LoadConfig(flags);
  if (!config.ok()) return Fail(kExitConfig, config.status());
  if (config->source != aggloc::DatasetSource::kIngest) {
    return Fail(kExitConfig, absl::InvalidArgumentError(
                                 "ingest needs dataset.source = ingest"));
  }
  auto users = aggloc::LoadUsers(*config);
  if (!users.ok()) return Fail(kExitData, users.status());
  if (absl::Status s = WriteTriplets(*users, config->output_dir); !s.ok()) {
    return Fail(kExitData, s);
  }
  return 0;
}

int RunOnce(const CommonFlags& flags) {
  auto config = LoadConfig(flags);
  if (!config.ok()) return Fail(kExitConfig, config.status());
  auto report = aggloc::Run(*config);
  if (!report.ok()) return Fail(kExitData, report.status());
  if (absl::Status s = aggloc::WriteReport(*report, config->output_dir);
      !s.ok()) {
    return Fail(kExitData, s);
  }
  const auto& summary = report->summaries;
  spdlog::info("{} users: prior error {:.4f}, posterior error {:.4f}, PL {:.4f}",
               report->rows.size(), summary.at("prior_error").mean,
               summary.at("posterior_error").mean, summary.at("pl").mean);
  if (report->defense) {
    spdlog::info("defense: noisy error {:.4f}, PG {:.4f}, MRE {:.4f}",
                 summary.at("noisy_error").mean, summary.at("pg").mean,
                 report->defense->mre);
  }
  spdlog::info("report written to {}", config->output_dir);
  return 0;
}

int RunSweepCommand(const CommonFlags& flags, const std::string& axis,
                    const std::string& values_flag) {
  auto entries = LoadEntries(flags);
  if (!entries.ok()) return Fail(kExitConfig, entries.status());
  std::vector<std::string> values = absl::StrSplit(values_flag, ',');
  auto configs = aggloc::SweepConfigs(*entries, axis, values);
  if (!configs.ok()) return Fail(kExitConfig, configs.status());
  auto points = aggloc::RunSweep(*configs, values);
  if (!points.ok()) return Fail(kExitData, points.status());
  for (size_t i = 0; i < points->size(); ++i) {
    if (absl::Status s = aggloc::WriteReport((*points)[i].report,
                                             (*configs)[i].output_dir);
        !s.ok()) {
      return Fail(kExitData, s);
    }
  }
  const auto root_it = entries->find("output.dir");
  const std::string root = root_it == entries->end() ? "out" : root_it->second;
  const std::filesystem::path summary =
      std::filesystem::path(root) / "sweep_summary.csv";
  std::ofstream out(summary);
  out << aggloc::SweepSummaryCsv(axis, *points);
  if (!out) {
    return Fail(kExitData,
                absl::DataLossError("cannot write " + summary.string()));
  }
  spdlog::info("{} runs, summary in {}", points->size(), summary.string());
  return 0;
}

int RunCdf(const std::string& report_path, const std::string& out_dir) {
  std::ifstream in(report_path);
  if (!in) {
    return Fail(kExitData,
                absl::NotFoundError("cannot open report " + report_path));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto report = aggloc::ParseReportJson(buffer.str());
  if (!report.ok()) return Fail(kExitData, report.status());
  if (absl::Status s = aggloc::EmitCdf(*report, out_dir); !s.ok()) {
    return Fail(kExitData, s);
  }
  spdlog::info("CDF series written to {}", out_dir);
  return 0;
}

void AddCommonFlags(CLI::App& cmd, CommonFlags& flags, bool with_seed,
                    bool with_threads) {
  cmd.add_option("--config", flags.config_path, "Experiment config file")
      ->required();
  if (with_seed) cmd.add_option("--seed", flags.seed, "Override `seed`");
  cmd.add_option("--out", flags.out, "Override `output.dir`");
  if (with_threads) {
    cmd.add_option("--threads", flags.threads, "Override `threads`")
        ->check(CLI::PositiveNumber);
  }
}

}  // namespace

int main(int argc, char** argv) {
  ConfigureLogging();
  CLI::App app{"Privacy experiments on aggregate location time-series"};
  app.require_subcommand(1);

  CommonFlags flags;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  AddCommonFlags(*synth, flags, true, true);
  CLI::App* ingest = app.add_subcommand("ingest", "Ingest raw traces");
  AddCommonFlags(*ingest, flags, false, false);
  CLI::App* run = app.add_subcommand("run", "Run one experiment");
  AddCommonFlags(*run, flags, true, true);

  CLI::App* sweep = app.add_subcommand("sweep", "Run one experiment per value");
  AddCommonFlags(*sweep, flags, true, true);
  std::string axis;
  std::string values;
  sweep->add_option("--axis", axis, "Config key to vary")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();

  CLI::App* cdf = app.add_subcommand("cdf", "Emit CDF plot data for a report");
  std::string report_path;
  std::string cdf_out = ".";
  cdf->add_option("--report", report_path, "report.json of a run")->required();
  cdf->add_option("--out", cdf_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*synth) return RunSynth(flags);
  if (*ingest) return RunIngest(flags);
  if (*run) return RunOnce(flags);
  if (*sweep) return RunSweepCommand(flags, axis, values);
  return RunCdf(report_path, cdf_out);
}
