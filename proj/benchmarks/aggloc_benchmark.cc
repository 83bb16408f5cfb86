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

#include <map>
#include <string>
#include <vector>

#include "aggloc/data_pipeline.h"
#include "aggloc/dp_mechanisms.h"
#include "aggloc/inference_attacks.h"
#include "aggloc/mobility_model.h"
#include "aggloc/prior_knowledge.h"
#include "aggloc/random.h"
#include "benchmark/benchmark.h"

namespace aggloc {
namespace {

// Shared commuter corpus and its freq_roi priors over the last week.
struct Corpus {
  std::vector<GroundTruthMatrix> users;
  std::vector<PriorMatrix> priors;
  AggregateSeries aggregate;
  TimeFrame frame;

  static const Corpus& Get(int user_count) {
    static auto* cache = new std::map<int, Corpus>();
    auto it = cache->find(user_count);
    if (it != cache->end()) return it->second;
    Corpus c;
    SynthModelSpec spec;
    spec.user_count = user_count;
    spec.weeks = 4;
    spec.seed = 3;
    c.users = *Synthesize(spec);
    c.frame = {.total_epochs = 4 * kHoursPerWeek,
               .epoch_seconds = 3600,
               .observation_epochs = 3 * kHoursPerWeek,
               .inference_epochs = kHoursPerWeek};
    for (const GroundTruthMatrix& u : c.users) {
      c.priors.push_back(*FreqRoi(u, c.frame));
    }
    c.aggregate = *Aggregate(c.users, c.frame.inference());
    return cache->emplace(user_count, std::move(c)).first->second;
  }
};

void BM_Synthesize(benchmark::State& state) {
  SynthModelSpec spec;
  spec.user_count = static_cast<int>(state.range(0));
  spec.weeks = 4;
  for (auto _ : state) benchmark::DoNotOptimize(Synthesize(spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Synthesize)->Arg(100)->Arg(1000);

void BM_Bayes(benchmark::State& state) {
  const Corpus& c = Corpus::Get(200);
  const AggregateProfile profile = BuildAggregateProfile(c.aggregate);
  for (auto _ : state) {
    for (const PriorMatrix& p : c.priors) {
      benchmark::DoNotOptimize(Bayes(p, profile));
    }
  }
  state.SetItemsProcessed(state.iterations() * c.priors.size());
}
BENCHMARK(BM_Bayes);

void BM_MaxRoi(benchmark::State& state) {
  const Corpus& c = Corpus::Get(static_cast<int>(state.range(0)));
  const UserOrdering ordering =
      UserOrdering::ByTotalReports(c.users, c.frame.observation());
  for (auto _ : state) {
    benchmark::DoNotOptimize(MaxRoi(c.priors, c.aggregate, ordering));
  }
}
BENCHMARK(BM_MaxRoi)->Arg(200)->Arg(1000);

void BM_MaxUser(benchmark::State& state) {
  const Corpus& c = Corpus::Get(static_cast<int>(state.range(0)));
  const UserOrdering ordering =
      UserOrdering::ByTotalReports(c.users, c.frame.observation());
  for (auto _ : state) {
    benchmark::DoNotOptimize(MaxUser(c.priors, c.aggregate, ordering));
  }
}
BENCHMARK(BM_MaxUser)->Arg(200)->Arg(1000);

void BM_FourierKeepK(benchmark::State& state) {
  const int64_t n = state.range(0);
  std::vector<double> series(n);
  Rng rng(1);
  for (double& v : series) v = rng.Uniform01() * 100.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(FourierKeepK(series, 20, 1.0, &rng));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_FourierKeepK)->Arg(168)->Arg(8760);

void BM_ScmPerturb(benchmark::State& state) {
  const Corpus& c = Corpus::Get(200);
  NoiseSpec spec;
  spec.epsilon = 0.1;
  spec.scale_rule = ScaleRule::kUnit;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ScmPerturb(c.aggregate, spec));
  }
}
BENCHMARK(BM_ScmPerturb);

void BM_RandomizedResponse(benchmark::State& state) {
  const Corpus& c = Corpus::Get(200);
  NoiseSpec spec;
  spec.mechanism = Mechanism::kRr;
  spec.p = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        RrPerturbAndEstimate(c.users, c.frame.inference(), spec));
  }
}
BENCHMARK(BM_RandomizedResponse);

}  // namespace
}  // namespace aggloc

BENCHMARK_MAIN();
