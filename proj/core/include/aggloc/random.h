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

#ifndef AGGLOC_RANDOM_H_
#define AGGLOC_RANDOM_H_

#include <cstdint>
#include <random>

namespace aggloc {

uint64_t SplitMix64(uint64_t x);

// Deterministic, platform-independent random source. Uniform variates are
// built directly from the 64-bit engine output rather than through
// <random> distributions, whose algorithms are implementation-defined.
//
// Parallel consumers never share a generator. Each unit of work (a ROI row,
// a user) gets its own stream:
//
//   stream_seed = SplitMix64(seed ^ SplitMix64(stream + 1))
//   substream   = SplitMix64(stream_seed ^ SplitMix64(substream + 1))
//
// so the values a unit draws depend only on (seed, stream ids), never on
// the thread that runs it.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  static Rng ForStream(uint64_t seed, uint64_t stream);
  static Rng ForStream(uint64_t seed, uint64_t stream, uint64_t substream);

  uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform01();
  // Uniform on (0, 1); never returns an endpoint.
  double UniformOpen01();
  bool Bernoulli(double p) { return Uniform01() < p; }
  // Uniform integer in [lo, hi], unbiased.
  int64_t UniformInt(int64_t lo, int64_t hi);

 private:
  std::mt19937_64 engine_;
};

}  // namespace aggloc

#endif  // AGGLOC_RANDOM_H_
