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

#ifndef AGGLOC_DP_MECHANISMS_H_
#define AGGLOC_DP_MECHANISMS_H_

// Differentially private releases of aggregate location time-series:
// output perturbation (simple counter mechanism, Fourier perturbation) and
// input perturbation (randomized response). Every mechanism is a pure
// function of its input and NoiseSpec; noise for ROI row s is drawn from
// Rng::ForStream(seed, s) so the result does not depend on threading.
//
// Releases are returned unsanitized. Rounding and clamping for the integer
// attacks happen in SanitizeCounts().

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "aggloc/mobility_model.h"
#include "aggloc/noise_spec.h"
#include "aggloc/random.h"

namespace aggloc {

struct PrivacyAccount {
  // Guarantee of one released cell (SCM, RR) or one ROI series (FPA).
  double per_slot_epsilon = 0.0;
  // Guarantee of the whole release under sequential composition.
  double composed_epsilon = 0.0;
  std::string composition_note;
};

struct NoisyRelease {
  NoisyAggregateSeries series;
  PrivacyAccount account;
};

// Laplace variate with density exp(-|x| / scale) / (2 scale), by inverse CDF.
absl::StatusOr<double> LaplaceSample(double scale, Rng& rng);

// Largest number of non-null presence marks one user has inside `window`.
int64_t ComputeSensitivity(std::span<const GroundTruthMatrix> users,
                           EpochRange window);

// Laplace scale the SCM rule implies for a rois x epochs release.
absl::StatusOr<double> ScmScale(const NoiseSpec& spec, int64_t rois,
                                int64_t epochs);

absl::StatusOr<NoisyRelease> ScmPerturb(const AggregateSeries& aggregate,
                                        const NoiseSpec& spec);

// Low-pass projection of a real series onto its first k Fourier
// coefficients (and their conjugate mirrors), plus optional Laplace noise of
// `noise_scale` on the real and imaginary part of each kept coefficient.
// A zero `noise_scale` gives the exact projection and draws nothing.
absl::StatusOr<std::vector<double>> FourierKeepK(std::span<const double> series,
                                                 int64_t k, double noise_scale,
                                                 Rng* rng);

absl::StatusOr<NoisyRelease> FpaPerturb(const AggregateSeries& aggregate,
                                        const NoiseSpec& spec);

// Every user answers, for each (ROI, epoch) of `window`, "yes" with
// probability p and the true presence bit otherwise. The release holds the
// debiased counts total * (Pyes - p) / (1 - p).
absl::StatusOr<NoisyRelease> RrPerturbAndEstimate(
    std::span<const GroundTruthMatrix> users, EpochRange window,
    const NoiseSpec& spec);

}  // namespace aggloc

#endif  // AGGLOC_DP_MECHANISMS_H_
