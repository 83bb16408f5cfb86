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

#ifndef AGGLOC_PRIVACY_METRICS_H_
#define AGGLOC_PRIVACY_METRICS_H_

// Divergences, localization accuracy, adversarial error, privacy loss and
// gain, and the utility of perturbed releases. Logarithms are base 2, so
// the Jensen-Shannon divergence and distance lie in [0, 1].

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "aggloc/mobility_model.h"

namespace aggloc {

enum class ErrorMetric {
  kJsProfile,       // mean Jensen-Shannon distance over the inference window
  kF1Localization,  // 1 - F1 over every cell, null row included
};

std::string_view ErrorMetricName(ErrorMetric metric);

// Adversarial error of one estimate against the ground truth.
struct ErrorMeasure {
  double total = 0.0;
  std::vector<double> per_slot;
  // Estimate columns that carried no mass and were scored as uniform.
  int64_t replaced_columns = 0;
};

struct ErrorReport {
  std::string user_id;
  ErrorMetric metric = ErrorMetric::kJsProfile;
  double prior_error = 0.0;
  double posterior_error = 0.0;
  std::vector<double> per_slot_prior;
  std::vector<double> per_slot_posterior;
};

struct PrivacyOutcome {
  std::string user_id;
  double pl = 0.0;
  std::optional<double> pg;
};

struct ConfusionCounts {
  int64_t true_positives = 0;
  int64_t false_positives = 0;
  int64_t false_negatives = 0;
  int64_t true_negatives = 0;
};

// KL(w || x) in bits. Infinite when w has mass where x has none.
absl::StatusOr<double> KlDivergence(std::span<const double> w,
                                    std::span<const double> x);
absl::StatusOr<double> JsDivergence(std::span<const double> w,
                                    std::span<const double> x);
// Square root of the JS divergence; a metric on distributions.
absl::StatusOr<double> JsDistance(std::span<const double> w,
                                  std::span<const double> x);

absl::StatusOr<ErrorMeasure> ProfilingError(const RealMatrix& truth_profile,
                                            const RealMatrix& estimate);

absl::StatusOr<ConfusionCounts> CountConfusion(const BinaryMatrix& truth,
                                               const RealMatrix& estimate);
// F1 from cell counts. Zero when there are no true positives but some
// error; one when both matrices are empty.
double F1Score(const ConfusionCounts& counts);
absl::StatusOr<ErrorMeasure> LocalizationError(const BinaryMatrix& truth,
                                               const RealMatrix& estimate);

// Relative reduction of the adversary's error thanks to the release.
double PrivacyLoss(double prior_error, double posterior_error);
// Relative increase of the adversary's error thanks to a defense, scaled by
// the largest increase possible.
double PrivacyGain(double raw_error, double noisy_error);

inline constexpr double kDefaultMreBetaFraction = 0.001;

// Mean relative error with sanity bound beta = beta_fraction * sum(y).
absl::StatusOr<double> MeanRelativeError(
    std::span<const double> y, std::span<const double> y_noisy,
    double beta_fraction = kDefaultMreBetaFraction);

}  // namespace aggloc

#endif  // AGGLOC_PRIVACY_METRICS_H_
