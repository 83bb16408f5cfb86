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

#include "aggloc/privacy_metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace aggloc {
namespace {

absl::Status CheckSameLength(std::span<const double> w,
                             std::span<const double> x) {
  if (w.size() != x.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "distribution lengths differ: ", w.size(), " vs ", x.size()));
  }
  return absl::OkStatus();
}

double Kl(std::span<const double> w, std::span<const double> x) {
  double sum = 0.0;
  for (size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    if (x[i] <= 0.0) return std::numeric_limits<double>::infinity();
    sum += w[i] * std::log2(w[i] / x[i]);
  }
  return sum;
}

// Mixture terms are never zero where w or x is positive, so both KL terms
// stay finite.
double Js(std::span<const double> w, std::span<const double> x) {
  double sum = 0.0;
  for (size_t i = 0; i < w.size(); ++i) {
    const double z = 0.5 * (w[i] + x[i]);
    if (w[i] > 0.0) sum += 0.5 * w[i] * std::log2(w[i] / z);
    if (x[i] > 0.0) sum += 0.5 * x[i] * std::log2(x[i] / z);
  }
  return std::clamp(sum, 0.0, 1.0);
}

std::span<const double> Column(const RealMatrix& m, Eigen::Index t) {
  return {m.data() + t * m.rows(), static_cast<size_t>(m.rows())};
}

}  // namespace

std::string_view ErrorMetricName(ErrorMetric metric) {
  return metric == ErrorMetric::kJsProfile ? "js_profile" : "f1_localization";
}

absl::StatusOr<double> KlDivergence(std::span<const double> w,
                                    std::span<const double> x) {
  if (absl::Status s = CheckSameLength(w, x); !s.ok()) return s;
  return Kl(w, x);
}

absl::StatusOr<double> JsDivergence(std::span<const double> w,
                                    std::span<const double> x) {
  if (absl::Status s = CheckSameLength(w, x); !s.ok()) return s;
  return Js(w, x);
}

absl::StatusOr<double> JsDistance(std::span<const double> w,
                                  std::span<const double> x) {
  if (absl::Status s = CheckSameLength(w, x); !s.ok()) return s;
  return std::sqrt(Js(w, x));
}

absl::StatusOr<ErrorMeasure> ProfilingError(const RealMatrix& truth_profile,
                                            const RealMatrix& estimate) {
  if (truth_profile.rows() != estimate.rows() ||
      truth_profile.cols() != estimate.cols() || estimate.cols() == 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "profile shapes differ: ", truth_profile.rows(), "x",
        truth_profile.cols(), " vs ", estimate.rows(), "x", estimate.cols()));
  }
  ErrorMeasure out;
  out.per_slot.reserve(estimate.cols());
  const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(
      estimate.rows(), 1.0 / static_cast<double>(estimate.rows()));
  double sum = 0.0;
  for (Eigen::Index t = 0; t < estimate.cols(); ++t) {
    std::span<const double> guess = Column(estimate, t);
    if (estimate.col(t).sum() <= 0.0) {
      guess = {uniform.data(), static_cast<size_t>(uniform.size())};
      ++out.replaced_columns;
    }
    const double d = std::sqrt(Js(Column(truth_profile, t), guess));
    out.per_slot.push_back(d);
    sum += d;
  }
  out.total = sum / static_cast<double>(estimate.cols());
  return out;
}

absl::StatusOr<ConfusionCounts> CountConfusion(const BinaryMatrix& truth,
                                               const RealMatrix& estimate) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "localization shapes differ: ", truth.rows(), "x", truth.cols(),
        " vs ", estimate.rows(), "x", estimate.cols()));
  }
  if (!IsBinary(estimate)) {
    return absl::InvalidArgumentError("localization estimate is not binary");
  }
  ConfusionCounts c;
  for (Eigen::Index t = 0; t < truth.cols(); ++t) {
    for (Eigen::Index s = 0; s < truth.rows(); ++s) {
      const bool actual = truth(s, t) != 0;
      const bool predicted = estimate(s, t) != 0.0;
      if (actual && predicted) {
        ++c.true_positives;
      } else if (predicted) {
        ++c.false_positives;
      } else if (actual) {
        ++c.false_negatives;
      } else {
        ++c.true_negatives;
      }
    }
  }
  return c;
}

double F1Score(const ConfusionCounts& counts) {
  if (counts.true_positives == 0) {
    return counts.false_positives + counts.false_negatives == 0 ? 1.0 : 0.0;
  }
  const double tp = static_cast<double>(counts.true_positives);
  const double precision = tp / (tp + counts.false_positives);
  const double recall = tp / (tp + counts.false_negatives);
  return 2.0 * recall * precision / (recall + precision);
}

absl::StatusOr<ErrorMeasure> LocalizationError(const BinaryMatrix& truth,
                                               const RealMatrix& estimate) {
  absl::StatusOr<ConfusionCounts> total = CountConfusion(truth, estimate);
  if (!total.ok()) return total.status();
  ErrorMeasure out;
  out.total = 1.0 - F1Score(*total);
  out.per_slot.reserve(truth.cols());
  for (Eigen::Index t = 0; t < truth.cols(); ++t) {
    absl::StatusOr<ConfusionCounts> slot = CountConfusion(
        truth.col(t), RealMatrix(estimate.col(t)));
    out.per_slot.push_back(1.0 - F1Score(*slot));
  }
  return out;
}

double PrivacyLoss(double prior_error, double posterior_error) {
  if (prior_error != 0.0 && posterior_error < prior_error) {
    return std::abs(posterior_error - prior_error) / prior_error;
  }
  return 0.0;
}

double PrivacyGain(double raw_error, double noisy_error) {
  if (raw_error != 1.0 && noisy_error > raw_error) {
    return (noisy_error - raw_error) / (1.0 - raw_error);
  }
  return 0.0;
}

absl::StatusOr<double> MeanRelativeError(std::span<const double> y,
                                         std::span<const double> y_noisy,
                                         double beta_fraction) {
  if (y.empty()) {
    return absl::InvalidArgumentError("MRE of an empty series");
  }
  if (y.size() != y_noisy.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "MRE series lengths differ: ", y.size(), " vs ", y_noisy.size()));
  }
  double total = 0.0;
  for (double v : y) total += v;
  const double beta = beta_fraction * total;
  double sum = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    const double bound = std::max(beta, y[i]);
    const double deviation = std::abs(y_noisy[i] - y[i]);
    // An all-zero reference leaves no scale; count the raw deviation.
    sum += bound > 0.0 ? deviation / bound : deviation;
  }
  return sum / static_cast<double>(y.size());
}

}  // namespace aggloc
