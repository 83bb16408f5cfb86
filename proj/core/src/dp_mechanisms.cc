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

#include "aggloc/dp_mechanisms.h"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <limits>
#include <mutex>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "aggloc/status_macros.h"

namespace aggloc {
namespace {

// FFTW planning is not thread-safe.
std::mutex& FftwPlannerMutex() {
  static std::mutex mu;
  return mu;
}

bool NoiseDisabled(const NoiseSpec& spec) {
  return std::isinf(*spec.epsilon);
}

double LaplaceFromUniform(double scale, double u01) {
  const double u = u01 - 0.5;  // (-0.5, 0.5), never an endpoint
  return -scale * std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
}

}  // namespace

std::string_view MechanismName(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::kScm:
      return "scm";
    case Mechanism::kFpa:
      return "fpa";
    case Mechanism::kRr:
      return "rr";
  }
  return "unknown";
}

absl::StatusOr<Mechanism> ParseMechanism(std::string_view name) {
  if (name == "scm") return Mechanism::kScm;
  if (name == "fpa") return Mechanism::kFpa;
  if (name == "rr") return Mechanism::kRr;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown mechanism '", std::string(name), "' (scm, fpa, rr)"));
}

std::string_view ScaleRuleName(ScaleRule rule) {
  switch (rule) {
    case ScaleRule::kUnit:
      return "unit";
    case ScaleRule::kHorizon:
      return "horizon";
    case ScaleRule::kSensitivity:
      return "sensitivity";
    case ScaleRule::kFull:
      return "full";
  }
  return "unknown";
}

absl::StatusOr<ScaleRule> ParseScaleRule(std::string_view name) {
  if (name == "unit") return ScaleRule::kUnit;
  if (name == "horizon") return ScaleRule::kHorizon;
  if (name == "sensitivity") return ScaleRule::kSensitivity;
  if (name == "full") return ScaleRule::kFull;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown scale rule '", std::string(name), "' (unit, horizon, sensitivity, full)"));
}

absl::Status NoiseSpec::Validate() const {
  const bool scm = mechanism == Mechanism::kScm;
  const bool fpa = mechanism == Mechanism::kFpa;
  const bool rr = mechanism == Mechanism::kRr;
  const std::string name(MechanismName(mechanism));
  if (epsilon.has_value() == rr) {
    return absl::InvalidArgumentError(
        rr ? "rr takes p, not epsilon"
           : absl::StrCat(name, " requires epsilon"));
  }
  if (epsilon.has_value() && !(*epsilon > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", *epsilon));
  }
  if (scale_rule.has_value() != scm) {
    return absl::InvalidArgumentError(
        scm ? "scm requires a scale rule"
            : absl::StrCat(name, " takes no scale rule"));
  }
  if (k.has_value() != fpa) {
    return absl::InvalidArgumentError(
        fpa ? "fpa requires k" : absl::StrCat(name, " takes no k"));
  }
  if (k.has_value() && *k < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("fpa k must be >= 1, got ", *k));
  }
  if (p.has_value() != rr) {
    return absl::InvalidArgumentError(
        rr ? "rr requires p" : absl::StrCat(name, " takes no p"));
  }
  if (p.has_value() && !(*p > 0.0 && *p < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("rr p must be in (0, 1), got ", *p));
  }
  if (delta_sensitivity.has_value()) {
    if (!scm) {
      return absl::InvalidArgumentError(
          absl::StrCat(name, " takes no sensitivity"));
    }
    if (*delta_sensitivity < 1) {
      return absl::InvalidArgumentError(absl::StrCat(
          "sensitivity must be >= 1, got ", *delta_sensitivity));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<double> LaplaceSample(double scale, Rng& rng) {
  if (!(scale > 0.0) || std::isinf(scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Laplace scale must be positive and finite, got ", scale));
  }
  return LaplaceFromUniform(scale, rng.UniformOpen01());
}

int64_t ComputeSensitivity(std::span<const GroundTruthMatrix> users,
                           EpochRange window) {
  int64_t delta = 0;
  for (const GroundTruthMatrix& user : users) {
    delta = std::max(delta, user.ActivityCount(window));
  }
  return delta;
}

absl::StatusOr<double> ScmScale(const NoiseSpec& spec, int64_t rois,
                                int64_t epochs) {
  AGGLOC_RETURN_IF_ERROR(spec.Validate());
  if (spec.mechanism != Mechanism::kScm) {
    return absl::InvalidArgumentError("SCM scale of a non-SCM spec");
  }
  const double eps = *spec.epsilon;
  switch (*spec.scale_rule) {
    case ScaleRule::kUnit:
      return 1.0 / eps;
    case ScaleRule::kHorizon:
      return static_cast<double>(epochs) / eps;
    case ScaleRule::kSensitivity:
      if (!spec.delta_sensitivity.has_value()) {
        return absl::FailedPreconditionError(
            "scm sensitivity rule needs delta_sensitivity");
      }
      return static_cast<double>(*spec.delta_sensitivity) / eps;
    case ScaleRule::kFull:
      return static_cast<double>(rois * epochs) / eps;
  }
  return absl::InternalError("unhandled scale rule");
}

absl::StatusOr<NoisyRelease> ScmPerturb(const AggregateSeries& aggregate,
                                        const NoiseSpec& spec) {
  const int64_t rois = aggregate.cells.rows();
  const int64_t epochs = aggregate.cells.cols();
  AGGLOC_ASSIGN_OR_RETURN(const double scale, ScmScale(spec, rois, epochs));

  NoisyRelease out;
  out.series.cells = aggregate.cells.cast<double>();
  out.series.user_count = aggregate.user_count;
  out.series.provenance = spec;
  if (scale > 0.0) {
    for (int64_t s = 0; s < rois; ++s) {
      Rng rng = Rng::ForStream(spec.seed, static_cast<uint64_t>(s));
      for (int64_t t = 0; t < epochs; ++t) {
        out.series.cells(s, t) += LaplaceFromUniform(scale, rng.UniformOpen01());
      }
    }
  }

  const double eps = *spec.epsilon;
  PrivacyAccount& account = out.account;
  account.per_slot_epsilon = scale > 0.0 ? 1.0 / scale : eps;
  switch (*spec.scale_rule) {
    case ScaleRule::kUnit:
      account.composed_epsilon = static_cast<double>(rois * epochs) * eps;
      account.composition_note = absl::StrFormat(
          "scm Lap(1/eps): event-level eps=%g per cell, O(|S|*|T'|*eps) over "
          "%d ROIs x %d epochs",
          eps, rois, epochs);
      break;
    case ScaleRule::kHorizon:
      account.composed_epsilon = static_cast<double>(rois) * eps;
      account.composition_note = absl::StrFormat(
          "scm Lap(|T'|/eps): eps=%g per ROI series, O(|S|*eps) over %d ROIs",
          eps, rois);
      break;
    case ScaleRule::kSensitivity:
      account.composed_epsilon = eps;
      account.composition_note = absl::StrFormat(
          "scm Lap(delta/eps) with delta=%d: user-level eps=%g", 
          *spec.delta_sensitivity, eps);
      break;
    case ScaleRule::kFull:
      account.composed_epsilon = eps;
      account.composition_note = absl::StrFormat(
          "scm Lap(|S|*|T'|/eps): eps=%g over the whole release", eps);
      break;
  }
  return out;
}

absl::StatusOr<std::vector<double>> FourierKeepK(std::span<const double> series,
                                                 int64_t k, double noise_scale,
                                                 Rng* rng) {
  const int64_t n = static_cast<int64_t>(series.size());
  if (n == 0) return absl::InvalidArgumentError("empty series");
  if (k < 1 || k > n) {
    return absl::OutOfRangeError(
        absl::StrCat("fpa k=", k, " outside [1, ", n, "]"));
  }
  if (noise_scale > 0.0 && rng == nullptr) {
    return absl::InvalidArgumentError("noisy projection needs an Rng");
  }
  const int64_t half = n / 2 + 1;
  std::vector<double> signal(series.begin(), series.end());
  std::vector<std::complex<double>> spectrum(half);
  auto* freq = reinterpret_cast<fftw_complex*>(spectrum.data());

  fftw_plan forward;
  fftw_plan backward;
  {
    std::lock_guard<std::mutex> lock(FftwPlannerMutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), signal.data(), freq,
                                   FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(static_cast<int>(n), freq, signal.data(),
                                    FFTW_ESTIMATE);
  }
  // ESTIMATE planning leaves the arrays untouched.
  fftw_execute(forward);

  const int64_t kept = std::min(k, half);
  for (int64_t m = kept; m < half; ++m) spectrum[m] = 0.0;
  if (noise_scale > 0.0) {
    for (int64_t m = 0; m < kept; ++m) {
      const double re = LaplaceFromUniform(noise_scale, rng->UniformOpen01());
      const double im = LaplaceFromUniform(noise_scale, rng->UniformOpen01());
      spectrum[m] += std::complex<double>(re, im);
    }
  }
  // c2r reads the kept half-spectrum as Hermitian, so the output is real.
  fftw_execute(backward);
  {
    std::lock_guard<std::mutex> lock(FftwPlannerMutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  for (double& v : signal) v /= static_cast<double>(n);
  return signal;
}

absl::StatusOr<NoisyRelease> FpaPerturb(const AggregateSeries& aggregate,
                                        const NoiseSpec& spec) {
  AGGLOC_RETURN_IF_ERROR(spec.Validate());
  if (spec.mechanism != Mechanism::kFpa) {
    return absl::InvalidArgumentError("FPA with a non-FPA spec");
  }
  const int64_t rois = aggregate.cells.rows();
  const int64_t epochs = aggregate.cells.cols();
  const int64_t k = *spec.k;
  if (k > epochs) {
    return absl::OutOfRangeError(
        absl::StrCat("fpa k=", k, " exceeds the ", epochs, "-epoch window"));
  }
  const double eps = *spec.epsilon;
  const double scale = NoiseDisabled(spec)
                           ? 0.0
                           : std::sqrt(static_cast<double>(k * epochs)) / eps;

  NoisyRelease out;
  out.series.cells.resize(rois, epochs);
  out.series.user_count = aggregate.user_count;
  out.series.provenance = spec;
  std::vector<double> row(epochs);
  for (int64_t s = 0; s < rois; ++s) {
    for (int64_t t = 0; t < epochs; ++t) {
      row[t] = static_cast<double>(aggregate.cells(s, t));
    }
    Rng rng = Rng::ForStream(spec.seed, static_cast<uint64_t>(s));
    AGGLOC_ASSIGN_OR_RETURN(std::vector<double> released,
                            FourierKeepK(row, k, scale, &rng));
    for (int64_t t = 0; t < epochs; ++t) out.series.cells(s, t) = released[t];
  }
  out.account.per_slot_epsilon = eps;
  out.account.composed_epsilon = static_cast<double>(rois) * eps;
  out.account.composition_note = absl::StrFormat(
      "fpa k=%d, Lap(sqrt(k*|T'|)/eps) on real and imaginary parts of each "
      "kept coefficient: eps=%g per ROI series, O(|S|*eps) over %d ROIs",
      k, eps, rois);
  return out;
}

absl::StatusOr<NoisyRelease> RrPerturbAndEstimate(
    std::span<const GroundTruthMatrix> users, EpochRange window,
    const NoiseSpec& spec) {
  AGGLOC_RETURN_IF_ERROR(spec.Validate());
  if (spec.mechanism != Mechanism::kRr) {
    return absl::InvalidArgumentError("randomized response with a non-RR spec");
  }
  if (users.empty()) {
    return absl::InvalidArgumentError("randomized response needs users");
  }
  const int rois = users.front().roi_count();
  for (const GroundTruthMatrix& user : users) {
    if (user.roi_count() != rois || window.end > user.epoch_count() ||
        window.begin < 0 || window.empty()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "user ", user.user_id(), " does not cover the response window"));
    }
  }
  const double p = *spec.p;
  const double total = static_cast<double>(users.size());

  NoisyRelease out;
  out.series.cells.resize(rois, window.size());
  out.series.user_count = static_cast<int64_t>(users.size());
  out.series.provenance = spec;
  std::vector<int64_t> yes(window.size());
  for (int s = 0; s < rois; ++s) {
    Rng rng = Rng::ForStream(spec.seed, static_cast<uint64_t>(s));
    std::fill(yes.begin(), yes.end(), 0);
    for (const GroundTruthMatrix& user : users) {
      for (int64_t t = window.begin; t < window.end; ++t) {
        const bool forced = rng.Uniform01() < p;
        if (forced || user.cells()(s, t) != 0) ++yes[t - window.begin];
      }
    }
    for (int64_t j = 0; j < window.size(); ++j) {
      const double p_yes = static_cast<double>(yes[j]) / total;
      out.series.cells(s, j) = total * (p_yes - p) / (1.0 - p);
    }
  }
  const double slot_eps =
      std::log((static_cast<double>(rois) - (rois - 1) * p) / p);
  out.account.per_slot_epsilon = slot_eps;
  out.account.composed_epsilon = static_cast<double>(window.size()) * slot_eps;
  out.account.composition_note = absl::StrFormat(
      "rr p=%g: ln((|S|-(|S|-1)p)/p)=%g per epoch, O(|T'|*eps) over %d epochs",
      p, slot_eps, window.size());
  return out;
}

}  // namespace aggloc
