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

#ifndef AGGLOC_TESTS_ORACLES_H_
#define AGGLOC_TESTS_ORACLES_H_

// Slow, direct reimplementations used as test oracles. They share no code
// with the library beyond plain matrix types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "aggloc/mobility_model.h"

namespace aggloc::testing {

// Users ranked by reports (descending), then id (ascending).
inline std::vector<int> OracleOrder(const std::vector<std::string>& ids,
                                    const std::vector<int64_t>& reports) {
  std::vector<std::tuple<int64_t, std::string, int>> keyed;
  for (size_t u = 0; u < ids.size(); ++u) {
    keyed.emplace_back(-reports[u], ids[u], static_cast<int>(u));
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<int> order;
  for (const auto& k : keyed) order.push_back(std::get<2>(k));
  return order;
}

// Per cell: fully sort users by (prior desc, reports desc, id asc) and mark
// the first min(a, |U|).
inline std::vector<RealMatrix> OracleMaxRoi(
    const std::vector<RealMatrix>& priors, const CountMatrix& aggregate,
    const std::vector<std::string>& ids, const std::vector<int64_t>& reports) {
  const int n = static_cast<int>(priors.size());
  std::vector<RealMatrix> out(
      n, RealMatrix::Zero(aggregate.rows(), aggregate.cols()));
  for (Eigen::Index t = 0; t < aggregate.cols(); ++t) {
    for (Eigen::Index s = 0; s < aggregate.rows(); ++s) {
      std::vector<std::tuple<double, int64_t, std::string, int>> keyed;
      for (int u = 0; u < n; ++u) {
        keyed.emplace_back(-priors[u](s, t), -reports[u], ids[u], u);
      }
      std::sort(keyed.begin(), keyed.end());
      const int64_t take = std::min<int64_t>(aggregate(s, t), n);
      for (int64_t k = 0; k < take; ++k) out[std::get<3>(keyed[k])](s, t) = 1;
    }
  }
  return out;
}

// Literal transcription of the max-user loop: users in order, every ROI with
// positive prior whose running total is below the aggregate, and the break
// once the assignment total matches the column total.
inline std::vector<RealMatrix> OracleMaxUser(
    const std::vector<RealMatrix>& priors, const CountMatrix& aggregate,
    const std::vector<std::string>& ids, const std::vector<int64_t>& reports) {
  const int n = static_cast<int>(priors.size());
  std::vector<RealMatrix> loc(
      n, RealMatrix::Zero(aggregate.rows(), aggregate.cols()));
  const std::vector<int> order = OracleOrder(ids, reports);
  for (Eigen::Index t = 0; t < aggregate.cols(); ++t) {
    for (int u : order) {
      for (Eigen::Index i = 0; i < aggregate.rows(); ++i) {
        if (!(priors[u](i, t) > 0.0)) continue;
        double used = 0;
        for (int v = 0; v < n; ++v) used += loc[v](i, t);
        if (used < static_cast<double>(aggregate(i, t))) loc[u](i, t) = 1;
      }
      double total = 0;
      for (int w = 0; w < n; ++w) total += loc[w].col(t).sum();
      if (total == static_cast<double>(aggregate.col(t).sum())) break;
    }
  }
  return loc;
}

struct OracleConfusion {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t fn = 0;
};

inline OracleConfusion OracleCount(const BinaryMatrix& truth,
                                   const RealMatrix& estimate) {
  OracleConfusion c;
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    for (Eigen::Index j = 0; j < truth.cols(); ++j) {
      const bool actual = truth(i, j) == 1;
      const bool predicted = estimate(i, j) == 1.0;
      if (actual && predicted) ++c.tp;
      if (!actual && predicted) ++c.fp;
      if (actual && !predicted) ++c.fn;
    }
  }
  return c;
}

// Precision/recall form of F1 with the degenerate cases resolved as
// documented: nothing to find and nothing predicted is perfect, otherwise
// zero true positives is zero.
inline double OracleF1(const OracleConfusion& c) {
  if (c.tp == 0) return (c.fp == 0 && c.fn == 0) ? 1.0 : 0.0;
  const double precision = static_cast<double>(c.tp) / (c.tp + c.fp);
  const double recall = static_cast<double>(c.tp) / (c.tp + c.fn);
  return 2.0 * precision * recall / (precision + recall);
}

// Jensen-Shannon distance in bits, straight from the definition.
inline double OracleJsDistance(const std::vector<double>& w,
                               const std::vector<double>& x) {
  double js = 0.0;
  for (size_t i = 0; i < w.size(); ++i) {
    const double z = 0.5 * (w[i] + x[i]);
    if (w[i] > 0) js += 0.5 * w[i] * std::log2(w[i] / z);
    if (x[i] > 0) js += 0.5 * x[i] * std::log2(x[i] / z);
  }
  return std::sqrt(std::max(0.0, js));
}

// O(n^2) DFT low-pass: keeps frequencies f with min(f, n - f) < k_half,
// where k_half = min(k, n / 2 + 1), then inverts.
inline std::vector<double> OracleKeepK(const std::vector<double>& x,
                                       int64_t k) {
  const int64_t n = static_cast<int64_t>(x.size());
  const int64_t half = std::min<int64_t>(k, n / 2 + 1);
  std::vector<std::complex<double>> spectrum(n);
  for (int64_t f = 0; f < n; ++f) {
    for (int64_t t = 0; t < n; ++t) {
      const double angle = -2.0 * std::numbers::pi * f * t / n;
      spectrum[f] += x[t] * std::polar(1.0, angle);
    }
    if (std::min(f, n - f) >= half) spectrum[f] = 0.0;
  }
  std::vector<double> out(n);
  for (int64_t t = 0; t < n; ++t) {
    std::complex<double> acc = 0.0;
    for (int64_t f = 0; f < n; ++f) {
      acc += spectrum[f] * std::polar(1.0, 2.0 * std::numbers::pi * f * t / n);
    }
    out[t] = acc.real() / n;
  }
  return out;
}

}  // namespace aggloc::testing

#endif  // AGGLOC_TESTS_ORACLES_H_
