// Copyright 2026 The eood Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <limits>
#include <string>

#include "eood/detect.h"
#include "eood/errors.h"

namespace eood::detect {

GdaModel fit_gda(const numeric::Matrix& features, std::span<const data::ClassLabel> labels,
                 std::size_t num_classes, std::optional<double> ridge) {
  const std::size_t n = features.rows(), d = features.cols();
  if (labels.size() != n) throw ArgumentError("fit_gda: features and labels differ in length");
  if (num_classes == 0 || d == 0) throw ArgumentError("fit_gda: empty problem");

  std::vector<std::size_t> counts(num_classes, 0);
  numeric::Matrix centroids(num_classes, d);
  for (std::size_t i = 0; i < n; ++i) {
    const data::ClassLabel c = labels[i];
    if (c < 0 || static_cast<std::size_t>(c) >= num_classes) {
      throw ArgumentError("fit_gda: label " + std::to_string(c) + " out of range");
    }
    ++counts[c];
    auto mu = centroids.row(c);
    const auto x = features.row(i);
    for (std::size_t j = 0; j < d; ++j) mu[j] += x[j];
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (counts[c] < 2) {
      throw FitError("fit_gda: class " + std::to_string(c) + " has " +
                     std::to_string(counts[c]) + " samples, need at least 2");
    }
    for (double& v : centroids.row(c)) v /= static_cast<double>(counts[c]);
  }

  numeric::Matrix cov(d, d);
  std::vector<double> diff(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = features.row(i);
    const auto mu = centroids.row(labels[i]);
    for (std::size_t j = 0; j < d; ++j) diff[j] = x[j] - mu[j];
    for (std::size_t a = 0; a < d; ++a) {
      const double da = diff[a];
      if (da == 0.0) continue;
      auto row = cov.row(a);
      for (std::size_t b = 0; b <= a; ++b) row[b] += da * diff[b];
    }
  }
  double trace = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      cov(a, b) /= static_cast<double>(n);
      cov(b, a) = cov(a, b);
    }
    trace += cov(a, a);
  }

  double r = ridge.value_or(1e-6 * trace / static_cast<double>(d));
  if (!ridge && r == 0.0) r = 1e-6;
  try {
    return make_gda(std::move(centroids), numeric::spd_factor(cov, r));
  } catch (const NumericError& e) {
    throw FitError(std::string("fit_gda: ") + e.what());
  }
}

GdaModel make_gda(numeric::Matrix centroids, numeric::SpdFactor covariance) {
  if (centroids.cols() != covariance.dim()) {
    throw ArgumentError("make_gda: centroid and covariance dimensions differ");
  }
  GdaModel m;
  m.whitened_centroids = numeric::Matrix(0, centroids.cols());
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    m.whitened_centroids.append_row(covariance.whiten(centroids.row(c)));
  }
  m.centroids = std::move(centroids);
  m.covariance = std::move(covariance);
  return m;
}

double gda_confidence(const GdaModel& m, std::span<const double> x) {
  if (x.size() != m.dim()) {
    throw ArgumentError("gda_confidence: feature has " + std::to_string(x.size()) +
                        " entries, model expects " + std::to_string(m.dim()));
  }
  const numeric::Vector z = m.covariance.whiten(x);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < m.num_classes(); ++c) {
    best = std::min(best, numeric::squared_distance(z, m.whitened_centroids.row(c)));
  }
  return -best;
}

}  // namespace eood::detect
