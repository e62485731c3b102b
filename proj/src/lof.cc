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
#include <cmath>
#include <string>
#include <utility>

#include "eood/detect.h"
#include "eood/errors.h"

namespace eood::detect {
namespace {

// Added to the mean reachability distance so that exact duplicates give a
// large finite density instead of a division by zero.
constexpr double kDensityFloor = 1e-10;

using Neighbor = std::pair<double, std::size_t>;  // (distance, index)

// The k nearest stored rows to x, closest first, skipping `exclude`.
std::vector<Neighbor> nearest(const numeric::Matrix& store, std::span<const double> x,
                              std::size_t k, std::size_t exclude) {
  std::vector<Neighbor> all;
  all.reserve(store.rows());
  for (std::size_t i = 0; i < store.rows(); ++i) {
    if (i == exclude) continue;
    all.emplace_back(numeric::squared_distance(x, store.row(i)), i);
  }
  std::nth_element(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k - 1), all.end());
  all.resize(k);
  std::sort(all.begin(), all.end());
  for (auto& nb : all) nb.first = std::sqrt(nb.first);
  return all;
}

double density(const std::vector<Neighbor>& neighbors, std::span<const double> k_distance) {
  double reach = 0.0;
  for (const auto& [dist, idx] : neighbors) reach += std::max(k_distance[idx], dist);
  return 1.0 / (reach / static_cast<double>(neighbors.size()) + kDensityFloor);
}

}  // namespace

LofModel fit_lof(numeric::Matrix features, std::size_t k) {
  const std::size_t n = features.rows();
  if (k == 0 || k >= n) {
    throw FitError("fit_lof: k = " + std::to_string(k) + " must lie in [1, " +
                   std::to_string(n) + ")");
  }
  LofModel m;
  m.k_ = k;
  std::vector<std::vector<Neighbor>> neighbors(n);
  m.k_distance_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    neighbors[i] = nearest(features, features.row(i), k, i);
    m.k_distance_[i] = neighbors[i].back().first;
  }
  m.lrd_.resize(n);
  for (std::size_t i = 0; i < n; ++i) m.lrd_[i] = density(neighbors[i], m.k_distance_);
  m.store_ = std::move(features);
  return m;
}

double lof_score(const LofModel& m, std::span<const double> x) {
  if (x.size() != m.store().cols()) throw ArgumentError("lof_score: dimension mismatch");
  const auto neighbors = nearest(m.store(), x, m.k(), m.store().rows());
  const double own = density(neighbors, m.k_distances());
  double sum = 0.0;
  for (const auto& nb : neighbors) sum += m.local_reachability()[nb.second];
  return sum / static_cast<double>(neighbors.size()) / own;
}

double training_lof(const LofModel& m, std::size_t i) {
  if (i >= m.store().rows()) throw ArgumentError("training_lof: row out of range");
  const auto neighbors = nearest(m.store(), m.store().row(i), m.k(), i);
  double sum = 0.0;
  for (const auto& nb : neighbors) sum += m.local_reachability()[nb.second];
  return sum / static_cast<double>(neighbors.size()) / m.local_reachability()[i];
}

}  // namespace eood::detect
