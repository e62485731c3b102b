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

#include "eood/numeric.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "eood/errors.h"

namespace eood::numeric {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) {
    throw ArgumentError("append_row: expected " + std::to_string(cols_) +
                        " columns, got " + std::to_string(values.size()));
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ArgumentError("squared_distance: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double logsumexp(std::span<const double> v) {
  if (v.empty()) throw ArgumentError("logsumexp: empty vector");
  const double hi = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

Vector softmax(std::span<const double> v) {
  if (v.empty()) throw ArgumentError("softmax: empty vector");
  const double hi = *std::max_element(v.begin(), v.end());
  Vector out(v.size());
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - hi);
    s += out[i];
  }
  for (double& x : out) x /= s;
  return out;
}

SpdFactor spd_factor(const Matrix& m, double ridge) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw NumericError("spd_factor: matrix must be square and non-empty");
  }
  if (!(ridge >= 0.0)) throw NumericError("spd_factor: ridge must be >= 0");
  const std::size_t n = m.rows();
  double scale = 0.0;
  for (double x : m.data()) scale = std::max(scale, std::abs(x));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-10 * std::max(scale, 1.0)) {
        throw NumericError("spd_factor: matrix is not symmetric");
      }
    }
  }

  SpdFactor f;
  f.ridge_ = ridge;
  f.lower_ = Matrix(n, n);
  Matrix& l = f.lower_;
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j) + ridge;
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw NumericError("spd_factor: matrix is not positive definite (pivot " +
                         std::to_string(j) + ")");
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return f;
}

SpdFactor SpdFactor::from_lower(Matrix lower, double ridge) {
  if (lower.rows() != lower.cols()) {
    throw NumericError("SpdFactor: stored factor is not square");
  }
  for (std::size_t i = 0; i < lower.rows(); ++i) {
    if (!(lower(i, i) > 0.0)) {
      throw NumericError("SpdFactor: stored factor has a non-positive pivot");
    }
  }
  SpdFactor f;
  f.lower_ = std::move(lower);
  f.ridge_ = ridge;
  return f;
}

Vector SpdFactor::whiten(std::span<const double> v) const {
  const std::size_t n = dim();
  if (v.size() != n) throw ArgumentError("SpdFactor: dimension mismatch");
  Vector y(v.begin(), v.end());
  for (std::size_t i = 0; i < n; ++i) {
    const auto li = lower_.row(i);
    double s = y[i];
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * y[k];
    y[i] = s / li[i];
  }
  return y;
}

Vector SpdFactor::solve(std::span<const double> b) const {
  Vector y = whiten(b);
  const std::size_t n = dim();
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= lower_(k, ii) * y[k];
    y[ii] = s / lower_(ii, ii);
  }
  return y;
}

Matrix SpdFactor::reconstruct() const {
  const std::size_t n = dim();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k <= j; ++k) s += lower_(i, k) * lower_(j, k);
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

double mahalanobis_sq(std::span<const double> x, std::span<const double> mu,
                      const SpdFactor& f) {
  if (x.size() != mu.size() || x.size() != f.dim()) {
    throw ArgumentError("mahalanobis_sq: dimension mismatch");
  }
  Vector diff(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - mu[i];
  const Vector z = f.whiten(diff);
  return dot(z, z);
}

Rng make_stream(std::uint64_t seed, std::string_view name) {
  // FNV-1a keeps the name hash stable across platforms and runs.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return Rng(seq);
}

}  // namespace eood::numeric
