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

#ifndef EOOD_NUMERIC_H_
#define EOOD_NUMERIC_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace eood::numeric {

using Vector = std::vector<double>;
using Rng = std::mt19937_64;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  // Appends a row; the first appended row fixes the column count of an
  // empty matrix.
  void append_row(std::span<const double> values);

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

// log(sum(exp(v))) with the max-shift; throws ArgumentError on empty input.
double logsumexp(std::span<const double> v);

Vector softmax(std::span<const double> v);

// Lower-triangular Cholesky factor L of (m + ridge * I), so that
// m + ridge * I = L * L^T.
class SpdFactor {
 public:
  SpdFactor() = default;

  // Rebuilds a factor from a stored lower triangle (checkpoint loading).
  static SpdFactor from_lower(Matrix lower, double ridge);

  std::size_t dim() const { return lower_.rows(); }
  double ridge() const { return ridge_; }
  const Matrix& lower() const { return lower_; }

  // Solves (m + ridge I) x = b.
  Vector solve(std::span<const double> b) const;
  // Returns L^{-1} v; squared norm of the result is v^T (m + ridge I)^{-1} v.
  Vector whiten(std::span<const double> v) const;
  // L * L^T.
  Matrix reconstruct() const;

 private:
  friend SpdFactor spd_factor(const Matrix& m, double ridge);
  Matrix lower_;
  double ridge_ = 0.0;
};

// Throws NumericError for non-square, asymmetric (beyond 1e-10 relative to
// the largest entry) or indefinite-after-ridge input.
SpdFactor spd_factor(const Matrix& m, double ridge);

double mahalanobis_sq(std::span<const double> x, std::span<const double> mu,
                      const SpdFactor& f);

// Independent generator for a named purpose ("dropout", "shuffle", ...)
// derived from one run seed. The same (seed, name) always yields the same
// stream.
Rng make_stream(std::uint64_t seed, std::string_view name);

}  // namespace eood::numeric

#endif  // EOOD_NUMERIC_H_
