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

#include "eood/scores.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eood/errors.h"

namespace eood::detect {

double energy_score(std::span<const double> logits, double temperature) {
  if (logits.empty()) throw ArgumentError("energy_score: empty logits");
  if (!(temperature > 0.0)) throw ArgumentError("energy_score: temperature must be > 0");
  // -T * logsumexp(l / T) with the max shifted out: -(max + T * log sum exp((l - max) / T)).
  const double hi = *std::max_element(logits.begin(), logits.end());
  if (!std::isfinite(hi)) return -hi;
  const double inv_t = 1.0 / temperature;
  double s = 0.0;
  for (double v : logits) s += std::exp((v - hi) * inv_t);
  return -(hi + temperature * std::log(s));
}

double msp_score(std::span<const double> logits) {
  if (logits.empty()) throw ArgumentError("msp_score: empty logits");
  const double hi = *std::max_element(logits.begin(), logits.end());
  if (!std::isfinite(hi)) return hi == -std::numeric_limits<double>::infinity() ? 0.0 : 1.0;
  double s = 0.0;
  for (double v : logits) s += std::exp(v - hi);
  return 1.0 / s;
}

}  // namespace eood::detect
