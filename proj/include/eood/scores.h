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

#ifndef EOOD_SCORES_H_
#define EOOD_SCORES_H_

#include <span>

namespace eood::detect {

// E(x; f) = -T * log sum_i exp(f_i(x) / T). Lower energy means the sample
// looks more in-domain.
double energy_score(std::span<const double> logits, double temperature);

// Negated energy, so that higher means more in-domain like every other
// confidence in this library.
inline double energy_confidence(std::span<const double> logits, double temperature) {
  return -energy_score(logits, temperature);
}

// Maximum softmax probability, in (0, 1].
double msp_score(std::span<const double> logits);

}  // namespace eood::detect

#endif  // EOOD_SCORES_H_
