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

#ifndef EOOD_OBJECTIVES_H_
#define EOOD_OBJECTIVES_H_

#include <cstddef>
#include <span>

#include "eood/numeric.h"

namespace eood::model {

struct LossAndGrad {
  double loss = 0.0;
  numeric::Vector grad;  // d(loss)/d(logits)
};

// logsumexp(logits) - logits[target]; gradient softmax(logits) - onehot.
LossAndGrad cross_entropy(std::span<const double> logits, std::size_t target);

// Loss of a pair of energies plus its (sub)gradient with respect to each.
struct EnergyPairTerm {
  double loss = 0.0;
  double grad_ind = 0.0;
  double grad_ood = 0.0;
};

// max(0, m + e_ind - e_ood). A hinge exactly at zero has zero gradient.
EnergyPairTerm margin_term(double e_ind, double e_ood, double margin);
inline double margin_loss(double e_ind, double e_ood, double margin) {
  return margin_term(e_ind, e_ood, margin).loss;
}

// max(0, e_ind - m_ind)^2 + max(0, m_ood - e_ood)^2.
EnergyPairTerm bound_term(double e_ind, double e_ood, double m_ind, double m_ood);
inline double bound_loss(double e_ind, double e_ood, double m_ind, double m_ood) {
  return bound_term(e_ind, e_ood, m_ind, m_ood).loss;
}

// Negative Shannon entropy of softmax(logits), in [-ln K, 0].
double entropy_reg_loss(std::span<const double> logits);
// Gradient of entropy_reg_loss: p_j * (log p_j + H).
numeric::Vector entropy_reg_grad(std::span<const double> logits);

// d E(x; f) / d logits at temperature T, i.e. -softmax(logits / T).
numeric::Vector energy_grad(std::span<const double> logits, double temperature);

}  // namespace eood::model

#endif  // EOOD_OBJECTIVES_H_
