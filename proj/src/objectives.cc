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

#include "eood/objectives.h"

#include <cmath>
#include <string>

#include "eood/errors.h"

namespace eood::model {

LossAndGrad cross_entropy(std::span<const double> logits, std::size_t target) {
  if (target >= logits.size()) {
    throw ArgumentError("cross_entropy: target " + std::to_string(target) +
                        " out of range for " + std::to_string(logits.size()) + " logits");
  }
  LossAndGrad out;
  out.loss = numeric::logsumexp(logits) - logits[target];
  out.grad = numeric::softmax(logits);
  out.grad[target] -= 1.0;
  return out;
}

EnergyPairTerm margin_term(double e_ind, double e_ood, double margin) {
  const double h = margin + e_ind - e_ood;
  if (h > 0.0) return {h, 1.0, -1.0};
  return {};
}

EnergyPairTerm bound_term(double e_ind, double e_ood, double m_ind, double m_ood) {
  EnergyPairTerm t;
  const double over = e_ind - m_ind;
  if (over > 0.0) {
    t.loss += over * over;
    t.grad_ind = 2.0 * over;
  }
  const double under = m_ood - e_ood;
  if (under > 0.0) {
    t.loss += under * under;
    t.grad_ood = -2.0 * under;
  }
  return t;
}

double entropy_reg_loss(std::span<const double> logits) {
  if (logits.empty()) throw ArgumentError("entropy_reg_loss: empty logits");
  const double lse = numeric::logsumexp(logits);
  double neg_h = 0.0;
  for (double l : logits) {
    const double log_p = l - lse;
    neg_h += std::exp(log_p) * log_p;
  }
  return neg_h;
}

numeric::Vector entropy_reg_grad(std::span<const double> logits) {
  if (logits.empty()) throw ArgumentError("entropy_reg_grad: empty logits");
  const double lse = numeric::logsumexp(logits);
  const double h = -entropy_reg_loss(logits);
  numeric::Vector g(logits.size());
  for (std::size_t j = 0; j < logits.size(); ++j) {
    const double log_p = logits[j] - lse;
    g[j] = std::exp(log_p) * (log_p + h);
  }
  return g;
}

numeric::Vector energy_grad(std::span<const double> logits, double temperature) {
  if (!(temperature > 0.0)) throw ArgumentError("energy_grad: temperature must be > 0");
  numeric::Vector scaled(logits.begin(), logits.end());
  for (double& v : scaled) v /= temperature;
  numeric::Vector g = numeric::softmax(scaled);
  for (double& v : g) v = -v;
  return g;
}

}  // namespace eood::model
