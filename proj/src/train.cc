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

#include "eood/train.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "eood/errors.h"
#include "eood/objectives.h"
#include "eood/scores.h"

namespace eood::model {

Objective parse_objective(std::string_view name) {
  if (name == "ce" || name == "cross_entropy") return Objective::kCrossEntropy;
  if (name == "n+1" || name == "nplus1") return Objective::kNPlusOne;
  if (name == "margin") return Objective::kMargin;
  if (name == "entropy") return Objective::kEntropy;
  if (name == "bound") return Objective::kBound;
  throw ConfigError("unknown objective '" + std::string(name) + "'");
}

std::string_view objective_name(Objective o) {
  switch (o) {
    case Objective::kCrossEntropy: return "ce";
    case Objective::kNPlusOne: return "nplus1";
    case Objective::kMargin: return "margin";
    case Objective::kEntropy: return "entropy";
    case Objective::kBound: return "bound";
  }
  return "?";
}

void validate(const TrainConfig& c) {
  if (!(c.temperature > 0.0)) throw ConfigError("temperature must be > 0");
  if (!std::isfinite(c.margin)) throw ConfigError("margin must be finite");
  if (!(c.entropy_weight > 0.0)) throw ConfigError("entropy_weight must be > 0");
  if (!(c.learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (c.batch_size < 2) throw ConfigError("batch_size must be >= 2");
  if (c.max_epochs == 0) throw ConfigError("max_epochs must be positive");
  if (c.patience == 0 || c.patience > c.max_epochs) {
    throw ConfigError("patience must lie in [1, max_epochs]");
  }
  if (c.hidden_dim == 0) throw ConfigError("hidden_dim must be positive");
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
}

namespace {

void require_ood(const data::EncodedSplit& train, const TrainConfig& config) {
  if (is_supervised(config.objective) && train.ood_size() == 0) {
    throw ConfigError("objective '" + std::string(objective_name(config.objective)) +
                      "' needs labeled OOD training samples, but none are available");
  }
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

void assign_partners(Batch& b, numeric::Rng& rng) {
  b.partner.clear();
  if (b.ind.empty()) return;
  std::uniform_int_distribution<std::size_t> pick(0, b.ind.size() - 1);
  for (std::size_t j = 0; j < b.ood.size(); ++j) b.partner.push_back(pick(rng));
}

}  // namespace

Batch sample_batch(const data::EncodedSplit& train, const TrainConfig& config,
                   numeric::Rng& rng) {
  require_ood(train, config);
  const std::size_t n_ind = train.ind_size(), n_ood = train.ood_size();
  Batch b;
  switch (config.objective) {
    case Objective::kCrossEntropy: {
      const auto all = iota(n_ind);
      std::sample(all.begin(), all.end(), std::back_inserter(b.ind),
                  std::min(config.batch_size, n_ind), rng);
      break;
    }
    case Objective::kNPlusOne: {
      const auto all = iota(n_ind + n_ood);
      std::vector<std::size_t> picked;
      std::sample(all.begin(), all.end(), std::back_inserter(picked),
                  std::min(config.batch_size, n_ind + n_ood), rng);
      for (std::size_t i : picked) {
        if (i < n_ind) {
          b.ind.push_back(i);
        } else {
          b.ood.push_back(i - n_ind);
        }
      }
      break;
    }
    case Objective::kMargin:
    case Objective::kEntropy:
    case Objective::kBound: {
      const std::size_t quota = ood_quota(config.batch_size);
      if (n_ood >= quota) {
        const auto all = iota(n_ood);
        std::sample(all.begin(), all.end(), std::back_inserter(b.ood), quota, rng);
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, n_ood - 1);
        for (std::size_t j = 0; j < quota; ++j) b.ood.push_back(pick(rng));
      }
      const auto all = iota(n_ind);
      std::sample(all.begin(), all.end(), std::back_inserter(b.ind),
                  std::min(config.batch_size - quota, n_ind), rng);
      assign_partners(b, rng);
      break;
    }
  }
  return b;
}

BatchSampler::BatchSampler(const data::EncodedSplit& train, const TrainConfig& config)
    : train_(train), config_(config) {
  require_ood(train, config);
}

std::size_t BatchSampler::draw_ood(numeric::Rng& rng) {
  if (ood_cursor_ == ood_stream_.size()) {
    ood_stream_ = iota(train_.ood_size());
    std::shuffle(ood_stream_.begin(), ood_stream_.end(), rng);
    ood_cursor_ = 0;
  }
  return ood_stream_[ood_cursor_++];
}

std::vector<Batch> BatchSampler::next_epoch(numeric::Rng& rng) {
  std::vector<Batch> batches;
  const std::size_t n_ind = train_.ind_size();
  const std::size_t bs = config_.batch_size;

  if (config_.objective == Objective::kNPlusOne) {
    auto order = iota(n_ind + train_.ood_size());
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t s = 0; s < order.size(); s += bs) {
      Batch b;
      for (std::size_t i = s; i < std::min(s + bs, order.size()); ++i) {
        if (order[i] < n_ind) {
          b.ind.push_back(order[i]);
        } else {
          b.ood.push_back(order[i] - n_ind);
        }
      }
      batches.push_back(std::move(b));
    }
    return batches;
  }

  const bool with_ood = uses_ood_energy_terms(config_.objective);
  const std::size_t quota = with_ood ? ood_quota(bs) : 0;
  const std::size_t ind_per_batch = bs - quota;
  auto order = iota(n_ind);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t s = 0; s < n_ind; s += ind_per_batch) {
    Batch b;
    b.ind.assign(order.begin() + s, order.begin() + std::min(s + ind_per_batch, n_ind));
    for (std::size_t j = 0; j < quota; ++j) b.ood.push_back(draw_ood(rng));
    if (with_ood) assign_partners(b, rng);
    batches.push_back(std::move(b));
  }
  return batches;
}

ObjectiveValue objective_gradient(const ClassifierModel& model,
                                  const data::EncodedSplit& train, const Batch& batch,
                                  const TrainConfig& config, numeric::Rng* dropout_rng,
                                  std::span<double> grad) {
  if (grad.size() != model.parameter_count()) {
    throw ArgumentError("objective_gradient: gradient buffer has wrong size");
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  const std::size_t n_ind = batch.ind.size(), n_ood = batch.ood.size();
  const std::size_t k = model.num_classes();
  const bool training = dropout_rng != nullptr;
  const Objective obj = config.objective;

  // Items 0..n_ind-1 are IND rows, n_ind.. are OOD rows.
  std::vector<ForwardCache> caches(n_ind + n_ood);
  std::vector<numeric::Vector> grad_logits(n_ind + n_ood, numeric::Vector(k, 0.0));
  auto row_of = [&](std::size_t item) {
    return item < n_ind ? train.ind_features.row(batch.ind[item])
                        : train.ood_features.row(batch.ood[item - n_ind]);
  };
  for (std::size_t item = 0; item < caches.size(); ++item) {
    forward(model, row_of(item), training, dropout_rng, caches[item]);
  }

  ObjectiveValue value;
  const std::size_t ce_count = obj == Objective::kNPlusOne ? n_ind + n_ood : n_ind;
  auto add_ce = [&](std::size_t item, std::size_t target) {
    const LossAndGrad ce = cross_entropy(caches[item].logits, target);
    value.cross_entropy += ce.loss / static_cast<double>(ce_count);
    for (std::size_t c = 0; c < k; ++c) {
      grad_logits[item][c] += ce.grad[c] / static_cast<double>(ce_count);
    }
  };
  for (std::size_t i = 0; i < n_ind; ++i) {
    add_ce(i, static_cast<std::size_t>(train.ind_labels[batch.ind[i]]));
  }
  if (obj == Objective::kNPlusOne) {
    if (k < 2) throw ArgumentError("N+1 model needs an OOD output class");
    for (std::size_t j = 0; j < n_ood; ++j) add_ce(n_ind + j, k - 1);
  }

  auto add_energy_grad = [&](std::size_t item, double weight) {
    if (weight == 0.0) return;
    const numeric::Vector g = energy_grad(caches[item].logits, config.temperature);
    for (std::size_t c = 0; c < k; ++c) grad_logits[item][c] += weight * g[c];
  };
  auto energy_of = [&](std::size_t item) {
    return detect::energy_score(caches[item].logits, config.temperature);
  };

  switch (obj) {
    case Objective::kMargin: {
      if (batch.partner.size() != n_ood) {
        throw ArgumentError("objective_gradient: margin batch lacks IND partners");
      }
      const double scale = n_ood > 0 ? 1.0 / static_cast<double>(n_ood) : 0.0;
      for (std::size_t j = 0; j < n_ood; ++j) {
        const std::size_t ind_item = batch.partner[j], ood_item = n_ind + j;
        const EnergyPairTerm t = margin_term(energy_of(ind_item), energy_of(ood_item),
                                             config.margin);
        value.auxiliary += scale * t.loss;
        add_energy_grad(ind_item, scale * t.grad_ind);
        add_energy_grad(ood_item, scale * t.grad_ood);
      }
      break;
    }
    case Objective::kEntropy: {
      const double scale =
          n_ood > 0 ? config.entropy_weight / static_cast<double>(n_ood) : 0.0;
      for (std::size_t j = 0; j < n_ood; ++j) {
        const std::size_t item = n_ind + j;
        value.auxiliary += scale * entropy_reg_loss(caches[item].logits);
        const numeric::Vector g = entropy_reg_grad(caches[item].logits);
        for (std::size_t c = 0; c < k; ++c) grad_logits[item][c] += scale * g[c];
      }
      break;
    }
    case Objective::kBound: {
      const double ind_scale = n_ind > 0 ? 1.0 / static_cast<double>(n_ind) : 0.0;
      const double ood_scale = n_ood > 0 ? 1.0 / static_cast<double>(n_ood) : 0.0;
      for (std::size_t i = 0; i < n_ind; ++i) {
        // Passing e_ood = m_ood leaves only the IND hinge active.
        const EnergyPairTerm t = bound_term(energy_of(i), config.m_ood, config.m_ind,
                                            config.m_ood);
        value.auxiliary += ind_scale * t.loss;
        add_energy_grad(i, ind_scale * t.grad_ind);
      }
      for (std::size_t j = 0; j < n_ood; ++j) {
        const EnergyPairTerm t = bound_term(config.m_ind, energy_of(n_ind + j), config.m_ind,
                                            config.m_ood);
        value.auxiliary += ood_scale * t.loss;
        add_energy_grad(n_ind + j, ood_scale * t.grad_ood);
      }
      break;
    }
    case Objective::kCrossEntropy:
    case Objective::kNPlusOne:
      break;
  }
  value.total = value.cross_entropy + value.auxiliary;

  for (std::size_t item = 0; item < caches.size(); ++item) {
    const auto& gl = grad_logits[item];
    if (std::all_of(gl.begin(), gl.end(), [](double g) { return g == 0.0; })) continue;
    backward(model, row_of(item), caches[item], gl, grad);
  }
  return value;
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double learning_rate) {
  if (params.size() != grads.size()) throw ArgumentError("adam_step: shape mismatch");
  if (state.first_moment.empty() && state.second_moment.empty()) {
    state.first_moment.assign(params.size(), 0.0);
    state.second_moment.assign(params.size(), 0.0);
  }
  if (state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw ArgumentError("adam_step: optimizer state does not match parameters");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(kAdamBeta1, t);
  const double c2 = 1.0 - std::pow(kAdamBeta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * grads[i];
    v = kAdamBeta2 * v + (1.0 - kAdamBeta2) * grads[i] * grads[i];
    params[i] -= learning_rate * (m / c1) / (std::sqrt(v / c2) + kAdamEpsilon);
  }
}

TrainResult train(const data::EncodedDataset& dataset, const TrainConfig& config,
                  const SelectionMetric& select) {
  validate(config);
  require_ood(dataset.train, config);
  if (dataset.train.ind_size() == 0) throw ConfigError("no IND training samples");

  const std::size_t k = dataset.num_intents();
  const bool n_plus_one = config.objective == Objective::kNPlusOne;
  ClassifierModel model(dataset.feature_dim, config.hidden_dim, k + (n_plus_one ? 1 : 0),
                        config.dropout);
  std::vector<std::string> names = dataset.intent_names;
  if (n_plus_one) names.emplace_back(data::kOodMarker);
  model.set_class_names(std::move(names));
  model.initialize(config.seed);

  auto batch_rng = numeric::make_stream(config.seed, "batches");
  auto dropout_rng = numeric::make_stream(config.seed, "dropout");
  BatchSampler sampler(dataset.train, config);
  std::vector<double> grad(model.parameter_count());
  AdamState adam;

  TrainResult result;
  std::vector<double> best_params(model.parameters().begin(), model.parameters().end());
  double best = -std::numeric_limits<double>::infinity();
  TrainReport& report = result.report;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto batches = sampler.next_epoch(batch_rng);
    double sum = 0.0;
    for (const Batch& b : batches) {
      const ObjectiveValue v =
          objective_gradient(model, dataset.train, b, config, &dropout_rng, grad);
      if (!std::isfinite(v.total)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) +
                            " under objective '" +
                            std::string(objective_name(config.objective)) + "'");
      }
      adam_step(model.parameters(), grad, adam, config.learning_rate);
      sum += v.total;
    }
    const auto params = model.parameters();
    if (!std::all_of(params.begin(), params.end(), [](double p) { return std::isfinite(p); })) {
      throw TrainingError("non-finite parameters at epoch " + std::to_string(epoch) +
                          " under objective '" +
                          std::string(objective_name(config.objective)) + "'");
    }
    report.epoch_losses.push_back(sum / static_cast<double>(batches.size()));
    const double metric = select ? select(model) : -report.epoch_losses.back();
    report.validation_metric.push_back(metric);
    report.epochs_run = epoch;
    if (metric > best) {
      best = metric;
      report.best_epoch = epoch;
      best_params.assign(params.begin(), params.end());
    } else if (epoch - report.best_epoch >= config.patience) {
      break;
    }
  }
  report.best_metric = best;
  std::copy(best_params.begin(), best_params.end(), model.parameters().begin());
  result.model = std::move(model);
  return result;
}

}  // namespace eood::model
