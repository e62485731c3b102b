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

#ifndef EOOD_TRAIN_H_
#define EOOD_TRAIN_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "eood/data.h"
#include "eood/model.h"
#include "eood/numeric.h"

namespace eood::model {

enum class Objective { kCrossEntropy, kNPlusOne, kMargin, kEntropy, kBound };

Objective parse_objective(std::string_view name);
std::string_view objective_name(Objective o);

// Margin, Entropy and Bound consume labeled OOD training samples.
inline bool uses_ood_energy_terms(Objective o) {
  return o == Objective::kMargin || o == Objective::kEntropy || o == Objective::kBound;
}
inline bool is_supervised(Objective o) {
  return uses_ood_energy_terms(o) || o == Objective::kNPlusOne;
}

struct TrainConfig {
  Objective objective = Objective::kCrossEntropy;
  double temperature = 0.8;
  double margin = 19.0;
  double m_ind = -25.0;
  double m_ood = -7.0;
  double entropy_weight = 1.0;
  double learning_rate = 1e-3;
  std::size_t batch_size = 128;
  std::size_t max_epochs = 200;
  std::size_t patience = 15;
  std::size_t hidden_dim = 128;
  double dropout = 0.5;
  std::uint64_t seed = 0;
};

// Throws ConfigError for out-of-range fields.
void validate(const TrainConfig& config);

// Minimum number of OOD samples in a batch for the energy objectives.
inline std::size_t ood_quota(std::size_t batch_size) { return (batch_size + 7) / 8; }

// Row indices into an EncodedSplit. For N+1 the OOD rows are trained as
// class K; for the energy objectives `partner[j]` is the position in `ind`
// paired with `ood[j]` in the margin hinge.
struct Batch {
  std::vector<std::size_t> ind;
  std::vector<std::size_t> ood;
  std::vector<std::size_t> partner;
};

// Draws one random batch. Throws ConfigError when a supervised objective has
// no OOD training samples.
Batch sample_batch(const data::EncodedSplit& train, const TrainConfig& config,
                   numeric::Rng& rng);

// Yields batches covering every IND training row once per epoch.
class BatchSampler {
 public:
  BatchSampler(const data::EncodedSplit& train, const TrainConfig& config);

  std::vector<Batch> next_epoch(numeric::Rng& rng);

 private:
  std::size_t draw_ood(numeric::Rng& rng);

  const data::EncodedSplit& train_;
  TrainConfig config_;
  std::vector<std::size_t> ood_stream_;
  std::size_t ood_cursor_ = 0;
};

struct ObjectiveValue {
  double total = 0.0;
  double cross_entropy = 0.0;
  double auxiliary = 0.0;  // margin / entropy / bound term
};

// Loss of `batch` under config.objective and its gradient with respect to
// every model parameter, written to `grad` (overwritten). With
// `dropout_rng == nullptr` the forward pass runs in inference mode.
ObjectiveValue objective_gradient(const ClassifierModel& model,
                                  const data::EncodedSplit& train, const Batch& batch,
                                  const TrainConfig& config, numeric::Rng* dropout_rng,
                                  std::span<double> grad);

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step = 0;
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

// Bias-corrected Adam. An empty state is sized on first use.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double learning_rate);

struct TrainReport {
  std::vector<double> epoch_losses;
  std::vector<double> validation_metric;
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;  // 1-based
  double best_metric = 0.0;
};

// Scores a model on held-out data; larger is better. Training keeps the
// parameters from the epoch with the best value.
using SelectionMetric = std::function<double(const ClassifierModel&)>;

struct TrainResult {
  ClassifierModel model;
  TrainReport report;
};

// Adam on config.objective with early stopping after `patience` epochs
// without improvement of `select`. Throws TrainingError on a non-finite loss.
TrainResult train(const data::EncodedDataset& dataset, const TrainConfig& config,
                  const SelectionMetric& select);

}  // namespace eood::model

#endif  // EOOD_TRAIN_H_
