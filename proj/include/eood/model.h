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

#ifndef EOOD_MODEL_H_
#define EOOD_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "eood/numeric.h"

namespace eood::model {

// Two affine layers with a rectifier between them:
//   hidden = relu(W1 x + b1), logits = W2 dropout(hidden) + b2.
// Parameters live in one flat buffer laid out as [W1 | b1 | W2 | b2] with
// row-major weight matrices, which is what the optimizer and the checkpoint
// format operate on.
class ClassifierModel {
 public:
  ClassifierModel() = default;
  ClassifierModel(std::size_t input_dim, std::size_t hidden_dim, std::size_t num_classes,
                  double dropout_rate = 0.5);

  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
  void initialize(std::uint64_t seed);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t hidden_dim() const { return hidden_dim_; }
  std::size_t num_classes() const { return num_classes_; }
  double dropout_rate() const { return dropout_rate_; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::size_t parameter_count() const { return params_.size(); }

  std::span<double> w1() { return {params_.data(), hidden_dim_ * input_dim_}; }
  std::span<double> b1() { return {params_.data() + b1_offset(), hidden_dim_}; }
  std::span<double> w2() { return {params_.data() + w2_offset(), num_classes_ * hidden_dim_}; }
  std::span<double> b2() { return {params_.data() + b2_offset(), num_classes_}; }
  std::span<const double> w1() const { return {params_.data(), hidden_dim_ * input_dim_}; }
  std::span<const double> b1() const { return {params_.data() + b1_offset(), hidden_dim_}; }
  std::span<const double> w2() const {
    return {params_.data() + w2_offset(), num_classes_ * hidden_dim_};
  }
  std::span<const double> b2() const { return {params_.data() + b2_offset(), num_classes_}; }

  std::size_t b1_offset() const { return hidden_dim_ * input_dim_; }
  std::size_t w2_offset() const { return b1_offset() + hidden_dim_; }
  std::size_t b2_offset() const { return w2_offset() + num_classes_ * hidden_dim_; }

  const std::vector<std::string>& class_names() const { return class_names_; }
  void set_class_names(std::vector<std::string> names) { class_names_ = std::move(names); }

 private:
  std::size_t input_dim_ = 0;
  std::size_t hidden_dim_ = 0;
  std::size_t num_classes_ = 0;
  double dropout_rate_ = 0.0;
  std::vector<double> params_;
  std::vector<std::string> class_names_;
};

// Intermediate values of one forward pass, kept for backpropagation.
struct ForwardCache {
  numeric::Vector hidden;  // post-rectifier, pre-dropout
  numeric::Vector dropped;  // what the output layer saw
  numeric::Vector logits;
};

// `rng` is only consulted when `training` is true and dropout is non-zero.
void forward(const ClassifierModel& model, std::span<const double> x, bool training,
             numeric::Rng* rng, ForwardCache& cache);

numeric::Vector forward_logits(const ClassifierModel& model, std::span<const double> x,
                               bool training, numeric::Rng& rng);

// Inference-mode logits.
numeric::Vector forward_logits(const ClassifierModel& model, std::span<const double> x);

// Penultimate-layer representation used by feature-space detectors.
numeric::Vector hidden_features(const ClassifierModel& model, std::span<const double> x);

// Accumulates d(loss)/d(params) into `grad` given d(loss)/d(logits).
void backward(const ClassifierModel& model, std::span<const double> x,
              const ForwardCache& cache, std::span<const double> grad_logits,
              std::span<double> grad);

inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const ClassifierModel& model, const std::filesystem::path& path);
// Throws VersionError when the file was written by another format version.
ClassifierModel load_checkpoint(const std::filesystem::path& path);

}  // namespace eood::model

#endif  // EOOD_MODEL_H_
