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

#include "eood/model.h"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "eood/errors.h"
#include "eood/io.h"

namespace eood::model {

ClassifierModel::ClassifierModel(std::size_t input_dim, std::size_t hidden_dim,
                                 std::size_t num_classes, double dropout_rate)
    : input_dim_(input_dim),
      hidden_dim_(hidden_dim),
      num_classes_(num_classes),
      dropout_rate_(dropout_rate) {
  if (input_dim == 0 || hidden_dim == 0 || num_classes == 0) {
    throw ArgumentError("model dimensions must be positive");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ArgumentError("dropout rate must lie in [0, 1)");
  }
  params_.assign(hidden_dim * input_dim + hidden_dim + num_classes * hidden_dim + num_classes,
                 0.0);
}

void ClassifierModel::initialize(std::uint64_t seed) {
  auto rng = numeric::make_stream(seed, "init");
  const double a1 = 1.0 / std::sqrt(static_cast<double>(input_dim_));
  const double a2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim_));
  std::uniform_real_distribution<double> u1(-a1, a1), u2(-a2, a2);
  for (double& w : w1()) w = u1(rng);
  for (double& w : b1()) w = 0.0;
  for (double& w : w2()) w = u2(rng);
  for (double& w : b2()) w = 0.0;
}

void forward(const ClassifierModel& model, std::span<const double> x, bool training,
             numeric::Rng* rng, ForwardCache& cache) {
  const std::size_t in = model.input_dim(), h = model.hidden_dim(), k = model.num_classes();
  if (x.size() != in) {
    throw ArgumentError("forward: input has " + std::to_string(x.size()) +
                        " entries, model expects " + std::to_string(in));
  }
  const auto w1 = model.w1();
  const auto b1 = model.b1();
  const auto w2 = model.w2();
  const auto b2 = model.b2();

  cache.hidden.resize(h);
  for (std::size_t j = 0; j < h; ++j) {
    const double* row = w1.data() + j * in;
    double s = b1[j];
    for (std::size_t i = 0; i < in; ++i) s += row[i] * x[i];
    cache.hidden[j] = s > 0.0 ? s : 0.0;
  }

  cache.dropped = cache.hidden;
  const double p = model.dropout_rate();
  if (training && p > 0.0) {
    if (rng == nullptr) throw ArgumentError("forward: training with dropout needs an rng");
    std::bernoulli_distribution keep(1.0 - p);
    const double scale = 1.0 / (1.0 - p);
    for (double& v : cache.dropped) v = keep(*rng) ? v * scale : 0.0;
  }

  cache.logits.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    const double* row = w2.data() + c * h;
    double s = b2[c];
    for (std::size_t j = 0; j < h; ++j) s += row[j] * cache.dropped[j];
    cache.logits[c] = s;
  }
}

numeric::Vector forward_logits(const ClassifierModel& model, std::span<const double> x,
                               bool training, numeric::Rng& rng) {
  ForwardCache cache;
  forward(model, x, training, &rng, cache);
  return std::move(cache.logits);
}

numeric::Vector forward_logits(const ClassifierModel& model, std::span<const double> x) {
  ForwardCache cache;
  forward(model, x, false, nullptr, cache);
  return std::move(cache.logits);
}

numeric::Vector hidden_features(const ClassifierModel& model, std::span<const double> x) {
  ForwardCache cache;
  forward(model, x, false, nullptr, cache);
  return std::move(cache.hidden);
}

void backward(const ClassifierModel& model, std::span<const double> x,
              const ForwardCache& cache, std::span<const double> grad_logits,
              std::span<double> grad) {
  const std::size_t in = model.input_dim(), h = model.hidden_dim(), k = model.num_classes();
  if (grad.size() != model.parameter_count() || grad_logits.size() != k) {
    throw ArgumentError("backward: shape mismatch");
  }
  const auto w2 = model.w2();
  double* gw1 = grad.data();
  double* gb1 = grad.data() + model.b1_offset();
  double* gw2 = grad.data() + model.w2_offset();
  double* gb2 = grad.data() + model.b2_offset();

  numeric::Vector grad_dropped(h, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    const double g = grad_logits[c];
    if (g == 0.0) continue;
    gb2[c] += g;
    double* grow = gw2 + c * h;
    const double* wrow = w2.data() + c * h;
    for (std::size_t j = 0; j < h; ++j) {
      grow[j] += g * cache.dropped[j];
      grad_dropped[j] += g * wrow[j];
    }
  }

  for (std::size_t j = 0; j < h; ++j) {
    // Dropout and the rectifier both pass the gradient through exactly where
    // the unit survived; the inverted-dropout scale is dropped/hidden.
    if (cache.dropped[j] == 0.0 || cache.hidden[j] <= 0.0) continue;
    const double g = grad_dropped[j] * (cache.dropped[j] / cache.hidden[j]);
    gb1[j] += g;
    double* grow = gw1 + j * in;
    for (std::size_t i = 0; i < in; ++i) grow[i] += g * x[i];
  }
}

void save_checkpoint(const ClassifierModel& model, const std::filesystem::path& path) {
  nlohmann::json j;
  j["format"] = "eood-checkpoint";
  j["version"] = kCheckpointVersion;
  j["input_dim"] = model.input_dim();
  j["hidden_dim"] = model.hidden_dim();
  j["num_classes"] = model.num_classes();
  j["dropout_rate"] = model.dropout_rate();
  j["class_names"] = model.class_names();
  j["parameters"] = std::vector<double>(model.parameters().begin(), model.parameters().end());
  write_file_atomic(path, j.dump());
}

ClassifierModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
    if (j.value("format", "") != "eood-checkpoint") {
      throw LoadError("'" + path.string() + "' is not a model checkpoint");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw VersionError("checkpoint version mismatch: expected " +
                         std::to_string(kCheckpointVersion) + ", found " +
                         std::to_string(version));
    }
    ClassifierModel m(j.at("input_dim").get<std::size_t>(), j.at("hidden_dim").get<std::size_t>(),
                      j.at("num_classes").get<std::size_t>(),
                      j.at("dropout_rate").get<double>());
    const auto params = j.at("parameters").get<std::vector<double>>();
    if (params.size() != m.parameter_count()) {
      throw LoadError("checkpoint parameter count does not match its dimensions");
    }
    std::copy(params.begin(), params.end(), m.parameters().begin());
    m.set_class_names(j.at("class_names").get<std::vector<std::string>>());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("malformed checkpoint '" + path.string() + "': " + e.what());
  }
}

}  // namespace eood::model
