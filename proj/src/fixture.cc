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

#include "eood/fixture.h"

#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include <nlohmann/json.hpp>

#include "eood/errors.h"
#include "eood/eval.h"
#include "eood/io.h"
#include "eood/numeric.h"

namespace eood::cli {

FixtureFiles make_fixture(const FixtureSpec& spec) {
  if (spec.num_classes == 0 || spec.samples_per_class == 0 || spec.ood_samples == 0 ||
      spec.dim == 0) {
    throw ArgumentError("fixture sizes must be positive");
  }
  if (!(spec.sigma > 0.0) || !(spec.separation > 0.0)) {
    throw ArgumentError("fixture sigma and separation must be positive");
  }
  auto rng = numeric::make_stream(spec.seed, "fixture");
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<numeric::Vector> centers(spec.num_classes, numeric::Vector(spec.dim, 0.0));
  for (std::size_t c = 0; c < spec.num_classes; ++c) {
    auto& mu = centers[c];
    if (spec.num_classes <= spec.dim) {
      mu[c] = 1.0;
    } else {
      double norm = 0.0;
      for (double& v : mu) {
        v = gauss(rng);
        norm += v * v;
      }
      for (double& v : mu) v /= std::sqrt(norm);
    }
    for (double& v : mu) v *= spec.separation * spec.sigma;
  }
  const numeric::Vector origin(spec.dim, 0.0);

  std::string embeddings;
  std::size_t next_token = 0;
  // "please" never gets an embedding, so every utterance also exercises the
  // out-of-vocabulary path.
  auto utterance = [&](const numeric::Vector& center) {
    char token[32];
    std::snprintf(token, sizeof(token), "w%07zu", next_token++);
    embeddings += token;
    for (double m : center) embeddings += " " + eval::format_real(m + spec.sigma * gauss(rng));
    embeddings += "\n";
    return std::string("please ") + token;
  };
  auto intent = [](std::size_t c) {
    char name[32];
    std::snprintf(name, sizeof(name), "intent_%03zu", c);
    return std::string(name);
  };

  nlohmann::json root;
  const std::size_t eval_per_class = std::max<std::size_t>(2, spec.samples_per_class / 2);
  auto ind_split = [&](std::size_t per_class) {
    nlohmann::json list = nlohmann::json::array();
    for (std::size_t c = 0; c < spec.num_classes; ++c) {
      for (std::size_t i = 0; i < per_class; ++i) {
        list.push_back({utterance(centers[c]), intent(c)});
      }
    }
    return list;
  };
  auto ood_split = [&]() {
    nlohmann::json list = nlohmann::json::array();
    for (std::size_t i = 0; i < spec.ood_samples; ++i) list.push_back({utterance(origin), "oos"});
    return list;
  };
  root["train"] = ind_split(spec.samples_per_class);
  root["val"] = ind_split(eval_per_class);
  root["test"] = ind_split(eval_per_class);
  root["oos_train"] = ood_split();
  root["oos_val"] = ood_split();
  root["oos_test"] = ood_split();
  return {root.dump(), std::move(embeddings)};
}

void write_fixture(const std::filesystem::path& dir, const FixtureSpec& spec) {
  const FixtureFiles files = make_fixture(spec);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  write_file_atomic(dir / "data.json", files.dataset_json);
  write_file_atomic(dir / "embeddings.txt", files.embeddings_txt);
}

}  // namespace eood::cli
