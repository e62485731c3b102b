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

#ifndef EOOD_CONFIG_H_
#define EOOD_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eood/data.h"
#include "eood/detect.h"
#include "eood/train.h"

namespace eood::cli {

// Everything one experiment needs. Read from a `key = value` file; every key
// can be overridden on the command line with `--set key=value`.
struct RunConfig {
  std::filesystem::path dataset;
  data::Variant variant = data::Variant::kSmall;
  std::filesystem::path embeddings;
  std::size_t embedding_dim = 300;

  model::TrainConfig train;
  detect::DetectorKind detector = detect::DetectorKind::kEnergy;
  // Detector scored on validation data during early stopping; defaults to
  // `detector`.
  std::optional<detect::DetectorKind> select_detector;
  std::size_t lof_k = 20;
  std::optional<double> gda_ridge;

  std::optional<std::size_t> ood_train_size;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::filesystem::path out_dir = "out";
  std::size_t bins = 50;

  detect::DetectorParams detector_params() const {
    return {train.temperature, lof_k, gda_ridge};
  }
  detect::DetectorKind selection_detector() const { return select_detector.value_or(detector); }
};

// Applies one setting. Throws ConfigError for unknown keys or bad values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);
// `key=value` form used by --set.
void apply_override(RunConfig& config, std::string_view assignment);

// Blank lines and lines starting with '#' are ignored.
RunConfig load_run_config(const std::filesystem::path& path);

// Key/value dump that load_run_config reads back.
std::string describe(const RunConfig& config);

// Paths exist, seeds non-empty, objective and detector compatible, and the
// supervised objectives have OOD training data to work with.
void validate(const RunConfig& config);

}  // namespace eood::cli

#endif  // EOOD_CONFIG_H_
