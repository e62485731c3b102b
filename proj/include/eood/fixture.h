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

#ifndef EOOD_FIXTURE_H_
#define EOOD_FIXTURE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

namespace eood::cli {

// Synthetic dataset in the CLINC schema. Each utterance is one unique token
// whose embedding is a draw from its class's isotropic Gaussian; class means
// sit `separation` standard deviations from the origin (on coordinate axes
// when num_classes <= dim) and the OOD blob is centred on the origin.
struct FixtureSpec {
  std::size_t num_classes = 10;
  std::size_t samples_per_class = 40;  // training; val and test get half each
  std::size_t ood_samples = 40;        // per split
  std::size_t dim = 16;
  double separation = 8.0;
  double sigma = 1.0;
  std::uint64_t seed = 0;
};

struct FixtureFiles {
  std::string dataset_json;
  std::string embeddings_txt;
};

// Throws ArgumentError for non-positive sizes.
FixtureFiles make_fixture(const FixtureSpec& spec);

// Writes data.json and embeddings.txt into `dir` (created if needed). Throws
// IoError when the directory is unwritable.
void write_fixture(const std::filesystem::path& dir, const FixtureSpec& spec);

}  // namespace eood::cli

#endif  // EOOD_FIXTURE_H_
