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

#ifndef EOOD_DATA_H_
#define EOOD_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "eood/numeric.h"

namespace eood::data {

// Label carried by out-of-domain utterances in the CLINC files.
inline constexpr std::string_view kOodMarker = "oos";

// Class index of an in-domain intent, or kOodClass.
using ClassLabel = int;
inline constexpr ClassLabel kOodClass = -1;

// Detection ground truth of a sample; OOD is the positive class.
enum class Domain : std::uint8_t { kInd, kOod };

enum class Variant { kFull, kSmall, kFixture };

Variant parse_variant(std::string_view name);
std::string_view variant_name(Variant v);

// Lowercased whitespace tokens with leading/trailing ASCII punctuation
// stripped; tokens that become empty are dropped.
std::vector<std::string> tokenize(std::string_view text);

struct Utterance {
  std::string text;
  std::vector<std::string> tokens;
  std::string label;

  bool is_ood() const { return label == kOodMarker; }
};

Utterance make_utterance(std::string text, std::string label);

struct Split {
  std::vector<Utterance> ind;
  std::vector<Utterance> ood;
};

enum class SplitName { kTrain, kValidation, kTest };

SplitName parse_split(std::string_view name);
std::string_view split_name(SplitName s);

struct DatasetBundle {
  Split train;
  Split validation;
  Split test;
  // Lexicographically sorted; position is the class index.
  std::vector<std::string> intent_names;
  Variant variant = Variant::kFull;

  std::size_t num_intents() const { return intent_names.size(); }
  // Throws ArgumentError for an unknown intent name.
  ClassLabel class_index(std::string_view intent) const;
  ClassLabel label_of(const Utterance& u) const {
    return u.is_ood() ? kOodClass : class_index(u.label);
  }
  const Split& split(SplitName s) const;
};

// Reads the published CLINC JSON (keys train/val/test/oos_train/oos_val/
// oos_test, entries [text, label]). For kFull and kSmall the intent count and
// split sizes must match the published statistics; kFixture accepts any
// non-empty intent set.
DatasetBundle load_clinc(const std::filesystem::path& path, Variant variant);

class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension = 0) : dimension_(dimension) {}

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }
  std::size_t skipped_lines() const { return skipped_lines_; }

  // Returns nullptr for out-of-vocabulary tokens.
  const numeric::Vector* find(std::string_view token) const;
  // Throws ArgumentError on wrong arity or non-finite entries. An existing
  // entry for the token is kept.
  void insert(std::string token, numeric::Vector values);

 private:
  friend EmbeddingTable load_embeddings(const std::filesystem::path&, std::size_t);

  std::size_t dimension_;
  std::size_t skipped_lines_ = 0;
  std::unordered_map<std::string, numeric::Vector> vectors_;
};

// Plain-text `token v1 ... vd` lines. Lines with the wrong arity or
// unparseable numbers are skipped and counted.
EmbeddingTable load_embeddings(const std::filesystem::path& path, std::size_t dimension);

// Mean of the in-vocabulary token vectors; zero vector when none are known.
numeric::Vector encode_utterance(const Utterance& u, const EmbeddingTable& table);

// Copy of `bundle` whose OOD training set is a uniform size-n subset chosen
// deterministically from `seed`.
DatasetBundle subsample_ood_train(const DatasetBundle& bundle, std::size_t n,
                                  std::uint64_t seed);

// Feature rows for one split, IND and OOD kept apart.
struct EncodedSplit {
  numeric::Matrix ind_features;
  std::vector<ClassLabel> ind_labels;
  numeric::Matrix ood_features;

  std::size_t ind_size() const { return ind_features.rows(); }
  std::size_t ood_size() const { return ood_features.rows(); }
};

struct EncodedDataset {
  EncodedSplit train;
  EncodedSplit validation;
  EncodedSplit test;
  std::vector<std::string> intent_names;
  std::size_t feature_dim = 0;

  std::size_t num_intents() const { return intent_names.size(); }
  const EncodedSplit& split(SplitName s) const;
};

EncodedDataset encode_dataset(const DatasetBundle& bundle, const EmbeddingTable& table);

}  // namespace eood::data

#endif  // EOOD_DATA_H_
