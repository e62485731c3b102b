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

#include "eood/data.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "eood/errors.h"

namespace eood::data {
namespace {

struct PublishedSizes {
  std::size_t train_ind, val_ind, test_ind, train_ood, val_ood, test_ood;
};

constexpr std::size_t kClincIntents = 150;
constexpr PublishedSizes kFullSizes{15000, 3000, 4500, 100, 100, 1000};
constexpr PublishedSizes kSmallSizes{7500, 3000, 4500, 100, 100, 1000};

std::vector<Utterance> read_entries(const nlohmann::json& root, const char* key) {
  if (!root.contains(key)) {
    throw LoadError(std::string("missing key '") + key + "'");
  }
  const auto& list = root.at(key);
  if (!list.is_array()) throw LoadError(std::string("key '") + key + "' is not a list");
  if (list.empty()) throw LoadError(std::string("empty split '") + key + "'");
  std::vector<Utterance> out;
  out.reserve(list.size());
  for (const auto& entry : list) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() ||
        !entry[1].is_string()) {
      throw LoadError(std::string("malformed entry in '") + key +
                      "': expected [text, label]");
    }
    out.push_back(make_utterance(entry[0].get<std::string>(), entry[1].get<std::string>()));
  }
  return out;
}

void expect_size(const char* key, std::size_t got, std::size_t want) {
  if (got != want) {
    throw LoadError(std::string("split '") + key + "' has " + std::to_string(got) +
                    " entries, expected " + std::to_string(want));
  }
}

}  // namespace

Variant parse_variant(std::string_view name) {
  if (name == "full") return Variant::kFull;
  if (name == "small") return Variant::kSmall;
  if (name == "fixture") return Variant::kFixture;
  throw ArgumentError("unknown dataset variant '" + std::string(name) + "'");
}

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kFull: return "full";
    case Variant::kSmall: return "small";
    case Variant::kFixture: return "fixture";
  }
  return "?";
}

SplitName parse_split(std::string_view name) {
  if (name == "train") return SplitName::kTrain;
  if (name == "val" || name == "validation") return SplitName::kValidation;
  if (name == "test") return SplitName::kTest;
  throw ArgumentError("unknown split '" + std::string(name) + "'");
}

std::string_view split_name(SplitName s) {
  switch (s) {
    case SplitName::kTrain: return "train";
    case SplitName::kValidation: return "val";
    case SplitName::kTest: return "test";
  }
  return "?";
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::size_t b = i, e = j;
    while (b < e && std::ispunct(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(text[e - 1]))) --e;
    if (b < e) {
      std::string tok(text.substr(b, e - b));
      for (char& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      tokens.push_back(std::move(tok));
    }
    i = j;
  }
  return tokens;
}

Utterance make_utterance(std::string text, std::string label) {
  Utterance u;
  u.tokens = tokenize(text);
  u.text = std::move(text);
  u.label = std::move(label);
  return u;
}

ClassLabel DatasetBundle::class_index(std::string_view intent) const {
  auto it = std::lower_bound(intent_names.begin(), intent_names.end(), intent);
  if (it == intent_names.end() || *it != intent) {
    throw ArgumentError("unknown intent '" + std::string(intent) + "'");
  }
  return static_cast<ClassLabel>(it - intent_names.begin());
}

const Split& DatasetBundle::split(SplitName s) const {
  switch (s) {
    case SplitName::kTrain: return train;
    case SplitName::kValidation: return validation;
    case SplitName::kTest: return test;
  }
  return test;
}

DatasetBundle load_clinc(const std::filesystem::path& path, Variant variant) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open dataset file '" + path.string() + "'");
  nlohmann::json root;
  try {
    in >> root;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("malformed JSON in '" + path.string() + "': " + e.what());
  }
  if (!root.is_object()) throw LoadError("dataset root is not a JSON object");

  DatasetBundle b;
  b.variant = variant;
  b.train.ind = read_entries(root, "train");
  b.validation.ind = read_entries(root, "val");
  b.test.ind = read_entries(root, "test");
  b.train.ood = read_entries(root, "oos_train");
  b.validation.ood = read_entries(root, "oos_val");
  b.test.ood = read_entries(root, "oos_test");

  std::set<std::string> names;
  for (const auto& u : b.train.ind) {
    if (u.is_ood()) throw LoadError("in-domain split 'train' contains an OOD label");
    names.insert(u.label);
  }
  b.intent_names.assign(names.begin(), names.end());

  auto check_ind = [&](const std::vector<Utterance>& us, const char* key) {
    for (const auto& u : us) {
      if (u.is_ood()) {
        throw LoadError(std::string("in-domain split '") + key + "' contains an OOD label");
      }
      if (!names.contains(u.label)) {
        throw LoadError(std::string("split '") + key + "' uses intent '" + u.label +
                        "' absent from training data");
      }
    }
  };
  check_ind(b.validation.ind, "val");
  check_ind(b.test.ind, "test");
  auto check_ood = [&](const std::vector<Utterance>& us, const char* key) {
    for (const auto& u : us) {
      if (!u.is_ood()) {
        throw LoadError(std::string("split '") + key + "' entry carries label '" +
                        u.label + "' instead of '" + std::string(kOodMarker) + "'");
      }
    }
  };
  check_ood(b.train.ood, "oos_train");
  check_ood(b.validation.ood, "oos_val");
  check_ood(b.test.ood, "oos_test");

  if (variant != Variant::kFixture) {
    if (b.intent_names.size() != kClincIntents) {
      throw LoadError("expected " + std::to_string(kClincIntents) +
                      " in-domain intents, found " + std::to_string(b.intent_names.size()));
    }
    const PublishedSizes& s = variant == Variant::kFull ? kFullSizes : kSmallSizes;
    expect_size("train", b.train.ind.size(), s.train_ind);
    expect_size("val", b.validation.ind.size(), s.val_ind);
    expect_size("test", b.test.ind.size(), s.test_ind);
    expect_size("oos_train", b.train.ood.size(), s.train_ood);
    expect_size("oos_val", b.validation.ood.size(), s.val_ood);
    expect_size("oos_test", b.test.ood.size(), s.test_ood);
  }
  return b;
}

const numeric::Vector* EmbeddingTable::find(std::string_view token) const {
  auto it = vectors_.find(std::string(token));
  return it == vectors_.end() ? nullptr : &it->second;
}

void EmbeddingTable::insert(std::string token, numeric::Vector values) {
  if (values.size() != dimension_) {
    throw ArgumentError("embedding for '" + token + "' has " +
                        std::to_string(values.size()) + " entries, expected " +
                        std::to_string(dimension_));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw ArgumentError("embedding for '" + token + "' is not finite");
  }
  vectors_.try_emplace(std::move(token), std::move(values));
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, std::size_t dimension) {
  if (dimension == 0) throw ArgumentError("embedding dimension must be positive");
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open embedding file '" + path.string() + "'");

  EmbeddingTable table(dimension);
  std::string line;
  numeric::Vector values;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view rest(line);
    auto next_field = [&rest]() -> std::string_view {
      const auto b = rest.find_first_not_of(' ');
      if (b == std::string_view::npos) {
        rest = {};
        return {};
      }
      rest.remove_prefix(b);
      const auto e = std::min(rest.find(' '), rest.size());
      std::string_view field = rest.substr(0, e);
      rest.remove_prefix(e);
      return field;
    };
    const std::string_view token = next_field();
    if (token.empty()) continue;
    values.clear();
    bool ok = true;
    for (std::string_view f = next_field(); !f.empty(); f = next_field()) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
        ok = false;
        break;
      }
      values.push_back(v);
    }
    if (!ok || values.size() != dimension) {
      ++table.skipped_lines_;
      continue;
    }
    table.vectors_.try_emplace(std::string(token), values);
  }
  if (table.size() == 0) {
    throw LoadError("no parseable embedding lines in '" + path.string() + "'");
  }
  return table;
}

numeric::Vector encode_utterance(const Utterance& u, const EmbeddingTable& table) {
  numeric::Vector out(table.dimension(), 0.0);
  std::size_t known = 0;
  for (const auto& tok : u.tokens) {
    const numeric::Vector* v = table.find(tok);
    if (v == nullptr) continue;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += (*v)[i];
    ++known;
  }
  if (known > 0) {
    for (double& x : out) x /= static_cast<double>(known);
  }
  return out;
}

DatasetBundle subsample_ood_train(const DatasetBundle& bundle, std::size_t n,
                                  std::uint64_t seed) {
  const auto& pool = bundle.train.ood;
  if (n > pool.size()) {
    throw ArgumentError("cannot subsample " + std::to_string(n) +
                        " OOD training utterances from " + std::to_string(pool.size()));
  }
  DatasetBundle out = bundle;
  out.train.ood.clear();
  auto rng = numeric::make_stream(seed, "ood-subsample");
  std::sample(pool.begin(), pool.end(), std::back_inserter(out.train.ood), n, rng);
  return out;
}

const EncodedSplit& EncodedDataset::split(SplitName s) const {
  switch (s) {
    case SplitName::kTrain: return train;
    case SplitName::kValidation: return validation;
    case SplitName::kTest: return test;
  }
  return test;
}

EncodedDataset encode_dataset(const DatasetBundle& bundle, const EmbeddingTable& table) {
  EncodedDataset out;
  out.intent_names = bundle.intent_names;
  out.feature_dim = table.dimension();
  auto encode_split = [&](const Split& s, EncodedSplit& e) {
    e.ind_features = numeric::Matrix(0, table.dimension());
    e.ood_features = numeric::Matrix(0, table.dimension());
    for (const auto& u : s.ind) {
      e.ind_features.append_row(encode_utterance(u, table));
      e.ind_labels.push_back(bundle.class_index(u.label));
    }
    for (const auto& u : s.ood) e.ood_features.append_row(encode_utterance(u, table));
  };
  encode_split(bundle.train, out.train);
  encode_split(bundle.validation, out.validation);
  encode_split(bundle.test, out.test);
  return out;
}

}  // namespace eood::data
