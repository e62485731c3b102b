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

#include "eood/config.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "eood/errors.h"
#include "eood/eval.h"

namespace eood::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("bad value '" + std::string(value) + "' for key '" + std::string(key) +
                      "'");
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(std::string_view key, std::string_view value) {
  std::vector<std::uint64_t> seeds;
  while (!value.empty()) {
    const auto comma = value.find(',');
    const auto item = trim(value.substr(0, comma));
    if (!item.empty()) seeds.push_back(parse_number<std::uint64_t>(key, item));
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  return seeds;
}

}  // namespace

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  auto& t = c.train;
  try {
    if (key == "dataset") c.dataset = std::string(value);
    else if (key == "variant") c.variant = data::parse_variant(value);
    else if (key == "embeddings") c.embeddings = std::string(value);
    else if (key == "embedding_dim") c.embedding_dim = parse_number<std::size_t>(key, value);
    else if (key == "objective") t.objective = model::parse_objective(value);
    else if (key == "temperature") t.temperature = parse_number<double>(key, value);
    else if (key == "margin") t.margin = parse_number<double>(key, value);
    else if (key == "m_ind") t.m_ind = parse_number<double>(key, value);
    else if (key == "m_ood") t.m_ood = parse_number<double>(key, value);
    else if (key == "entropy_weight") t.entropy_weight = parse_number<double>(key, value);
    else if (key == "learning_rate") t.learning_rate = parse_number<double>(key, value);
    else if (key == "batch_size") t.batch_size = parse_number<std::size_t>(key, value);
    else if (key == "max_epochs") t.max_epochs = parse_number<std::size_t>(key, value);
    else if (key == "patience") t.patience = parse_number<std::size_t>(key, value);
    else if (key == "hidden_dim") t.hidden_dim = parse_number<std::size_t>(key, value);
    else if (key == "dropout") t.dropout = parse_number<double>(key, value);
    else if (key == "detector") c.detector = detect::parse_detector_kind(value);
    else if (key == "select_detector") c.select_detector = detect::parse_detector_kind(value);
    else if (key == "lof_k") c.lof_k = parse_number<std::size_t>(key, value);
    else if (key == "gda_ridge") c.gda_ridge = parse_number<double>(key, value);
    else if (key == "ood_train_size") {
      if (value == "all") {
        c.ood_train_size.reset();
      } else {
        c.ood_train_size = parse_number<std::size_t>(key, value);
      }
    } else if (key == "seed") c.seeds = {parse_number<std::uint64_t>(key, value)};
    else if (key == "seeds") c.seeds = parse_seeds(key, value);
    else if (key == "out") c.out_dir = std::string(value);
    else if (key == "bins") c.bins = parse_number<std::size_t>(key, value);
    else throw ConfigError("unknown config key '" + std::string(key) + "'");
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  }
  apply_setting(config, assignment.substr(0, eq), assignment.substr(eq + 1));
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  RunConfig c;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  return c;
}

std::string describe(const RunConfig& c) {
  const auto& t = c.train;
  std::ostringstream o;
  auto real = [](double v) { return eval::format_real(v); };
  o << "dataset = " << c.dataset.string() << "\n"
    << "variant = " << data::variant_name(c.variant) << "\n"
    << "embeddings = " << c.embeddings.string() << "\n"
    << "embedding_dim = " << c.embedding_dim << "\n"
    << "objective = " << model::objective_name(t.objective) << "\n"
    << "temperature = " << real(t.temperature) << "\n"
    << "margin = " << real(t.margin) << "\n"
    << "m_ind = " << real(t.m_ind) << "\n"
    << "m_ood = " << real(t.m_ood) << "\n"
    << "entropy_weight = " << real(t.entropy_weight) << "\n"
    << "learning_rate = " << real(t.learning_rate) << "\n"
    << "batch_size = " << t.batch_size << "\n"
    << "max_epochs = " << t.max_epochs << "\n"
    << "patience = " << t.patience << "\n"
    << "hidden_dim = " << t.hidden_dim << "\n"
    << "dropout = " << real(t.dropout) << "\n"
    << "detector = " << detect::detector_kind_name(c.detector) << "\n";
  if (c.select_detector) {
    o << "select_detector = " << detect::detector_kind_name(*c.select_detector) << "\n";
  }
  o << "lof_k = " << c.lof_k << "\n";
  if (c.gda_ridge) o << "gda_ridge = " << real(*c.gda_ridge) << "\n";
  o << "ood_train_size = "
    << (c.ood_train_size ? std::to_string(*c.ood_train_size) : std::string("all")) << "\n";
  o << "seeds = ";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) o << (i ? "," : "") << c.seeds[i];
  o << "\nout = " << c.out_dir.string() << "\n"
    << "bins = " << c.bins << "\n";
  return o.str();
}

void validate(const RunConfig& c) {
  model::validate(c.train);
  if (c.seeds.empty()) throw ConfigError("seeds must not be empty");
  if (c.embedding_dim == 0) throw ConfigError("embedding_dim must be positive");
  if (c.bins == 0) throw ConfigError("bins must be positive");
  if (!std::filesystem::exists(c.dataset)) {
    throw ConfigError("dataset '" + c.dataset.string() + "' does not exist");
  }
  if (!std::filesystem::exists(c.embeddings)) {
    throw ConfigError("embeddings '" + c.embeddings.string() + "' do not exist");
  }
  const bool n_plus_one = c.train.objective == model::Objective::kNPlusOne;
  for (auto kind : {c.detector, c.selection_detector()}) {
    if (n_plus_one != (kind == detect::DetectorKind::kNPlusOne)) {
      throw ConfigError("the nplus1 objective and the nplus1 detector go together");
    }
  }
  if (model::is_supervised(c.train.objective) && c.ood_train_size && *c.ood_train_size == 0) {
    throw ConfigError("objective '" + std::string(model::objective_name(c.train.objective)) +
                      "' needs labeled OOD training samples, but ood_train_size = 0");
  }
}

}  // namespace eood::cli
