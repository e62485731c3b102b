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

// eood: train, evaluate and analyze energy-based OOD intent detectors.
//
//   eood [--config run.cfg] [--out DIR] [--seed N] [--set key=value]... <command>
//
// Failures print one JSON line {"error": <kind>, "message": ...} on stderr
// and exit non-zero.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eood/config.h"
#include "eood/errors.h"
#include "eood/eval.h"
#include "eood/fixture.h"
#include "eood/pipeline.h"

namespace {

using eood::cli::RunConfig;

int emit_error(std::string_view kind, std::string_view message) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
  return 1;
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t end = std::min(list.find(',', start), list.size());
    const std::string item = list.substr(start, end - start);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (item.empty() || used != item.size()) {
      throw eood::ArgumentError("bad sweep value '" + item + "'");
    }
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-based out-of-domain intent detection"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "key = value run configuration");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "run a single seed");
  app.add_option("--set", overrides, "override one config key (key=value)");

  auto* train = app.add_subcommand("train", "train, calibrate and evaluate on test, per seed");

  auto* evaluate = app.add_subcommand("evaluate", "score a split with saved model and detector");
  std::string checkpoint, detector_state, split = "test";
  evaluate->add_option("--checkpoint", checkpoint)->required();
  evaluate->add_option("--detector-state", detector_state)->required();
  evaluate->add_option("--split", split);

  auto* sweep = app.add_subcommand("sweep", "train+evaluate per value and seed");
  std::string axis, values;
  sweep->add_option("--axis", axis, "temperature | margin | ood_size")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();

  auto* analyze = app.add_subcommand("analyze", "confidence histograms and moments");
  std::vector<std::string> dumps;
  std::optional<std::size_t> bins;
  analyze->add_option("dumps", dumps, "score dump CSVs")->required();
  analyze->add_option("--bins", bins);

  auto* benchmark = app.add_subcommand("benchmark", "per-sample scoring time");
  std::string bench_checkpoint;
  std::size_t reps = 10;
  benchmark->add_option("--checkpoint", bench_checkpoint)->required();
  benchmark->add_option("--reps", reps);

  auto* fixture = app.add_subcommand("make-fixture", "write a synthetic dataset");
  eood::cli::FixtureSpec spec;
  std::string fixture_dir;
  fixture->add_option("dir", fixture_dir)->required();
  fixture->add_option("--classes", spec.num_classes);
  fixture->add_option("--per-class", spec.samples_per_class);
  fixture->add_option("--ood", spec.ood_samples);
  fixture->add_option("--dim", spec.dim);
  fixture->add_option("--separation", spec.separation);
  fixture->add_option("--sigma", spec.sigma);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return emit_error("argument", e.what());
  }

  try {
    RunConfig config;
    if (!config_path.empty()) config = eood::cli::load_run_config(config_path);
    for (const auto& o : overrides) eood::cli::apply_override(config, o);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (seed) config.seeds = {*seed};

    if (*train) {
      const auto agg = eood::cli::cmd_train(config);
      std::cout << eood::eval::to_json(agg).dump(2) << '\n';
    } else if (*evaluate) {
      const auto report = eood::cli::cmd_evaluate(checkpoint, detector_state, config,
                                                  eood::data::parse_split(split));
      std::cout << eood::eval::to_json(report).dump(2) << '\n';
    } else if (*sweep) {
      const auto parsed = parse_values(values);
      const auto points =
          eood::cli::cmd_sweep(config, eood::cli::parse_sweep_axis(axis), parsed);
      for (const auto& p : points) {
        std::cout << eood::eval::format_real(p.value) << '\t'
                  << eood::eval::format_real(p.ood_f1.mean) << '\t'
                  << eood::eval::format_real(p.ood_f1.std) << '\n';
      }
    } else if (*analyze) {
      std::vector<std::filesystem::path> paths(dumps.begin(), dumps.end());
      eood::cli::cmd_analyze(paths, bins.value_or(config.bins), config.out_dir);
    } else if (*benchmark) {
      const auto report = eood::cli::cmd_benchmark(bench_checkpoint, config, reps);
      std::cout << eood::eval::to_json(report).dump(2) << '\n';
    } else if (*fixture) {
      if (seed) spec.seed = *seed;
      eood::cli::write_fixture(fixture_dir, spec);
    }
  } catch (const eood::Error& e) {
    return emit_error(e.kind(), e.what());
  } catch (const std::exception& e) {
    return emit_error("internal", e.what());
  }
  return 0;
}
