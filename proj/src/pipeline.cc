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

#include "eood/pipeline.h"

#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "eood/errors.h"
#include "eood/io.h"

namespace eood::cli {
namespace {

std::string label_name(const std::vector<std::string>& intents, data::ClassLabel l) {
  return l == data::kOodClass ? std::string(data::kOodMarker) : intents.at(l);
}

nlohmann::json train_report_json(const RunResult& r, const RunConfig& c, std::uint64_t seed) {
  return {{"objective", model::objective_name(c.train.objective)},
          {"detector", detect::detector_kind_name(r.detector.kind())},
          {"seed", seed},
          {"epochs_run", r.report.epochs_run},
          {"best_epoch", r.report.best_epoch},
          {"best_validation_metric", r.report.best_metric},
          {"epoch_losses", r.report.epoch_losses},
          {"validation_metric", r.report.validation_metric},
          {"validation", eval::to_json(r.validation.report)}};
}

}  // namespace

Workspace load_workspace(const RunConfig& config) {
  Workspace ws;
  ws.bundle = data::load_clinc(config.dataset, config.variant);
  ws.table = data::load_embeddings(config.embeddings, config.embedding_dim);
  return ws;
}

data::EncodedDataset encode_for_run(const Workspace& ws, const RunConfig& config,
                                    std::uint64_t seed) {
  if (config.ood_train_size) {
    return data::encode_dataset(data::subsample_ood_train(ws.bundle, *config.ood_train_size, seed),
                                ws.table);
  }
  return data::encode_dataset(ws.bundle, ws.table);
}

SplitEvaluation evaluate_split(const model::ClassifierModel& model,
                               const detect::Detector& detector,
                               const data::EncodedSplit& split, data::SplitName name) {
  SplitEvaluation out;
  std::vector<data::ClassLabel> gold, pred;
  std::vector<std::string> intents = model.class_names();
  if (detector.kind() == detect::DetectorKind::kNPlusOne && !intents.empty()) intents.pop_back();
  const std::string prefix(data::split_name(name));

  auto score = [&](std::span<const double> x, data::ClassLabel g, const std::string& id) {
    const detect::ModelOutputs outputs = detect::run_model(model, x);
    const double conf = detector.confidence(outputs);
    const data::ClassLabel p = detect::decide(detector, outputs);
    gold.push_back(g);
    pred.push_back(p);
    out.confidences.push_back(conf);
    out.domains.push_back(g == data::kOodClass ? data::Domain::kOod : data::Domain::kInd);
    out.records.push_back({id, label_name(intents, g), conf, label_name(intents, p)});
  };
  for (std::size_t i = 0; i < split.ind_size(); ++i) {
    score(split.ind_features.row(i), split.ind_labels[i], prefix + "-ind-" + std::to_string(i));
  }
  for (std::size_t i = 0; i < split.ood_size(); ++i) {
    score(split.ood_features.row(i), data::kOodClass, prefix + "-ood-" + std::to_string(i));
  }
  out.report = eval::compute_metrics(pred, gold, intents.size(), intents);
  return out;
}

detect::Detector fit_and_calibrate(detect::DetectorKind kind,
                                   const model::ClassifierModel& model,
                                   const data::EncodedDataset& dataset,
                                   const detect::DetectorParams& params) {
  detect::Detector d = detect::Detector::fit(kind, model, dataset.train, params);
  detect::calibrate(d, model, dataset.validation);
  return d;
}

RunResult run_experiment(const data::EncodedDataset& dataset, const RunConfig& config,
                         std::uint64_t seed) {
  model::TrainConfig tc = config.train;
  tc.seed = seed;
  const auto params = config.detector_params();
  const auto select_kind = config.selection_detector();
  auto select = [&](const model::ClassifierModel& m) {
    return fit_and_calibrate(select_kind, m, dataset, params).calibration_ood_f1.value_or(0.0);
  };
  model::TrainResult trained = model::train(dataset, tc, select);

  RunResult r;
  r.detector = fit_and_calibrate(config.detector, trained.model, dataset, params);
  r.validation = evaluate_split(trained.model, r.detector, dataset.validation,
                                data::SplitName::kValidation);
  r.test = evaluate_split(trained.model, r.detector, dataset.test, data::SplitName::kTest);
  r.model = std::move(trained.model);
  r.report = std::move(trained.report);
  return r;
}

void run_parallel(std::size_t jobs, std::size_t workers,
                  const std::function<void(std::size_t)>& job) {
  workers = std::max<std::size_t>(1, std::min(workers, jobs));
  std::vector<std::exception_ptr> errors(jobs);
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs; ++i) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::mutex mu;
    std::size_t next = 0;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next == jobs) return;
            i = next++;
          }
          try {
            job(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::size_t workers_from_env() {
  const char* v = std::getenv("EOOD_WORKERS");
  if (v == nullptr || *v == '\0') return 1;
  const long n = std::strtol(v, nullptr, 10);
  return n > 0 ? static_cast<std::size_t>(n) : 1;
}

eval::AggregateReport cmd_train(const RunConfig& config) {
  validate(config);
  const Workspace ws = load_workspace(config);
  std::filesystem::create_directories(config.out_dir);
  write_file_atomic(config.out_dir / "config.txt", describe(config));

  std::vector<eval::EvalReport> reports(config.seeds.size());
  run_parallel(config.seeds.size(), workers_from_env(), [&](std::size_t i) {
    const std::uint64_t seed = config.seeds[i];
    const RunResult r = run_experiment(encode_for_run(ws, config, seed), config, seed);
    const auto dir = config.out_dir / ("seed-" + std::to_string(seed));
    std::filesystem::create_directories(dir);
    model::save_checkpoint(r.model, dir / "checkpoint.json");
    detect::save_detector(r.detector, dir / "detector.json");
    write_file_atomic(dir / "train_report.json", train_report_json(r, config, seed).dump(2));
    write_file_atomic(dir / "eval_test.json", eval::to_json(r.test.report).dump(2));
    eval::write_score_dump(dir / "scores_test.csv", r.test.records);
    reports[i] = r.test.report;
  });
  const eval::AggregateReport agg = eval::aggregate_runs(reports);
  write_file_atomic(config.out_dir / "aggregate.json", eval::to_json(agg).dump(2));
  return agg;
}

eval::EvalReport cmd_evaluate(const std::filesystem::path& checkpoint,
                              const std::filesystem::path& detector_state,
                              const RunConfig& config, data::SplitName split) {
  const model::ClassifierModel m = model::load_checkpoint(checkpoint);
  const detect::Detector d = detect::load_detector(detector_state);
  if (!d.calibrated()) d.threshold();  // StateError: no silent default threshold
  const Workspace ws = load_workspace(config);

  std::vector<std::string> names = m.class_names();
  if (d.kind() == detect::DetectorKind::kNPlusOne && !names.empty()) names.pop_back();
  if (names != ws.bundle.intent_names) {
    throw StateError("checkpoint class names do not match the dataset's intents");
  }
  const data::EncodedDataset enc = data::encode_dataset(ws.bundle, ws.table);
  const SplitEvaluation ev = evaluate_split(m, d, enc.split(split), split);

  std::filesystem::create_directories(config.out_dir);
  const std::string tag(data::split_name(split));
  write_file_atomic(config.out_dir / ("eval_" + tag + ".json"), eval::to_json(ev.report).dump(2));
  eval::write_score_dump(config.out_dir / ("scores_" + tag + ".csv"), ev.records);
  return ev.report;
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "temperature") return SweepAxis::kTemperature;
  if (name == "margin") return SweepAxis::kMargin;
  if (name == "ood_size") return SweepAxis::kOodSize;
  throw ConfigError("unknown sweep axis '" + std::string(name) + "'");
}

std::string_view sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kTemperature: return "temperature";
    case SweepAxis::kMargin: return "margin";
    case SweepAxis::kOodSize: return "ood_size";
  }
  return "?";
}

RunConfig with_sweep_value(const RunConfig& config, SweepAxis axis, double value) {
  RunConfig c = config;
  switch (axis) {
    case SweepAxis::kTemperature: c.train.temperature = value; break;
    case SweepAxis::kMargin: c.train.margin = value; break;
    case SweepAxis::kOodSize:
      if (!(value >= 0.0) || value != std::floor(value)) {
        throw ConfigError("ood_size values must be non-negative integers");
      }
      c.ood_train_size = static_cast<std::size_t>(value);
      break;
  }
  return c;
}

void validate_sweep(const RunConfig& config, SweepAxis axis, std::span<const double> values) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  const auto obj = config.train.objective;
  if (axis == SweepAxis::kMargin && obj != model::Objective::kMargin) {
    throw ConfigError("a margin sweep needs objective = margin");
  }
  if (axis == SweepAxis::kOodSize && !model::is_supervised(obj)) {
    throw ConfigError("an ood_size sweep needs a supervised objective");
  }
  for (double v : values) validate(with_sweep_value(config, axis, v));
}

std::vector<SweepPoint> run_sweep(const Workspace& ws, const RunConfig& config, SweepAxis axis,
                                  std::span<const double> values, std::size_t workers) {
  validate_sweep(config, axis, values);
  const std::size_t n_seeds = config.seeds.size();
  std::vector<double> f1(values.size() * n_seeds);
  run_parallel(f1.size(), workers, [&](std::size_t job) {
    const std::size_t v = job / n_seeds, s = job % n_seeds;
    const RunConfig c = with_sweep_value(config, axis, values[v]);
    const std::uint64_t seed = config.seeds[s];
    f1[job] = run_experiment(encode_for_run(ws, c, seed), c, seed).test.report.ood_f1;
  });
  std::vector<SweepPoint> points;
  for (std::size_t v = 0; v < values.size(); ++v) {
    SweepPoint p;
    p.value = values[v];
    p.per_seed.assign(f1.begin() + v * n_seeds, f1.begin() + (v + 1) * n_seeds);
    p.ood_f1 = eval::summarize(p.per_seed);
    points.push_back(std::move(p));
  }
  return points;
}

std::vector<SweepPoint> cmd_sweep(const RunConfig& config, SweepAxis axis,
                                  std::span<const double> values) {
  validate_sweep(config, axis, values);
  const Workspace ws = load_workspace(config);
  const auto points = run_sweep(ws, config, axis, values, workers_from_env());

  std::string csv = "x,y,y_std\n";
  nlohmann::json j = nlohmann::json::array();
  for (const auto& p : points) {
    csv += eval::format_real(p.value) + "," + eval::format_real(p.ood_f1.mean) + "," +
           eval::format_real(p.ood_f1.std) + "\n";
    j.push_back({{"value", p.value},
                 {"ood_f1_mean", p.ood_f1.mean},
                 {"ood_f1_std", p.ood_f1.std},
                 {"per_seed", p.per_seed}});
  }
  std::filesystem::create_directories(config.out_dir);
  const std::string tag(sweep_axis_name(axis));
  write_file_atomic(config.out_dir / ("sweep_" + tag + ".csv"), csv);
  write_file_atomic(config.out_dir / ("sweep_" + tag + ".json"),
                    nlohmann::json{{"axis", tag}, {"points", j}}.dump(2));
  return points;
}

std::vector<AnalyzedDump> cmd_analyze(std::span<const std::filesystem::path> dumps,
                                      std::size_t bins, const std::filesystem::path& out_dir) {
  if (dumps.empty()) throw ArgumentError("analyze needs at least one score dump");
  std::vector<std::vector<eval::ScoreRecord>> loaded;
  for (const auto& p : dumps) loaded.push_back(eval::read_score_dump(p));
  for (std::size_t d = 1; d < loaded.size(); ++d) {
    bool same = loaded[d].size() == loaded[0].size();
    for (std::size_t i = 0; same && i < loaded[d].size(); ++i) {
      same = loaded[d][i].id == loaded[0][i].id;
    }
    if (!same) {
      throw ArgumentError("score dumps '" + dumps[0].string() + "' and '" + dumps[d].string() +
                          "' cover different sample ids");
    }
  }

  std::vector<AnalyzedDump> out;
  std::set<std::string> used;
  nlohmann::json j = nlohmann::json::object();
  std::filesystem::create_directories(out_dir);
  for (std::size_t d = 0; d < loaded.size(); ++d) {
    std::string name = dumps[d].stem().string();
    if (used.contains(name)) name += "_" + std::to_string(d);
    used.insert(name);
    std::vector<double> conf;
    std::vector<data::Domain> domains;
    for (const auto& r : loaded[d]) {
      conf.push_back(r.confidence);
      domains.push_back(r.gold == data::kOodMarker ? data::Domain::kOod : data::Domain::kInd);
    }
    AnalyzedDump a{name, eval::score_stats(conf, domains, bins)};
    write_file_atomic(out_dir / ("hist_" + name + ".csv"), eval::histogram_csv(a.stats));
    j[name] = eval::to_json(a.stats);
    out.push_back(std::move(a));
  }
  write_file_atomic(out_dir / "score_stats.json", j.dump(2));
  return out;
}

eval::TimingReport run_benchmark(const model::ClassifierModel& model,
                                 const data::EncodedDataset& dataset,
                                 const detect::DetectorParams& params,
                                 std::size_t repetitions) {
  using detect::DetectorKind;
  std::vector<detect::Detector> detectors;
  for (auto kind : {DetectorKind::kMsp, DetectorKind::kEnergy, DetectorKind::kGda,
                    DetectorKind::kLof}) {
    detectors.push_back(fit_and_calibrate(kind, model, dataset, params));
  }
  std::vector<detect::ModelOutputs> samples;
  const auto& test = dataset.test;
  for (std::size_t i = 0; i < test.ind_size(); ++i) {
    samples.push_back(detect::run_model(model, test.ind_features.row(i)));
  }
  for (std::size_t i = 0; i < test.ood_size(); ++i) {
    samples.push_back(detect::run_model(model, test.ood_features.row(i)));
  }
  std::vector<const detect::Detector*> ptrs;
  for (const auto& d : detectors) ptrs.push_back(&d);
  return eval::benchmark_inference(ptrs, samples, repetitions);
}

eval::TimingReport cmd_benchmark(const std::filesystem::path& checkpoint,
                                 const RunConfig& config, std::size_t repetitions) {
  const model::ClassifierModel m = model::load_checkpoint(checkpoint);
  const Workspace ws = load_workspace(config);
  const auto report =
      run_benchmark(m, data::encode_dataset(ws.bundle, ws.table), config.detector_params(),
                    repetitions);
  std::filesystem::create_directories(config.out_dir);
  write_file_atomic(config.out_dir / "timing.json", eval::to_json(report).dump(2));
  return report;
}

}  // namespace eood::cli
