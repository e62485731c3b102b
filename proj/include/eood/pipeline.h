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

#ifndef EOOD_PIPELINE_H_
#define EOOD_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "eood/config.h"
#include "eood/data.h"
#include "eood/detect.h"
#include "eood/eval.h"
#include "eood/model.h"
#include "eood/train.h"

namespace eood::cli {

// Dataset and embedding table loaded once and shared read-only by every run
// of a config.
struct Workspace {
  data::DatasetBundle bundle;
  data::EmbeddingTable table;
};

Workspace load_workspace(const RunConfig& config);

// Applies the config's OOD subsample (seeded per run) and encodes.
data::EncodedDataset encode_for_run(const Workspace& ws, const RunConfig& config,
                                    std::uint64_t seed);

struct SplitEvaluation {
  eval::EvalReport report;
  std::vector<eval::ScoreRecord> records;
  std::vector<double> confidences;
  std::vector<data::Domain> domains;
};

// Scores IND rows then OOD rows of `split`. Record ids are
// "<split>-ind-<row>" / "<split>-ood-<row>".
SplitEvaluation evaluate_split(const model::ClassifierModel& model,
                               const detect::Detector& detector,
                               const data::EncodedSplit& split, data::SplitName name);

// Fits the detector on the training rows and calibrates it on validation.
detect::Detector fit_and_calibrate(detect::DetectorKind kind,
                                   const model::ClassifierModel& model,
                                   const data::EncodedDataset& dataset,
                                   const detect::DetectorParams& params);

struct RunResult {
  model::ClassifierModel model;
  model::TrainReport report;
  detect::Detector detector = detect::Detector::msp();
  SplitEvaluation validation;
  SplitEvaluation test;
};

// Train (early stopping on validation OOD F1 of the selection detector),
// fit and calibrate the detector, evaluate validation and test.
RunResult run_experiment(const data::EncodedDataset& dataset, const RunConfig& config,
                         std::uint64_t seed);

// Runs `jobs` jobs over `workers` threads; each job is internally
// single-threaded. Exceptions propagate from the lowest failing index.
void run_parallel(std::size_t jobs, std::size_t workers,
                  const std::function<void(std::size_t)>& job);

// Worker count from EOOD_WORKERS, default 1.
std::size_t workers_from_env();

// ---------------------------------------------------------------------------
// Commands. Each writes its artifacts under config.out_dir.

// One subdirectory per seed (seed-<n>/ with checkpoint.json, detector.json,
// train_report.json, eval_test.json, scores_test.csv) plus aggregate.json.
eval::AggregateReport cmd_train(const RunConfig& config);

// Writes eval_<split>.json and scores_<split>.csv.
eval::EvalReport cmd_evaluate(const std::filesystem::path& checkpoint,
                              const std::filesystem::path& detector_state,
                              const RunConfig& config, data::SplitName split);

enum class SweepAxis { kTemperature, kMargin, kOodSize };

SweepAxis parse_sweep_axis(std::string_view name);
std::string_view sweep_axis_name(SweepAxis axis);

// Sets the swept value on a copy of `config`.
RunConfig with_sweep_value(const RunConfig& config, SweepAxis axis, double value);

struct SweepPoint {
  double value = 0.0;
  eval::MetricSummary ood_f1;   // test OOD F1 over seeds
  std::vector<double> per_seed;
};

// Throws ConfigError for an axis the objective cannot sweep (margin needs the
// margin objective, ood_size a supervised objective, ood_size 0 a
// non-supervised one) before any training starts.
void validate_sweep(const RunConfig& config, SweepAxis axis, std::span<const double> values);

std::vector<SweepPoint> run_sweep(const Workspace& ws, const RunConfig& config, SweepAxis axis,
                                  std::span<const double> values, std::size_t workers);

// Writes sweep_<axis>.csv (x,y,y_std) and sweep_<axis>.json.
std::vector<SweepPoint> cmd_sweep(const RunConfig& config, SweepAxis axis,
                                  std::span<const double> values);

struct AnalyzedDump {
  std::string name;
  eval::ScoreStats stats;
};

// Compares score dumps of the same split: hist_<name>.csv per dump plus
// score_stats.json. Throws ArgumentError when sample ids differ.
std::vector<AnalyzedDump> cmd_analyze(std::span<const std::filesystem::path> dumps,
                                      std::size_t bins, const std::filesystem::path& out_dir);

// Fits Energy, MSP, GDA and LOF on `model`, calibrates them on validation and
// times their scoring over the test rows.
eval::TimingReport run_benchmark(const model::ClassifierModel& model,
                                 const data::EncodedDataset& dataset,
                                 const detect::DetectorParams& params, std::size_t repetitions);

// Writes timing.json.
eval::TimingReport cmd_benchmark(const std::filesystem::path& checkpoint,
                                 const RunConfig& config, std::size_t repetitions);

}  // namespace eood::cli

#endif  // EOOD_PIPELINE_H_
