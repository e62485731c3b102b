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

#ifndef EOOD_EVAL_H_
#define EOOD_EVAL_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eood/data.h"
#include "eood/detect.h"

namespace eood::eval {

struct ClassScores {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold count
};

struct ConfusionSummary {
  std::size_t ind_correct = 0;
  std::size_t ind_misclassified = 0;  // accepted as the wrong intent
  std::size_t ind_rejected = 0;       // called OOD
  std::size_t ood_detected = 0;
  std::size_t ood_accepted = 0;
};

// (K+1)-way evaluation with OOD as its own class.
struct EvalReport {
  double ind_accuracy = 0.0;  // rejected IND samples count as errors
  double ind_macro_f1 = 0.0;  // unweighted over the K intents
  double ood_precision = 0.0;
  double ood_recall = 0.0;
  double ood_f1 = 0.0;
  std::vector<ClassScores> per_class;  // K intents, then OOD
  ConfusionSummary confusion;
  std::size_t num_samples = 0;
};

// Labels are class indices in [0, K) or data::kOodClass. Throws
// ArgumentError on length mismatch or an unknown label. `intent_names` only
// labels the per-class table and may be empty.
EvalReport compute_metrics(std::span<const data::ClassLabel> predictions,
                           std::span<const data::ClassLabel> gold, std::size_t num_intents,
                           std::span<const std::string> intent_names = {});

// F1 from confusion counts, 0 when undefined. Shared with calibration so both
// report identical values for identical decisions.
double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

struct GroupStats {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // population variance
};

struct ScoreStats {
  GroupStats ind;
  GroupStats ood;
  std::vector<double> bin_edges;  // bins + 1 shared edges over [min, max]
  std::vector<std::size_t> ind_counts;
  std::vector<std::size_t> ood_counts;
};

// Throws ArgumentError when a group is empty or bins == 0.
ScoreStats score_stats(std::span<const double> confidences,
                       std::span<const data::Domain> domains, std::size_t bins = 50);

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single run
};

struct AggregateReport {
  std::size_t runs = 0;
  MetricSummary ind_accuracy;
  MetricSummary ind_macro_f1;
  MetricSummary ood_precision;
  MetricSummary ood_recall;
  MetricSummary ood_f1;
};

// Independent of report order. Throws ArgumentError on an empty list.
AggregateReport aggregate_runs(std::span<const EvalReport> reports);
MetricSummary summarize(std::vector<double> values);

struct DetectorTiming {
  std::string detector;
  double seconds_per_sample = 0.0;  // median over repetitions
  double ratio_to_msp = 0.0;
};

struct TimingReport {
  std::vector<DetectorTiming> entries;
  std::size_t samples = 0;
  std::size_t repetitions = 0;
  std::vector<std::string> warnings;
};

// Times the confidence computation of each detector over precomputed model
// outputs, so the shared forward pass is excluded. The MSP entry (timed
// internally when absent from `detectors`) is the 1.00x reference. Throws
// ArgumentError when repetitions < 3; fewer than 100 samples only warns.
TimingReport benchmark_inference(std::span<const detect::Detector* const> detectors,
                                 std::span<const detect::ModelOutputs> samples,
                                 std::size_t repetitions);

nlohmann::json to_json(const EvalReport& r);
nlohmann::json to_json(const ScoreStats& s);
nlohmann::json to_json(const AggregateReport& a);
nlohmann::json to_json(const TimingReport& t);

// bin_left,bin_right,count_ind,count_ood
std::string histogram_csv(const ScoreStats& s);

// One evaluated sample in a score dump.
struct ScoreRecord {
  std::string id;
  std::string gold;
  double confidence = 0.0;
  std::string prediction;
};

inline constexpr const char* kScoreDumpHeader = "id,gold,confidence,prediction";

std::string score_dump_csv(std::span<const ScoreRecord> records);
void write_score_dump(const std::filesystem::path& path, std::span<const ScoreRecord> records);
std::vector<ScoreRecord> read_score_dump(const std::filesystem::path& path);

// Shortest decimal text that reads back as the same double.
std::string format_real(double v);

}  // namespace eood::eval

#endif  // EOOD_EVAL_H_
