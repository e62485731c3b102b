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

#include "eood/eval.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "eood/errors.h"
#include "eood/io.h"

namespace eood::eval {

double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

EvalReport compute_metrics(std::span<const data::ClassLabel> predictions,
                           std::span<const data::ClassLabel> gold, std::size_t num_intents,
                           std::span<const std::string> intent_names) {
  if (predictions.size() != gold.size()) {
    throw ArgumentError("compute_metrics: " + std::to_string(predictions.size()) +
                        " predictions for " + std::to_string(gold.size()) + " gold labels");
  }
  if (!intent_names.empty() && intent_names.size() != num_intents) {
    throw ArgumentError("compute_metrics: intent name count differs from num_intents");
  }
  const std::size_t ood = num_intents;  // column of the OOD class
  auto column = [&](data::ClassLabel l) -> std::size_t {
    if (l == data::kOodClass) return ood;
    if (l < 0 || static_cast<std::size_t>(l) >= num_intents) {
      throw ArgumentError("compute_metrics: unknown label " + std::to_string(l));
    }
    return static_cast<std::size_t>(l);
  };

  std::vector<std::size_t> tp(num_intents + 1, 0), fp(num_intents + 1, 0),
      fn(num_intents + 1, 0), support(num_intents + 1, 0);
  EvalReport r;
  r.num_samples = gold.size();
  std::size_t gold_ind = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const std::size_t g = column(gold[i]), p = column(predictions[i]);
    ++support[g];
    if (g == p) {
      ++tp[g];
    } else {
      ++fp[p];
      ++fn[g];
    }
    if (g == ood) {
      ++(p == ood ? r.confusion.ood_detected : r.confusion.ood_accepted);
    } else {
      ++gold_ind;
      if (p == g) {
        ++r.confusion.ind_correct;
      } else if (p == ood) {
        ++r.confusion.ind_rejected;
      } else {
        ++r.confusion.ind_misclassified;
      }
    }
  }

  auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  double macro = 0.0;
  for (std::size_t c = 0; c <= num_intents; ++c) {
    ClassScores s;
    s.name = c == ood ? std::string(data::kOodMarker)
                      : (intent_names.empty() ? std::to_string(c) : intent_names[c]);
    s.precision = ratio(tp[c], tp[c] + fp[c]);
    s.recall = ratio(tp[c], tp[c] + fn[c]);
    s.f1 = f1_from_counts(tp[c], fp[c], fn[c]);
    s.support = support[c];
    if (c < ood) macro += s.f1;
    r.per_class.push_back(std::move(s));
  }
  r.ind_macro_f1 = num_intents == 0 ? 0.0 : macro / static_cast<double>(num_intents);
  r.ind_accuracy = ratio(r.confusion.ind_correct, gold_ind);
  r.ood_precision = r.per_class[ood].precision;
  r.ood_recall = r.per_class[ood].recall;
  r.ood_f1 = r.per_class[ood].f1;
  return r;
}

ScoreStats score_stats(std::span<const double> confidences,
                       std::span<const data::Domain> domains, std::size_t bins) {
  if (confidences.size() != domains.size()) throw ArgumentError("score_stats: length mismatch");
  if (bins == 0) throw ArgumentError("score_stats: bins must be positive");
  ScoreStats s;
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    GroupStats& g = domains[i] == data::Domain::kOod ? s.ood : s.ind;
    ++g.count;
    g.mean += confidences[i];
    lo = std::min(lo, confidences[i]);
    hi = std::max(hi, confidences[i]);
  }
  if (s.ind.count == 0 || s.ood.count == 0) {
    throw ArgumentError("score_stats: both IND and OOD groups must be non-empty");
  }
  s.ind.mean /= static_cast<double>(s.ind.count);
  s.ood.mean /= static_cast<double>(s.ood.count);
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    GroupStats& g = domains[i] == data::Domain::kOod ? s.ood : s.ind;
    const double d = confidences[i] - g.mean;
    g.variance += d * d;
  }
  s.ind.variance /= static_cast<double>(s.ind.count);
  s.ood.variance /= static_cast<double>(s.ood.count);

  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) s.bin_edges.push_back(lo + width * static_cast<double>(b));
  s.bin_edges.push_back(hi);
  s.ind_counts.assign(bins, 0);
  s.ood_counts.assign(bins, 0);
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    auto b = static_cast<std::size_t>((confidences[i] - lo) / width);
    b = std::min(b, bins - 1);
    ++(domains[i] == data::Domain::kOod ? s.ood_counts : s.ind_counts)[b];
  }
  return s;
}

MetricSummary summarize(std::vector<double> values) {
  if (values.empty()) throw ArgumentError("summarize: no values");
  // Sorting first makes the result independent of input order; the running
  // mean returns x exactly for n copies of x.
  std::sort(values.begin(), values.end());
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double delta = values[i] - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (values[i] - mean);
  }
  MetricSummary s;
  s.mean = mean;
  s.std = values.size() > 1 ? std::sqrt(m2 / static_cast<double>(values.size() - 1)) : 0.0;
  return s;
}

AggregateReport aggregate_runs(std::span<const EvalReport> reports) {
  if (reports.empty()) throw ArgumentError("aggregate_runs: empty report list");
  auto collect = [&](double EvalReport::*field) {
    std::vector<double> v;
    for (const auto& r : reports) v.push_back(r.*field);
    return summarize(std::move(v));
  };
  AggregateReport a;
  a.runs = reports.size();
  a.ind_accuracy = collect(&EvalReport::ind_accuracy);
  a.ind_macro_f1 = collect(&EvalReport::ind_macro_f1);
  a.ood_precision = collect(&EvalReport::ood_precision);
  a.ood_recall = collect(&EvalReport::ood_recall);
  a.ood_f1 = collect(&EvalReport::ood_f1);
  return a;
}

TimingReport benchmark_inference(std::span<const detect::Detector* const> detectors,
                                 std::span<const detect::ModelOutputs> samples,
                                 std::size_t repetitions) {
  if (repetitions < 3) throw ArgumentError("benchmark_inference: need at least 3 repetitions");
  if (samples.empty()) throw ArgumentError("benchmark_inference: no samples");
  TimingReport report;
  report.samples = samples.size();
  report.repetitions = repetitions;
  if (samples.size() < 100) {
    report.warnings.push_back("only " + std::to_string(samples.size()) +
                              " samples; timings may be unstable");
  }

  const detect::Detector internal_msp = detect::Detector::msp();
  std::vector<const detect::Detector*> timed(detectors.begin(), detectors.end());
  std::size_t msp_index = timed.size();
  for (std::size_t i = 0; i < timed.size(); ++i) {
    if (timed[i]->kind() == detect::DetectorKind::kMsp) {
      msp_index = i;
      break;
    }
  }
  const bool msp_external = msp_index < timed.size();
  if (!msp_external) timed.push_back(&internal_msp);

  std::vector<std::vector<double>> per_rep(timed.size());
  volatile double sink = 0.0;
  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    for (std::size_t d = 0; d < timed.size(); ++d) {
      const auto start = std::chrono::steady_clock::now();
      double acc = 0.0;
      for (const auto& s : samples) acc += timed[d]->confidence(s);
      const auto stop = std::chrono::steady_clock::now();
      sink = sink + acc;
      per_rep[d].push_back(std::chrono::duration<double>(stop - start).count() /
                           static_cast<double>(samples.size()));
    }
  }
  std::vector<double> medians;
  for (auto& v : per_rep) {
    std::sort(v.begin(), v.end());
    medians.push_back(v.size() % 2 ? v[v.size() / 2]
                                   : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]));
  }
  const double reference = medians[msp_index];
  for (std::size_t d = 0; d < detectors.size(); ++d) {
    DetectorTiming t;
    t.detector = std::string(detect::detector_kind_name(timed[d]->kind()));
    t.seconds_per_sample = medians[d];
    t.ratio_to_msp = d == msp_index ? 1.0 : medians[d] / reference;
    report.entries.push_back(std::move(t));
  }
  return report;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json per_class = nlohmann::json::array();
  for (const auto& c : r.per_class) {
    per_class.push_back({{"name", c.name},
                         {"precision", c.precision},
                         {"recall", c.recall},
                         {"f1", c.f1},
                         {"support", c.support}});
  }
  return {{"ind_accuracy", r.ind_accuracy},
          {"ind_macro_f1", r.ind_macro_f1},
          {"ood_precision", r.ood_precision},
          {"ood_recall", r.ood_recall},
          {"ood_f1", r.ood_f1},
          {"num_samples", r.num_samples},
          {"confusion",
           {{"ind_correct", r.confusion.ind_correct},
            {"ind_misclassified", r.confusion.ind_misclassified},
            {"ind_rejected", r.confusion.ind_rejected},
            {"ood_detected", r.confusion.ood_detected},
            {"ood_accepted", r.confusion.ood_accepted}}},
          {"per_class", per_class}};
}

nlohmann::json to_json(const ScoreStats& s) {
  auto group = [](const GroupStats& g) {
    return nlohmann::json{{"count", g.count}, {"mean", g.mean}, {"variance", g.variance}};
  };
  return {{"ind", group(s.ind)},
          {"ood", group(s.ood)},
          {"bin_edges", s.bin_edges},
          {"ind_counts", s.ind_counts},
          {"ood_counts", s.ood_counts}};
}

nlohmann::json to_json(const AggregateReport& a) {
  auto m = [](const MetricSummary& s) { return nlohmann::json{{"mean", s.mean}, {"std", s.std}}; };
  return {{"runs", a.runs},
          {"ind_accuracy", m(a.ind_accuracy)},
          {"ind_macro_f1", m(a.ind_macro_f1)},
          {"ood_precision", m(a.ood_precision)},
          {"ood_recall", m(a.ood_recall)},
          {"ood_f1", m(a.ood_f1)}};
}

nlohmann::json to_json(const TimingReport& t) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : t.entries) {
    entries.push_back({{"detector", e.detector},
                       {"seconds_per_sample", e.seconds_per_sample},
                       {"ratio_to_msp", e.ratio_to_msp}});
  }
  return {{"samples", t.samples},
          {"repetitions", t.repetitions},
          {"detectors", entries},
          {"warnings", t.warnings}};
}

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string histogram_csv(const ScoreStats& s) {
  std::string out = "bin_left,bin_right,count_ind,count_ood\n";
  for (std::size_t b = 0; b < s.ind_counts.size(); ++b) {
    out += format_real(s.bin_edges[b]) + "," + format_real(s.bin_edges[b + 1]) + "," +
           std::to_string(s.ind_counts[b]) + "," + std::to_string(s.ood_counts[b]) + "\n";
  }
  return out;
}

std::string score_dump_csv(std::span<const ScoreRecord> records) {
  std::string out = std::string(kScoreDumpHeader) + "\n";
  for (const auto& r : records) {
    out += r.id + "," + r.gold + "," + format_real(r.confidence) + "," + r.prediction + "\n";
  }
  return out;
}

void write_score_dump(const std::filesystem::path& path, std::span<const ScoreRecord> records) {
  write_file_atomic(path, score_dump_csv(records));
}

std::vector<ScoreRecord> read_score_dump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open score dump '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != kScoreDumpHeader) {
    throw LoadError("score dump '" + path.string() + "' lacks the header '" +
                    kScoreDumpHeader + "'");
  }
  std::vector<ScoreRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (fields.size() != 4) {
      throw LoadError("score dump line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields");
    }
    ScoreRecord r;
    r.id = fields[0];
    r.gold = fields[1];
    const auto& c = fields[2];
    auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), r.confidence);
    if (ec != std::errc() || ptr != c.data() + c.size()) {
      throw LoadError("score dump line " + std::to_string(line_no) + ": bad confidence");
    }
    r.prediction = fields[3];
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace eood::eval
