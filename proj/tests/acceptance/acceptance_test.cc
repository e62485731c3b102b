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

// Offline acceptance gate. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Criteria that need the CLINC-Small data
// live in acceptance_clinc.cc.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "eood/detect.h"
#include "eood/eval.h"
#include "eood/fixture.h"
#include "eood/pipeline.h"
#include "eood/scores.h"
#include "../test_support.h"

namespace {

using namespace eood;
using data::Domain;
using numeric::Vector;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1. log(msp) = max(logits) + energy(T=1) on random logit vectors.
Outcome softmax_energy_identity() {
  numeric::Rng rng(2024);
  std::uniform_int_distribution<int> classes(2, 200);
  std::uniform_real_distribution<double> entry(-50.0, 50.0);
  double worst = 0.0;
  Vector logits;
  for (int i = 0; i < 10000; ++i) {
    logits.resize(classes(rng));
    for (double& v : logits) v = entry(rng);
    const double hi = *std::max_element(logits.begin(), logits.end());
    const double err =
        std::abs(std::log(detect::msp_score(logits)) - hi - detect::energy_score(logits, 1.0));
    worst = std::max(worst, err);
  }
  return {worst < 1e-10, fmt("max |err| = %.3g over 10000 vectors (tol 1e-10)", worst)};
}

// 2. Central finite differences for every objective.
Outcome gradient_checks() {
  std::string detail;
  bool pass = true;
  for (auto o : {model::Objective::kCrossEntropy, model::Objective::kNPlusOne,
                 model::Objective::kMargin, model::Objective::kEntropy,
                 model::Objective::kBound}) {
    const double err = testing::gradient_check_error(o);
    pass = pass && err < 1e-4;
    detail += fmt("%s %.2g; ", std::string(model::objective_name(o)).c_str(), err);
  }
  return {pass, detail + "(tol 1e-4)"};
}

// 3. Library against brute-force references on random small instances.
Outcome oracle_equivalence() {
  numeric::Rng rng(77);
  std::normal_distribution<double> g;
  int calib_bad = 0, metric_bad = 0, lof_bad = 0, gda_bad = 0;
  constexpr int kInstances = 150;

  for (int t = 0; t < kInstances; ++t) {
    const std::size_t n = 2 + t % 30;
    std::uniform_int_distribution<int> level(-5, 5);
    std::vector<double> conf(n);
    std::vector<Domain> dom(n);
    for (std::size_t i = 0; i < n; ++i) {
      conf[i] = t % 2 ? level(rng) : g(rng);
      dom[i] = rng() % 3 ? Domain::kInd : Domain::kOod;
    }
    dom[0] = Domain::kOod;
    dom[1] = Domain::kInd;
    const auto got = detect::calibrate_threshold(conf, dom);
    const auto [t_ref, f1_ref] = testing::oracle_calibrate(conf, dom);
    calib_bad += got.threshold != t_ref || std::abs(got.ood_f1 - f1_ref) > 1e-12;
  }

  for (int t = 0; t < kInstances; ++t) {
    const std::size_t k = 1 + t % 7, n = 1 + t % 50;
    std::uniform_int_distribution<int> label(-1, static_cast<int>(k) - 1);
    std::vector<int> gold(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      gold[i] = label(rng);
      pred[i] = rng() % 2 ? gold[i] : label(rng);
    }
    const auto r = eval::compute_metrics(pred, gold, k);
    const auto o = testing::oracle_metrics(pred, gold, k);
    metric_bad += std::abs(r.ind_accuracy - o.ind_accuracy) > 1e-12 ||
                  std::abs(r.ind_macro_f1 - o.ind_macro_f1) > 1e-12 ||
                  std::abs(r.ood_precision - o.ood_precision) > 1e-12 ||
                  std::abs(r.ood_recall - o.ood_recall) > 1e-12 ||
                  std::abs(r.ood_f1 - o.ood_f1) > 1e-12;
  }

  for (int t = 0; t < kInstances; ++t) {
    const std::size_t n = 6 + t % 25, d = 1 + t % 4, k = 1 + t % 5;
    std::vector<std::vector<double>> rows;
    numeric::Matrix store;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> r(d);
      for (double& v : r) v = g(rng);
      rows.push_back(r);
      store.append_row(r);
    }
    const auto m = detect::fit_lof(store, k);
    std::vector<double> q(d);
    for (double& v : q) v = 2.0 * g(rng);
    const double want = testing::oracle_lof(rows, k, q);
    lof_bad += std::abs(detect::lof_score(m, q) - want) > 1e-9 * want;
  }

  for (int t = 0; t < kInstances; ++t) {
    const std::size_t k = 2 + t % 4, d = 1 + t % 5, n = k * (3 + t % 3);
    std::vector<std::vector<double>> xs;
    std::vector<int> labels;
    numeric::Matrix x;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> r(d);
      for (double& v : r) v = g(rng) + 2.0 * static_cast<double>(i % k);
      xs.push_back(r);
      labels.push_back(static_cast<int>(i % k));
      x.append_row(r);
    }
    const auto m = detect::fit_gda(x, labels, k, 0.05);
    std::vector<double> q(d);
    for (double& v : q) v = 3.0 * g(rng);
    const double want = testing::oracle_gda_confidence(xs, labels, k, 0.05, q);
    gda_bad += std::abs(detect::gda_confidence(m, q) - want) > 1e-8 * (1 + std::abs(want));
  }

  return {calib_bad + metric_bad + lof_bad + gda_bad == 0,
          fmt("mismatches out of %d each: calibrate %d, metrics %d, lof %d, gda %d",
              kInstances, calib_bad, metric_bad, lof_bad, gda_bad)};
}

// Shared fixture runs for criteria 4 and 7.
struct FixtureRuns {
  std::vector<cli::RunResult> ce, margin;
};

const FixtureRuns& fixture_runs() {
  static const FixtureRuns runs = [] {
    testing::TempDir dir;
    const auto dataset = testing::load_fixture(dir.path(), cli::FixtureSpec{});
    FixtureRuns r;
    cli::RunConfig ce;
    ce.detector = detect::DetectorKind::kEnergy;
    cli::RunConfig margin = ce;
    margin.train.objective = model::Objective::kMargin;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      r.ce.push_back(cli::run_experiment(dataset, ce, seed));
      r.margin.push_back(cli::run_experiment(dataset, margin, seed));
    }
    return r;
  }();
  return runs;
}

// 4. CE-only training with energy scoring separates the fixture's OOD blob.
Outcome fixture_separation() {
  double mean = 0;
  std::string per_seed;
  for (const auto& r : fixture_runs().ce) {
    mean += r.test.report.ood_f1 / 5;
    per_seed += fmt("%.3f ", r.test.report.ood_f1);
  }
  return {mean >= 0.95, fmt("mean test OOD F1 %.4f (need >= 0.95); seeds: %s", mean,
                            per_seed.c_str())};
}

// 7 (fixture half). Margin training shrinks both confidence variances.
Outcome fixture_variance() {
  const auto& runs = fixture_runs();
  bool pass = true;
  std::string detail;
  for (std::size_t s = 0; s < runs.ce.size(); ++s) {
    const auto& a = runs.ce[s].test;
    const auto& b = runs.margin[s].test;
    const auto ce = eval::score_stats(a.confidences, a.domains);
    const auto mg = eval::score_stats(b.confidences, b.domains);
    pass = pass && mg.ind.variance < ce.ind.variance && mg.ood.variance < ce.ood.variance;
    detail += fmt("seed %zu ind %.3g->%.3g ood %.3g->%.3g; ", s, ce.ind.variance,
                  mg.ind.variance, ce.ood.variance, mg.ood.variance);
  }
  return {pass, "CE->margin variance, " + detail};
}

// 10. Scoring cost relative to MSP at CLINC-like sizes.
Outcome timing_ratios() {
  constexpr std::size_t kInput = 300, kHidden = 128, kClasses = 150, kTrainRows = 7500;
  numeric::Rng rng(10);
  std::normal_distribution<double> g;
  data::EncodedDataset d;
  d.feature_dim = kInput;
  for (std::size_t c = 0; c < kClasses; ++c) d.intent_names.push_back(fmt("intent_%03zu", c));
  Vector x(kInput);
  auto fill = [&](data::EncodedSplit& s, std::size_t ind_rows, std::size_t ood_rows) {
    for (std::size_t i = 0; i < ind_rows; ++i) {
      for (double& v : x) v = g(rng);
      x[i % kInput] += 3.0;
      s.ind_features.append_row(x);
      s.ind_labels.push_back(static_cast<int>(i % kClasses));
    }
    for (std::size_t i = 0; i < ood_rows; ++i) {
      for (double& v : x) v = g(rng);
      s.ood_features.append_row(x);
    }
  };
  fill(d.train, kTrainRows, 0);
  fill(d.validation, 600, 100);
  fill(d.test, 900, 100);
  model::ClassifierModel m(kInput, kHidden, kClasses, 0.5);
  m.initialize(1);
  m.set_class_names(d.intent_names);

  const auto report = cli::run_benchmark(m, d, detect::DetectorParams{}, 5);
  double energy = 0, gda = 0, lof = 0;
  for (const auto& e : report.entries) {
    if (e.detector == "energy") energy = e.ratio_to_msp;
    if (e.detector == "gda") gda = e.ratio_to_msp;
    if (e.detector == "lof") lof = e.ratio_to_msp;
  }
  return {energy <= 1.1 && gda >= 5.0 && lof >= 5.0,
          fmt("ratio to MSP: energy %.3f (<= 1.1), gda %.1f (>= 5), lof %.1f (>= 5); "
              "%zu classes, hidden %zu, LOF store %zu",
              energy, gda, lof, kClasses, kHidden, kTrainRows)};
}

struct Criterion {
  const char* id;
  const char* name;
  double time_limit_s;  // 0 = no limit
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"1", "softmax-energy identity", 1.0, softmax_energy_identity},
      {"2", "gradient correctness", 10.0, gradient_checks},
      {"3", "oracle equivalence", 30.0, oracle_equivalence},
      {"4", "fixture end-to-end separation", 120.0, fixture_separation},
      {"7f", "variance shrinkage (fixture)", 0.0, fixture_variance},
      {"10", "timing ratios", 0.0, timing_ratios},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt("%.2f s", secs);
    if (c.time_limit_s > 0) {
      timing += fmt(" (limit %.0f s)", c.time_limit_s);
      if (secs >= c.time_limit_s) {
        o.pass = false;
        timing += " TOO SLOW";
      }
    }
    failures += !o.pass;
    std::printf("%s criterion %-3s %-32s %s [%s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
