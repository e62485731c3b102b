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

#include <algorithm>
#include <limits>
#include <numeric>

#include "eood/detect.h"
#include "eood/errors.h"

namespace eood::detect {
namespace {

double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

}  // namespace

double ood_f1_at(std::span<const double> confidences, std::span<const data::Domain> domains,
                 double threshold) {
  if (confidences.size() != domains.size()) {
    throw ArgumentError("ood_f1_at: length mismatch");
  }
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    const bool called_ood = confidences[i] < threshold;
    const bool is_ood = domains[i] == data::Domain::kOod;
    tp += called_ood && is_ood;
    fp += called_ood && !is_ood;
    fn += !called_ood && is_ood;
  }
  return f1(tp, fp, fn);
}

ThresholdChoice calibrate_threshold(std::span<const double> confidences,
                                    std::span<const data::Domain> domains) {
  if (confidences.size() != domains.size()) {
    throw ArgumentError("calibrate_threshold: length mismatch");
  }
  const std::size_t total_ood = static_cast<std::size_t>(
      std::count(domains.begin(), domains.end(), data::Domain::kOod));
  if (total_ood == 0 || total_ood == domains.size()) {
    throw CalibrationError("calibrate_threshold: need both IND and OOD samples");
  }
  std::vector<std::size_t> order(confidences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return confidences[a] < confidences[b]; });

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // -inf calls nothing OOD, which scores F1 = 0.
  ThresholdChoice best{-kInf, 0.0};
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double v = confidences[order[i]];
    for (; i < order.size() && confidences[order[i]] == v; ++i) {
      if (domains[order[i]] == data::Domain::kOod) {
        ++tp;
      } else {
        ++fp;
      }
    }
    double t = kInf;
    if (i < order.size()) {
      const double next = confidences[order[i]];
      t = v + (next - v) / 2.0;
      // Adjacent doubles have no midpoint; `next` still separates the groups.
      if (!(t > v)) t = next;
    }
    const double score = f1(tp, fp, total_ood - tp);
    if (score > best.ood_f1) best = {t, score};
  }
  return best;
}

}  // namespace eood::detect
