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

#ifndef EOOD_DETECT_H_
#define EOOD_DETECT_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "eood/data.h"
#include "eood/model.h"
#include "eood/numeric.h"
#include "eood/scores.h"

namespace eood::detect {

// ---------------------------------------------------------------------------
// Gaussian discriminant analysis: per-class centroids with one shared
// covariance.

struct GdaModel {
  numeric::Matrix centroids;           // K x d
  numeric::SpdFactor covariance;       // pooled within-class, ridged
  numeric::Matrix whitened_centroids;  // rows L^{-1} mu_k

  std::size_t num_classes() const { return centroids.rows(); }
  std::size_t dim() const { return centroids.cols(); }
};

// Centroids are class means; covariance is the pooled within-class scatter
// divided by the total count. Without an explicit ridge the default is
// 1e-6 * trace / d. Throws FitError for a class with fewer than 2 samples or
// an indefinite covariance, ArgumentError for labels outside [0, K).
GdaModel fit_gda(const numeric::Matrix& features, std::span<const data::ClassLabel> labels,
                 std::size_t num_classes, std::optional<double> ridge = std::nullopt);

// Recomputes the whitened centroids from centroids and factor.
GdaModel make_gda(numeric::Matrix centroids, numeric::SpdFactor covariance);

// Negative squared Mahalanobis distance to the nearest centroid.
double gda_confidence(const GdaModel& m, std::span<const double> x);

// ---------------------------------------------------------------------------
// Local outlier factor over a stored training set (Euclidean distance,
// exactly k neighbours, ties broken by lower index).

class LofModel {
 public:
  const numeric::Matrix& store() const { return store_; }
  std::size_t k() const { return k_; }
  std::span<const double> k_distances() const { return k_distance_; }
  std::span<const double> local_reachability() const { return lrd_; }

 private:
  friend LofModel fit_lof(numeric::Matrix features, std::size_t k);
  numeric::Matrix store_;
  std::size_t k_ = 0;
  std::vector<double> k_distance_;
  std::vector<double> lrd_;
};

// Throws FitError unless 1 <= k < number of rows.
LofModel fit_lof(numeric::Matrix features, std::size_t k);

// LOF(x): about 1 for inliers, well above 1 for outliers.
double lof_score(const LofModel& m, std::span<const double> x);
inline double lof_confidence(const LofModel& m, std::span<const double> x) {
  return -lof_score(m, x);
}
// LOF of stored row `i` with the row itself excluded from its neighbours.
double training_lof(const LofModel& m, std::size_t i);

// ---------------------------------------------------------------------------
// Threshold calibration.

struct ThresholdChoice {
  double threshold = 0.0;
  double ood_f1 = 0.0;
};

// OOD F1 when every sample with confidence < threshold is called OOD.
double ood_f1_at(std::span<const double> confidences, std::span<const data::Domain> domains,
                 double threshold);

// Best OOD F1 over the midpoints between consecutive distinct confidences and
// the two infinite sentinels; ties go to the smallest threshold. Throws
// CalibrationError unless both domains are present.
ThresholdChoice calibrate_threshold(std::span<const double> confidences,
                                    std::span<const data::Domain> domains);

// ---------------------------------------------------------------------------
// Detectors.

enum class DetectorKind { kEnergy, kMsp, kGda, kLof, kNPlusOne };

DetectorKind parse_detector_kind(std::string_view name);
std::string_view detector_kind_name(DetectorKind kind);

struct ModelOutputs {
  numeric::Vector logits;
  numeric::Vector hidden;
};

ModelOutputs run_model(const model::ClassifierModel& model, std::span<const double> x);

struct DetectorParams {
  double temperature = 0.8;
  std::size_t lof_k = 20;
  std::optional<double> gda_ridge;
};

class Detector {
 public:
  // GDA and LOF are fitted on the hidden features of the IND training rows.
  static Detector fit(DetectorKind kind, const model::ClassifierModel& model,
                      const data::EncodedSplit& train, const DetectorParams& params);

  static Detector energy(double temperature);
  static Detector msp();
  static Detector n_plus_one();
  static Detector gda(GdaModel m);
  static Detector lof(LofModel m);

  DetectorKind kind() const { return kind_; }
  double temperature() const { return temperature_; }
  const GdaModel* gda_model() const { return gda_ ? &*gda_ : nullptr; }
  const LofModel* lof_model() const { return lof_ ? &*lof_ : nullptr; }

  // Higher means more in-domain. For N+1 this is the best IND logit minus
  // the OOD logit.
  double confidence(const ModelOutputs& outputs) const;

  bool calibrated() const { return threshold_.has_value(); }
  // Throws StateError when not calibrated.
  double threshold() const;
  void set_threshold(double t);

  // OOD F1 reached on the calibration data, recorded for later comparison.
  std::optional<double> calibration_ood_f1;

 private:
  explicit Detector(DetectorKind kind) : kind_(kind) {}

  DetectorKind kind_;
  double temperature_ = 1.0;
  std::optional<double> threshold_;
  std::optional<GdaModel> gda_;
  std::optional<LofModel> lof_;
};

// Calibrates `detector` on every row of `split` (IND and OOD).
ThresholdChoice calibrate(Detector& detector, const model::ClassifierModel& model,
                          const data::EncodedSplit& split);

// kOodClass when the confidence falls strictly below the threshold (N+1:
// when the OOD logit wins), else the argmax over the in-domain logits.
data::ClassLabel decide(const Detector& detector, const ModelOutputs& outputs);

data::ClassLabel predict(const model::ClassifierModel& model, const Detector& detector,
                         std::span<const double> x);

inline constexpr int kDetectorVersion = 1;

void save_detector(const Detector& detector, const std::filesystem::path& path);
// Throws VersionError on a version mismatch.
Detector load_detector(const std::filesystem::path& path);

}  // namespace eood::detect

#endif  // EOOD_DETECT_H_
