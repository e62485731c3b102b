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
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "eood/detect.h"
#include "eood/errors.h"
#include "eood/io.h"

namespace eood::detect {
namespace {

using nlohmann::json;

json encode_real(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double decode_real(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

json encode_matrix(const numeric::Matrix& m) {
  return {{"rows", m.rows()},
          {"cols", m.cols()},
          {"data", std::vector<double>(m.data().begin(), m.data().end())}};
}

numeric::Matrix decode_matrix(const json& j) {
  numeric::Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto values = j.at("data").get<std::vector<double>>();
  if (values.size() != m.rows() * m.cols()) throw LoadError("matrix size mismatch");
  std::copy(values.begin(), values.end(), m.data().begin());
  return m;
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

DetectorKind parse_detector_kind(std::string_view name) {
  if (name == "energy") return DetectorKind::kEnergy;
  if (name == "msp") return DetectorKind::kMsp;
  if (name == "gda") return DetectorKind::kGda;
  if (name == "lof") return DetectorKind::kLof;
  if (name == "nplus1" || name == "n+1") return DetectorKind::kNPlusOne;
  throw ConfigError("unknown detector '" + std::string(name) + "'");
}

std::string_view detector_kind_name(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::kEnergy: return "energy";
    case DetectorKind::kMsp: return "msp";
    case DetectorKind::kGda: return "gda";
    case DetectorKind::kLof: return "lof";
    case DetectorKind::kNPlusOne: return "nplus1";
  }
  return "?";
}

ModelOutputs run_model(const model::ClassifierModel& model, std::span<const double> x) {
  model::ForwardCache cache;
  model::forward(model, x, false, nullptr, cache);
  return {std::move(cache.logits), std::move(cache.hidden)};
}

Detector Detector::energy(double temperature) {
  if (!(temperature > 0.0)) throw ArgumentError("energy detector: temperature must be > 0");
  Detector d(DetectorKind::kEnergy);
  d.temperature_ = temperature;
  return d;
}

Detector Detector::msp() { return Detector(DetectorKind::kMsp); }

Detector Detector::n_plus_one() {
  Detector d(DetectorKind::kNPlusOne);
  d.threshold_ = 0.0;
  return d;
}

Detector Detector::gda(GdaModel m) {
  Detector d(DetectorKind::kGda);
  d.gda_ = std::move(m);
  return d;
}

Detector Detector::lof(LofModel m) {
  Detector d(DetectorKind::kLof);
  d.lof_ = std::move(m);
  return d;
}

Detector Detector::fit(DetectorKind kind, const model::ClassifierModel& model,
                       const data::EncodedSplit& train, const DetectorParams& params) {
  switch (kind) {
    case DetectorKind::kEnergy: return energy(params.temperature);
    case DetectorKind::kMsp: return msp();
    case DetectorKind::kNPlusOne: return n_plus_one();
    case DetectorKind::kGda:
    case DetectorKind::kLof: break;
  }
  numeric::Matrix features(0, model.hidden_dim());
  for (std::size_t i = 0; i < train.ind_size(); ++i) {
    features.append_row(model::hidden_features(model, train.ind_features.row(i)));
  }
  if (kind == DetectorKind::kGda) {
    return gda(fit_gda(features, train.ind_labels, model.num_classes(), params.gda_ridge));
  }
  return lof(fit_lof(std::move(features), params.lof_k));
}

double Detector::confidence(const ModelOutputs& outputs) const {
  switch (kind_) {
    case DetectorKind::kEnergy: return energy_confidence(outputs.logits, temperature_);
    case DetectorKind::kMsp: return msp_score(outputs.logits);
    case DetectorKind::kGda: return gda_confidence(*gda_, outputs.hidden);
    case DetectorKind::kLof: return lof_confidence(*lof_, outputs.hidden);
    case DetectorKind::kNPlusOne: {
      const auto& l = outputs.logits;
      if (l.size() < 2) throw ArgumentError("N+1 detector needs at least two logits");
      const double best_ind = *std::max_element(l.begin(), l.end() - 1);
      return best_ind - l.back();
    }
  }
  return 0.0;
}

double Detector::threshold() const {
  if (!threshold_) {
    throw StateError("detector '" + std::string(detector_kind_name(kind_)) +
                     "' has not been calibrated");
  }
  return *threshold_;
}

void Detector::set_threshold(double t) {
  if (kind_ == DetectorKind::kNPlusOne) {
    throw StateError("the N+1 detector has a fixed decision rule");
  }
  threshold_ = t;
}

ThresholdChoice calibrate(Detector& detector, const model::ClassifierModel& model,
                          const data::EncodedSplit& split) {
  std::vector<double> conf;
  std::vector<data::Domain> domains;
  for (std::size_t i = 0; i < split.ind_size(); ++i) {
    conf.push_back(detector.confidence(run_model(model, split.ind_features.row(i))));
    domains.push_back(data::Domain::kInd);
  }
  for (std::size_t i = 0; i < split.ood_size(); ++i) {
    conf.push_back(detector.confidence(run_model(model, split.ood_features.row(i))));
    domains.push_back(data::Domain::kOod);
  }
  if (detector.kind() == DetectorKind::kNPlusOne) {
    ThresholdChoice fixed{0.0, ood_f1_at(conf, domains, 0.0)};
    detector.calibration_ood_f1 = fixed.ood_f1;
    return fixed;
  }
  const ThresholdChoice choice = calibrate_threshold(conf, domains);
  detector.set_threshold(choice.threshold);
  detector.calibration_ood_f1 = choice.ood_f1;
  return choice;
}

data::ClassLabel decide(const Detector& detector, const ModelOutputs& outputs) {
  if (detector.confidence(outputs) < detector.threshold()) return data::kOodClass;
  std::span<const double> ind(outputs.logits);
  if (detector.kind() == DetectorKind::kNPlusOne) ind = ind.first(ind.size() - 1);
  return static_cast<data::ClassLabel>(argmax(ind));
}

data::ClassLabel predict(const model::ClassifierModel& model, const Detector& detector,
                         std::span<const double> x) {
  if (!detector.calibrated()) detector.threshold();  // throws StateError
  return decide(detector, run_model(model, x));
}

void save_detector(const Detector& detector, const std::filesystem::path& path) {
  json j;
  j["format"] = "eood-detector";
  j["version"] = kDetectorVersion;
  j["kind"] = detector_kind_name(detector.kind());
  j["temperature"] = detector.temperature();
  j["threshold"] = detector.calibrated() ? encode_real(detector.threshold()) : json(nullptr);
  j["calibration_ood_f1"] =
      detector.calibration_ood_f1 ? json(*detector.calibration_ood_f1) : json(nullptr);
  if (const GdaModel* g = detector.gda_model()) {
    j["gda"] = {{"centroids", encode_matrix(g->centroids)},
                {"lower", encode_matrix(g->covariance.lower())},
                {"ridge", g->covariance.ridge()}};
  }
  if (const LofModel* l = detector.lof_model()) {
    j["lof"] = {{"k", l->k()}, {"store", encode_matrix(l->store())}};
  }
  write_file_atomic(path, j.dump());
}

Detector load_detector(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open detector state '" + path.string() + "'");
  try {
    json j;
    in >> j;
    if (j.value("format", "") != "eood-detector") {
      throw LoadError("'" + path.string() + "' is not a detector state file");
    }
    const int version = j.at("version").get<int>();
    if (version != kDetectorVersion) {
      throw VersionError("detector state version mismatch: expected " +
                         std::to_string(kDetectorVersion) + ", found " +
                         std::to_string(version));
    }
    const DetectorKind kind = parse_detector_kind(j.at("kind").get<std::string>());
    Detector d = Detector::msp();
    switch (kind) {
      case DetectorKind::kEnergy: d = Detector::energy(j.at("temperature").get<double>()); break;
      case DetectorKind::kMsp: break;
      case DetectorKind::kNPlusOne: d = Detector::n_plus_one(); break;
      case DetectorKind::kGda: {
        const auto& g = j.at("gda");
        d = Detector::gda(make_gda(
            decode_matrix(g.at("centroids")),
            numeric::SpdFactor::from_lower(decode_matrix(g.at("lower")),
                                           g.at("ridge").get<double>())));
        break;
      }
      case DetectorKind::kLof: {
        const auto& l = j.at("lof");
        d = Detector::lof(fit_lof(decode_matrix(l.at("store")), l.at("k").get<std::size_t>()));
        break;
      }
    }
    if (kind != DetectorKind::kNPlusOne && !j.at("threshold").is_null()) {
      d.set_threshold(decode_real(j.at("threshold")));
    }
    if (!j.at("calibration_ood_f1").is_null()) {
      d.calibration_ood_f1 = j.at("calibration_ood_f1").get<double>();
    }
    return d;
  } catch (const json::exception& e) {
    throw LoadError("malformed detector state '" + path.string() + "': " + e.what());
  }
}

}  // namespace eood::detect
