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

#include <cmath>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "eood/errors.h"
#include "eood/model.h"
#include "eood/numeric.h"
#include "eood/objectives.h"
#include "eood/scores.h"
#include "eood/train.h"
#include "test_support.h"

namespace eood::model {
namespace {

using numeric::Vector;

TEST(Forward, ZeroParametersGiveZeroLogits) {
  ClassifierModel m(3, 4, 5, 0.0);
  const auto logits = forward_logits(m, Vector{1, -2, 3});
  EXPECT_EQ(logits, Vector(5, 0.0));
}

TEST(Forward, HandComputedOneByOneByTwo) {
  ClassifierModel m(1, 1, 2, 0.0);
  m.w1()[0] = 2.0;
  m.b1()[0] = -0.5;
  m.w2()[0] = 3.0;
  m.w2()[1] = -1.0;
  m.b2()[0] = 0.25;
  m.b2()[1] = 1.0;
  // hidden = relu(2 * 1 - 0.5) = 1.5; logits = [3 * 1.5 + 0.25, -1.5 + 1].
  EXPECT_EQ(forward_logits(m, Vector{1.0}), (Vector{4.75, -0.5}));
  EXPECT_EQ(hidden_features(m, Vector{1.0}), (Vector{1.5}));
  // Negative pre-activation is rectified away.
  EXPECT_EQ(forward_logits(m, Vector{-1.0}), (Vector{0.25, 1.0}));
}

TEST(Forward, InferenceIsDeterministicAndChecksDimensions) {
  ClassifierModel m(3, 8, 4, 0.5);
  m.initialize(9);
  const Vector x{0.3, -1.0, 2.0};
  EXPECT_EQ(forward_logits(m, x), forward_logits(m, x));
  EXPECT_THROW(forward_logits(m, Vector{1.0}), ArgumentError);
  ForwardCache cache;
  EXPECT_THROW(forward(m, x, true, nullptr, cache), ArgumentError);
}

TEST(CrossEntropy, Examples) {
  const auto uniform = cross_entropy(Vector{0, 0, 0, 0}, 2);
  EXPECT_NEAR(uniform.loss, std::log(4.0), 1e-15);
  const auto sharp = cross_entropy(Vector{10, -10}, 0);
  const double expected = numeric::logsumexp(Vector{10, -10}) - 10;
  EXPECT_NEAR(sharp.loss, expected, 1e-20);
  EXPECT_NEAR(sharp.loss, 2.06e-9, 0.01e-9);
  EXPECT_NEAR(sharp.grad[0], -2.06e-9, 0.01e-9);
  EXPECT_NEAR(sharp.grad[1], 2.06e-9, 0.01e-9);
}

TEST(CrossEntropy, GradientSumsToZero) {
  numeric::Rng rng(1);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int t = 0; t < 200; ++t) {
    Vector l(2 + t % 30);
    for (double& v : l) v = u(rng);
    const auto ce = cross_entropy(l, t % l.size());
    double s = 0;
    for (double g : ce.grad) s += g;
    EXPECT_NEAR(s, 0.0, 1e-12);
  }
}

TEST(MarginLoss, Examples) {
  EXPECT_EQ(margin_loss(-30, -5, 19), 0.0);
  EXPECT_EQ(margin_loss(-10, -5, 19), 14.0);
  EXPECT_EQ(margin_loss(-3, -3, 0), 0.0);
  const auto tie = margin_term(-3, -3, 0);
  EXPECT_EQ(tie.grad_ind, 0.0);
  EXPECT_EQ(tie.grad_ood, 0.0);
  const auto active = margin_term(-10, -5, 19);
  EXPECT_EQ(active.grad_ind, 1.0);
  EXPECT_EQ(active.grad_ood, -1.0);
}

TEST(EntropyReg, Examples) {
  EXPECT_NEAR(entropy_reg_loss(Vector(150, 0.0)), -std::log(150.0), 1e-12);
  EXPECT_NEAR(entropy_reg_loss(Vector{50, 0, 0}), 0.0, 1e-18);
  numeric::Rng rng(2);
  std::uniform_real_distribution<double> u(-40, 40);
  for (int t = 0; t < 300; ++t) {
    Vector l(1 + t % 50);
    for (double& v : l) v = u(rng);
    const double h = entropy_reg_loss(l);
    EXPECT_LE(h, 1e-15);
    EXPECT_GE(h, -std::log(static_cast<double>(l.size())) - 1e-12);
  }
}

TEST(BoundLoss, Examples) {
  EXPECT_EQ(bound_loss(-25, -7, -25, -7), 0.0);
  EXPECT_EQ(bound_loss(-23, -7, -25, -7), 4.0);
  EXPECT_EQ(bound_loss(-30, -2, -25, -7), 0.0);
}

TEST(EnergyGrad, MatchesFiniteDifference) {
  const Vector l{0.3, -1.2, 2.0, 0.7};
  for (double temp : {0.5, 0.8, 2.0}) {
    const auto g = energy_grad(l, temp);
    for (std::size_t i = 0; i < l.size(); ++i) {
      Vector up = l, down = l;
      up[i] += 1e-6;
      down[i] -= 1e-6;
      const double fd =
          (detect::energy_score(up, temp) - detect::energy_score(down, temp)) / 2e-6;
      EXPECT_NEAR(g[i], fd, 1e-8);
    }
  }
}

class GradientCheck : public ::testing::TestWithParam<Objective> {};

TEST_P(GradientCheck, AnalyticMatchesFiniteDifference) {
  EXPECT_LT(testing::gradient_check_error(GetParam()), 1e-4);
}

INSTANTIATE_TEST_SUITE_P(AllObjectives, GradientCheck,
                         ::testing::Values(Objective::kCrossEntropy, Objective::kNPlusOne,
                                           Objective::kMargin, Objective::kEntropy,
                                           Objective::kBound),
                         [](const auto& info) {
                           std::string n(objective_name(info.param));
                           for (char& c : n) {
                             if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
                           }
                           return n;
                         });

TEST(Adam, ZeroGradientIsFixedPoint) {
  std::vector<double> p{1.0, -2.0};
  AdamState s;
  adam_step(p, std::vector<double>{0.0, 0.0}, s, 0.1);
  EXPECT_EQ(p, (std::vector<double>{1.0, -2.0}));
}

TEST(Adam, FirstStepIsBiasCorrected) {
  std::vector<double> p{1.0, 1.0};
  const std::vector<double> g{0.5, -4.0};
  AdamState s;
  adam_step(p, g, s, 0.1);
  // m_hat = g, v_hat = g^2, so each step is lr * g / (|g| + eps).
  EXPECT_NEAR(p[0], 1.0 - 0.1 * 0.5 / (0.5 + kAdamEpsilon), 1e-15);
  EXPECT_NEAR(p[1], 1.0 + 0.1 * 4.0 / (4.0 + kAdamEpsilon), 1e-15);
}

TEST(Adam, ConstantGradientMovesMonotonically) {
  std::vector<double> p{0.0};
  AdamState s;
  double prev = p[0];
  for (int i = 0; i < 100; ++i) {
    adam_step(p, std::vector<double>{2.0}, s, 0.01);
    EXPECT_LT(p[0], prev);
    prev = p[0];
  }
}

data::EncodedSplit pool(std::size_t n_ind, std::size_t n_ood) {
  data::EncodedSplit s;
  for (std::size_t i = 0; i < n_ind; ++i) {
    s.ind_features.append_row(Vector{static_cast<double>(i)});
    s.ind_labels.push_back(static_cast<int>(i % 3));
  }
  for (std::size_t j = 0; j < n_ood; ++j) s.ood_features.append_row(Vector{-1.0});
  if (n_ood == 0) s.ood_features = numeric::Matrix(0, 1);
  return s;
}

TEST(SampleBatch, MarginBatchesCarryOodQuota) {
  const auto train = pool(7500, 100);
  TrainConfig cfg;
  cfg.objective = Objective::kMargin;
  numeric::Rng rng(0);
  for (int i = 0; i < 100; ++i) {
    const Batch b = sample_batch(train, cfg, rng);
    EXPECT_GE(b.ood.size(), 16u);
    ASSERT_EQ(b.partner.size(), b.ood.size());
    for (auto partner : b.partner) EXPECT_LT(partner, b.ind.size());
    for (auto o : b.ood) EXPECT_LT(o, 100u);
  }
}

TEST(SampleBatch, CrossEntropyHasNoOod) {
  const auto train = pool(500, 100);
  TrainConfig cfg;
  numeric::Rng rng(0);
  for (int i = 0; i < 20; ++i) EXPECT_TRUE(sample_batch(train, cfg, rng).ood.empty());
}

TEST(SampleBatch, SupervisedWithoutOodIsConfigError) {
  const auto train = pool(50, 0);
  TrainConfig cfg;
  cfg.objective = Objective::kEntropy;
  numeric::Rng rng(0);
  EXPECT_THROW(sample_batch(train, cfg, rng), ConfigError);
}

TEST(BatchSampler, EpochCoversEveryIndRowOnce) {
  const auto train = pool(300, 10);
  TrainConfig cfg;
  cfg.objective = Objective::kMargin;
  cfg.batch_size = 64;
  BatchSampler sampler(train, cfg);
  numeric::Rng rng(4);
  std::vector<int> seen(300, 0);
  for (const Batch& b : sampler.next_epoch(rng)) {
    for (auto i : b.ind) ++seen[i];
    EXPECT_GE(b.ood.size(), 1u);
  }
  for (int c : seen) EXPECT_EQ(c, 1);
}

// Two Gaussian blobs far apart in 2-d, plus an OOD blob between them.
data::EncodedDataset blobs(std::uint64_t seed) {
  numeric::Rng rng(seed);
  std::normal_distribution<double> g(0.0, 0.5);
  data::EncodedDataset d;
  d.intent_names = {"left", "right"};
  d.feature_dim = 2;
  auto fill = [&](data::EncodedSplit& s, int n) {
    for (int i = 0; i < n; ++i) {
      const int c = i % 2;
      s.ind_features.append_row(Vector{(c ? 4.0 : -4.0) + g(rng), g(rng)});
      s.ind_labels.push_back(c);
    }
    for (int i = 0; i < n / 4; ++i) s.ood_features.append_row(Vector{g(rng), 4.0 + g(rng)});
  };
  fill(d.train, 80);
  fill(d.validation, 40);
  fill(d.test, 40);
  return d;
}

double accuracy(const ClassifierModel& m, const data::EncodedSplit& s) {
  double hit = 0;
  for (std::size_t i = 0; i < s.ind_size(); ++i) {
    const auto l = forward_logits(m, s.ind_features.row(i));
    hit += static_cast<int>(std::max_element(l.begin(), l.end()) - l.begin()) ==
           s.ind_labels[i];
  }
  return hit / static_cast<double>(s.ind_size());
}

TEST(Train, SeparableBlobsReachFullTrainingAccuracy) {
  const auto d = blobs(1);
  TrainConfig cfg;
  cfg.max_epochs = 50;
  cfg.batch_size = 16;
  cfg.hidden_dim = 16;
  cfg.learning_rate = 1e-2;
  const auto r = train(d, cfg, [&](const ClassifierModel& m) { return accuracy(m, d.train); });
  EXPECT_LE(r.report.epochs_run, 50u);
  EXPECT_EQ(accuracy(r.model, d.train), 1.0);
  EXPECT_EQ(r.model.class_names(), d.intent_names);
}

TEST(Train, SameSeedIsBitwiseReproducible) {
  const auto d = blobs(2);
  TrainConfig cfg;
  cfg.objective = Objective::kMargin;
  cfg.max_epochs = 10;
  cfg.patience = 10;
  cfg.batch_size = 16;
  cfg.hidden_dim = 8;
  cfg.seed = 3;
  auto select = [&](const ClassifierModel& m) { return accuracy(m, d.validation); };
  const auto a = train(d, cfg, select), b = train(d, cfg, select);
  EXPECT_EQ(a.report.epoch_losses, b.report.epoch_losses);
  EXPECT_TRUE(std::equal(a.model.parameters().begin(), a.model.parameters().end(),
                         b.model.parameters().begin()));
  cfg.seed = 4;
  EXPECT_NE(train(d, cfg, select).report.epoch_losses, a.report.epoch_losses);
}

TEST(Train, MarginOpensEnergyGap) {
  const auto d = blobs(5);
  TrainConfig cfg;
  cfg.objective = Objective::kMargin;
  cfg.max_epochs = 150;
  cfg.patience = 150;
  cfg.batch_size = 16;
  cfg.hidden_dim = 32;
  cfg.learning_rate = 1e-2;
  // Selecting on the final epoch keeps the most trained parameters.
  std::size_t calls = 0;
  const auto r = train(d, cfg, [&](const ClassifierModel&) { return double(++calls); });
  auto mean_energy = [&](const numeric::Matrix& rows) {
    double s = 0;
    for (std::size_t i = 0; i < rows.rows(); ++i) {
      s += detect::energy_score(forward_logits(r.model, rows.row(i)), cfg.temperature);
    }
    return s / static_cast<double>(rows.rows());
  };
  EXPECT_LE(mean_energy(d.train.ind_features) + cfg.margin,
            mean_energy(d.train.ood_features));
}

TEST(Train, NPlusOneAddsOodClass) {
  const auto d = blobs(6);
  TrainConfig cfg;
  cfg.objective = Objective::kNPlusOne;
  cfg.max_epochs = 3;
  cfg.patience = 3;
  cfg.hidden_dim = 4;
  const auto r = train(d, cfg, [](const ClassifierModel&) { return 0.0; });
  EXPECT_EQ(r.model.num_classes(), 3u);
  EXPECT_EQ(r.model.class_names().back(), "oos");
}

TEST(Train, PatienceStopsEarly) {
  const auto d = blobs(7);
  TrainConfig cfg;
  cfg.max_epochs = 100;
  cfg.patience = 3;
  cfg.hidden_dim = 4;
  const auto r = train(d, cfg, [](const ClassifierModel&) { return 1.0; });
  EXPECT_EQ(r.report.best_epoch, 1u);
  EXPECT_EQ(r.report.epochs_run, 4u);
}

TEST(TrainConfig, ValidateRejectsBadValues) {
  TrainConfig cfg;
  cfg.temperature = 0;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = TrainConfig{};
  cfg.dropout = 1.0;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = TrainConfig{};
  cfg.max_epochs = 10;
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg.patience = 0;
  EXPECT_THROW(validate(cfg), ConfigError);
  EXPECT_NO_THROW(validate(TrainConfig{}));
}

TEST(Checkpoint, RoundTripAndVersionCheck) {
  testing::TempDir dir;
  ClassifierModel m(3, 5, 4, 0.25);
  m.initialize(8);
  m.set_class_names({"a", "b", "c", "d"});
  save_checkpoint(m, dir / "ck.json");
  const auto back = load_checkpoint(dir / "ck.json");
  EXPECT_EQ(back.input_dim(), 3u);
  EXPECT_EQ(back.hidden_dim(), 5u);
  EXPECT_EQ(back.dropout_rate(), 0.25);
  EXPECT_EQ(back.class_names(), m.class_names());
  EXPECT_TRUE(std::equal(m.parameters().begin(), m.parameters().end(),
                         back.parameters().begin(), back.parameters().end()));

  auto j = nlohmann::json::parse(testing::read_text(dir / "ck.json"));
  j["version"] = kCheckpointVersion + 1;
  testing::write_text(dir / "old.json", j.dump());
  try {
    load_checkpoint(dir / "old.json");
    FAIL() << "expected VersionError";
  } catch (const VersionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(std::to_string(kCheckpointVersion)), std::string::npos) << msg;
    EXPECT_NE(msg.find(std::to_string(kCheckpointVersion + 1)), std::string::npos) << msg;
  }
}

}  // namespace
}  // namespace eood::model
