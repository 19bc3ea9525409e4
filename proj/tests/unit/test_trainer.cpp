// Copyright 2026 The bitesense Authors.
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


#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "bitesense/rng.hpp"
#include "bitesense/trainer.hpp"
#include "test_util.hpp"

namespace bitesense {
namespace {

WindowedDataset blobs(std::size_t n, std::size_t w, std::uint64_t seed) {
  WindowedDataset ds;
  ds.window_size = w;
  ds.step = w;
  ds.class_map = ClassMap::make({"eating", "other"}, "eating");
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto label = static_cast<std::uint16_t>(rng.uniform_index(2));
    for (std::size_t t = 0; t < w; ++t) {
      ds.values.push_back(static_cast<float>((label ? -1.0 : 1.0) + rng.normal(0, 0.5)));
      ds.values.push_back(static_cast<float>(rng.normal(0, 0.5)));
      ds.values.push_back(static_cast<float>(rng.normal(0, 0.5)));
    }
    ds.labels.push_back(label);
    ds.sources.push_back({i, 0});
  }
  return ds;
}

SplitPair small_split() {
  SplitPair sp;
  sp.train = blobs(40, 12, 1);
  sp.test = blobs(16, 12, 2);
  return sp;
}

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.window_size = 12;
  cfg.step = 12;
  cfg.fc_units = 8;
  cfg.hidden = 6;
  cfg.batch_size = 16;
  cfg.epochs = 3;
  cfg.seed = 9;
  return cfg;
}

TEST(Train, ZeroEpochsReturnsInitialisation) {
  auto cfg = small_config();
  cfg.epochs = 0;
  const auto r = train<double>(small_split(), cfg);
  EXPECT_TRUE(r.history.empty());
  EXPECT_TRUE(r.params.identical(
      lstm::init_params<double>(cfg.seed, lstm::ModelDims{3, cfg.fc_units, cfg.hidden, 2})));
}

TEST(Train, ZeroLearningRateAndPenaltyKeepsParameters) {
  auto cfg = small_config();
  cfg.learning_rate = 0.0;
  cfg.lambda = 0.0;
  const lstm::ModelDims dims{3, cfg.fc_units, cfg.hidden, 2};
  const auto init = lstm::init_params<double>(cfg.seed, dims);
  const auto r = train<double>(small_split(), cfg);
  EXPECT_TRUE(r.params.identical(init));
  EXPECT_EQ(r.history.size(), cfg.epochs);
}

TEST(Train, DeterministicInDoublePrecision) {
  const auto cfg = small_config();
  const auto a = train<double>(small_split(), cfg);
  auto cfg4 = cfg;
  cfg4.workers = 4;
  const auto b = train<double>(small_split(), cfg4);
  EXPECT_TRUE(a.params.identical(b.params));
  EXPECT_EQ(history_csv(a.history, false), history_csv(b.history, false));
}

TEST(Train, StepCountIncludesThePartialBatch) {
  const auto cfg = small_config();  // 40 windows, batch 16 -> 3 steps per epoch
  const auto r = train<float>(small_split(), cfg);
  EXPECT_EQ(r.optimizer.step, cfg.epochs * 3);
  ASSERT_EQ(r.history.size(), cfg.epochs);
  for (std::size_t e = 0; e < r.history.size(); ++e) {
    EXPECT_EQ(r.history[e].epoch, e + 1);
    EXPECT_TRUE(std::isfinite(r.history[e].train_loss));
    EXPECT_TRUE(std::isfinite(r.history[e].test_loss));
  }
}

TEST(Train, EmptySplitAndBadConfig) {
  auto sp = small_split();
  sp.train = sp.train.subset(std::vector<std::size_t>{});
  EXPECT_ERRC(train<float>(sp, small_config()), Errc::kEmptySplit);
  auto cfg = small_config();
  cfg.step = 13;  // S > W
  EXPECT_ERRC(cfg.validate(), Errc::kBadGeometry);
  cfg = small_config();
  cfg.batch_size = 0;
  EXPECT_ERRC(cfg.validate(), Errc::kBadGeometry);
}

TEST(Train, DivergenceAbortsWithLastGoodParameters) {
  auto cfg = small_config();
  cfg.optimizer = lstm::OptimizerKind::kSgd;
  cfg.learning_rate = 1e300;
  try {
    train<double>(small_split(), cfg);
    FAIL() << "expected DivergedLoss";
  } catch (const DivergedLoss<double>& e) {
    EXPECT_EQ(e.code(), Errc::kDivergedLoss);
    EXPECT_TRUE(e.last_good().all_finite());
  }
}

TEST(EpochOrder, PermutationDependingOnlyOnSeedAndEpoch) {
  const auto a = epoch_order(100, 5, 3);
  EXPECT_EQ(a, epoch_order(100, 5, 3));
  EXPECT_NE(a, epoch_order(100, 5, 4));
  EXPECT_NE(a, epoch_order(100, 6, 3));
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> iota(100);
  std::iota(iota.begin(), iota.end(), std::size_t{0});
  EXPECT_EQ(sorted, iota);
}

TEST(Predict, ZeroModelTiesGoToTheLowerIndex) {
  const auto p = lstm::ModelParams<float>::zeros(lstm::ModelDims{3, 4, 4, 2});
  const auto pred = predict(p, blobs(10, 12, 3));
  EXPECT_EQ(pred, std::vector<std::size_t>(10, 0));
}

TEST(Predict, PermutationEquivariantAndShapeChecked) {
  const auto ds = blobs(30, 12, 4);
  const auto p = lstm::init_params<float>(4, lstm::ModelDims{3, 8, 6, 2});
  const auto base = predict(p, ds);
  std::vector<std::size_t> perm(30);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(4);
  rng.shuffle(perm);
  const auto shuffled = predict(p, ds.subset(perm));
  for (std::size_t i = 0; i < perm.size(); ++i) EXPECT_EQ(shuffled[i], base[perm[i]]);

  try {
    predict(p, ds, 150);
    FAIL() << "expected ShapeMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kShapeMismatch);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("150"), std::string::npos) << msg;
    EXPECT_NE(msg.find("12"), std::string::npos) << msg;
  }
}

TEST(Overfit, TinySetIsMemorised) {
  auto cfg = small_config();
  cfg.epochs = 200;
  cfg.batch_size = 1024;
  SplitPair sp;
  sp.train = blobs(32, 12, 7);
  sp.test = blobs(8, 12, 8);
  const auto r = train<float>(sp, cfg);
  EXPECT_EQ(r.history.back().train_acc, 1.0);
  const auto pred = predict(r.params, sp.train);
  for (std::size_t i = 0; i < pred.size(); ++i) EXPECT_EQ(pred[i], sp.train.labels[i]);
}

TEST(HistoryCsv, HeaderAndSecondsColumn) {
  TrainHistory h = {{1, 0.5, 0.75, 0.625, 0.5, 1.25}};
  EXPECT_EQ(history_csv(h), "epoch,train_loss,train_acc,test_loss,test_acc,seconds\n"
                            "1,0.5,0.75,0.625,0.5,1.250\n");
  EXPECT_EQ(history_csv(h, false), "epoch,train_loss,train_acc,test_loss,test_acc,seconds\n"
                                   "1,0.5,0.75,0.625,0.5,0.000\n");
}

}  // namespace
}  // namespace bitesense
