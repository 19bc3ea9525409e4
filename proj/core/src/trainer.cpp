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


#include "bitesense/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "bitesense/rng.hpp"

namespace bitesense {

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(Errc::kBadGeometry, what); };
  if (window_size == 0 || step == 0) fail("window_size and step must be positive");
  if (step > window_size) fail("step must not exceed window_size");
  if (batch_size == 0) fail("batch_size must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be >= 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail("lambda must be >= 0");
  if (fc_units == 0 || hidden == 0) fail("layer widths must be positive");
  if (clip_norm < 0.0) fail("clip_norm must be >= 0");
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix_seed(seed, epoch));
  rng.shuffle(order);
  return order;
}

template <typename T>
SplitScore evaluate_split(const lstm::ModelParams<T>& p, const WindowedDataset& ds,
                          double lambda, unsigned workers) {
  if (ds.size() == 0) throw Error(Errc::kEmptySplit, "cannot score an empty dataset");
  std::vector<std::size_t> all(ds.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const lstm::Mat<T> probs = lstm::predict_probs(p, ds, all, workers);
  double ce = 0.0;
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    const auto label = static_cast<Eigen::Index>(ds.labels[static_cast<std::size_t>(i)]);
    ce -= std::log(std::max(static_cast<double>(probs(i, label)), lstm::kLogClamp));
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < probs.cols(); ++c) {
      if (probs(i, c) > probs(i, best)) best = c;
    }
    if (best == label) ++correct;
  }
  const auto n = static_cast<double>(ds.size());
  return {ce / n + lambda * static_cast<double>(p.weight_sq_norm()),
          static_cast<double>(correct) / n};
}

namespace {

lstm::ModelDims dims_for(const SplitPair& split, const TrainConfig& cfg) {
  lstm::ModelDims dims;
  dims.input = kChannels;
  dims.fc_units = cfg.fc_units;
  dims.hidden = cfg.hidden;
  dims.classes = split.train.class_map.size();
  return dims;
}

void check_split(const SplitPair& split, const TrainConfig& cfg) {
  if (split.train.size() == 0 || split.test.size() == 0) {
    throw Error(Errc::kEmptySplit, "train and test splits must both be non-empty");
  }
  if (split.train.window_size != cfg.window_size || split.test.window_size != cfg.window_size) {
    throw Error(Errc::kShapeMismatch,
                "dataset window size " + std::to_string(split.train.window_size) + "/" +
                    std::to_string(split.test.window_size) + " vs configured " +
                    std::to_string(cfg.window_size));
  }
  if (split.train.class_map.size() < 2 || split.train.class_map != split.test.class_map) {
    throw Error(Errc::kShapeMismatch, "train/test class maps differ or have < 2 classes");
  }
}

}  // namespace

template <typename T>
TrainResult<T> train_from(lstm::ModelParams<T> params, lstm::OptimizerState<T> state,
                          const SplitPair& split, const TrainConfig& cfg,
                          const EpochCallback& on_epoch) {
  cfg.validate();
  check_split(split, cfg);
  if (params.dims != dims_for(split, cfg)) {
    throw Error(Errc::kShapeMismatch, "initial parameters do not match configuration");
  }

  TrainResult<T> result;
  const std::size_t n = split.train.size();
  lstm::Gradients<T> grads;
  lstm::ModelParams<T> last_good = params;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    const auto order = epoch_order(n, cfg.seed, epoch);
    for (std::size_t begin = 0; begin < n; begin += cfg.batch_size) {
      const std::span<const std::size_t> batch(order.data() + begin,
                                               std::min(cfg.batch_size, n - begin));
      const lstm::BatchStats stats =
          lstm::loss_and_gradients(params, split.train, batch, cfg.lambda, grads, cfg.workers);
      if (!std::isfinite(stats.loss)) {
        throw DivergedLoss<T>("non-finite training loss in epoch " +
                                  std::to_string(epoch + 1) + " at window " +
                                  std::to_string(begin),
                              last_good, result.history);
      }
      last_good = params;
      if (cfg.clip_norm > 0.0) lstm::clip_by_norm(grads, cfg.clip_norm);
      lstm::optimizer_step(params, grads, state, cfg.learning_rate);
    }

    EpochRecord rec;
    rec.epoch = epoch + 1;
    const SplitScore tr = evaluate_split(params, split.train, cfg.lambda, cfg.workers);
    const SplitScore te = evaluate_split(params, split.test, cfg.lambda, cfg.workers);
    rec.train_loss = tr.loss;
    rec.train_acc = tr.accuracy;
    rec.test_loss = te.loss;
    rec.test_acc = te.accuracy;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (!std::isfinite(rec.train_loss) || !std::isfinite(rec.test_loss)) {
      throw DivergedLoss<T>("non-finite loss after epoch " + std::to_string(rec.epoch),
                            last_good, result.history);
    }
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }

  result.params = std::move(params);
  result.optimizer = std::move(state);
  return result;
}

template <typename T>
TrainResult<T> train(const SplitPair& split, const TrainConfig& cfg,
                     const EpochCallback& on_epoch) {
  cfg.validate();
  check_split(split, cfg);
  const lstm::ModelDims dims = dims_for(split, cfg);
  return train_from<T>(lstm::init_params<T>(cfg.seed, dims),
                       lstm::OptimizerState<T>::fresh(dims, cfg.optimizer), split, cfg,
                       on_epoch);
}

template <typename T>
std::vector<std::size_t> predict(const lstm::ModelParams<T>& p, const WindowedDataset& ds,
                                 std::size_t model_window, unsigned workers) {
  if (model_window != 0 && model_window != ds.window_size) {
    throw Error(Errc::kShapeMismatch, "model window size " + std::to_string(model_window) +
                                          " vs dataset window size " +
                                          std::to_string(ds.window_size));
  }
  if (ds.class_map.size() != p.dims.classes) {
    throw Error(Errc::kShapeMismatch, "model has " + std::to_string(p.dims.classes) +
                                          " classes, dataset has " +
                                          std::to_string(ds.class_map.size()));
  }
  std::vector<std::size_t> all(ds.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const lstm::Mat<T> probs = lstm::predict_probs(p, ds, all, workers);
  std::vector<std::size_t> out(ds.size());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < probs.cols(); ++c) {
      if (probs(i, c) > probs(i, best)) best = c;
    }
    out[static_cast<std::size_t>(i)] = static_cast<std::size_t>(best);
  }
  return out;
}

std::string history_csv(const TrainHistory& history, bool include_seconds) {
  std::string out = "epoch,train_loss,train_acc,test_loss,test_acc,seconds\n";
  char buf[256];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%.3f\n", r.epoch,
                  r.train_loss, r.train_acc, r.test_loss, r.test_acc,
                  include_seconds ? r.seconds : 0.0);
    out += buf;
  }
  return out;
}

template SplitScore evaluate_split<float>(const lstm::ModelParams<float>&,
                                          const WindowedDataset&, double, unsigned);
template SplitScore evaluate_split<double>(const lstm::ModelParams<double>&,
                                           const WindowedDataset&, double, unsigned);
template TrainResult<float> train<float>(const SplitPair&, const TrainConfig&,
                                         const EpochCallback&);
template TrainResult<double> train<double>(const SplitPair&, const TrainConfig&,
                                           const EpochCallback&);
template TrainResult<float> train_from<float>(lstm::ModelParams<float>,
                                              lstm::OptimizerState<float>, const SplitPair&,
                                              const TrainConfig&, const EpochCallback&);
template TrainResult<double> train_from<double>(lstm::ModelParams<double>,
                                                lstm::OptimizerState<double>,
                                                const SplitPair&, const TrainConfig&,
                                                const EpochCallback&);
template std::vector<std::size_t> predict<float>(const lstm::ModelParams<float>&,
                                                 const WindowedDataset&, std::size_t,
                                                 unsigned);
template std::vector<std::size_t> predict<double>(const lstm::ModelParams<double>&,
                                                  const WindowedDataset&, std::size_t,
                                                  unsigned);

}  // namespace bitesense
