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


#ifndef BITESENSE_TRAINER_HPP_
#define BITESENSE_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bitesense/error.hpp"
#include "bitesense/lstm/network.hpp"
#include "bitesense/lstm/optimizer.hpp"
#include "bitesense/window_pipeline.hpp"

namespace bitesense {

enum class Precision { kF32, kF64 };

struct TrainConfig {
  std::size_t window_size = 150;
  std::size_t step = 10;
  double learning_rate = 0.0025;
  std::size_t epochs = 50;
  std::size_t batch_size = 1024;
  double lambda = 0.0015;
  std::uint64_t seed = 0;
  Precision precision = Precision::kF32;
  lstm::OptimizerKind optimizer = lstm::OptimizerKind::kAdam;
  double clip_norm = 0.0;  // 0 disables clipping
  std::size_t fc_units = 64;
  std::size_t hidden = 64;
  unsigned workers = 1;

  // Throws Error{kBadGeometry}.
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_acc = 0.0;
  double test_loss = 0.0;
  double test_acc = 0.0;
  double seconds = 0.0;
};

using TrainHistory = std::vector<EpochRecord>;

template <typename T>
struct TrainResult {
  lstm::ModelParams<T> params;
  lstm::OptimizerState<T> optimizer;
  TrainHistory history;
};

// Thrown when a loss turns non-finite. Carries the parameters from the last
// optimizer step whose loss was finite.
template <typename T>
class DivergedLoss : public Error {
 public:
  DivergedLoss(const std::string& what, lstm::ModelParams<T> last_good, TrainHistory history)
      : Error(Errc::kDivergedLoss, what),
        last_good_(std::move(last_good)),
        history_(std::move(history)) {}

  const lstm::ModelParams<T>& last_good() const { return last_good_; }
  const TrainHistory& history() const { return history_; }

 private:
  lstm::ModelParams<T> last_good_;
  TrainHistory history_;
};

struct SplitScore {
  double loss = 0.0;
  double accuracy = 0.0;
};

// Mean cross-entropy plus penalty and argmax accuracy over a whole dataset.
template <typename T>
SplitScore evaluate_split(const lstm::ModelParams<T>& p, const WindowedDataset& ds,
                          double lambda, unsigned workers = 1);

// Index permutation used for epoch `epoch` (0-based); a pure function of
// (seed, epoch).
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch);

using EpochCallback = std::function<void(const EpochRecord&)>;

// Trains from init_params(cfg.seed). Runs epochs * ceil(N_train / batch)
// optimizer steps; the final partial batch is used. History is measured in
// inference mode after the last step of each epoch.
// Throws Error{kEmptySplit | kBadGeometry | kShapeMismatch} and DivergedLoss<T>.
template <typename T>
TrainResult<T> train(const SplitPair& split, const TrainConfig& cfg,
                     const EpochCallback& on_epoch = {});

// Same, continuing from the given parameters and optimizer state.
template <typename T>
TrainResult<T> train_from(lstm::ModelParams<T> params, lstm::OptimizerState<T> state,
                          const SplitPair& split, const TrainConfig& cfg,
                          const EpochCallback& on_epoch = {});

// Argmax class per window, ties toward the lower index. When model_window is
// non-zero it must equal the dataset window size.
// Throws Error{kShapeMismatch}.
template <typename T>
std::vector<std::size_t> predict(const lstm::ModelParams<T>& p, const WindowedDataset& ds,
                                 std::size_t model_window = 0, unsigned workers = 1);

// `epoch,train_loss,train_acc,test_loss,test_acc,seconds`. With
// include_seconds = false the seconds column is written as 0 so the file is
// a deterministic function of the run configuration.
std::string history_csv(const TrainHistory& history, bool include_seconds = true);

}  // namespace bitesense

#endif  // BITESENSE_TRAINER_HPP_
