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


#ifndef BITESENSE_LSTM_NETWORK_HPP_
#define BITESENSE_LSTM_NETWORK_HPP_

#include <cstddef>
#include <cstdint>
#include <span>

#include "bitesense/lstm/params.hpp"
#include "bitesense/window_pipeline.hpp"

namespace bitesense::lstm {

// Natural-log arguments are clamped here so saturated softmax rows give a
// large finite loss instead of infinity.
inline constexpr double kLogClamp = 1e-12;

// Time-major input: column t * batch + b holds example b at step t.
template <typename T>
struct Batch {
  std::size_t steps = 0;
  std::size_t batch = 0;
  Mat<T> x;  // [D x steps*batch]

  // Column block of step t, [D x batch].
  auto step(std::size_t t) const {
    return x.middleCols(static_cast<Eigen::Index>(t * batch),
                        static_cast<Eigen::Index>(batch));
  }
};

// Gathers the listed windows of `ds` into a batch.
template <typename T>
Batch<T> make_batch(const WindowedDataset& ds, std::span<const std::size_t> indices);

// One-hot targets for the listed windows, [B x C].
template <typename T>
Mat<T> make_targets(const WindowedDataset& ds, std::span<const std::size_t> indices);

template <typename T>
struct LstmState {
  Mat<T> h;  // [H x B]
  Mat<T> c;  // [H x B]

  static LstmState zeros(Eigen::Index hidden, Eigen::Index batch) {
    return {Mat<T>::Zero(hidden, batch), Mat<T>::Zero(hidden, batch)};
  }
};

// One LSTM step for a column batch of inputs x [D_in x B].
//   i = sig(W_i x + U_i h + b_i)   f = sig(W_f x + U_f h + b_f)
//   g = tanh(W_g x + U_g h + b_g)  o = sig(W_o x + U_o h + b_o)
//   c' = f * c + i * g             h' = o * tanh(c')
// Throws Error{kShapeMismatch}.
template <typename T>
LstmState<T> lstm_cell_forward(const Mat<T>& x, const LstmState<T>& prev,
                               const LstmLayerParams<T>& p);

// Derivatives are formed from the stored pre-activations (sigma(z) sigma(-z),
// sech^2(z)) rather than from 1 - a, which loses most of its bits in float
// once a gate saturates.
template <typename T>
struct LayerCache {
  Mat<T> pre;     // [4H x TB] gate pre-activations
  Mat<T> gates;   // [4H x TB] post-activation i, f, g, o
  Mat<T> c;       // [H x TB]
  Mat<T> tanh_c;  // [H x TB]
  Mat<T> h;       // [H x TB]
};

template <typename T>
struct ForwardCache {
  std::size_t steps = 0;
  std::size_t batch = 0;
  ModelDims dims;
  std::uint64_t params_digest = 0;
  Mat<T> x;       // [D x TB]
  Mat<T> fc_act;  // [F x TB] after ReLU
  LayerCache<T> lstm1;
  LayerCache<T> lstm2;
  Mat<T> logits;  // [C x B]
  Mat<T> probs;   // [C x B]
};

template <typename T>
struct ForwardResult {
  Mat<T> probs;  // [B x C]
  ForwardCache<T> cache;
};

// Content hash used to tie a cache to the parameters that produced it.
template <typename T>
std::uint64_t params_digest(const ModelParams<T>& p);

// Throws Error{kShapeMismatch | kNonFiniteInput}.
template <typename T>
ForwardResult<T> forward(const Batch<T>& batch, const ModelParams<T>& p);

// Mean cross-entropy over rows plus lambda * sum of squared weights.
// probs and targets are [B x C].
template <typename T>
T loss(const Mat<T>& probs, const Mat<T>& targets, const ModelParams<T>& p,
       double lambda);

// Exact gradient of `loss` (including the 2 * lambda * w penalty term).
// Throws Error{kCacheMismatch | kShapeMismatch}.
template <typename T>
Gradients<T> backward(const ForwardCache<T>& cache, const Mat<T>& targets,
                      const ModelParams<T>& p, double lambda);

// Adds scale * d(sum of per-example cross-entropy)/d(params) into `grads`,
// without the penalty term. Building block for chunked evaluation.
template <typename T>
void accumulate_backward(const ForwardCache<T>& cache, const Mat<T>& targets,
                         const ModelParams<T>& p, T scale, Gradients<T>& grads);

template <typename T>
void add_weight_penalty_grad(const ModelParams<T>& p, double lambda,
                             Gradients<T>& grads);

struct BatchStats {
  double loss = 0.0;     // mean CE + penalty
  double ce_sum = 0.0;   // un-normalised cross-entropy sum
  std::size_t correct = 0;
  std::size_t count = 0;
};

// Examples are processed in fixed-size chunks, possibly on several threads;
// chunk results are reduced in chunk order so the outcome does not depend on
// `workers`.
inline constexpr std::size_t kChunkSize = 32;

template <typename T>
BatchStats loss_and_gradients(const ModelParams<T>& p, const WindowedDataset& ds,
                              std::span<const std::size_t> indices, double lambda,
                              Gradients<T>& grads, unsigned workers = 1);

// Class probabilities for every listed window, [N x C].
template <typename T>
Mat<T> predict_probs(const ModelParams<T>& p, const WindowedDataset& ds,
                     std::span<const std::size_t> indices, unsigned workers = 1);

}  // namespace bitesense::lstm

#endif  // BITESENSE_LSTM_NETWORK_HPP_
