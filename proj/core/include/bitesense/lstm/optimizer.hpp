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


#ifndef BITESENSE_LSTM_OPTIMIZER_HPP_
#define BITESENSE_LSTM_OPTIMIZER_HPP_

#include <cstdint>
#include <string>

#include "bitesense/lstm/params.hpp"

namespace bitesense::lstm {

enum class OptimizerKind { kAdam, kSgd };

std::string optimizer_name(OptimizerKind kind);
// Throws Error{kBadGeometry} for unknown names.
OptimizerKind parse_optimizer(const std::string& name);

struct AdamConstants {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct OptimizerState {
  OptimizerKind kind = OptimizerKind::kAdam;
  AdamConstants adam;
  std::uint64_t step = 0;
  ModelParams<T> m;  // first moments (unused by SGD)
  ModelParams<T> v;  // second moments (unused by SGD)

  static OptimizerState fresh(const ModelDims& dims,
                              OptimizerKind kind = OptimizerKind::kAdam) {
    OptimizerState s;
    s.kind = kind;
    s.m = ModelParams<T>::zeros(dims);
    s.v = ModelParams<T>::zeros(dims);
    return s;
  }
};

// One update with bias-corrected Adam moments (or plain gradient descent).
// Increments state.step first, so the first call uses t = 1.
// Throws Error{kShapeMismatch}.
template <typename T>
void optimizer_step(ModelParams<T>& p, const Gradients<T>& g, OptimizerState<T>& state,
                    double learning_rate);

// Rescales g in place so its global L2 norm is at most max_norm; returns the
// norm before clipping.
template <typename T>
double clip_by_norm(Gradients<T>& g, double max_norm);

}  // namespace bitesense::lstm

#endif  // BITESENSE_LSTM_OPTIMIZER_HPP_
