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


#include "bitesense/lstm/optimizer.hpp"

#include <cmath>

#include "bitesense/error.hpp"

namespace bitesense::lstm {

std::string optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

OptimizerKind parse_optimizer(const std::string& name) {
  if (name == "adam") return OptimizerKind::kAdam;
  if (name == "sgd") return OptimizerKind::kSgd;
  throw Error(Errc::kBadGeometry, "unknown optimizer '" + name + "'");
}

template <typename T>
void optimizer_step(ModelParams<T>& p, const Gradients<T>& g, OptimizerState<T>& state,
                    double learning_rate) {
  if (g.dims != p.dims) {
    throw Error(Errc::kShapeMismatch, "gradient dims differ from parameter dims");
  }
  ++state.step;
  auto params = p.tensors();
  auto grads = g.tensors();

  if (state.kind == OptimizerKind::kSgd) {
    const T lr = static_cast<T>(learning_rate);
    for (std::size_t i = 0; i < params.size(); ++i) {
      for (std::size_t j = 0; j < params[i].data.size(); ++j) {
        params[i].data[j] -= lr * grads[i].data[j];
      }
    }
    return;
  }

  if (state.m.dims != p.dims || state.v.dims != p.dims) {
    throw Error(Errc::kShapeMismatch, "optimizer moments do not match parameters");
  }
  const auto& c = state.adam;
  const auto t = static_cast<double>(state.step);
  const T b1 = static_cast<T>(c.beta1);
  const T b2 = static_cast<T>(c.beta2);
  const T one_minus_b1 = static_cast<T>(1.0 - c.beta1);
  const T one_minus_b2 = static_cast<T>(1.0 - c.beta2);
  const T m_corr = static_cast<T>(1.0 / (1.0 - std::pow(c.beta1, t)));
  const T v_corr = static_cast<T>(1.0 / (1.0 - std::pow(c.beta2, t)));
  const T lr = static_cast<T>(learning_rate);
  const T eps = static_cast<T>(c.epsilon);

  auto m = state.m.tensors();
  auto v = state.v.tensors();
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].data.size() != params[i].data.size()) {
      throw Error(Errc::kShapeMismatch, std::string(params[i].name));
    }
    for (std::size_t j = 0; j < params[i].data.size(); ++j) {
      const T gj = grads[i].data[j];
      T& mj = m[i].data[j];
      T& vj = v[i].data[j];
      mj = b1 * mj + one_minus_b1 * gj;
      vj = b2 * vj + one_minus_b2 * gj * gj;
      params[i].data[j] -= lr * (mj * m_corr) / (std::sqrt(vj * v_corr) + eps);
    }
  }
}

template <typename T>
double clip_by_norm(Gradients<T>& g, double max_norm) {
  double sq = 0.0;
  for (const auto& t : g.tensors()) {
    for (T v : t.data) sq += static_cast<double>(v) * static_cast<double>(v);
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const T scale = static_cast<T>(max_norm / norm);
    for (auto& t : g.tensors()) {
      for (T& v : t.data) v *= scale;
    }
  }
  return norm;
}

template void optimizer_step<float>(ModelParams<float>&, const Gradients<float>&,
                                    OptimizerState<float>&, double);
template void optimizer_step<double>(ModelParams<double>&, const Gradients<double>&,
                                     OptimizerState<double>&, double);
template double clip_by_norm<float>(Gradients<float>&, double);
template double clip_by_norm<double>(Gradients<double>&, double);

}  // namespace bitesense::lstm
