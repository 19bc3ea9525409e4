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


#ifndef BITESENSE_LSTM_PARAMS_HPP_
#define BITESENSE_LSTM_PARAMS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace bitesense::lstm {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Row-block order of the stacked gate matrices.
enum class Gate : int { kInput = 0, kForget = 1, kCell = 2, kOutput = 3 };
inline constexpr int kGates = 4;

struct ModelDims {
  std::size_t input = 3;      // channels per time step
  std::size_t fc_units = 64;  // per-timestep ReLU layer
  std::size_t hidden = 64;    // both LSTM layers
  std::size_t classes = 2;

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

// Gate weights are stacked row-wise as [i; f; g; o], each block H rows.
template <typename T>
struct LstmLayerParams {
  Mat<T> w;  // [4H x D_in]
  Mat<T> u;  // [4H x H]
  Vec<T> b;  // [4H]

  static LstmLayerParams zeros(std::size_t input, std::size_t hidden) {
    const auto d = static_cast<Eigen::Index>(input);
    const auto h = static_cast<Eigen::Index>(hidden);
    return {Mat<T>::Zero(kGates * h, d), Mat<T>::Zero(kGates * h, h),
            Vec<T>::Zero(kGates * h)};
  }

  Eigen::Index hidden() const { return u.cols(); }
  Eigen::Index input() const { return w.cols(); }

  auto gate_w(Gate g) { return w.middleRows(static_cast<int>(g) * hidden(), hidden()); }
  auto gate_w(Gate g) const { return w.middleRows(static_cast<int>(g) * hidden(), hidden()); }
  auto gate_u(Gate g) { return u.middleRows(static_cast<int>(g) * hidden(), hidden()); }
  auto gate_u(Gate g) const { return u.middleRows(static_cast<int>(g) * hidden(), hidden()); }
  auto gate_b(Gate g) { return b.segment(static_cast<int>(g) * hidden(), hidden()); }
  auto gate_b(Gate g) const { return b.segment(static_cast<int>(g) * hidden(), hidden()); }
};

// Flat view of one parameter tensor. Data is Eigen column-major storage.
template <typename T>
struct TensorRef {
  std::string_view name;
  std::span<T> data;
  Eigen::Index rows;
  Eigen::Index cols;
  bool is_weight;  // biases are excluded from the L2 penalty
};

// FC(ReLU) -> LSTM -> LSTM -> FC on the final hidden state.
template <typename T>
struct ModelParams {
  ModelDims dims;
  Mat<T> fc_in_w;  // [F x D]
  Vec<T> fc_in_b;  // [F]
  LstmLayerParams<T> lstm1;
  LstmLayerParams<T> lstm2;
  Mat<T> fc_out_w;  // [C x H]
  Vec<T> fc_out_b;  // [C]

  static ModelParams zeros(const ModelDims& dims);

  std::vector<TensorRef<T>> tensors();
  std::vector<TensorRef<const T>> tensors() const;

  std::size_t parameter_count() const;
  bool all_finite() const;

  // Sum of squares over weight tensors (biases excluded).
  T weight_sq_norm() const;

  template <typename U>
  ModelParams<U> cast() const {
    ModelParams<U> out;
    out.dims = dims;
    out.fc_in_w = fc_in_w.template cast<U>();
    out.fc_in_b = fc_in_b.template cast<U>();
    out.lstm1 = {lstm1.w.template cast<U>(), lstm1.u.template cast<U>(),
                 lstm1.b.template cast<U>()};
    out.lstm2 = {lstm2.w.template cast<U>(), lstm2.u.template cast<U>(),
                 lstm2.b.template cast<U>()};
    out.fc_out_w = fc_out_w.template cast<U>();
    out.fc_out_b = fc_out_b.template cast<U>();
    return out;
  }

  // Bitwise equality of every tensor.
  bool identical(const ModelParams& other) const;
};

template <typename T>
using Gradients = ModelParams<T>;

// Glorot-uniform weights with bound sqrt(6 / (fan_in + fan_out)) computed per
// gate block; zero biases except LSTM forget-gate biases, which are 1.
// Deterministic for a given seed.
template <typename T>
ModelParams<T> init_params(std::uint64_t seed, const ModelDims& dims);

double glorot_bound(std::size_t fan_in, std::size_t fan_out);

}  // namespace bitesense::lstm

#endif  // BITESENSE_LSTM_PARAMS_HPP_
