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


#include "bitesense/lstm/params.hpp"

#include <cmath>
#include <cstring>

#include "bitesense/rng.hpp"

namespace bitesense::lstm {
namespace {

template <typename T, typename M>
TensorRef<T> ref(std::string_view name, M& m, bool is_weight) {
  return {name, std::span<T>(m.data(), static_cast<std::size_t>(m.size())), m.rows(),
          m.cols(), is_weight};
}

template <typename P, typename T>
std::vector<TensorRef<T>> collect(P& p) {
  return {ref<T>("fc_in.w", p.fc_in_w, true),   ref<T>("fc_in.b", p.fc_in_b, false),
          ref<T>("lstm1.w", p.lstm1.w, true),   ref<T>("lstm1.u", p.lstm1.u, true),
          ref<T>("lstm1.b", p.lstm1.b, false),  ref<T>("lstm2.w", p.lstm2.w, true),
          ref<T>("lstm2.u", p.lstm2.u, true),   ref<T>("lstm2.b", p.lstm2.b, false),
          ref<T>("fc_out.w", p.fc_out_w, true), ref<T>("fc_out.b", p.fc_out_b, false)};
}

// Fills a stacked matrix whose row blocks of `block_rows` each get their own
// Glorot bound (fan_out = block_rows).
template <typename T>
void fill_glorot(Mat<T>& m, Eigen::Index block_rows, Rng& rng) {
  const double bound = glorot_bound(static_cast<std::size_t>(m.cols()),
                                    static_cast<std::size_t>(block_rows));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      m(i, j) = static_cast<T>(rng.uniform(-bound, bound));
    }
  }
}

}  // namespace

double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

template <typename T>
ModelParams<T> ModelParams<T>::zeros(const ModelDims& dims) {
  const auto d = static_cast<Eigen::Index>(dims.input);
  const auto f = static_cast<Eigen::Index>(dims.fc_units);
  const auto h = static_cast<Eigen::Index>(dims.hidden);
  const auto c = static_cast<Eigen::Index>(dims.classes);
  ModelParams p;
  p.dims = dims;
  p.fc_in_w = Mat<T>::Zero(f, d);
  p.fc_in_b = Vec<T>::Zero(f);
  p.lstm1 = LstmLayerParams<T>::zeros(dims.fc_units, dims.hidden);
  p.lstm2 = LstmLayerParams<T>::zeros(dims.hidden, dims.hidden);
  p.fc_out_w = Mat<T>::Zero(c, h);
  p.fc_out_b = Vec<T>::Zero(c);
  return p;
}

template <typename T>
std::vector<TensorRef<T>> ModelParams<T>::tensors() {
  return collect<ModelParams<T>, T>(*this);
}

template <typename T>
std::vector<TensorRef<const T>> ModelParams<T>::tensors() const {
  return collect<const ModelParams<T>, const T>(*this);
}

template <typename T>
std::size_t ModelParams<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += t.data.size();
  return n;
}

template <typename T>
bool ModelParams<T>::all_finite() const {
  for (const auto& t : tensors()) {
    for (T v : t.data) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

template <typename T>
T ModelParams<T>::weight_sq_norm() const {
  T sum = 0;
  for (const auto& t : tensors()) {
    if (!t.is_weight) continue;
    for (T v : t.data) sum += v * v;
  }
  return sum;
}

template <typename T>
bool ModelParams<T>::identical(const ModelParams& other) const {
  if (dims != other.dims) return false;
  auto a = tensors();
  auto b = other.tensors();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rows != b[i].rows || a[i].cols != b[i].cols) return false;
    if (std::memcmp(a[i].data.data(), b[i].data.data(), a[i].data.size_bytes()) != 0) {
      return false;
    }
  }
  return true;
}

template <typename T>
ModelParams<T> init_params(std::uint64_t seed, const ModelDims& dims) {
  ModelParams<T> p = ModelParams<T>::zeros(dims);
  Rng rng(seed);
  const auto h = static_cast<Eigen::Index>(dims.hidden);
  fill_glorot(p.fc_in_w, p.fc_in_w.rows(), rng);
  fill_glorot(p.lstm1.w, h, rng);
  fill_glorot(p.lstm1.u, h, rng);
  fill_glorot(p.lstm2.w, h, rng);
  fill_glorot(p.lstm2.u, h, rng);
  fill_glorot(p.fc_out_w, p.fc_out_w.rows(), rng);
  p.lstm1.gate_b(Gate::kForget).setConstant(T(1));
  p.lstm2.gate_b(Gate::kForget).setConstant(T(1));
  return p;
}

template struct ModelParams<float>;
template struct ModelParams<double>;
template struct ModelParams<long double>;
template ModelParams<float> init_params<float>(std::uint64_t, const ModelDims&);
template ModelParams<double> init_params<double>(std::uint64_t, const ModelDims&);

}  // namespace bitesense::lstm
