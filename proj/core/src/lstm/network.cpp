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


#include "bitesense/lstm/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "bitesense/error.hpp"
#include "bitesense/parallel.hpp"

namespace bitesense::lstm {
namespace {

// Activations write through block expressions; the const_cast is the usual
// Eigen idiom for accepting temporaries such as middleRows().
template <typename D>
void sigmoid_inplace(const Eigen::MatrixBase<D>& m_) {
  using T = typename D::Scalar;
  auto& m = const_cast<Eigen::MatrixBase<D>&>(m_);
  m = (T(1) + (-m.array()).exp()).inverse().matrix();
}

template <typename D>
void tanh_inplace(const Eigen::MatrixBase<D>& m_) {
  auto& m = const_cast<Eigen::MatrixBase<D>&>(m_);
  m = m.array().tanh().matrix();
}

// sigma'(z) = sigma(z) * sigma(-z), given s = sigma(z).
template <typename A, typename B>
auto sigmoid_grad(const A& z, const B& s) {
  using T = typename A::Scalar;
  return s * (T(1) + z.exp()).inverse();
}

// tanh'(z) = sech^2(z) = 4 e^{-2|z|} / (1 + e^{-2|z|})^2.
template <typename A>
auto tanh_grad(const A& z) {
  using T = typename A::Scalar;
  const auto e = (T(-2) * z.abs()).exp();
  return T(4) * e / (T(1) + e).square();
}

std::string shape(Eigen::Index r, Eigen::Index c) {
  return "[" + std::to_string(r) + " x " + std::to_string(c) + "]";
}

// Gate pre-activations to activations for one step's column block.
template <typename D>
void activate_gates(const Eigen::MatrixBase<D>& g_, Eigen::Index h) {
  auto& g = const_cast<Eigen::MatrixBase<D>&>(g_);
  sigmoid_inplace(g.middleRows(0, 2 * h));  // i, f
  tanh_inplace(g.middleRows(2 * h, h));     // g~
  sigmoid_inplace(g.middleRows(3 * h, h));  // o
}

template <typename T>
void layer_forward(const LstmLayerParams<T>& p, const Mat<T>& input, Eigen::Index steps,
                   Eigen::Index b, LayerCache<T>& lc) {
  const Eigen::Index h = p.hidden();
  const Eigen::Index tb = steps * b;
  lc.pre.resize(kGates * h, tb);
  lc.pre.noalias() = p.w * input;
  lc.pre.colwise() += p.b;
  lc.gates.resize(kGates * h, tb);
  lc.c.resize(h, tb);
  lc.tanh_c.resize(h, tb);
  lc.h.resize(h, tb);

  for (Eigen::Index t = 0; t < steps; ++t) {
    auto z = lc.pre.middleCols(t * b, b);
    if (t > 0) z.noalias() += p.u * lc.h.middleCols((t - 1) * b, b);
    auto g = lc.gates.middleCols(t * b, b);
    g = z;
    activate_gates(g, h);

    auto i_g = g.middleRows(0, h).array();
    auto f_g = g.middleRows(h, h).array();
    auto c_g = g.middleRows(2 * h, h).array();
    auto o_g = g.middleRows(3 * h, h).array();
    auto c = lc.c.middleCols(t * b, b);
    if (t > 0) {
      c.array() = f_g * lc.c.middleCols((t - 1) * b, b).array() + i_g * c_g;
    } else {
      c.array() = i_g * c_g;
    }
    auto tc = lc.tanh_c.middleCols(t * b, b);
    tc.array() = c.array().tanh();
    lc.h.middleCols(t * b, b).array() = o_g * tc.array();
  }
}

// BPTT through one layer. Upstream gradient on h arrives either for every
// step (`dh_all`, [H x TB]) or only for the last step (`dh_last`, [H x B]).
template <typename T>
void layer_backward(const LstmLayerParams<T>& p, const LayerCache<T>& lc,
                    const Mat<T>& input, Eigen::Index steps, Eigen::Index b,
                    const Mat<T>* dh_all, const Mat<T>* dh_last,
                    LstmLayerParams<T>& grad, Mat<T>* d_input) {
  const Eigen::Index h = p.hidden();
  const Eigen::Index tb = steps * b;
  Mat<T> d_pre(kGates * h, tb);
  Mat<T> dh_next = Mat<T>::Zero(h, b);
  Mat<T> dc_next = Mat<T>::Zero(h, b);
  Mat<T> dh(h, b);
  Mat<T> dc(h, b);

  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    dh = dh_next;
    if (dh_all != nullptr) dh += dh_all->middleCols(t * b, b);
    if (dh_last != nullptr && t == steps - 1) dh += *dh_last;

    auto g = lc.gates.middleCols(t * b, b);
    auto i_g = g.middleRows(0, h).array();
    auto f_g = g.middleRows(h, h).array();
    auto c_g = g.middleRows(2 * h, h).array();
    auto o_g = g.middleRows(3 * h, h).array();
    auto z = lc.pre.middleCols(t * b, b);
    auto tc = lc.tanh_c.middleCols(t * b, b).array();

    dc.array() = dc_next.array() +
                 dh.array() * o_g * tanh_grad(lc.c.middleCols(t * b, b).array());

    auto dp = d_pre.middleCols(t * b, b);
    dp.middleRows(0, h).array() =
        dc.array() * c_g * sigmoid_grad(z.middleRows(0, h).array(), i_g);
    if (t > 0) {
      dp.middleRows(h, h).array() = dc.array() * lc.c.middleCols((t - 1) * b, b).array() *
                                    sigmoid_grad(z.middleRows(h, h).array(), f_g);
    } else {
      dp.middleRows(h, h).setZero();
    }
    dp.middleRows(2 * h, h).array() =
        dc.array() * i_g * tanh_grad(z.middleRows(2 * h, h).array());
    dp.middleRows(3 * h, h).array() =
        dh.array() * tc * sigmoid_grad(z.middleRows(3 * h, h).array(), o_g);

    dc_next.array() = dc.array() * f_g;
    if (t > 0) dh_next.noalias() = p.u.transpose() * dp;
  }

  grad.w.noalias() += d_pre * input.transpose();
  if (steps > 1) {
    grad.u.noalias() += d_pre.rightCols(tb - b) * lc.h.leftCols(tb - b).transpose();
  }
  grad.b += d_pre.rowwise().sum();
  if (d_input != nullptr) d_input->noalias() = p.w.transpose() * d_pre;
}

template <typename T>
void check_dims(const ModelParams<T>& p) {
  const auto& d = p.dims;
  const auto f = static_cast<Eigen::Index>(d.fc_units);
  const auto h = static_cast<Eigen::Index>(d.hidden);
  const auto c = static_cast<Eigen::Index>(d.classes);
  const auto in = static_cast<Eigen::Index>(d.input);
  const bool ok = d.classes >= 2 && p.fc_in_w.rows() == f && p.fc_in_w.cols() == in &&
                  p.fc_in_b.size() == f && p.lstm1.w.rows() == kGates * h &&
                  p.lstm1.w.cols() == f && p.lstm1.u.rows() == kGates * h &&
                  p.lstm1.u.cols() == h && p.lstm1.b.size() == kGates * h &&
                  p.lstm2.w.rows() == kGates * h && p.lstm2.w.cols() == h &&
                  p.lstm2.u.rows() == kGates * h && p.lstm2.u.cols() == h &&
                  p.lstm2.b.size() == kGates * h && p.fc_out_w.rows() == c &&
                  p.fc_out_w.cols() == h && p.fc_out_b.size() == c;
  if (!ok) throw Error(Errc::kShapeMismatch, "parameter shapes disagree with dims");
}

template <typename T>
std::size_t argmax_col(const Mat<T>& probs, Eigen::Index col) {
  Eigen::Index best = 0;
  for (Eigen::Index r = 1; r < probs.rows(); ++r) {
    if (probs(r, col) > probs(best, col)) best = r;
  }
  return static_cast<std::size_t>(best);
}

}  // namespace

template <typename T>
Batch<T> make_batch(const WindowedDataset& ds, std::span<const std::size_t> indices) {
  Batch<T> batch;
  batch.steps = ds.window_size;
  batch.batch = indices.size();
  const auto b = static_cast<Eigen::Index>(indices.size());
  batch.x.resize(static_cast<Eigen::Index>(kChannels),
                 static_cast<Eigen::Index>(ds.window_size) * b);
  for (Eigen::Index k = 0; k < b; ++k) {
    const std::size_t idx = indices[static_cast<std::size_t>(k)];
    if (idx >= ds.size()) {
      throw Error(Errc::kIndexOutOfRange, "window index " + std::to_string(idx));
    }
    const float* w = ds.window(idx).data();
    for (std::size_t t = 0; t < ds.window_size; ++t) {
      const Eigen::Index col = static_cast<Eigen::Index>(t) * b + k;
      for (std::size_t ch = 0; ch < kChannels; ++ch) {
        batch.x(static_cast<Eigen::Index>(ch), col) = static_cast<T>(w[t * kChannels + ch]);
      }
    }
  }
  return batch;
}

template <typename T>
Mat<T> make_targets(const WindowedDataset& ds, std::span<const std::size_t> indices) {
  Mat<T> out = Mat<T>::Zero(static_cast<Eigen::Index>(indices.size()),
                            static_cast<Eigen::Index>(ds.class_map.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    out(static_cast<Eigen::Index>(k), ds.labels.at(indices[k])) = T(1);
  }
  return out;
}

template <typename T>
LstmState<T> lstm_cell_forward(const Mat<T>& x, const LstmState<T>& prev,
                               const LstmLayerParams<T>& p) {
  const Eigen::Index h = p.hidden();
  if (x.rows() != p.input() || prev.h.rows() != h || prev.c.rows() != h ||
      prev.h.cols() != x.cols() || prev.c.cols() != x.cols() ||
      p.w.rows() != kGates * h || p.u.rows() != kGates * h || p.b.size() != kGates * h) {
    throw Error(Errc::kShapeMismatch,
                "x " + shape(x.rows(), x.cols()) + ", h " +
                    shape(prev.h.rows(), prev.h.cols()) + ", W " +
                    shape(p.w.rows(), p.w.cols()));
  }
  Mat<T> g = p.w * x + p.u * prev.h;
  g.colwise() += p.b;
  activate_gates(g, h);
  LstmState<T> next;
  next.c = (g.middleRows(h, h).array() * prev.c.array() +
            g.middleRows(0, h).array() * g.middleRows(2 * h, h).array())
               .matrix();
  next.h = (g.middleRows(3 * h, h).array() * next.c.array().tanh()).matrix();
  return next;
}

template <typename T>
std::uint64_t params_digest(const ModelParams<T>& p) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const auto& t : p.tensors()) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(t.data.data());
    const std::size_t n = t.data.size_bytes();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
      std::uint64_t word;
      std::memcpy(&word, bytes + i, 8);
      hash = (hash ^ word) * 0x100000001b3ULL;
      hash ^= hash >> 29;
    }
    for (; i < n; ++i) hash = (hash ^ bytes[i]) * 0x100000001b3ULL;
  }
  return hash;
}

template <typename T>
ForwardResult<T> forward(const Batch<T>& batch, const ModelParams<T>& p) {
  check_dims(p);
  const auto steps = static_cast<Eigen::Index>(batch.steps);
  const auto b = static_cast<Eigen::Index>(batch.batch);
  if (steps == 0 || b == 0 || batch.x.rows() != static_cast<Eigen::Index>(p.dims.input) ||
      batch.x.cols() != steps * b) {
    throw Error(Errc::kShapeMismatch, "batch " + shape(batch.x.rows(), batch.x.cols()) +
                                          " for " + std::to_string(steps) + " steps x " +
                                          std::to_string(b) + " examples");
  }
  if (!batch.x.allFinite()) {
    throw Error(Errc::kNonFiniteInput, "batch contains NaN or infinity");
  }

  ForwardResult<T> out;
  ForwardCache<T>& cache = out.cache;
  cache.steps = batch.steps;
  cache.batch = batch.batch;
  cache.dims = p.dims;
  cache.params_digest = params_digest(p);
  cache.x = batch.x;

  cache.fc_act.noalias() = p.fc_in_w * batch.x;
  cache.fc_act.colwise() += p.fc_in_b;
  cache.fc_act = cache.fc_act.cwiseMax(T(0));

  layer_forward(p.lstm1, cache.fc_act, steps, b, cache.lstm1);
  layer_forward(p.lstm2, cache.lstm1.h, steps, b, cache.lstm2);

  cache.logits.noalias() = p.fc_out_w * cache.lstm2.h.rightCols(b);
  cache.logits.colwise() += p.fc_out_b;
  cache.probs.resize(cache.logits.rows(), b);
  for (Eigen::Index k = 0; k < b; ++k) {
    auto z = cache.logits.col(k);
    auto e = (z.array() - z.maxCoeff()).exp();
    cache.probs.col(k) = (e / e.sum()).matrix();
  }
  out.probs = cache.probs.transpose();
  return out;
}

template <typename T>
T loss(const Mat<T>& probs, const Mat<T>& targets, const ModelParams<T>& p,
       double lambda) {
  if (probs.rows() != targets.rows() || probs.cols() != targets.cols() ||
      probs.rows() == 0) {
    throw Error(Errc::kShapeMismatch, "probs " + shape(probs.rows(), probs.cols()) +
                                          " vs targets " +
                                          shape(targets.rows(), targets.cols()));
  }
  T ce = 0;
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    for (Eigen::Index c = 0; c < probs.cols(); ++c) {
      if (targets(r, c) != T(0)) {
        ce -= targets(r, c) * std::log(std::max(probs(r, c), static_cast<T>(kLogClamp)));
      }
    }
  }
  return ce / static_cast<T>(probs.rows()) +
         static_cast<T>(lambda) * p.weight_sq_norm();
}

template <typename T>
void accumulate_backward(const ForwardCache<T>& cache, const Mat<T>& targets,
                         const ModelParams<T>& p, T scale, Gradients<T>& grads) {
  if (cache.dims != p.dims || cache.params_digest != params_digest(p)) {
    throw Error(Errc::kCacheMismatch, "cache was produced by different parameters");
  }
  const auto steps = static_cast<Eigen::Index>(cache.steps);
  const auto b = static_cast<Eigen::Index>(cache.batch);
  if (targets.rows() != b || targets.cols() != cache.probs.rows()) {
    throw Error(Errc::kShapeMismatch, "targets " + shape(targets.rows(), targets.cols()) +
                                          ", expected " + shape(b, cache.probs.rows()));
  }
  if (grads.dims != p.dims) grads = Gradients<T>::zeros(p.dims);

  // d(CE)/d(logits) = probs - targets. For a one-hot row the target entry
  // p_t - 1 is formed as -(sum of the other probabilities), which keeps its
  // precision when p_t is close to 1.
  Mat<T> d_logits = cache.probs - targets.transpose();
  for (Eigen::Index k = 0; k < b; ++k) {
    Eigen::Index hot = -1;
    bool one_hot = true;
    for (Eigen::Index c = 0; c < targets.cols(); ++c) {
      if (targets(k, c) == T(1) && hot < 0) {
        hot = c;
      } else if (targets(k, c) != T(0)) {
        one_hot = false;
      }
    }
    if (one_hot && hot >= 0) {
      d_logits(hot, k) = -(cache.probs.col(k).sum() - cache.probs(hot, k));
    }
  }
  d_logits *= scale;
  grads.fc_out_w.noalias() += d_logits * cache.lstm2.h.rightCols(b).transpose();
  grads.fc_out_b += d_logits.rowwise().sum();
  const Mat<T> dh_last = p.fc_out_w.transpose() * d_logits;

  Mat<T> d_h1(p.lstm2.input(), steps * b);
  layer_backward<T>(p.lstm2, cache.lstm2, cache.lstm1.h, steps, b, nullptr, &dh_last,
                 grads.lstm2, &d_h1);
  Mat<T> d_fc(p.lstm1.input(), steps * b);
  layer_backward<T>(p.lstm1, cache.lstm1, cache.fc_act, steps, b, &d_h1, nullptr,
                 grads.lstm1, &d_fc);

  d_fc.array() *= (cache.fc_act.array() > T(0)).template cast<T>();
  grads.fc_in_w.noalias() += d_fc * cache.x.transpose();
  grads.fc_in_b += d_fc.rowwise().sum();
}

template <typename T>
void add_weight_penalty_grad(const ModelParams<T>& p, double lambda, Gradients<T>& grads) {
  if (lambda == 0.0) return;
  const T k = static_cast<T>(2.0 * lambda);
  auto src = p.tensors();
  auto dst = grads.tensors();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (!src[i].is_weight) continue;
    for (std::size_t j = 0; j < src[i].data.size(); ++j) dst[i].data[j] += k * src[i].data[j];
  }
}

template <typename T>
Gradients<T> backward(const ForwardCache<T>& cache, const Mat<T>& targets,
                      const ModelParams<T>& p, double lambda) {
  Gradients<T> grads = Gradients<T>::zeros(p.dims);
  accumulate_backward(cache, targets, p, T(1) / static_cast<T>(cache.batch), grads);
  add_weight_penalty_grad(p, lambda, grads);
  return grads;
}

template <typename T>
BatchStats loss_and_gradients(const ModelParams<T>& p, const WindowedDataset& ds,
                              std::span<const std::size_t> indices, double lambda,
                              Gradients<T>& grads, unsigned workers) {
  if (indices.empty()) throw Error(Errc::kEmptySplit, "empty batch");
  const std::size_t n = indices.size();
  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  const T scale = T(1) / static_cast<T>(n);

  struct ChunkResult {
    Gradients<T> grads;
    double ce = 0.0;
    std::size_t correct = 0;
  };
  std::vector<ChunkResult> results(chunks);
  parallel_for(chunks, workers, [&](std::size_t c) {
    const auto part = indices.subspan(c * kChunkSize, std::min(kChunkSize, n - c * kChunkSize));
    const Batch<T> batch = make_batch<T>(ds, part);
    const Mat<T> targets = make_targets<T>(ds, part);
    const ForwardResult<T> fr = forward(batch, p);
    ChunkResult& r = results[c];
    for (Eigen::Index k = 0; k < fr.probs.rows(); ++k) {
      const auto label = ds.labels[part[static_cast<std::size_t>(k)]];
      r.ce -= std::log(std::max(static_cast<double>(fr.probs(k, label)), kLogClamp));
      if (argmax_col<T>(fr.cache.probs, k) == label) ++r.correct;
    }
    r.grads = Gradients<T>::zeros(p.dims);
    accumulate_backward(fr.cache, targets, p, scale, r.grads);
  });

  grads = Gradients<T>::zeros(p.dims);
  auto dst = grads.tensors();
  BatchStats stats;
  stats.count = n;
  for (const ChunkResult& r : results) {
    auto src = r.grads.tensors();
    for (std::size_t i = 0; i < dst.size(); ++i) {
      for (std::size_t j = 0; j < dst[i].data.size(); ++j) dst[i].data[j] += src[i].data[j];
    }
    stats.ce_sum += r.ce;
    stats.correct += r.correct;
  }
  add_weight_penalty_grad(p, lambda, grads);
  stats.loss = stats.ce_sum / static_cast<double>(n) +
               lambda * static_cast<double>(p.weight_sq_norm());
  return stats;
}

template <typename T>
Mat<T> predict_probs(const ModelParams<T>& p, const WindowedDataset& ds,
                     std::span<const std::size_t> indices, unsigned workers) {
  const std::size_t n = indices.size();
  Mat<T> out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p.dims.classes));
  const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::size_t begin = c * kChunkSize;
    const auto part = indices.subspan(begin, std::min(kChunkSize, n - begin));
    const ForwardResult<T> fr = forward(make_batch<T>(ds, part), p);
    out.middleRows(static_cast<Eigen::Index>(begin), fr.probs.rows()) = fr.probs;
  });
  return out;
}

#define BITESENSE_INSTANTIATE(T)                                                     \
  template Batch<T> make_batch<T>(const WindowedDataset&, std::span<const std::size_t>); \
  template Mat<T> make_targets<T>(const WindowedDataset&, std::span<const std::size_t>); \
  template LstmState<T> lstm_cell_forward<T>(const Mat<T>&, const LstmState<T>&,       \
                                             const LstmLayerParams<T>&);               \
  template std::uint64_t params_digest<T>(const ModelParams<T>&);                      \
  template ForwardResult<T> forward<T>(const Batch<T>&, const ModelParams<T>&);        \
  template T loss<T>(const Mat<T>&, const Mat<T>&, const ModelParams<T>&, double);     \
  template Gradients<T> backward<T>(const ForwardCache<T>&, const Mat<T>&,             \
                                    const ModelParams<T>&, double);                    \
  template void accumulate_backward<T>(const ForwardCache<T>&, const Mat<T>&,          \
                                       const ModelParams<T>&, T, Gradients<T>&);       \
  template void add_weight_penalty_grad<T>(const ModelParams<T>&, double, Gradients<T>&); \
  template BatchStats loss_and_gradients<T>(const ModelParams<T>&, const WindowedDataset&, \
                                            std::span<const std::size_t>, double,      \
                                            Gradients<T>&, unsigned);                  \
  template Mat<T> predict_probs<T>(const ModelParams<T>&, const WindowedDataset&,      \
                                   std::span<const std::size_t>, unsigned);

BITESENSE_INSTANTIATE(float)
BITESENSE_INSTANTIATE(double)
BITESENSE_INSTANTIATE(long double)
#undef BITESENSE_INSTANTIATE

}  // namespace bitesense::lstm
