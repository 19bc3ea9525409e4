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


#include <benchmark/benchmark.h>

#include <numeric>

#include "bitesense/lstm/network.hpp"
#include "bitesense/lstm/params.hpp"
#include "bitesense/rng.hpp"
#include "bitesense/synthetic.hpp"
#include "bitesense/window_pipeline.hpp"

namespace bitesense {
namespace {

constexpr std::size_t kWindow = 150;

std::vector<LabeledSegment> corpus_segments() {
  synthetic::Options opt;
  opt.sessions_per_activity = 2;
  std::vector<LabeledSegment> out;
  for (const auto& s : synthetic::generate_corpus(opt)) {
    for (std::size_t i = 0; i < s.spans.size(); ++i) out.push_back(apply_trim(s.recording, s.spans[i], i));
  }
  return out;
}

const WindowedDataset& corpus_windows() {
  static const WindowedDataset ds = [] {
    const auto segs = corpus_segments();
    const auto map = ClassMap::make({"eating", "smoking", "medication", "jogging"}, "eating");
    return slide(segs, map, kWindow, 10);
  }();
  return ds;
}

template <typename T>
void BM_ForwardBackward(benchmark::State& state) {
  const auto& ds = corpus_windows();
  const auto p = lstm::init_params<T>(1, lstm::ModelDims{3, 64, 64, ds.class_map.names.size()});
  std::vector<std::size_t> idx(static_cast<std::size_t>(state.range(0)));
  std::iota(idx.begin(), idx.end(), 0);
  const auto batch = lstm::make_batch<T>(ds, idx);
  const auto targets = lstm::make_targets<T>(ds, idx);
  for (auto _ : state) {
    auto fr = lstm::forward(batch, p);
    auto g = lstm::backward(fr.cache, targets, p, 0.0015);
    benchmark::DoNotOptimize(g.fc_out_b.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBackward<float>)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardBackward<double>)->Arg(32)->Unit(benchmark::kMillisecond);

template <typename T>
void BM_LossAndGradients(benchmark::State& state) {
  const auto& ds = corpus_windows();
  const auto p = lstm::init_params<T>(1, lstm::ModelDims{3, 64, 64, ds.class_map.names.size()});
  std::vector<std::size_t> idx(std::min<std::size_t>(1024, ds.size()));
  std::iota(idx.begin(), idx.end(), 0);
  auto g = lstm::ModelParams<T>::zeros(p.dims);
  for (auto _ : state) {
    const auto stats = lstm::loss_and_gradients(p, ds, idx, 0.0015, g,
                                                static_cast<unsigned>(state.range(0)));
    benchmark::DoNotOptimize(stats.loss);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(idx.size()));
}
BENCHMARK(BM_LossAndGradients<float>)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Slide(benchmark::State& state) {
  const auto segs = corpus_segments();
  const auto map = ClassMap::make({"eating", "smoking", "medication", "jogging"}, "eating");
  for (auto _ : state) {
    auto ds = slide(segs, map, kWindow, static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(ds.size());
  }
}
BENCHMARK(BM_Slide)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace bitesense

BENCHMARK_MAIN();
