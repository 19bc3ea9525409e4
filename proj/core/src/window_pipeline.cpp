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


#include "bitesense/window_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "bitesense/rng.hpp"

namespace bitesense {

ClassMap ClassMap::make(std::vector<std::string> names,
                        const std::string& positive_name) {
  ClassMap map;
  for (auto& n : names) n = to_lower(n);
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) {
      throw Error(Errc::kBadGeometry, "duplicate class name '" + n + "'");
    }
  }
  if (names.size() > UINT16_MAX) {
    throw Error(Errc::kBadGeometry, "too many classes");
  }
  map.names = std::move(names);
  map.positive = map.index_of(to_lower(positive_name));
  return map;
}

std::size_t ClassMap::index_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw Error(Errc::kUnknownLabel, "class '" + name + "' not in class map");
  }
  return static_cast<std::size_t>(it - names.begin());
}

std::vector<float> WindowedDataset::targets() const {
  const std::size_t c = class_map.size();
  std::vector<float> out(labels.size() * c, 0.0f);
  for (std::size_t i = 0; i < labels.size(); ++i) out[i * c + labels[i]] = 1.0f;
  return out;
}

WindowedDataset WindowedDataset::subset(std::span<const std::size_t> indices) const {
  WindowedDataset out;
  out.window_size = window_size;
  out.step = step;
  out.class_map = class_map;
  out.values.reserve(indices.size() * window_stride());
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= size()) {
      throw Error(Errc::kIndexOutOfRange, "window index " + std::to_string(i));
    }
    auto w = window(i);
    out.values.insert(out.values.end(), w.begin(), w.end());
    out.labels.push_back(labels[i]);
    if (!sources.empty()) out.sources.push_back(sources[i]);
  }
  return out;
}

std::size_t window_count(std::size_t length, std::size_t window, std::size_t step) {
  if (window == 0 || step == 0) {
    throw Error(Errc::kBadGeometry, "window and step must be positive");
  }
  if (length < window) return 0;
  return (length - window) / step + 1;
}

std::vector<std::size_t> window_offsets(std::size_t length, std::size_t window,
                                        std::size_t step) {
  if (window == 0 || step == 0 || step > window) {
    throw Error(Errc::kBadGeometry, "require 0 < step <= window (window=" +
                                        std::to_string(window) +
                                        ", step=" + std::to_string(step) + ")");
  }
  std::vector<std::size_t> offsets;
  offsets.reserve(window_count(length, window, step));
  for (std::size_t k = 0; length >= window && k <= length - window; k += step) {
    offsets.push_back(k);
  }
  return offsets;
}

std::string mode_label(std::span<const std::string> labels) {
  if (labels.empty()) {
    throw Error(Errc::kIndexOutOfRange, "mode of an empty label list");
  }
  struct Tally {
    std::size_t count = 0;
    std::size_t last = 0;
  };
  std::map<std::string_view, Tally> tally;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Tally& t = tally[labels[i]];
    ++t.count;
    t.last = i;
  }
  auto best = tally.begin();
  for (auto it = tally.begin(); it != tally.end(); ++it) {
    if (it->second.count > best->second.count ||
        (it->second.count == best->second.count && it->second.last > best->second.last)) {
      best = it;
    }
  }
  return std::string(best->first);
}

std::vector<float> one_hot(std::size_t label_index, std::size_t num_classes) {
  if (label_index >= num_classes) {
    throw Error(Errc::kIndexOutOfRange,
                "label " + std::to_string(label_index) + " with " +
                    std::to_string(num_classes) + " classes");
  }
  std::vector<float> v(num_classes, 0.0f);
  v[label_index] = 1.0f;
  return v;
}

WindowedDataset slide(std::span<const LabeledSegment> segments,
                      const ClassMap& class_map, std::size_t window,
                      std::size_t step) {
  if (window == 0 || step == 0 || step > window) {
    throw Error(Errc::kBadGeometry, "require 0 < step <= window (window=" +
                                        std::to_string(window) +
                                        ", step=" + std::to_string(step) + ")");
  }
  WindowedDataset ds;
  ds.window_size = window;
  ds.step = step;
  ds.class_map = class_map;

  std::size_t total = 0;
  for (const auto& seg : segments) total += window_count(seg.samples.size(), window, step);
  ds.values.reserve(total * window * kChannels);
  ds.labels.reserve(total);
  ds.sources.reserve(total);

  std::vector<std::string> per_sample;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const LabeledSegment& seg = segments[s];
    per_sample.assign(seg.samples.size(), seg.label);
    for (std::size_t off : window_offsets(seg.samples.size(), window, step)) {
      const std::string label =
          mode_label(std::span<const std::string>(per_sample).subspan(off, window));
      for (std::size_t r = off; r < off + window; ++r) {
        const Sample& smp = seg.samples[r];
        ds.values.push_back(static_cast<float>(smp.x));
        ds.values.push_back(static_cast<float>(smp.y));
        ds.values.push_back(static_cast<float>(smp.z));
      }
      ds.labels.push_back(static_cast<std::uint16_t>(class_map.index_of(label)));
      ds.sources.push_back({s, off});
    }
  }
  return ds;
}

std::map<std::string, std::size_t> projected_windows(
    std::span<const LabeledSegment> segments, std::size_t window, std::size_t step) {
  std::map<std::string, std::size_t> counts;
  for (const auto& seg : segments) {
    counts[seg.label] += window_count(seg.samples.size(), window, step);
  }
  return counts;
}

std::vector<LabeledSegment> balance(std::span<const LabeledSegment> segments,
                                    std::uint64_t seed, std::size_t window,
                                    std::size_t step,
                                    std::span<const std::string> required) {
  if (window == 0 || step == 0 || step > window) {
    throw Error(Errc::kBadGeometry, "require 0 < step <= window");
  }
  // Class order = order of first appearance, then any required-but-absent.
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    auto& m = members[segments[i].label];
    if (m.empty()) order.push_back(segments[i].label);
    m.push_back(i);
  }
  for (const auto& r : required) {
    if (!members.count(r)) {
      throw Error(Errc::kEmptyClass, "no segments for class '" + r + "'");
    }
  }
  if (order.empty()) throw Error(Errc::kEmptyClass, "no segments");

  auto counts = projected_windows(segments, window, step);
  std::size_t majority = 0;
  for (const auto& label : order) {
    if (counts[label] == 0) {
      throw Error(Errc::kEmptyClass, "class '" + label +
                                         "' projects no windows of size " +
                                         std::to_string(window));
    }
    majority = std::max(majority, counts[label]);
  }

  std::vector<LabeledSegment> out(segments.begin(), segments.end());
  Rng rng(seed);
  for (const auto& label : order) {
    const auto& pool = members[label];
    std::size_t have = counts[label];
    while (have < majority) {
      const std::size_t pick = pool[rng.uniform_index(pool.size())];
      out.push_back(segments[pick]);
      have += window_count(segments[pick].samples.size(), window, step);
    }
  }
  return out;
}

SplitPair split(const WindowedDataset& ds, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(Errc::kDegenerateSplit, "ratio must lie in (0, 1)");
  }
  const std::size_t n = ds.size();
  const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  if (n < 2 || n_train == 0 || n_train == n) {
    throw Error(Errc::kDegenerateSplit,
                std::to_string(n) + " windows at ratio " + std::to_string(ratio) +
                    " leaves one side empty");
  }
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(seed);
  rng.shuffle(idx);

  SplitPair out;
  out.seed = seed;
  out.train_indices.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test_indices.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  out.train = ds.subset(out.train_indices);
  out.test = ds.subset(out.test_indices);
  return out;
}

WindowedDataset collapse_binary(const WindowedDataset& ds, const std::string& other_name) {
  const std::string positive = ds.class_map.names.at(ds.class_map.positive);
  WindowedDataset out = ds;
  out.class_map = ClassMap::make({positive, other_name}, positive);
  for (auto& l : out.labels) {
    l = static_cast<std::uint16_t>(l == ds.class_map.positive ? 0 : 1);
  }
  return out;
}

}  // namespace bitesense
