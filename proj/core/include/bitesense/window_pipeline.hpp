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


#ifndef BITESENSE_WINDOW_PIPELINE_HPP_
#define BITESENSE_WINDOW_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bitesense/error.hpp"
#include "bitesense/signal_ingest.hpp"

namespace bitesense {

inline constexpr std::size_t kChannels = 3;  // x, y, z

struct ClassMap {
  std::vector<std::string> names;
  std::size_t positive = 0;

  // Throws Error{kUnknownLabel} if `positive_name` is not among `names`
  // and Error{kBadGeometry} on duplicate names.
  static ClassMap make(std::vector<std::string> names,
                       const std::string& positive_name);

  std::size_t size() const { return names.size(); }
  // Throws Error{kUnknownLabel}.
  std::size_t index_of(const std::string& name) const;

  friend bool operator==(const ClassMap&, const ClassMap&) = default;
};

struct WindowSource {
  std::size_t segment = 0;
  std::size_t offset = 0;

  friend bool operator==(const WindowSource&, const WindowSource&) = default;
};

// N windows of W x 3 float values stored contiguously, row-major per window
// (row = time step, columns = x, y, z).
struct WindowedDataset {
  std::size_t window_size = 0;
  std::size_t step = 0;
  ClassMap class_map;
  std::vector<float> values;
  std::vector<std::uint16_t> labels;
  std::vector<WindowSource> sources;

  std::size_t size() const { return labels.size(); }
  std::size_t window_stride() const { return window_size * kChannels; }
  std::span<const float> window(std::size_t i) const {
    return {values.data() + i * window_stride(), window_stride()};
  }
  // N x C row-major one-hot matrix.
  std::vector<float> targets() const;
  WindowedDataset subset(std::span<const std::size_t> indices) const;
};

struct SplitPair {
  WindowedDataset train;
  WindowedDataset test;
  std::uint64_t seed = 0;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

// max(0, floor((L - W) / S) + 1). Throws Error{kBadGeometry} for W == 0 or S == 0.
std::size_t window_count(std::size_t length, std::size_t window, std::size_t step);

// Start offsets k*S with k*S + W <= L. Throws Error{kBadGeometry} unless 0 < S <= W.
std::vector<std::size_t> window_offsets(std::size_t length, std::size_t window,
                                        std::size_t step);

// Most frequent label; ties go to the tied label whose last occurrence is
// latest. `labels` must be non-empty.
std::string mode_label(std::span<const std::string> labels);

std::vector<float> one_hot(std::size_t label_index, std::size_t num_classes);

// Windows never span two segments. Output order: segments in input order,
// windows in offset order.
WindowedDataset slide(std::span<const LabeledSegment> segments,
                      const ClassMap& class_map, std::size_t window,
                      std::size_t step);

// Projected window count per label for the given geometry.
std::map<std::string, std::size_t> projected_windows(
    std::span<const LabeledSegment> segments, std::size_t window, std::size_t step);

// Duplicates whole, uniformly chosen segments of every minority class until
// its projected window count reaches the majority count. Original segments
// keep their order; duplicates are appended class by class in order of
// first appearance. Throws Error{kEmptyClass} if a label in `required`
// (or any present label) projects zero windows.
std::vector<LabeledSegment> balance(std::span<const LabeledSegment> segments,
                                    std::uint64_t seed, std::size_t window,
                                    std::size_t step,
                                    std::span<const std::string> required = {});

// Seeded shuffle of window indices; the first round(ratio * N) go to train.
SplitPair split(const WindowedDataset& ds, double ratio, std::uint64_t seed);

// Relabels to {positive, other}: positive keeps index 0, everything else
// becomes index 1.
WindowedDataset collapse_binary(const WindowedDataset& ds,
                                const std::string& other_name = "other");

}  // namespace bitesense

#endif  // BITESENSE_WINDOW_PIPELINE_HPP_
