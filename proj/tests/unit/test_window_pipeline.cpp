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


#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "bitesense/rng.hpp"
#include "bitesense/window_pipeline.hpp"
#include "test_util.hpp"

namespace bitesense {
namespace {

using testing::segment;

TEST(WindowCount, Examples) {
  EXPECT_EQ(window_count(150, 150, 10), 1u);
  EXPECT_EQ(window_count(100, 150, 10), 0u);
  EXPECT_EQ(window_count(50, 50, 10), 1u);
  // Closed form against a counting loop.
  std::size_t counted = 0;
  for (std::size_t k = 0; k + 150 <= 272822; k += 10) ++counted;
  EXPECT_EQ(counted, 27268u);
  EXPECT_EQ(window_count(272822, 150, 10), counted);
  EXPECT_ERRC(window_count(10, 0, 1), Errc::kBadGeometry);
  EXPECT_ERRC(window_count(10, 5, 0), Errc::kBadGeometry);
  EXPECT_ERRC(window_offsets(10, 5, 6), Errc::kBadGeometry);
}

TEST(Slide, Examples) {
  const auto cmap = ClassMap::make({"eating", "other"}, "eating");
  const std::vector<LabeledSegment> l50 = {segment("eating", 50)};
  EXPECT_EQ(slide(l50, cmap, 50, 10).size(), 1u);
  const std::vector<LabeledSegment> l149 = {segment("eating", 149)};
  EXPECT_EQ(slide(l149, cmap, 150, 10).size(), 0u);

  const std::vector<LabeledSegment> l200 = {segment("other", 200)};
  const auto ds = slide(l200, cmap, 150, 10);
  ASSERT_EQ(ds.size(), 6u);
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_EQ(ds.sources[k].offset, 10 * k);
    EXPECT_EQ(ds.labels[k], 1);
    // Row-major: time step then x, y, z. x carries the sample index.
    EXPECT_EQ(ds.window(k)[0], static_cast<float>(10 * k));
    EXPECT_EQ(ds.window(k)[3 * 149], static_cast<float>(10 * k + 149));
    EXPECT_FLOAT_EQ(ds.window(k)[2], 9.81f);
  }
}

TEST(Slide, WindowsNeverSpanSegments) {
  const auto cmap = ClassMap::make({"eating", "other"}, "eating");
  const std::vector<LabeledSegment> segs = {segment("eating", 35, "a"), segment("other", 35, "b")};
  const auto ds = slide(segs, cmap, 20, 5);
  ASSERT_EQ(ds.size(), 8u);  // 4 per segment; none straddle the boundary
  for (std::size_t k = 0; k < ds.size(); ++k) {
    EXPECT_EQ(ds.sources[k].segment, k / 4);
    EXPECT_EQ(ds.labels[k], k / 4);
  }
}

TEST(ModeLabel, Examples) {
  std::vector<std::string> all(150, "eating");
  EXPECT_EQ(mode_label(all), "eating");

  std::vector<std::string> mixed(60, "other");
  mixed.insert(mixed.end(), 90, "eating");
  EXPECT_EQ(mode_label(mixed), "eating");

  std::vector<std::string> tie(75, "eating");
  tie.insert(tie.end(), 75, "other");
  EXPECT_EQ(mode_label(tie), "other");
}

TEST(OneHot, Examples) {
  EXPECT_EQ(one_hot(0, 2), (std::vector<float>{1, 0}));
  EXPECT_EQ(one_hot(1, 2), (std::vector<float>{0, 1}));
  EXPECT_ERRC(one_hot(2, 2), Errc::kIndexOutOfRange);
}

TEST(Balance, AlreadyBalancedIsUnchanged) {
  // 100 windows each: length W + 99 S.
  const std::vector<LabeledSegment> segs = {segment("a", 150 + 99 * 10, "r1"),
                                            segment("b", 150 + 99 * 10, "r2")};
  const auto out = balance(segs, 1, 150, 10);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].source, segs[0].source);
  EXPECT_EQ(out[1].source, segs[1].source);
}

TEST(Balance, DuplicatesMinorityUntilItReachesTheMajority) {
  // A projects 100 windows; B has one 30-window segment.
  std::vector<LabeledSegment> segs = {segment("a", 150 + 99 * 10, "r1"),
                                      segment("b", 150 + 29 * 10, "r2")};
  const auto out = balance(segs, 3, 150, 10);
  const auto counts = projected_windows(out, 150, 10);
  EXPECT_EQ(counts.at("a"), 100u);
  EXPECT_GE(counts.at("b"), 100u);
  EXPECT_LE(counts.at("b"), 129u);
  EXPECT_EQ(counts.at("b"), 120u);  // four copies of the only segment
  // Originals first, in order.
  EXPECT_EQ(out[0].source, segs[0].source);
  EXPECT_EQ(out[1].source, segs[1].source);
}

TEST(Balance, DeterministicForASeed) {
  std::vector<LabeledSegment> segs;
  for (int i = 0; i < 20; ++i) segs.push_back(segment("a", 400, "a" + std::to_string(i)));
  for (int i = 0; i < 3; ++i) segs.push_back(segment("b", 160 + 40 * i, "b" + std::to_string(i)));
  const auto one = balance(segs, 42, 150, 10);
  const auto two = balance(segs, 42, 150, 10);
  ASSERT_EQ(one.size(), two.size());
  for (std::size_t i = 0; i < one.size(); ++i) EXPECT_EQ(one[i].source, two[i].source);
}

TEST(Balance, EmptyClass) {
  const std::vector<LabeledSegment> segs = {segment("a", 200), segment("b", 100)};
  EXPECT_ERRC(balance(segs, 0, 150, 10), Errc::kEmptyClass);
  const std::vector<LabeledSegment> only_a = {segment("a", 200)};
  const std::vector<std::string> required = {"a", "b"};
  EXPECT_ERRC(balance(only_a, 0, 150, 10, required), Errc::kEmptyClass);
}

WindowedDataset numbered(std::size_t n) {
  WindowedDataset ds;
  ds.window_size = 1;
  ds.step = 1;
  ds.class_map = ClassMap::make({"eating", "other"}, "eating");
  for (std::size_t i = 0; i < n; ++i) {
    ds.values.insert(ds.values.end(), {static_cast<float>(i), 0.f, 0.f});
    ds.labels.push_back(static_cast<std::uint16_t>(i % 2));
    ds.sources.push_back({i, 0});
  }
  return ds;
}

TEST(Split, Sizes) {
  EXPECT_EQ(split(numbered(100), 0.8, 1).train.size(), 80u);
  EXPECT_EQ(split(numbered(100), 0.8, 1).test.size(), 20u);
  EXPECT_EQ(split(numbered(5), 0.8, 1).train.size(), 4u);
  EXPECT_EQ(split(numbered(5), 0.8, 1).test.size(), 1u);
  EXPECT_ERRC(split(numbered(1), 0.8, 1), Errc::kDegenerateSplit);
  EXPECT_ERRC(split(numbered(10), 1.0, 1), Errc::kDegenerateSplit);
}

TEST(Split, DeterministicDisjointCover) {
  const auto ds = numbered(257);
  const auto a = split(ds, 0.8, 77);
  const auto b = split(ds, 0.8, 77);
  EXPECT_EQ(a.train_indices, b.train_indices);
  EXPECT_EQ(a.test_indices, b.test_indices);
  std::set<std::size_t> all(a.train_indices.begin(), a.train_indices.end());
  all.insert(a.test_indices.begin(), a.test_indices.end());
  EXPECT_EQ(all.size(), 257u);
  // Values follow their indices.
  for (std::size_t k = 0; k < a.test.size(); ++k) {
    EXPECT_EQ(a.test.window(k)[0], static_cast<float>(a.test_indices[k]));
  }
  EXPECT_NE(split(ds, 0.8, 78).train_indices, a.train_indices);
}

TEST(CollapseBinary, PositiveKeepsIndexZero) {
  const auto cmap = ClassMap::make({"smoking", "eating", "jogging"}, "eating");
  const std::vector<LabeledSegment> segs = {segment("smoking", 20), segment("eating", 20),
                                            segment("jogging", 20)};
  const auto ds = collapse_binary(slide(segs, cmap, 20, 20));
  EXPECT_EQ(ds.class_map.names, (std::vector<std::string>{"eating", "other"}));
  EXPECT_EQ(ds.class_map.positive, 0u);
  EXPECT_EQ(ds.labels, (std::vector<std::uint16_t>{1, 0, 1}));
}

TEST(ClassMap, Validation) {
  EXPECT_ERRC(ClassMap::make({"a", "b"}, "c"), Errc::kUnknownLabel);
  EXPECT_ERRC(ClassMap::make({"a", "a"}, "a"), Errc::kBadGeometry);
  EXPECT_EQ(ClassMap::make({"a", "b"}, "b").index_of("b"), 1u);
}

}  // namespace
}  // namespace bitesense
