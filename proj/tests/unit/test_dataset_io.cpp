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

#include <cstring>

#include "bitesense/dataset_io.hpp"
#include "test_util.hpp"

namespace bitesense {
namespace {

WindowedDataset sample_dataset() {
  WindowedDataset ds;
  ds.window_size = 2;
  ds.step = 1;
  ds.class_map = ClassMap::make({"eating", "smoking", "other"}, "eating");
  ds.values = {1, 2, 3, 4, 5, 6, -0.0f, 1e-40f, 7, 8, 9, 10};
  ds.labels = {2, 0};
  return ds;
}

TEST(DatasetIo, EncodeDecode) {
  const auto ds = sample_dataset();
  const std::string bytes = encode_dataset(ds);
  EXPECT_EQ(bytes.substr(0, 4), "BWDS");
  const auto back = decode_dataset(bytes);
  EXPECT_EQ(back.window_size, 2u);
  EXPECT_EQ(back.step, 1u);
  EXPECT_EQ(back.class_map, ds.class_map);
  EXPECT_EQ(back.labels, ds.labels);
  ASSERT_EQ(back.values.size(), ds.values.size());
  EXPECT_EQ(std::memcmp(back.values.data(), ds.values.data(), ds.values.size() * 4), 0);
  EXPECT_EQ(encode_dataset(back), bytes);
}

TEST(DatasetIo, Rejections) {
  const std::string bytes = encode_dataset(sample_dataset());
  std::string magic = bytes;
  magic[0] = 'X';
  EXPECT_ERRC(decode_dataset(magic), Errc::kMalformedDataset);
  std::string version = bytes;
  version[4] = 9;
  EXPECT_ERRC(decode_dataset(version), Errc::kVersionMismatch);
  EXPECT_ERRC(decode_dataset(bytes.substr(0, bytes.size() - 1)), Errc::kMalformedDataset);
  EXPECT_ERRC(decode_dataset(bytes + "x"), Errc::kMalformedDataset);
  std::string label = bytes;
  label[label.size() - 2] = 7;  // label index past the class count
  EXPECT_ERRC(decode_dataset(label), Errc::kMalformedDataset);
}

TEST(DatasetIo, FilesAreWrittenAtomically) {
  testing::TempDir dir;
  const auto ds = sample_dataset();
  save_dataset(ds, dir / "d.bwds");
  EXPECT_EQ(load_dataset(dir / "d.bwds").labels, ds.labels);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++files;
  EXPECT_EQ(files, 1u);  // no temporary left behind
  EXPECT_ERRC(load_dataset(dir / "missing.bwds"), Errc::kIoError);
}

}  // namespace
}  // namespace bitesense
