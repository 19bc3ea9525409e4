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


#ifndef BITESENSE_DATASET_IO_HPP_
#define BITESENSE_DATASET_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "bitesense/window_pipeline.hpp"

namespace bitesense {

// Windowed dataset container, all integers little-endian:
//
//   offset  size  field
//   0       4     magic "BWDS"
//   4       2     version (u16, currently 1)
//   6       4     N  window count (u32)
//   10      4     W  window size (u32)
//   14      4     C  class count (u32)
//   18      4     S  step (u32)
//   22      ...   C class names, each u16 byte length + UTF-8 bytes
//   ...     2     positive class index (u16)
//   ...     N*W*3*4  window values, f32 IEEE-754, window-major, then time, then x/y/z
//   ...     N*2   label indices (u16)
//
// Window origins (`sources`) are not stored.
inline constexpr std::uint16_t kDatasetVersion = 1;

std::string encode_dataset(const WindowedDataset& ds);
// Throws Error{kMalformedDataset | kVersionMismatch}.
WindowedDataset decode_dataset(std::string_view bytes);

void save_dataset(const WindowedDataset& ds, const std::filesystem::path& path);
WindowedDataset load_dataset(const std::filesystem::path& path);

// Whole-file helpers shared by the I/O modules. write_file_atomic writes to a
// sibling temporary and renames it into place. Both throw Error{kIoError}.
std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace bitesense

#endif  // BITESENSE_DATASET_IO_HPP_
