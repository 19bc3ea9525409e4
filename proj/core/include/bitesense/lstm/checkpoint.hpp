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


#ifndef BITESENSE_LSTM_CHECKPOINT_HPP_
#define BITESENSE_LSTM_CHECKPOINT_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "bitesense/lstm/optimizer.hpp"
#include "bitesense/lstm/params.hpp"
#include "bitesense/window_pipeline.hpp"

namespace bitesense::lstm {

// Checkpoints are JSON documents:
//
//   {"format": "bitesense.checkpoint", "version": 1, "dtype": "f32" | "f64",
//    "dims": {...}, "window_size": W, "class_map": {"names": [...], "positive": p},
//    "has_optimizer_state": bool, "optimizer": {...}?,
//    "tensors": [{"name", "rows", "cols", "data": base64}...],
//    "moments_m": [...]?, "moments_v": [...]?, "checksum": "crc32:%08x"}
//
// Tensor data is the little-endian IEEE-754 column-major payload; the
// checksum is CRC-32 over all tensor payloads in document order. f32 is the
// default storage; double-precision models are stored as f64 so the
// round-trip stays bit-exact.
inline constexpr int kCheckpointVersion = 1;
inline constexpr std::string_view kCheckpointFormat = "bitesense.checkpoint";

template <typename T>
struct Checkpoint {
  ModelParams<T> params;
  ClassMap class_map;
  std::size_t window_size = 0;
  std::optional<OptimizerState<T>> optimizer;
};

template <typename T>
std::string encode_checkpoint(const Checkpoint<T>& ckpt);

// Accepts either storage dtype and converts to T.
// Throws Error{kVersionMismatch | kCorruptChecksum | kShapeMismatch}.
template <typename T>
Checkpoint<T> decode_checkpoint(std::string_view text);

// "f32" or "f64". Throws like decode_checkpoint.
std::string checkpoint_dtype(std::string_view text);

template <typename T>
void save_checkpoint(const Checkpoint<T>& ckpt, const std::filesystem::path& path);

// Throws Error{kIoError} in addition to the decode errors.
template <typename T>
Checkpoint<T> load_checkpoint(const std::filesystem::path& path);

}  // namespace bitesense::lstm

#endif  // BITESENSE_LSTM_CHECKPOINT_HPP_
