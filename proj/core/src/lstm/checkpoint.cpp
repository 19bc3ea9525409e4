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


#include "bitesense/lstm/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>

#include <zlib.h>

#include "../base64.hpp"
#include "bitesense/dataset_io.hpp"
#include "bitesense/error.hpp"
#include "json.hpp"

namespace bitesense::lstm {
namespace {

using Json = nlohmann::ordered_json;

template <typename S>
std::string to_le_bytes(std::span<const S> values) {
  using U = std::conditional_t<sizeof(S) == 4, std::uint32_t, std::uint64_t>;
  std::string out(values.size() * sizeof(S), '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const U bits = std::bit_cast<U>(values[i]);
    for (std::size_t b = 0; b < sizeof(S); ++b) {
      out[i * sizeof(S) + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
  }
  return out;
}

template <typename S>
void from_le_bytes(std::string_view bytes, std::span<S> out) {
  using U = std::conditional_t<sizeof(S) == 4, std::uint32_t, std::uint64_t>;
  for (std::size_t i = 0; i < out.size(); ++i) {
    U bits = 0;
    for (std::size_t b = 0; b < sizeof(S); ++b) {
      bits |= static_cast<U>(static_cast<unsigned char>(bytes[i * sizeof(S) + b])) << (8 * b);
    }
    out[i] = std::bit_cast<S>(bits);
  }
}

template <typename T>
std::string tensor_payload(std::span<const T> data, bool f64) {
  if (f64) {
    std::vector<double> wide(data.begin(), data.end());
    return to_le_bytes<double>(wide);
  }
  std::vector<float> narrow(data.begin(), data.end());
  return to_le_bytes<float>(narrow);
}

template <typename T>
Json encode_tensors(const ModelParams<T>& p, bool f64, uLong& crc) {
  Json arr = Json::array();
  for (const auto& t : p.tensors()) {
    const std::string bytes = tensor_payload<T>(t.data, f64);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()),
                static_cast<uInt>(bytes.size()));
    arr.push_back({{"name", t.name},
                   {"rows", t.rows},
                   {"cols", t.cols},
                   {"data", detail::base64_encode(bytes)}});
  }
  return arr;
}

template <typename T>
void decode_tensors(const Json& arr, ModelParams<T>& p, bool f64, uLong& crc) {
  auto tensors = p.tensors();
  if (!arr.is_array() || arr.size() != tensors.size()) {
    throw Error(Errc::kShapeMismatch, "tensor list does not match model layout");
  }
  const std::size_t width = f64 ? 8 : 4;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const Json& t = arr[i];
    auto& dst = tensors[i];
    if (t.at("name").get<std::string>() != dst.name ||
        t.at("rows").get<Eigen::Index>() != dst.rows ||
        t.at("cols").get<Eigen::Index>() != dst.cols) {
      throw Error(Errc::kShapeMismatch,
                  "tensor " + std::to_string(i) + " ('" + t.at("name").get<std::string>() +
                      "') does not match expected '" + std::string(dst.name) + "'");
    }
    auto bytes = detail::base64_decode(t.at("data").get<std::string>());
    if (!bytes || bytes->size() != dst.data.size() * width) {
      throw Error(Errc::kCorruptChecksum, "tensor '" + std::string(dst.name) +
                                              "' payload is damaged");
    }
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes->data()),
                static_cast<uInt>(bytes->size()));
    if (f64) {
      std::vector<double> tmp(dst.data.size());
      from_le_bytes<double>(*bytes, tmp);
      for (std::size_t j = 0; j < tmp.size(); ++j) dst.data[j] = static_cast<T>(tmp[j]);
    } else {
      std::vector<float> tmp(dst.data.size());
      from_le_bytes<float>(*bytes, tmp);
      for (std::size_t j = 0; j < tmp.size(); ++j) dst.data[j] = static_cast<T>(tmp[j]);
    }
  }
}

std::string crc_string(uLong crc) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "crc32:%08lx", static_cast<unsigned long>(crc));
  return buf;
}

Json parse_document(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    // A truncated or damaged file fails here before any checksum can be read.
    throw Error(Errc::kCorruptChecksum, std::string("unreadable checkpoint: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != kCheckpointFormat) {
    throw Error(Errc::kCorruptChecksum, "not a bitesense checkpoint");
  }
  const int version = doc.value("version", -1);
  if (version != kCheckpointVersion) {
    throw Error(Errc::kVersionMismatch, "checkpoint version " + std::to_string(version) +
                                            ", supported " +
                                            std::to_string(kCheckpointVersion));
  }
  return doc;
}

}  // namespace

std::string checkpoint_dtype(std::string_view text) {
  return parse_document(text).value("dtype", "f32");
}

template <typename T>
std::string encode_checkpoint(const Checkpoint<T>& ckpt) {
  const bool f64 = std::is_same_v<T, double>;
  const auto& d = ckpt.params.dims;
  Json doc;
  doc["format"] = kCheckpointFormat;
  doc["version"] = kCheckpointVersion;
  doc["dtype"] = f64 ? "f64" : "f32";
  doc["dims"] = {{"input", d.input},
                 {"fc_units", d.fc_units},
                 {"hidden", d.hidden},
                 {"classes", d.classes}};
  doc["window_size"] = ckpt.window_size;
  doc["class_map"] = {{"names", ckpt.class_map.names},
                      {"positive", ckpt.class_map.positive}};
  doc["has_optimizer_state"] = ckpt.optimizer.has_value();

  uLong crc = crc32(0L, Z_NULL, 0);
  if (ckpt.optimizer) {
    const auto& o = *ckpt.optimizer;
    doc["optimizer"] = {{"kind", optimizer_name(o.kind)},
                        {"step", o.step},
                        {"beta1", o.adam.beta1},
                        {"beta2", o.adam.beta2},
                        {"epsilon", o.adam.epsilon}};
  }
  doc["tensors"] = encode_tensors(ckpt.params, f64, crc);
  if (ckpt.optimizer) {
    doc["moments_m"] = encode_tensors(ckpt.optimizer->m, f64, crc);
    doc["moments_v"] = encode_tensors(ckpt.optimizer->v, f64, crc);
  }
  doc["checksum"] = crc_string(crc);
  return doc.dump(1) + "\n";
}

template <typename T>
Checkpoint<T> decode_checkpoint(std::string_view text) {
  const Json doc = parse_document(text);
  try {
    const std::string dtype = doc.value("dtype", "f32");
    if (dtype != "f32" && dtype != "f64") {
      throw Error(Errc::kCorruptChecksum, "unknown dtype '" + dtype + "'");
    }
    const bool f64 = dtype == "f64";

    Checkpoint<T> ckpt;
    ModelDims dims;
    const Json& jd = doc.at("dims");
    dims.input = jd.at("input").get<std::size_t>();
    dims.fc_units = jd.at("fc_units").get<std::size_t>();
    dims.hidden = jd.at("hidden").get<std::size_t>();
    dims.classes = jd.at("classes").get<std::size_t>();
    ckpt.window_size = doc.at("window_size").get<std::size_t>();
    ckpt.class_map.names = doc.at("class_map").at("names").get<std::vector<std::string>>();
    ckpt.class_map.positive = doc.at("class_map").at("positive").get<std::size_t>();
    if (ckpt.class_map.names.size() != dims.classes ||
        ckpt.class_map.positive >= dims.classes) {
      throw Error(Errc::kShapeMismatch, "class map does not match output dimension");
    }

    uLong crc = crc32(0L, Z_NULL, 0);
    ckpt.params = ModelParams<T>::zeros(dims);
    decode_tensors(doc.at("tensors"), ckpt.params, f64, crc);
    if (doc.at("has_optimizer_state").get<bool>()) {
      const Json& o = doc.at("optimizer");
      auto state = OptimizerState<T>::fresh(dims, parse_optimizer(o.at("kind").get<std::string>()));
      state.step = o.at("step").get<std::uint64_t>();
      state.adam.beta1 = o.at("beta1").get<double>();
      state.adam.beta2 = o.at("beta2").get<double>();
      state.adam.epsilon = o.at("epsilon").get<double>();
      decode_tensors(doc.at("moments_m"), state.m, f64, crc);
      decode_tensors(doc.at("moments_v"), state.v, f64, crc);
      ckpt.optimizer = std::move(state);
    }
    if (doc.at("checksum").get<std::string>() != crc_string(crc)) {
      throw Error(Errc::kCorruptChecksum, "checksum mismatch");
    }
    return ckpt;
  } catch (const Json::exception& e) {
    throw Error(Errc::kCorruptChecksum, std::string("incomplete checkpoint: ") + e.what());
  }
}

template <typename T>
void save_checkpoint(const Checkpoint<T>& ckpt, const std::filesystem::path& path) {
  write_file_atomic(path, encode_checkpoint(ckpt));
}

template <typename T>
Checkpoint<T> load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint<T>(read_file(path));
}

template std::string encode_checkpoint<float>(const Checkpoint<float>&);
template std::string encode_checkpoint<double>(const Checkpoint<double>&);
template Checkpoint<float> decode_checkpoint<float>(std::string_view);
template Checkpoint<double> decode_checkpoint<double>(std::string_view);
template void save_checkpoint<float>(const Checkpoint<float>&, const std::filesystem::path&);
template void save_checkpoint<double>(const Checkpoint<double>&, const std::filesystem::path&);
template Checkpoint<float> load_checkpoint<float>(const std::filesystem::path&);
template Checkpoint<double> load_checkpoint<double>(const std::filesystem::path&);

}  // namespace bitesense::lstm
