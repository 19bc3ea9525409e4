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


#include "bitesense/dataset_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "bitesense/error.hpp"

namespace bitesense {
namespace {

constexpr char kMagic[4] = {'B', 'W', 'D', 'S'};

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw Error(Errc::kMalformedDataset, std::string("truncated at ") + what);
    }
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    auto b = reinterpret_cast<const unsigned char*>(bytes_.data() + pos_);
    pos_ += 2;
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    auto b = reinterpret_cast<const unsigned char*>(bytes_.data() + pos_);
    pos_ += 4;
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  }
  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > UINT32_MAX) {
    throw Error(Errc::kMalformedDataset, std::string(what) + " exceeds u32");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::string encode_dataset(const WindowedDataset& ds) {
  if (ds.values.size() != ds.size() * ds.window_stride()) {
    throw Error(Errc::kMalformedDataset, "value buffer does not match N*W*3");
  }
  std::string out(kMagic, 4);
  put_u16(out, kDatasetVersion);
  put_u32(out, checked_u32(ds.size(), "N"));
  put_u32(out, checked_u32(ds.window_size, "W"));
  put_u32(out, checked_u32(ds.class_map.size(), "C"));
  put_u32(out, checked_u32(ds.step, "S"));
  for (const auto& name : ds.class_map.names) {
    if (name.size() > UINT16_MAX) {
      throw Error(Errc::kMalformedDataset, "class name too long");
    }
    put_u16(out, static_cast<std::uint16_t>(name.size()));
    out += name;
  }
  put_u16(out, static_cast<std::uint16_t>(ds.class_map.positive));
  out.reserve(out.size() + ds.values.size() * 4 + ds.labels.size() * 2);
  for (float v : ds.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  for (std::uint16_t l : ds.labels) put_u16(out, l);
  return out;
}

WindowedDataset decode_dataset(std::string_view bytes) {
  Reader in(bytes);
  if (in.take(4, "magic") != std::string_view(kMagic, 4)) {
    throw Error(Errc::kMalformedDataset, "bad magic (expected BWDS)");
  }
  const std::uint16_t version = in.u16("version");
  if (version != kDatasetVersion) {
    throw Error(Errc::kVersionMismatch,
                "dataset version " + std::to_string(version) + ", supported " +
                    std::to_string(kDatasetVersion));
  }
  WindowedDataset ds;
  const std::uint32_t n = in.u32("N");
  ds.window_size = in.u32("W");
  const std::uint32_t c = in.u32("C");
  ds.step = in.u32("S");
  if (ds.window_size == 0 || ds.step == 0 || ds.step > ds.window_size || c < 1) {
    throw Error(Errc::kMalformedDataset, "invalid geometry in header");
  }
  std::vector<std::string> names;
  names.reserve(c);
  for (std::uint32_t i = 0; i < c; ++i) {
    const std::uint16_t len = in.u16("class name length");
    names.emplace_back(in.take(len, "class name"));
  }
  const std::uint16_t positive = in.u16("positive index");
  if (positive >= c) {
    throw Error(Errc::kMalformedDataset, "positive class index out of range");
  }
  ds.class_map.names = std::move(names);
  ds.class_map.positive = positive;

  const std::size_t count = static_cast<std::size_t>(n) * ds.window_stride();
  in.need(count * 4 + static_cast<std::size_t>(n) * 2, "payload");
  ds.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    ds.values[i] = std::bit_cast<float>(in.u32("values"));
    if (!std::isfinite(ds.values[i])) {
      throw Error(Errc::kMalformedDataset, "non-finite window value");
    }
  }
  ds.labels.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    ds.labels[i] = in.u16("labels");
    if (ds.labels[i] >= c) {
      throw Error(Errc::kMalformedDataset, "label index out of range");
    }
  }
  if (!in.done()) throw Error(Errc::kMalformedDataset, "trailing bytes");
  return ds;
}

void save_dataset(const WindowedDataset& ds, const std::filesystem::path& path) {
  write_file_atomic(path, encode_dataset(ds));
}

WindowedDataset load_dataset(const std::filesystem::path& path) {
  return decode_dataset(read_file(path));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(Errc::kIoError, "read failed: " + path.string());
  return std::move(ss).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  namespace fs = std::filesystem;
  static thread_local std::mt19937_64 salt{std::random_device{}()};
  char suffix[32];
  std::snprintf(suffix, sizeof(suffix), ".tmp-%016llx",
                static_cast<unsigned long long>(salt()));
  fs::path tmp = path;
  tmp += suffix;
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::kIoError, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(Errc::kIoError, "write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::kIoError, "rename to " + path.string() + " failed");
  }
}

}  // namespace bitesense
