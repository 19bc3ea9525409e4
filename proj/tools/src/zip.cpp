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


#include "bitesense/cli/zip.hpp"

#include <zlib.h>

#include <cstdint>
#include <limits>

#include "bitesense/error.hpp"

namespace bitesense::cli {
namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
constexpr std::size_t kEndSize = 22;

[[noreturn]] void bad(const std::string& what) {
  throw Error(Errc::kMalformedDescriptor, "zip: " + what);
}

std::uint32_t rd(std::string_view s, std::size_t at, int bytes) {
  if (at + static_cast<std::size_t>(bytes) > s.size()) bad("truncated archive");
  std::uint32_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) {
    v = (v << 8) | static_cast<unsigned char>(s[at + static_cast<std::size_t>(i)]);
  }
  return v;
}

void wr(std::string& out, std::uint32_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t crc_of(std::string_view s) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in slices.
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t n = std::min<std::size_t>(s.size() - pos, 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(s.data() + pos), static_cast<uInt>(n));
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

std::string inflate_raw(std::string_view in, std::size_t expected) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) bad("inflate init failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const std::size_t produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) bad("corrupt deflate stream");
  return out;
}

std::string deflate_raw(std::string_view in) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(Errc::kIoError, "zip: deflate init failed");
  }
  std::string out(deflateBound(&zs, static_cast<uLong>(in.size())), '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw Error(Errc::kIoError, "zip: deflate failed");
  return out;
}

}  // namespace

std::vector<ZipMember> read_zip(std::string_view a) {
  if (a.size() < kEndSize) bad("archive too small");
  // The end record sits within the last 64 KiB + 22 bytes (comment field).
  std::size_t end = std::string_view::npos;
  const std::size_t floor = a.size() > kEndSize + 0xffff ? a.size() - kEndSize - 0xffff : 0;
  for (std::size_t i = a.size() - kEndSize + 1; i-- > floor;) {
    if (rd(a, i, 4) == kEndSig) {
      end = i;
      break;
    }
  }
  if (end == std::string_view::npos) bad("end of central directory not found");
  const std::uint32_t entries = rd(a, end + 10, 2);
  std::size_t pos = rd(a, end + 16, 4);

  std::vector<ZipMember> out;
  for (std::uint32_t e = 0; e < entries; ++e) {
    if (rd(a, pos, 4) != kCentralSig) bad("bad central directory entry");
    const std::uint32_t flags = rd(a, pos + 8, 2);
    const std::uint32_t method = rd(a, pos + 10, 2);
    const std::uint32_t crc = rd(a, pos + 16, 4);
    const std::uint32_t csize = rd(a, pos + 20, 4);
    const std::uint32_t usize = rd(a, pos + 24, 4);
    const std::uint32_t name_len = rd(a, pos + 28, 2);
    const std::uint32_t extra_len = rd(a, pos + 30, 2);
    const std::uint32_t comment_len = rd(a, pos + 32, 2);
    const std::uint32_t local = rd(a, pos + 42, 4);
    if (pos + 46 + name_len > a.size()) bad("truncated file name");
    std::string name(a.substr(pos + 46, name_len));
    pos += 46 + name_len + extra_len + comment_len;

    if (!name.empty() && name.back() == '/') continue;
    if (flags & 0x1) bad("encrypted member '" + name + "'");
    if (csize == 0xffffffffu || usize == 0xffffffffu) bad("zip64 is not supported");
    if (rd(a, local, 4) != kLocalSig) bad("bad local header for '" + name + "'");
    const std::size_t data_at = local + 30 + rd(a, local + 26, 2) + rd(a, local + 28, 2);
    if (data_at + csize > a.size()) bad("truncated data for '" + name + "'");
    const std::string_view raw = a.substr(data_at, csize);

    ZipMember m{std::move(name), {}};
    if (method == 0) {
      if (csize != usize) bad("stored size mismatch for '" + m.name + "'");
      m.data = std::string(raw);
    } else if (method == 8) {
      m.data = inflate_raw(raw, usize);
    } else {
      bad("unsupported compression method " + std::to_string(method));
    }
    if (crc_of(m.data) != crc) bad("CRC mismatch for '" + m.name + "'");
    out.push_back(std::move(m));
  }
  return out;
}

std::string write_zip(const std::vector<ZipMember>& members) {
  std::string out;
  std::string central;
  for (const auto& m : members) {
    if (m.data.size() > std::numeric_limits<std::uint32_t>::max() ||
        m.name.size() > 0xffff) {
      throw Error(Errc::kIoError, "zip: member too large");
    }
    const std::string packed = deflate_raw(m.data);
    const std::uint32_t crc = crc_of(m.data);
    const auto offset = static_cast<std::uint32_t>(out.size());
    const auto name_len = static_cast<std::uint32_t>(m.name.size());

    wr(out, kLocalSig, 4);
    wr(out, 20, 2);  // version needed
    wr(out, 0, 2);   // flags
    wr(out, 8, 2);   // deflate
    wr(out, 0, 2);   // mod time
    wr(out, 0x21, 2);  // mod date 1980-01-01
    wr(out, crc, 4);
    wr(out, static_cast<std::uint32_t>(packed.size()), 4);
    wr(out, static_cast<std::uint32_t>(m.data.size()), 4);
    wr(out, name_len, 2);
    wr(out, 0, 2);
    out += m.name;
    out += packed;

    wr(central, kCentralSig, 4);
    wr(central, 20, 2);  // made by
    wr(central, 20, 2);  // needed
    wr(central, 0, 2);
    wr(central, 8, 2);
    wr(central, 0, 2);
    wr(central, 0x21, 2);
    wr(central, crc, 4);
    wr(central, static_cast<std::uint32_t>(packed.size()), 4);
    wr(central, static_cast<std::uint32_t>(m.data.size()), 4);
    wr(central, name_len, 2);
    wr(central, 0, 2);  // extra
    wr(central, 0, 2);  // comment
    wr(central, 0, 2);  // disk
    wr(central, 0, 2);  // internal attrs
    wr(central, 0, 4);  // external attrs
    wr(central, offset, 4);
    central += m.name;
  }
  const auto cd_offset = static_cast<std::uint32_t>(out.size());
  out += central;
  wr(out, kEndSig, 4);
  wr(out, 0, 2);
  wr(out, 0, 2);
  wr(out, static_cast<std::uint32_t>(members.size()), 2);
  wr(out, static_cast<std::uint32_t>(members.size()), 2);
  wr(out, static_cast<std::uint32_t>(central.size()), 4);
  wr(out, cd_offset, 4);
  wr(out, 0, 2);
  return out;
}

}  // namespace bitesense::cli
