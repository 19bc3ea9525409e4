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


#include "bitesense/cli/service.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>

#include "bitesense/cli/zip.hpp"
#include "bitesense/dataset_io.hpp"
#include "bitesense/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace bitesense::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

bool safe_id(const std::string& id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

// Figures out which member is which by parsing both ways.
UploadPair classify(std::vector<ZipMember> members, const std::vector<std::string>& classes) {
  std::erase_if(members, [](const ZipMember& m) {
    const std::string base = fs::path(m.name).filename().string();
    return m.name.starts_with("__MACOSX/") || base.empty() || base.front() == '.';
  });
  if (members.size() != 2) {
    throw Error(Errc::kMalformedDescriptor,
                "upload: expected 2 files in the archive, found " + std::to_string(members.size()));
  }
  std::string first_error;
  for (int order = 0; order < 2; ++order) {
    const auto& rec = members[static_cast<std::size_t>(order)];
    const auto& ann = members[static_cast<std::size_t>(1 - order)];
    try {
      parse_recording(rec.data);
      parse_annotations(ann.data, classes);
      return {rec.data, ann.data};
    } catch (const Error& e) {
      if (first_error.empty()) first_error = e.what();
    }
  }
  throw Error(Errc::kMalformedDescriptor,
              "upload: archive must hold one recording CSV and one annotation document (" +
                  first_error + ")");
}

}  // namespace

UploadPair split_upload(std::string_view archive, const std::vector<std::string>& classes) {
  return classify(read_zip(archive), classes);
}

namespace {

Json record_json(const UploadRecord& r) {
  return Json{{"original", r.original},
              {"stored", r.stored},
              {"bytes", r.bytes},
              {"received_ms", r.received_ms}};
}

}  // namespace

std::string unique_name(std::int64_t received_ms, std::uint32_t suffix,
                        std::string_view original) {
  char hex[8];
  std::snprintf(hex, sizeof(hex), "%06x", suffix & 0xffffffu);
  return std::to_string(received_ms) + "-" + hex +
         fs::path(std::string(original)).extension().string();
}

Trace downsample_trace(std::span<const Sample> s, std::size_t max_points) {
  Trace tr;
  tr.source_samples = s.size();
  const auto push = [&](std::int64_t t, double x, double y, double z) {
    tr.t.push_back(t);
    tr.x.push_back(x);
    tr.y.push_back(y);
    tr.z.push_back(z);
  };
  max_points = std::max<std::size_t>(max_points, 2);
  if (s.size() <= max_points) {
    for (const auto& p : s) push(p.t_ms, p.x, p.y, p.z);
    return tr;
  }
  const std::size_t bins = max_points / 2;
  // Ordered (first, second) extremes of one axis within [lo, hi).
  const auto extremes = [&](std::size_t lo, std::size_t hi, double Sample::*axis) {
    std::size_t imin = lo;
    std::size_t imax = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      if (s[i].*axis < s[imin].*axis) imin = i;
      if (s[i].*axis > s[imax].*axis) imax = i;
    }
    return imin <= imax ? std::pair{s[imin].*axis, s[imax].*axis}
                        : std::pair{s[imax].*axis, s[imin].*axis};
  };
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t lo = b * s.size() / bins;
    const std::size_t hi = (b + 1) * s.size() / bins;
    const auto [x0, x1] = extremes(lo, hi, &Sample::x);
    const auto [y0, y1] = extremes(lo, hi, &Sample::y);
    const auto [z0, z1] = extremes(lo, hi, &Sample::z);
    push(s[lo].t_ms, x0, y0, z0);
    push(s[hi - 1].t_ms, x1, y1, z1);
  }
  return tr;
}

UploadStore::UploadStore(fs::path root, std::vector<std::string> classes)
    : root_(std::move(root)), classes_(std::move(classes)), suffix_rng_(std::random_device{}()) {
  fs::create_directories(root_ / "uploads");
  fs::create_directories(root_ / "recordings");
}

fs::path UploadStore::dir_of(const std::string& id) const {
  if (!safe_id(id)) throw Error(Errc::kIndexOutOfRange, "unknown recording '" + id + "'");
  return root_ / "recordings" / id;
}

UploadRecord UploadStore::accept(std::string_view original_name, std::string_view archive) {
  const UploadPair pair = split_upload(archive, classes_);

  std::lock_guard lock(mu_);
  UploadRecord rec;
  rec.original = std::string(original_name);
  rec.bytes = archive.size();
  rec.received_ms = now_ms();
  do {
    rec.stored = unique_name(rec.received_ms, static_cast<std::uint32_t>(suffix_rng_()),
                             original_name.empty() ? "upload.zip" : original_name);
  } while (fs::exists(root_ / "uploads" / rec.stored));

  const std::string id = fs::path(rec.stored).stem().string();
  const fs::path dir = root_ / "recordings" / id;
  fs::create_directories(dir);
  write_file_atomic(dir / "recording.csv", pair.recording);
  write_file_atomic(dir / "annotations.json", pair.annotations);
  // The archive lands last so a listed upload always has its extracted pair.
  write_file_atomic(root_ / "uploads" / rec.stored, archive);

  std::ofstream log(root_ / "uploads.log", std::ios::app | std::ios::binary);
  log << record_json(rec).dump() << '\n';
  log.flush();
  if (!log) throw Error(Errc::kIoError, "upload: cannot append to uploads.log");
  return rec;
}

std::vector<std::string> UploadStore::recording_ids() const {
  std::vector<std::string> ids;
  for (const auto& e : fs::directory_iterator(root_ / "recordings")) {
    if (e.is_directory() && fs::exists(e.path() / "recording.csv")) {
      ids.push_back(e.path().filename().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

bool UploadStore::has_recording(const std::string& id) const {
  return safe_id(id) && fs::exists(root_ / "recordings" / id / "recording.csv");
}

RawRecording UploadStore::recording(const std::string& id) const {
  return parse_recording(read_file(dir_of(id) / "recording.csv"), id);
}

std::string UploadStore::annotations(const std::string& id) const {
  std::lock_guard lock(mu_);
  return read_file(dir_of(id) / "annotations.json");
}

void UploadStore::put_annotations(const std::string& id, std::string_view body) {
  parse_annotations(body, classes_);
  std::lock_guard lock(mu_);
  write_file_atomic(dir_of(id) / "annotations.json", body);
}

std::vector<UploadRecord> UploadStore::log() const {
  std::lock_guard lock(mu_);
  std::vector<UploadRecord> out;
  const fs::path path = root_ / "uploads.log";
  if (!fs::exists(path)) return out;
  std::ifstream in(path, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    out.push_back({j.value("original", std::string()), j.value("stored", std::string()),
                   j.value("bytes", std::uint64_t{0}), j.value("received_ms", std::int64_t{0})});
  }
  return out;
}

std::string recordings_json(const UploadStore& store) {
  Json list = Json::array();
  for (const auto& id : store.recording_ids()) {
    Json item{{"id", id}};
    try {
      const RawRecording rec = store.recording(id);
      item["samples"] = rec.samples.size();
      item["start_ms"] = rec.samples.front().t_ms;
      item["stop_ms"] = rec.samples.back().t_ms;
    } catch (const Error& e) {
      item["error"] = e.what();
    }
    list.push_back(std::move(item));
  }
  return Json{{"recordings", list}}.dump();
}

std::string trace_json(const Trace& trace) {
  return Json{{"source_samples", trace.source_samples},
              {"t", trace.t},
              {"x", trace.x},
              {"y", trace.y},
              {"z", trace.z}}
      .dump();
}

namespace {

void send_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(Json{{"error", message}}.dump(), "application/json");
}

std::optional<std::int64_t> query_int(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  const std::string v = req.get_param_value(key);
  std::int64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(Errc::kMalformedRow, std::string("query parameter '") + key + "' is not an integer");
  }
  return out;
}

// Runs a handler, mapping library errors to 4xx so the service stays up.
template <typename F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    const bool missing = e.code() == Errc::kIndexOutOfRange || e.code() == Errc::kIoError;
    send_error(res, missing ? 404 : 400, e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

}  // namespace

void register_routes(httplib::Server& server, UploadStore& store, const fs::path& ui_dir) {
  server.Post("/upload", [&store](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::string name;
      std::string body;
      if (req.is_multipart_form_data()) {
        if (!req.has_file("file")) {
          send_error(res, 400, "multipart upload needs a 'file' field");
          return;
        }
        const auto file = req.get_file_value("file");
        name = file.filename;
        body = file.content;
      } else {
        name = req.has_param("filename") ? req.get_param_value("filename") : "upload.zip";
        body = req.body;
      }
      name = fs::path(name).filename().string();
      const UploadRecord rec = store.accept(name, body);
      res.status = 201;
      res.set_content(record_json(rec).dump(), "application/json");
    });
  });

  server.Get("/recordings", [&store](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { res.set_content(recordings_json(store), "application/json"); });
  });

  server.Get(R"(/recordings/([^/]+)/trace)",
             [&store](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 const std::string id = req.matches[1];
                 if (!store.has_recording(id)) {
                   send_error(res, 404, "unknown recording '" + id + "'");
                   return;
                 }
                 const RawRecording rec = store.recording(id);
                 const auto start = query_int(req, "start_ms");
                 const auto stop = query_int(req, "stop_ms");
                 const auto max_points = query_int(req, "max_points");
                 auto lo = rec.samples.begin();
                 auto hi = rec.samples.end();
                 const auto by_t = [](const Sample& s, std::int64_t t) { return s.t_ms < t; };
                 if (start) lo = std::lower_bound(rec.samples.begin(), rec.samples.end(), *start, by_t);
                 if (stop) {
                   hi = std::upper_bound(rec.samples.begin(), rec.samples.end(), *stop,
                                         [](std::int64_t t, const Sample& s) { return t < s.t_ms; });
                 }
                 if (hi < lo) hi = lo;
                 std::size_t cap = kMaxTracePoints;
                 if (max_points && *max_points > 0) {
                   cap = std::min<std::size_t>(cap, static_cast<std::size_t>(*max_points));
                 }
                 const Trace tr = downsample_trace(
                     std::span<const Sample>(rec.samples.data() + (lo - rec.samples.begin()),
                                             static_cast<std::size_t>(hi - lo)), cap);
                 res.set_content(trace_json(tr), "application/json");
               });
             });

  server.Get(R"(/recordings/([^/]+)/annotations)",
             [&store](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 const std::string id = req.matches[1];
                 if (!store.has_recording(id)) {
                   send_error(res, 404, "unknown recording '" + id + "'");
                   return;
                 }
                 res.set_content(store.annotations(id), "application/json");
               });
             });

  server.Put(R"(/recordings/([^/]+)/annotations)",
             [&store](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 const std::string id = req.matches[1];
                 if (!store.has_recording(id)) {
                   send_error(res, 404, "unknown recording '" + id + "'");
                   return;
                 }
                 store.put_annotations(id, req.body);
                 res.status = 204;
               });
             });

  if (!ui_dir.empty() && fs::is_directory(ui_dir)) {
    server.set_mount_point("/", ui_dir.string());
  } else {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("bitesense upload service\n", "text/plain");
    });
  }
}

}  // namespace bitesense::cli
