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


#ifndef BITESENSE_CLI_SERVICE_HPP_
#define BITESENSE_CLI_SERVICE_HPP_

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bitesense/signal_ingest.hpp"

namespace httplib {
class Server;
}

namespace bitesense::cli {

inline constexpr std::size_t kMaxTracePoints = 5000;

struct UploadRecord {
  std::string original;     // file name as sent by the client
  std::string stored;       // assigned unique name
  std::uint64_t bytes = 0;
  std::int64_t received_ms = 0;
};

// Receipt time in ms, a dash, six hex digits, then the original extension.
std::string unique_name(std::int64_t received_ms, std::uint32_t suffix,
                        std::string_view original);

// Series for plotting on one shared time axis. When the input has more than
// `max_points` samples it is cut into max_points / 2 bins; each bin emits its
// first and last timestamp, and per axis its minimum and maximum in the
// order they occur, so peaks survive.
struct Trace {
  std::vector<std::int64_t> t;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> z;
  std::size_t source_samples = 0;
};

Trace downsample_trace(std::span<const Sample> samples, std::size_t max_points = kMaxTracePoints);

struct UploadPair {
  std::string recording;    // CSV text
  std::string annotations;  // JSON text
};

// Picks the recording and the annotation document out of an uploaded zip
// by parsing each member both ways. Throws Error{kMalformedDescriptor}.
UploadPair split_upload(std::string_view archive, const std::vector<std::string>& classes);

// On-disk layout under the root:
//   uploads/<stored>        original archives, never modified
//   uploads.log             one JSON line per accepted upload
//   recordings/<id>/recording.csv
//   recordings/<id>/annotations.json
// where <id> is the stored name without its extension.
class UploadStore {
 public:
  explicit UploadStore(std::filesystem::path root,
                       std::vector<std::string> classes = default_class_set());

  const std::filesystem::path& root() const { return root_; }

  // Validates a zip holding one recording CSV and one annotation document,
  // then stores it. Throws Error (malformed input) before touching the store.
  UploadRecord accept(std::string_view original_name, std::string_view archive);

  std::vector<std::string> recording_ids() const;
  bool has_recording(const std::string& id) const;
  RawRecording recording(const std::string& id) const;
  std::string annotations(const std::string& id) const;
  // Validates, then replaces the stored document byte for byte.
  void put_annotations(const std::string& id, std::string_view body);

  std::vector<UploadRecord> log() const;

 private:
  std::filesystem::path dir_of(const std::string& id) const;

  std::filesystem::path root_;
  std::vector<std::string> classes_;
  mutable std::mutex mu_;
  std::mt19937_64 suffix_rng_;
};

// JSON response bodies, also used by the tests.
std::string recordings_json(const UploadStore& store);
std::string trace_json(const Trace& trace);

void register_routes(httplib::Server& server, UploadStore& store,
                     const std::filesystem::path& ui_dir);

}  // namespace bitesense::cli

#endif  // BITESENSE_CLI_SERVICE_HPP_
