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


#include "bitesense/signal_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "json.hpp"

#include "bitesense/error.hpp"

namespace bitesense {
namespace {

std::string_view trim_ws(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  field = trim_ws(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string row_error(std::size_t line_no, std::string_view detail) {
  return "line " + std::to_string(line_no) + ": " + std::string(detail);
}

}  // namespace

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kMalformedRow: return "MalformedRow";
    case Errc::kNonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case Errc::kEmptyRecording: return "EmptyRecording";
    case Errc::kMalformedDescriptor: return "MalformedDescriptor";
    case Errc::kInvertedSpan: return "InvertedSpan";
    case Errc::kUnknownLabel: return "UnknownLabel";
    case Errc::kEmptySegment: return "EmptySegment";
    case Errc::kTooFewSamples: return "TooFewSamples";
    case Errc::kBadGeometry: return "BadGeometry";
    case Errc::kIndexOutOfRange: return "IndexOutOfRange";
    case Errc::kEmptyClass: return "EmptyClass";
    case Errc::kDegenerateSplit: return "DegenerateSplit";
    case Errc::kMalformedDataset: return "MalformedDataset";
    case Errc::kShapeMismatch: return "ShapeMismatch";
    case Errc::kNonFiniteInput: return "NonFiniteInput";
    case Errc::kCacheMismatch: return "CacheMismatch";
    case Errc::kEmptySplit: return "EmptySplit";
    case Errc::kDivergedLoss: return "DivergedLoss";
    case Errc::kIoError: return "IoError";
    case Errc::kVersionMismatch: return "VersionMismatch";
    case Errc::kCorruptChecksum: return "CorruptChecksum";
    case Errc::kLengthMismatch: return "LengthMismatch";
    case Errc::kLabelOutOfRange: return "LabelOutOfRange";
  }
  return "Unknown";
}

std::vector<std::string> default_class_set() {
  return {"eating", "smoking", "medication", "jogging", "other"};
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
  });
  return out;
}

RawRecording parse_recording(std::string_view text, std::string device_id) {
  RawRecording rec;
  rec.device_id = std::move(device_id);

  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = trim_ws(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;

    if (!header_seen) {
      header_seen = true;
      if (line != "t_ms,x,y,z") {
        throw Error(Errc::kMalformedRow,
                    row_error(line_no, "expected header 't_ms,x,y,z'"));
      }
      continue;
    }

    std::string_view fields[4];
    std::size_t n = 0;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      if (n == 4) {
        n = 5;
        break;
      }
      if (comma == std::string_view::npos) {
        fields[n++] = line.substr(start);
        break;
      }
      fields[n++] = line.substr(start, comma - start);
      start = comma + 1;
    }
    if (n != 4) {
      throw Error(Errc::kMalformedRow, row_error(line_no, "expected 4 fields"));
    }

    Sample s;
    if (!parse_number(fields[0], s.t_ms) || !parse_number(fields[1], s.x) ||
        !parse_number(fields[2], s.y) || !parse_number(fields[3], s.z)) {
      throw Error(Errc::kMalformedRow, row_error(line_no, "non-numeric field"));
    }
    if (s.t_ms < 0 || !std::isfinite(s.x) || !std::isfinite(s.y) ||
        !std::isfinite(s.z)) {
      throw Error(Errc::kMalformedRow,
                  row_error(line_no, "negative timestamp or non-finite value"));
    }
    if (!rec.samples.empty() && s.t_ms <= rec.samples.back().t_ms) {
      throw Error(Errc::kNonMonotonicTimestamp,
                  row_error(line_no, "t_ms " + std::to_string(s.t_ms) +
                                         " does not exceed previous " +
                                         std::to_string(rec.samples.back().t_ms)));
    }
    rec.samples.push_back(s);
  }

  if (rec.samples.empty()) {
    throw Error(Errc::kEmptyRecording, "recording has no data rows");
  }
  return rec;
}

std::string serialize_recording(const RawRecording& rec) {
  std::string out = "t_ms,x,y,z\n";
  out.reserve(out.size() + rec.samples.size() * 40);
  char buf[128];
  for (const Sample& s : rec.samples) {
    int len = std::snprintf(buf, sizeof(buf), "%lld,%.6f,%.6f,%.6f\n",
                            static_cast<long long>(s.t_ms), s.x, s.y, s.z);
    out.append(buf, static_cast<std::size_t>(len));
  }
  return out;
}

void validate_span(const AnnotationSpan& span) {
  if (span.reported_start_ms >= span.reported_stop_ms) {
    throw Error(Errc::kInvertedSpan,
                "start " + std::to_string(span.reported_start_ms) +
                    " >= stop " + std::to_string(span.reported_stop_ms));
  }
  if (span.trim_head_ms < 0 || span.trim_tail_ms < 0) {
    throw Error(Errc::kInvertedSpan, "trims must be non-negative");
  }
  if (span.trimmed_start_ms() >= span.trimmed_stop_ms()) {
    throw Error(Errc::kInvertedSpan,
                "trimmed interval [" + std::to_string(span.trimmed_start_ms()) +
                    ", " + std::to_string(span.trimmed_stop_ms()) + "] is empty");
  }
}

std::vector<AnnotationSpan> parse_annotations(
    std::string_view text, const std::vector<std::string>& class_set) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::kMalformedDescriptor, e.what());
  }

  // Accept either a bare array of spans or {"spans": [...]}.
  const json* spans = &doc;
  if (doc.is_object()) {
    auto it = doc.find("spans");
    if (it == doc.end()) {
      throw Error(Errc::kMalformedDescriptor, "missing 'spans' array");
    }
    spans = &*it;
  }
  if (!spans->is_array()) {
    throw Error(Errc::kMalformedDescriptor, "'spans' is not an array");
  }

  std::vector<std::string> known;
  known.reserve(class_set.size());
  for (const auto& c : class_set) known.push_back(to_lower(c));

  std::vector<AnnotationSpan> out;
  out.reserve(spans->size());
  for (std::size_t i = 0; i < spans->size(); ++i) {
    const json& obj = (*spans)[i];
    const std::string where = "span " + std::to_string(i);
    if (!obj.is_object()) {
      throw Error(Errc::kMalformedDescriptor, where + " is not an object");
    }
    auto int_field = [&](const char* key, bool required) -> std::int64_t {
      auto it = obj.find(key);
      if (it == obj.end()) {
        if (required) {
          throw Error(Errc::kMalformedDescriptor,
                      where + " missing '" + key + "'");
        }
        return 0;
      }
      if (!it->is_number_integer()) {
        throw Error(Errc::kMalformedDescriptor,
                    where + " '" + key + "' is not an integer");
      }
      return it->get<std::int64_t>();
    };

    AnnotationSpan span;
    auto label = obj.find("label");
    if (label == obj.end() || !label->is_string()) {
      throw Error(Errc::kMalformedDescriptor, where + " missing string 'label'");
    }
    span.label = to_lower(label->get<std::string>());
    span.reported_start_ms = int_field("start_ms", true);
    span.reported_stop_ms = int_field("stop_ms", true);
    span.trim_head_ms = int_field("trim_head_ms", false);
    span.trim_tail_ms = int_field("trim_tail_ms", false);
    if (auto c = obj.find("confirmed"); c != obj.end()) {
      if (!c->is_boolean()) {
        throw Error(Errc::kMalformedDescriptor,
                    where + " 'confirmed' is not a boolean");
      }
      span.confirmed = c->get<bool>();
    }

    if (std::find(known.begin(), known.end(), span.label) == known.end()) {
      throw Error(Errc::kUnknownLabel, where + " label '" + span.label + "'");
    }
    try {
      validate_span(span);
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.what());
    }
    out.push_back(std::move(span));
  }
  return out;
}

std::string serialize_annotations(const std::vector<AnnotationSpan>& spans) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& s : spans) {
    arr.push_back({{"label", s.label},
                   {"start_ms", s.reported_start_ms},
                   {"stop_ms", s.reported_stop_ms},
                   {"trim_head_ms", s.trim_head_ms},
                   {"trim_tail_ms", s.trim_tail_ms},
                   {"confirmed", s.confirmed}});
  }
  nlohmann::ordered_json doc = {{"spans", std::move(arr)}};
  return doc.dump(2) + "\n";
}

LabeledSegment apply_trim(const RawRecording& rec, const AnnotationSpan& span,
                          std::size_t span_index) {
  validate_span(span);
  const std::int64_t lo = span.trimmed_start_ms();
  const std::int64_t hi = span.trimmed_stop_ms();

  auto by_time = [](const Sample& s, std::int64_t t) { return s.t_ms < t; };
  auto first = std::lower_bound(rec.samples.begin(), rec.samples.end(), lo, by_time);
  auto last = std::upper_bound(
      first, rec.samples.end(), hi,
      [](std::int64_t t, const Sample& s) { return t < s.t_ms; });
  if (first == last) {
    throw Error(Errc::kEmptySegment,
                "no samples in [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "] of recording '" + rec.device_id + "'");
  }

  LabeledSegment seg;
  seg.label = span.label;
  seg.samples.assign(first, last);
  seg.source = {rec.device_id, span_index};
  return seg;
}

RateReport validate_rate(const std::vector<Sample>& samples, double expected_hz,
                         std::int64_t gap_tol_ms) {
  if (samples.size() < 2) {
    throw Error(Errc::kTooFewSamples,
                "need at least 2 samples, got " + std::to_string(samples.size()));
  }
  if (gap_tol_ms <= 0 && expected_hz > 0) {
    // Default tolerance: 1.25 nominal sample periods.
    gap_tol_ms = static_cast<std::int64_t>(std::ceil(1250.0 / expected_hz));
  }
  RateReport report;
  const auto span_ms = samples.back().t_ms - samples.front().t_ms;
  report.mean_rate_hz =
      static_cast<double>(samples.size() - 1) * 1000.0 / static_cast<double>(span_ms);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const auto gap = samples[i].t_ms - samples[i - 1].t_ms;
    report.max_gap_ms = std::max(report.max_gap_ms, gap);
    if (gap > gap_tol_ms) ++report.gap_count_over_tol;
  }
  return report;
}

}  // namespace bitesense
