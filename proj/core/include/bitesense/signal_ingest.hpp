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


#ifndef BITESENSE_SIGNAL_INGEST_HPP_
#define BITESENSE_SIGNAL_INGEST_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bitesense {

struct Sample {
  std::int64_t t_ms = 0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct RawRecording {
  std::string device_id;
  std::vector<Sample> samples;
  double nominal_rate_hz = 25.0;
};

struct AnnotationSpan {
  std::string label;  // lower-case
  std::int64_t reported_start_ms = 0;
  std::int64_t reported_stop_ms = 0;
  std::int64_t trim_head_ms = 0;
  std::int64_t trim_tail_ms = 0;
  bool confirmed = false;

  std::int64_t trimmed_start_ms() const { return reported_start_ms + trim_head_ms; }
  std::int64_t trimmed_stop_ms() const { return reported_stop_ms - trim_tail_ms; }

  friend bool operator==(const AnnotationSpan&, const AnnotationSpan&) = default;
};

struct SegmentSource {
  std::string recording_id;
  std::size_t span_index = 0;

  friend bool operator==(const SegmentSource&, const SegmentSource&) = default;
};

struct LabeledSegment {
  std::string label;
  std::vector<Sample> samples;
  SegmentSource source;
};

struct RateReport {
  double mean_rate_hz = 0.0;
  std::int64_t max_gap_ms = 0;
  std::size_t gap_count_over_tol = 0;
};

// Class set used to validate annotation labels. Names are stored lower-case.
std::vector<std::string> default_class_set();

// Parses the `t_ms,x,y,z` recording CSV. The header line is required.
// Throws Error{kMalformedRow | kNonMonotonicTimestamp | kEmptyRecording}.
RawRecording parse_recording(std::string_view text, std::string device_id = {});

// Inverse of parse_recording: header plus one `t,x,y,z` row per sample,
// values printed with six fractional digits.
std::string serialize_recording(const RawRecording& rec);

// Parses the JSON annotation descriptor. Either the whole document is valid
// or the call throws; labels are matched case-insensitively against
// `class_set` and stored lower-case.
std::vector<AnnotationSpan> parse_annotations(
    std::string_view text, const std::vector<std::string>& class_set);

std::string serialize_annotations(const std::vector<AnnotationSpan>& spans);

// Throws Error{kInvertedSpan} when the span (or its trimmed interval) is
// empty or a trim is negative.
void validate_span(const AnnotationSpan& span);

// Samples with t inside the trimmed span, both ends inclusive.
LabeledSegment apply_trim(const RawRecording& rec, const AnnotationSpan& span,
                          std::size_t span_index = 0);

RateReport validate_rate(const std::vector<Sample>& samples, double expected_hz,
                         std::int64_t gap_tol_ms);
inline RateReport validate_rate(const RawRecording& rec, double expected_hz,
                                std::int64_t gap_tol_ms) {
  return validate_rate(rec.samples, expected_hz, gap_tol_ms);
}

std::string to_lower(std::string_view s);

}  // namespace bitesense

#endif  // BITESENSE_SIGNAL_INGEST_HPP_
