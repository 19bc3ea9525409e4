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


#ifndef BITESENSE_SYNTHETIC_HPP_
#define BITESENSE_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bitesense/signal_ingest.hpp"

namespace bitesense::synthetic {

// Generator for wrist-accelerometer-like recordings of four activities:
//   eating     - repeated bites: plate rest with cutting jitter, raise, short
//                hold at the mouth, lower (about 5-7 s per bite)
//   smoking    - repeated puffs: long still rest, slow raise, longer hold,
//                slow lower (about 12-18 s per puff)
//   medication - one ordered sequence: grab bottle, twist cap, tip pill,
//                hand to mouth, drink, put down
//   jogging    - periodic arm swing at 2.5-3 Hz
// Every instance gets jittered durations, orientations and amplitudes plus
// Gaussian sensor noise.
struct Options {
  std::vector<std::string> activities = {"eating", "smoking", "medication", "jogging"};
  std::size_t sessions_per_activity = 4;
  double activity_seconds = 60.0;
  double rate_hz = 25.0;
  double noise_stddev = 0.25;  // m/s^2
  double lead_seconds = 5.0;   // unlabeled motion before and after the activity
  double max_report_slop_seconds = 2.0;
  std::uint64_t seed = 1;
};

struct Session {
  std::string recording_id;
  RawRecording recording;
  // One confirmed span per session. The reported bounds overshoot the true
  // activity and the trims cut them back to it.
  std::vector<AnnotationSpan> spans;
};

Session generate_session(const std::string& activity, std::uint64_t seed,
                         const Options& options = {});

// sessions_per_activity sessions for each activity, activity-major order.
std::vector<Session> generate_corpus(const Options& options = {});

}  // namespace bitesense::synthetic

#endif  // BITESENSE_SYNTHETIC_HPP_
