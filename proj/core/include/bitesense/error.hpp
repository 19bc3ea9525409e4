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

#ifndef BITESENSE_ERROR_HPP_
#define BITESENSE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace bitesense {

// Every failure the library reports carries one of these codes so callers
// (tests, the CLI exit-code mapping) can branch without string matching.
enum class Errc {
  // signal ingest
  kMalformedRow,
  kNonMonotonicTimestamp,
  kEmptyRecording,
  kMalformedDescriptor,
  kInvertedSpan,
  kUnknownLabel,
  kEmptySegment,
  kTooFewSamples,
  // windowing
  kBadGeometry,
  kIndexOutOfRange,
  kEmptyClass,
  kDegenerateSplit,
  kMalformedDataset,
  // model
  kShapeMismatch,
  kNonFiniteInput,
  kCacheMismatch,
  // training / checkpoints
  kEmptySplit,
  kDivergedLoss,
  kIoError,
  kVersionMismatch,
  kCorruptChecksum,
  // evaluation
  kLengthMismatch,
  kLabelOutOfRange,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace bitesense

#endif  // BITESENSE_ERROR_HPP_
