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


#ifndef BITESENSE_TESTS_UNIT_TEST_UTIL_HPP_
#define BITESENSE_TESTS_UNIT_TEST_UTIL_HPP_

#include <gtest/gtest.h>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bitesense/error.hpp"
#include "bitesense/signal_ingest.hpp"

// Expects `stmt` to throw bitesense::Error with the given code.
#define EXPECT_ERRC(stmt, errc)                                                   \
  do {                                                                            \
    try {                                                                         \
      stmt;                                                                       \
      ADD_FAILURE() << "expected " << ::bitesense::errc_name(errc) << " from " #stmt; \
    } catch (const ::bitesense::Error& e) {                                       \
      EXPECT_EQ(e.code(), errc) << e.what();                                      \
    }                                                                             \
  } while (0)

namespace bitesense::testing {

// Samples at a fixed spacing starting at t0, x = index.
inline std::vector<Sample> spaced_samples(std::size_t n, std::int64_t spacing_ms = 40,
                                          std::int64_t t0 = 0) {
  std::vector<Sample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = {t0 + static_cast<std::int64_t>(i) * spacing_ms, static_cast<double>(i), 0.5, 9.81};
  }
  return out;
}

inline LabeledSegment segment(const std::string& label, std::size_t n, std::string rec = "r",
                              std::size_t span = 0) {
  return {label, spaced_samples(n), {std::move(rec), span}};
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = std::filesystem::temp_directory_path() /
            (std::string("bitesense_") + info->test_suite_name() + "_" + info->name());
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace bitesense::testing

#endif  // BITESENSE_TESTS_UNIT_TEST_UTIL_HPP_
