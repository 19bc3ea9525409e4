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


#ifndef BITESENSE_CLI_MANIFEST_HPP_
#define BITESENSE_CLI_MANIFEST_HPP_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace bitesense::cli {

inline constexpr std::string_view kManifestFormat = "bitesense.manifest";

// Every command records what it was asked to do and what it read and wrote.
// `params` holds the effective value of every option keyed by its long
// name, so a run can be replayed with `--config <manifest>`.
struct Manifest {
  std::string command;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  nlohmann::ordered_json outputs = nlohmann::ordered_json::object();

  void add_input(const std::string& role, const std::filesystem::path& path);
  // `recorded` is the final location; the digest is taken over `bytes`.
  void add_output(const std::string& role, const std::filesystem::path& recorded,
                  std::string_view bytes);

  std::string dump() const;
  static Manifest parse(const std::string& text);
};

// Flags that reproduce `params`: scalars become `--key value`, arrays repeat
// the flag, booleans become a bare `--key` when true.
std::vector<std::string> replay_args(const Manifest& m);

// Throws Error{kCacheMismatch} naming the first input whose current SHA-256
// differs from the recorded one.
void verify_inputs(const Manifest& m);

}  // namespace bitesense::cli

#endif  // BITESENSE_CLI_MANIFEST_HPP_
