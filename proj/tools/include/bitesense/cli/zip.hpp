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


#ifndef BITESENSE_CLI_ZIP_HPP_
#define BITESENSE_CLI_ZIP_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace bitesense::cli {

struct ZipMember {
  std::string name;
  std::string data;
};

// Reads every file member of a zip archive through the central directory.
// Supports the stored and deflate methods; CRC-32 is verified. Directory
// entries are skipped. Throws Error{kMalformedDescriptor}.
std::vector<ZipMember> read_zip(std::string_view archive);

// Writes a zip archive with deflate-compressed members.
std::string write_zip(const std::vector<ZipMember>& members);

}  // namespace bitesense::cli

#endif  // BITESENSE_CLI_ZIP_HPP_
