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


#include "bitesense/cli/manifest.hpp"

#include "bitesense/cli/digest.hpp"
#include "bitesense/error.hpp"

namespace bitesense::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

Json file_entry(const fs::path& path) {
  return Json{{"path", path.generic_string()}, {"sha256", sha256_file(path)}};
}

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

void Manifest::add_input(const std::string& role, const fs::path& path) {
  inputs[role] = file_entry(path);
}

void Manifest::add_output(const std::string& role, const fs::path& recorded,
                          std::string_view bytes) {
  outputs[role] = Json{{"path", recorded.generic_string()}, {"sha256", sha256_hex(bytes)}};
}

std::string Manifest::dump() const {
  Json doc;
  doc["format"] = kManifestFormat;
  doc["command"] = command;
  doc["params"] = params;
  doc["inputs"] = inputs;
  doc["outputs"] = outputs;
  return doc.dump(2) + "\n";
}

Manifest Manifest::parse(const std::string& text) {
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() ||
      doc.value("format", std::string()) != kManifestFormat) {
    throw Error(Errc::kMalformedDescriptor, "manifest: not a bitesense manifest");
  }
  Manifest m;
  m.command = doc.value("command", std::string());
  if (doc.contains("params")) m.params = doc["params"];
  if (doc.contains("inputs")) m.inputs = doc["inputs"];
  if (doc.contains("outputs")) m.outputs = doc["outputs"];
  if (!m.params.is_object() || !m.inputs.is_object()) {
    throw Error(Errc::kMalformedDescriptor, "manifest: params and inputs must be objects");
  }
  return m;
}

std::vector<std::string> replay_args(const Manifest& m) {
  std::vector<std::string> args;
  for (const auto& [key, value] : m.params.items()) {
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& item : value) {
        args.push_back(flag);
        args.push_back(scalar_text(item));
      }
    } else if (!value.is_null()) {
      args.push_back(flag);
      args.push_back(scalar_text(value));
    }
  }
  return args;
}

void verify_inputs(const Manifest& m) {
  for (const auto& [role, entry] : m.inputs.items()) {
    const auto check = [&](const Json& e) {
      const fs::path path = e.at("path").get<std::string>();
      const std::string want = e.at("sha256").get<std::string>();
      if (sha256_file(path) != want) {
        throw Error(Errc::kCacheMismatch, "manifest: input '" + role + "' (" +
                                              path.generic_string() +
                                              ") changed since the recorded run");
      }
    };
    if (entry.is_array()) {
      for (const auto& e : entry) check(e);
    } else {
      check(entry);
    }
  }
}

}  // namespace bitesense::cli
