// Copyright 2026 The PeKit Authors.
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

// Application configuration, one JSON file:
//
//   {
//     "store_path": "pekit_store",
//     "adapters": {
//       "segment":  {"base_url": "...", "mode": "live|record|replay",
//                    "fixture_dir": "...", "timeout_ms": 30000, "retries": 2},
//       "propose":  {...}, "embed": {...},
//       "generate": {..., "max_tokens": 512}
//     },
//     "retrieval": {"tau": 0.75, "per_object_tau": {"obj-0001": 0.8}},
//     "prompt": {"template": "...", "palette": [{"name": "red", "rgb": [255, 0, 0]}]}
//   }
//
// Every key is optional. Relative paths are resolved against the directory
// of the config file.

#pragma once

#include <filesystem>

#include <json.hpp>

#include "pekit/adapters.hpp"
#include "pekit/prompting.hpp"
#include "pekit/retrieval.hpp"

namespace pekit {

struct AdapterEndpoints {
  AdapterEndpoint segment;
  AdapterEndpoint propose;
  AdapterEndpoint embed;
  AdapterEndpoint generate;
};

struct AppConfig {
  std::filesystem::path store_path = "pekit_store";
  AdapterEndpoints adapters;
  RetrievalConfig retrieval;
  PromptOptions prompt;
  int max_tokens = 512;

  /// Throws Errc::invalid_argument on bad values.
  static AppConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static AppConfig load(const std::filesystem::path& file);

  void validate() const;
};

VisionTools make_tools(const AdapterEndpoints& endpoints);

}  // namespace pekit
