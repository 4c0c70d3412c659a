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

#include "pekit/config.hpp"

#include "pekit/codec.hpp"
#include "pekit/error.hpp"

namespace pekit {
namespace fs = std::filesystem;
namespace {

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

void read_endpoint(const nlohmann::json& j, const fs::path& base, AdapterEndpoint& ep) {
  if (j.contains("base_url")) ep.base_url = j.at("base_url").get<std::string>();
  if (j.contains("mode")) ep.mode = parse_adapter_mode(j.at("mode").get<std::string>());
  if (j.contains("fixture_dir")) ep.fixture_dir = resolve(base, j.at("fixture_dir").get<std::string>());
  if (j.contains("timeout_ms")) ep.timeout_ms = j.at("timeout_ms").get<int>();
  if (j.contains("retries")) ep.retries = j.at("retries").get<int>();
}

}  // namespace

AppConfig AppConfig::from_json(const nlohmann::json& j, const fs::path& base_dir) {
  AppConfig cfg;
  if (!j.is_object()) fail(Errc::invalid_argument, "config: top level must be an object");
  try {
    if (j.contains("store_path")) cfg.store_path = resolve(base_dir, j.at("store_path").get<std::string>());
    // Relative fixture directories default to the config file's directory.
    for (auto* ep : {&cfg.adapters.segment, &cfg.adapters.propose, &cfg.adapters.embed,
                     &cfg.adapters.generate}) {
      ep->fixture_dir = resolve(base_dir, ep->fixture_dir.string());
    }
    if (j.contains("adapters")) {
      const auto& a = j.at("adapters");
      if (a.contains("segment")) read_endpoint(a.at("segment"), base_dir, cfg.adapters.segment);
      if (a.contains("propose")) read_endpoint(a.at("propose"), base_dir, cfg.adapters.propose);
      if (a.contains("embed")) read_endpoint(a.at("embed"), base_dir, cfg.adapters.embed);
      if (a.contains("generate")) {
        read_endpoint(a.at("generate"), base_dir, cfg.adapters.generate);
        cfg.max_tokens = a.at("generate").value("max_tokens", cfg.max_tokens);
      }
    }
    if (j.contains("retrieval")) {
      const auto& r = j.at("retrieval");
      if (r.contains("tau")) cfg.retrieval.tau = r.at("tau").get<double>();
      if (r.contains("per_object_tau")) {
        cfg.retrieval.per_object_tau = r.at("per_object_tau").get<std::map<std::string, double>>();
      }
      if (r.contains("dedupe_per_object")) {
        cfg.retrieval.dedupe_per_object = r.at("dedupe_per_object").get<bool>();
      }
    }
    if (j.contains("prompt")) {
      const auto& p = j.at("prompt");
      if (p.contains("template")) cfg.prompt.clause_template = p.at("template").get<std::string>();
      if (p.contains("palette")) {
        Palette palette;
        for (const auto& c : p.at("palette")) {
          const auto rgb = c.at("rgb").get<std::vector<int>>();
          if (rgb.size() != 3) fail(Errc::invalid_argument, "config: palette rgb needs 3 values");
          Rgb color{};
          for (int k = 0; k < 3; ++k) {
            if (rgb[k] < 0 || rgb[k] > 255) fail(Errc::invalid_argument, "config: rgb out of range");
            color[k] = static_cast<std::uint8_t>(rgb[k]);
          }
          palette.push_back({c.at("name").get<std::string>(), color});
        }
        cfg.prompt.palette = std::move(palette);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::invalid_argument, std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

AppConfig AppConfig::load(const fs::path& file) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(file));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::invalid_argument, "config " + file.string() + ": " + e.what());
  }
  return from_json(j, file.parent_path());
}

void AppConfig::validate() const {
  retrieval.validate();
  validate_palette(prompt.palette);
  if (prompt.clause_template.find("{name}") == std::string::npos ||
      prompt.clause_template.find("{color_name}") == std::string::npos) {
    fail(Errc::invalid_argument, "config: prompt template needs {color_name} and {name}");
  }
  if (max_tokens < 1) fail(Errc::invalid_argument, "config: max_tokens must be >= 1");
  for (const auto* ep : {&adapters.segment, &adapters.propose, &adapters.embed, &adapters.generate}) {
    if (ep->timeout_ms < 1) fail(Errc::invalid_argument, "config: timeout_ms must be >= 1");
    if (ep->retries < 0) fail(Errc::invalid_argument, "config: retries must be >= 0");
  }
}

VisionTools make_tools(const AdapterEndpoints& endpoints) {
  return VisionTools(make_transport(endpoints.segment), make_transport(endpoints.propose),
                     make_transport(endpoints.embed), make_transport(endpoints.generate));
}

}  // namespace pekit
