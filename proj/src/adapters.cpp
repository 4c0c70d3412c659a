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

#include "pekit/adapters.hpp"

#include <algorithm>

#include <httplib.h>

#include "pekit/error.hpp"

namespace pekit {
namespace {

using wire::Json;

std::string endpoint_dir_name(const std::string& path) {
  std::string out;
  for (char c : path) {
    if (c == '/') {
      if (!out.empty()) out.push_back('_');
    } else {
      out.push_back(c);
    }
  }
  return out.empty() ? "root" : out;
}

std::string image_b64(const ImagePayload& image) { return base64_encode(image.bytes); }

}  // namespace

AdapterMode parse_adapter_mode(std::string_view text) {
  if (text == "live") return AdapterMode::live;
  if (text == "record") return AdapterMode::record;
  if (text == "replay") return AdapterMode::replay;
  fail(Errc::invalid_argument, "unknown adapter mode '" + std::string(text) + "'");
}

std::string_view to_string(AdapterMode mode) {
  switch (mode) {
    case AdapterMode::live: return "live";
    case AdapterMode::record: return "record";
    case AdapterMode::replay: return "replay";
  }
  return "live";
}

HttpTransport::HttpTransport(std::string base_url, int timeout_ms, int retries)
    : base_url_(std::move(base_url)), timeout_ms_(timeout_ms), retries_(std::max(retries, 0)) {}

HttpResponse HttpTransport::post(const std::string& path, const std::string& body) {
  std::string last_error;
  for (int attempt = 0; attempt <= retries_; ++attempt) {
    httplib::Client client(base_url_);
    if (!client.is_valid()) fail(Errc::transport, "invalid base url '" + base_url_ + "'");
    const auto timeout = std::chrono::milliseconds(timeout_ms_);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(path, body, "application/json");
    if (res) return {res->status, res->body};
    last_error = httplib::to_string(res.error());
  }
  fail(Errc::transport, "POST " + base_url_ + path + " failed after " +
                            std::to_string(retries_ + 1) + " attempt(s): " + last_error);
}

FixtureTransport::FixtureTransport(AdapterMode mode, std::filesystem::path dir,
                                   std::shared_ptr<Transport> upstream)
    : mode_(mode), dir_(std::move(dir)), upstream_(std::move(upstream)) {
  if (mode_ == AdapterMode::live) {
    fail(Errc::invalid_argument, "fixture transport requires record or replay mode");
  }
  if (mode_ == AdapterMode::record && !upstream_) {
    fail(Errc::invalid_argument, "record mode needs an upstream transport");
  }
}

std::filesystem::path FixtureTransport::fixture_path(const std::string& path,
                                                     const std::string& body) const {
  return dir_ / endpoint_dir_name(path) / (fixture_key(body) + ".json");
}

HttpResponse FixtureTransport::post(const std::string& path, const std::string& body) {
  const auto file = fixture_path(path, body);
  if (mode_ == AdapterMode::replay) {
    if (!std::filesystem::exists(file)) {
      fail(Errc::fixture_missing, "replay: no fixture " + file.string() + " for POST " + path);
    }
    try {
      const auto stored = Json::parse(read_text_file(file));
      return {stored.at("status").get<int>(), stored.at("body").get<std::string>()};
    } catch (const Json::exception& e) {
      fail(Errc::protocol, "replay: corrupt fixture " + file.string() + ": " + e.what());
    }
  }

  HttpResponse response = upstream_->post(path, body);
  const Json stored = {{"status", response.status}, {"body", response.body}};
  std::lock_guard lock(write_mutex_);
  std::error_code ec;
  std::filesystem::create_directories(file.parent_path(), ec);
  if (ec) fail(Errc::io, "record: cannot create " + file.parent_path().string());
  auto tmp = file;
  tmp += ".tmp";
  write_text_file(tmp, stored.dump(1) + "\n");
  std::filesystem::rename(tmp, file, ec);
  if (ec) fail(Errc::io, "record: cannot write " + file.string());
  return response;
}

std::string canonical_json(const Json& j) { return j.dump(); }

std::string fixture_key(const std::string& canonical_body) { return sha256_hex(canonical_body); }

std::shared_ptr<Transport> make_transport(const AdapterEndpoint& endpoint) {
  switch (endpoint.mode) {
    case AdapterMode::live:
      return std::make_shared<HttpTransport>(endpoint.base_url, endpoint.timeout_ms,
                                             endpoint.retries);
    case AdapterMode::record:
      return std::make_shared<FixtureTransport>(
          AdapterMode::record, endpoint.fixture_dir,
          std::make_shared<HttpTransport>(endpoint.base_url, endpoint.timeout_ms,
                                          endpoint.retries));
    case AdapterMode::replay:
      return std::make_shared<FixtureTransport>(AdapterMode::replay, endpoint.fixture_dir,
                                                nullptr);
  }
  fail(Errc::invalid_argument, "unknown adapter mode");
}

ImagePayload ImagePayload::from_file(const std::filesystem::path& path) {
  return {path.string(), read_file(path)};
}

Json call_endpoint(Transport& transport, const std::string& path, const Json& request) {
  const HttpResponse response = transport.post(path, canonical_json(request));
  Json body;
  try {
    body = Json::parse(response.body);
  } catch (const Json::exception&) {
    if (response.status < 200 || response.status >= 300) {
      fail(Errc::server, path + ": HTTP " + std::to_string(response.status));
    }
    fail(Errc::protocol, path + ": response is not JSON");
  }
  const bool has_error = body.is_object() && body.contains("error");
  if (response.status < 200 || response.status >= 300 || has_error) {
    std::string message = has_error && body["error"].is_string()
                              ? body["error"].get<std::string>()
                              : std::string("no error message");
    fail(Errc::server,
         path + ": HTTP " + std::to_string(response.status) + ": " + message);
  }
  if (!body.is_object()) fail(Errc::protocol, path + ": response is not a JSON object");
  return body;
}

VisionTools::VisionTools(std::shared_ptr<Transport> segment, std::shared_ptr<Transport> propose,
                         std::shared_ptr<Transport> embed, std::shared_ptr<Transport> generate)
    : segment_(std::move(segment)),
      propose_(std::move(propose)),
      embed_(std::move(embed)),
      generate_(std::move(generate)) {}

std::vector<ScoredMask> VisionTools::segment(const ImagePayload& image,
                                             std::string_view category) const {
  if (category.empty()) fail(Errc::invalid_argument, "segment: empty category");
  const Json request = {{"image_b64", image_b64(image)}, {"text_query", std::string(category)}};
  const Json body = call_endpoint(*segment_, "/v1/segment", request);

  std::vector<ScoredMask> out;
  try {
    const auto& masks = body.at("masks");
    const auto& scores = body.at("scores");
    if (!masks.is_array() || !scores.is_array() || masks.size() != scores.size()) {
      fail(Errc::protocol, "segment: masks and scores differ in length");
    }
    for (std::size_t i = 0; i < masks.size(); ++i) {
      out.push_back({wire::decode_rle(wire::rle_from_json(masks[i])), scores[i].get<double>()});
    }
  } catch (const Json::exception& e) {
    fail(Errc::protocol, std::string("segment: ") + e.what());
  }
  if (out.empty()) {
    fail(Errc::not_found, "object not found in reference image " + image.label);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ScoredMask& a, const ScoredMask& b) { return a.score > b.score; });
  return out;
}

std::vector<Proposal> VisionTools::propose(const ImagePayload& image) const {
  const Json request = {{"image_b64", image_b64(image)},
                        {"text_query", std::string(kProposalQuery)}};
  const Json body = call_endpoint(*propose_, "/v1/propose", request);
  std::vector<Proposal> out;
  try {
    const auto& boxes = body.at("boxes");
    const auto& scores = body.at("scores");
    if (!boxes.is_array() || !scores.is_array() || boxes.size() != scores.size()) {
      fail(Errc::protocol, "propose: boxes and scores differ in length");
    }
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      const double score = scores[i].get<double>();
      if (!(score >= 0.0 && score <= 1.0)) {
        fail(Errc::protocol, "propose: detector score outside [0, 1]");
      }
      out.push_back({wire::box_from_json(boxes[i]), score});
    }
  } catch (const Json::exception& e) {
    fail(Errc::protocol, std::string("propose: ") + e.what());
  }
  return out;
}

PatchFeatureMap VisionTools::embed(const ImagePayload& image) const {
  const Json request = {{"image_b64", image_b64(image)}};
  return wire::feature_map_from_json(call_endpoint(*embed_, "/v1/embed", request));
}

GenerateResult VisionTools::generate(const ImagePayload& image, std::string_view prompt,
                                     int max_tokens) const {
  if (prompt.empty()) fail(Errc::invalid_argument, "generate: empty prompt");
  if (max_tokens < 1) fail(Errc::invalid_argument, "generate: max_tokens must be >= 1");
  const Json request = {{"image_b64", image_b64(image)},
                        {"prompt", std::string(prompt)},
                        {"max_tokens", max_tokens}};
  const Json body = call_endpoint(*generate_, "/v1/generate", request);
  GenerateResult out;
  try {
    out.text = body.at("text").get<std::string>();
    out.truncated = body.value("truncated", false);
  } catch (const Json::exception& e) {
    fail(Errc::protocol, std::string("generate: ") + e.what());
  }
  while (!out.text.empty() &&
         (out.text.back() == ' ' || out.text.back() == '\n' || out.text.back() == '\t' ||
          out.text.back() == '\r')) {
    out.text.pop_back();
  }
  return out;
}

}  // namespace pekit
