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

// Clients for the external vision tools: segmenter, proposal detector, patch
// encoder and the vision-language model.
//
// Every endpoint sits behind a Transport. In `live` mode requests go over
// HTTP. In `record` mode the HTTP response is also written to a fixture
// file; in `replay` mode responses come only from fixture files and no
// socket is ever opened. A fixture is keyed by the SHA-256 of the canonical
// (sorted-key, compact) JSON request body, so any change to a request misses
// the old fixture.

#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "pekit/codec.hpp"
#include "pekit/features.hpp"
#include "pekit/wire.hpp"

namespace pekit {

enum class AdapterMode { live, record, replay };

AdapterMode parse_adapter_mode(std::string_view text);
std::string_view to_string(AdapterMode mode);

struct AdapterEndpoint {
  std::string base_url = "http://127.0.0.1:8080";
  int timeout_ms = 30000;
  int retries = 2;
  AdapterMode mode = AdapterMode::live;
  std::filesystem::path fixture_dir = "fixtures";
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

class Transport {
 public:
  virtual ~Transport() = default;
  /// Throws Errc::transport when no response could be obtained.
  virtual HttpResponse post(const std::string& path, const std::string& body) = 0;
};

class HttpTransport : public Transport {
 public:
  HttpTransport(std::string base_url, int timeout_ms, int retries);
  HttpResponse post(const std::string& path, const std::string& body) override;

 private:
  std::string base_url_;
  int timeout_ms_;
  int retries_;
};

/// Record/replay wrapper. `upstream` may be null only in replay mode.
class FixtureTransport : public Transport {
 public:
  FixtureTransport(AdapterMode mode, std::filesystem::path dir,
                   std::shared_ptr<Transport> upstream);
  HttpResponse post(const std::string& path, const std::string& body) override;

  std::filesystem::path fixture_path(const std::string& path, const std::string& body) const;

 private:
  AdapterMode mode_;
  std::filesystem::path dir_;
  std::shared_ptr<Transport> upstream_;
  std::mutex write_mutex_;
};

std::string canonical_json(const wire::Json& j);
std::string fixture_key(const std::string& canonical_body);

/// HTTP for live, HTTP + fixture writes for record, fixtures only for replay.
std::shared_ptr<Transport> make_transport(const AdapterEndpoint& endpoint);

/// Raw image file bytes plus a label used in error messages.
struct ImagePayload {
  std::string label;
  Bytes bytes;

  static ImagePayload from_file(const std::filesystem::path& path);
};

struct ScoredMask {
  PixelMask mask;
  double score = 0.0;
};

struct Proposal {
  BoundingBox bbox;
  double detector_score = 0.0;
};

struct GenerateResult {
  std::string text;
  bool truncated = false;
};

inline constexpr std::string_view kProposalQuery = "object";

class VisionTools {
 public:
  VisionTools(std::shared_ptr<Transport> segment, std::shared_ptr<Transport> propose,
              std::shared_ptr<Transport> embed, std::shared_ptr<Transport> generate);

  /// Masks sorted by descending score. Empty result throws Errc::not_found.
  std::vector<ScoredMask> segment(const ImagePayload& image, std::string_view category) const;
  std::vector<Proposal> propose(const ImagePayload& image) const;
  PatchFeatureMap embed(const ImagePayload& image) const;
  /// Text with trailing whitespace removed.
  GenerateResult generate(const ImagePayload& image, std::string_view prompt,
                          int max_tokens) const;

 private:
  std::shared_ptr<Transport> segment_;
  std::shared_ptr<Transport> propose_;
  std::shared_ptr<Transport> embed_;
  std::shared_ptr<Transport> generate_;
};

/// POSTs `request` and returns the parsed JSON body. Non-2xx statuses and
/// bodies carrying an "error" key throw Errc::server.
wire::Json call_endpoint(Transport& transport, const std::string& path,
                         const wire::Json& request);

}  // namespace pekit
