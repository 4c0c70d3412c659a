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

#include "pekit/error.hpp"

namespace pekit {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::empty_mask: return "empty_mask";
    case Errc::empty_selection: return "empty_selection";
    case Errc::degenerate_embedding: return "degenerate_embedding";
    case Errc::dim_mismatch: return "dim_mismatch";
    case Errc::unknown_object: return "unknown_object";
    case Errc::duplicate_object: return "duplicate_object";
    case Errc::corrupt_manifest: return "corrupt_manifest";
    case Errc::shape_mismatch: return "shape_mismatch";
    case Errc::checksum_mismatch: return "checksum_mismatch";
    case Errc::io: return "io";
    case Errc::transport: return "transport";
    case Errc::server: return "server";
    case Errc::protocol: return "protocol";
    case Errc::fixture_missing: return "fixture_missing";
    case Errc::not_found: return "not_found";
    case Errc::dataset: return "dataset";
  }
  return "unknown";
}

}  // namespace pekit
