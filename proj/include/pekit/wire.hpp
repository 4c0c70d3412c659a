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

// JSON payloads of the vision-tool protocol.
//
//   POST /v1/segment  {image_b64, text_query} -> {masks: [{size:[H,W], counts}], scores}
//   POST /v1/propose  {image_b64, text_query} -> {boxes: [[x0,y0,x1,y1]...], scores}
//   POST /v1/embed    {image_b64}             -> {grid_h, grid_w, dim, image_h, image_w, data_b64}
//   POST /v1/generate {image_b64, prompt, max_tokens} -> {text, truncated}
//   any error: {error: "<message>"} with a non-2xx status
//
// Masks are uncompressed COCO run lengths: column-major pixel order,
// alternating runs of 0s and 1s, starting with a (possibly empty) run of 0s.
// Feature maps are base64 float32 little-endian, row-major [gh][gw][dim].

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pekit/features.hpp"

namespace pekit::wire {

using Json = nlohmann::json;

struct RleMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> counts;

  bool operator==(const RleMask&) const = default;
};

RleMask encode_rle(const PixelMask& mask);
PixelMask decode_rle(const RleMask& rle);

Json rle_to_json(const RleMask& rle);
RleMask rle_from_json(const Json& j);

Json feature_map_to_json(const PatchFeatureMap& fmap);
/// Throws Errc::shape_mismatch when gh*gw*dim does not match the payload.
PatchFeatureMap feature_map_from_json(const Json& j);

/// Proposal boxes may arrive as floats; they are widened to whole pixels
/// (floor of the low corner, ceil of the high corner).
BoundingBox box_from_json(const Json& j);
Json box_to_json(const BoundingBox& box);

}  // namespace pekit::wire
