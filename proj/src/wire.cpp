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

#include "pekit/wire.hpp"

#include <cmath>

#include "pekit/codec.hpp"
#include "pekit/error.hpp"

namespace pekit::wire {

RleMask encode_rle(const PixelMask& mask) {
  RleMask rle{mask.height(), mask.width(), {}};
  bool current = false;
  std::uint32_t run = 0;
  for (int x = 0; x < mask.width(); ++x) {
    for (int y = 0; y < mask.height(); ++y) {
      const bool bit = mask.at(y, x);
      if (bit != current) {
        rle.counts.push_back(run);
        run = 0;
        current = bit;
      }
      ++run;
    }
  }
  rle.counts.push_back(run);
  return rle;
}

PixelMask decode_rle(const RleMask& rle) {
  if (rle.height < 1 || rle.width < 1) fail(Errc::protocol, "rle: invalid size");
  const std::uint64_t total = static_cast<std::uint64_t>(rle.height) * rle.width;
  std::uint64_t sum = 0;
  for (auto c : rle.counts) sum += c;
  if (sum != total) {
    fail(Errc::protocol, "rle: counts sum to " + std::to_string(sum) + ", expected " +
                             std::to_string(total));
  }
  PixelMask mask(rle.height, rle.width);
  std::uint64_t pos = 0;
  bool bit = false;
  for (auto c : rle.counts) {
    if (bit) {
      for (std::uint64_t k = pos; k < pos + c; ++k) {
        mask.set(static_cast<int>(k % rle.height), static_cast<int>(k / rle.height));
      }
    }
    pos += c;
    bit = !bit;
  }
  return mask;
}

Json rle_to_json(const RleMask& rle) {
  return Json{{"size", {rle.height, rle.width}}, {"counts", rle.counts}};
}

RleMask rle_from_json(const Json& j) {
  try {
    const auto& size = j.at("size");
    if (!size.is_array() || size.size() != 2) fail(Errc::protocol, "rle: size must be [H, W]");
    RleMask rle;
    rle.height = size.at(0).get<int>();
    rle.width = size.at(1).get<int>();
    rle.counts = j.at("counts").get<std::vector<std::uint32_t>>();
    return rle;
  } catch (const Json::exception& e) {
    fail(Errc::protocol, std::string("rle: ") + e.what());
  }
}

Json feature_map_to_json(const PatchFeatureMap& fmap) {
  return Json{{"grid_h", fmap.grid_h()},
              {"grid_w", fmap.grid_w()},
              {"dim", fmap.dim()},
              {"image_h", fmap.image_h()},
              {"image_w", fmap.image_w()},
              {"data_b64", base64_encode(pack_f32_le(fmap.data()))}};
}

PatchFeatureMap feature_map_from_json(const Json& j) {
  int gh = 0, gw = 0, dim = 0, ih = 0, iw = 0;
  std::string data_b64;
  try {
    gh = j.at("grid_h").get<int>();
    gw = j.at("grid_w").get<int>();
    dim = j.at("dim").get<int>();
    ih = j.at("image_h").get<int>();
    iw = j.at("image_w").get<int>();
    data_b64 = j.at("data_b64").get<std::string>();
  } catch (const Json::exception& e) {
    fail(Errc::protocol, std::string("embed: ") + e.what());
  }
  if (gh < 1 || gw < 1 || dim < 1) fail(Errc::protocol, "embed: non-positive grid or dim");
  const Bytes bytes = base64_decode(data_b64);
  const std::uint64_t declared = static_cast<std::uint64_t>(gh) * gw * dim;
  if (bytes.size() % 4 != 0 || bytes.size() / 4 != declared) {
    fail(Errc::shape_mismatch, "embed: declared " + std::to_string(gh) + "x" +
                                   std::to_string(gw) + "x" + std::to_string(dim) +
                                   " floats but payload has " + std::to_string(bytes.size()) +
                                   " bytes");
  }
  return PatchFeatureMap(gh, gw, dim, ih, iw, unpack_f32_le(bytes));
}

BoundingBox box_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) fail(Errc::protocol, "box must be [x0, y0, x1, y1]");
  double v[4];
  for (int i = 0; i < 4; ++i) {
    if (!j[i].is_number()) fail(Errc::protocol, "box coordinates must be numbers");
    v[i] = j[i].get<double>();
    if (!std::isfinite(v[i])) fail(Errc::protocol, "box coordinates must be finite");
  }
  return BoundingBox{static_cast<int>(std::floor(v[0])), static_cast<int>(std::floor(v[1])),
                     static_cast<int>(std::ceil(v[2])), static_cast<int>(std::ceil(v[3]))};
}

Json box_to_json(const BoundingBox& box) { return Json::array({box.x0, box.y0, box.x1, box.y1}); }

}  // namespace pekit::wire
