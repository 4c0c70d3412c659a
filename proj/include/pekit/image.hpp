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

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "pekit/codec.hpp"

namespace pekit {

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h, Rgb fill = {0, 0, 0});

  Rgb at(int y, int x) const;
  void set(int y, int x, Rgb color);

  bool operator==(const Image&) const = default;
};

/// PNG/JPEG/BMP/PPM bytes to RGB. Throws Errc::invalid_argument if undecodable.
Image decode_image(std::span<const std::uint8_t> bytes);

/// Lossless PNG encoding with fixed parameters.
Bytes encode_png(const Image& image);

}  // namespace pekit
