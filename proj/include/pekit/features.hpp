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

// Instance embeddings from patch features.
//
// An encoder produces one vector per image patch. An object region, given
// either as a pixel mask or as a bounding box, is mapped onto the patch grid
// and the selected patch vectors are averaged and L2-normalized. Masks and
// boxes go through the same coverage rule: a patch is selected when at least
// half of its pixels are inside the region; when no patch reaches half, the
// single best-covered patch is used so that small objects still pool.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pekit {

/// Grid of per-patch embedding vectors, row-major [grid_h][grid_w][dim].
class PatchFeatureMap {
 public:
  PatchFeatureMap(int grid_h, int grid_w, int dim, int image_h, int image_w,
                  std::vector<float> data);

  int grid_h() const { return grid_h_; }
  int grid_w() const { return grid_w_; }
  int dim() const { return dim_; }
  int image_h() const { return image_h_; }
  int image_w() const { return image_w_; }
  std::span<const float> data() const { return data_; }

  std::span<const float> patch(int row, int col) const;

 private:
  int grid_h_;
  int grid_w_;
  int dim_;
  int image_h_;
  int image_w_;
  std::vector<float> data_;
};

/// Row-major boolean occupancy, one byte per pixel (0 = outside).
class PixelMask {
 public:
  PixelMask(int height, int width);
  PixelMask(int height, int width, std::vector<std::uint8_t> bits);

  int height() const { return height_; }
  int width() const { return width_; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  bool at(int y, int x) const { return bits_[index(y, x)] != 0; }
  void set(int y, int x, bool value = true) { bits_[index(y, x)] = value ? 1 : 0; }
  std::size_t count() const;

  bool operator==(const PixelMask&) const = default;

 private:
  std::size_t index(int y, int x) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int height_;
  int width_;
  std::vector<std::uint8_t> bits_;
};

/// Half-open pixel box [x0, x1) x [y0, y1).
struct BoundingBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool empty() const { return x1 <= x0 || y1 <= y0; }
  bool fits(int image_w, int image_h) const {
    return !empty() && x0 >= 0 && y0 >= 0 && x1 <= image_w && y1 <= image_h;
  }

  bool operator==(const BoundingBox&) const = default;
};

struct PatchIndex {
  int row = 0;
  int col = 0;

  auto operator<=>(const PatchIndex&) const = default;
};

/// Selected patches in ascending (row, col) order.
using PatchSelection = std::vector<PatchIndex>;

struct InstanceEmbedding {
  std::vector<float> values;
  bool normalized = false;

  std::size_t dim() const { return values.size(); }
};

/// Patches with at least 50% of their footprint inside `mask`, or the single
/// best-covered patch when none qualifies. Throws Errc::empty_mask when the
/// mask has no true pixel.
PatchSelection downsample_mask(const PixelMask& mask, int grid_h, int grid_w);

/// Mean of the selected patch vectors, L2-normalized.
InstanceEmbedding pool_over_selection(const PatchFeatureMap& fmap,
                                      const PatchSelection& selection);

PixelMask rasterize(const BoundingBox& box, int image_h, int image_w);

/// Box pooling uses the mask path: rasterize against the map's image size,
/// then downsample.
PatchSelection bbox_to_selection(const BoundingBox& box, const PatchFeatureMap& fmap);

double cosine_similarity(const InstanceEmbedding& a, const InstanceEmbedding& b);

/// L2-normalize arbitrary values into an embedding; throws on zero norm.
InstanceEmbedding normalize(std::span<const double> values);
InstanceEmbedding normalize(std::span<const float> values);

}  // namespace pekit
