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

#include "pekit/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pekit/error.hpp"
#include "pekit/kernels.hpp"

namespace pekit {

PatchFeatureMap::PatchFeatureMap(int grid_h, int grid_w, int dim, int image_h,
                                 int image_w, std::vector<float> data)
    : grid_h_(grid_h),
      grid_w_(grid_w),
      dim_(dim),
      image_h_(image_h),
      image_w_(image_w),
      data_(std::move(data)) {
  if (grid_h < 1 || grid_w < 1 || dim < 1) {
    fail(Errc::invalid_argument, "feature map: grid and dim must be >= 1");
  }
  if (image_h < grid_h || image_w < grid_w) {
    fail(Errc::invalid_argument, "feature map: image smaller than patch grid");
  }
  const auto expected = static_cast<std::size_t>(grid_h) * grid_w * dim;
  if (data_.size() != expected) {
    fail(Errc::shape_mismatch, "feature map: expected " + std::to_string(expected) +
                                   " values, got " + std::to_string(data_.size()));
  }
  if (!std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); })) {
    fail(Errc::invalid_argument, "feature map: non-finite value");
  }
}

std::span<const float> PatchFeatureMap::patch(int row, int col) const {
  const auto offset =
      (static_cast<std::size_t>(row) * grid_w_ + static_cast<std::size_t>(col)) * dim_;
  return std::span<const float>(data_).subspan(offset, static_cast<std::size_t>(dim_));
}

PixelMask::PixelMask(int height, int width)
    : PixelMask(height, width,
                std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(height, 0)) *
                                          static_cast<std::size_t>(std::max(width, 0)))) {}

PixelMask::PixelMask(int height, int width, std::vector<std::uint8_t> bits)
    : height_(height), width_(width), bits_(std::move(bits)) {
  if (height < 1 || width < 1) fail(Errc::invalid_argument, "mask: empty dimensions");
  if (bits_.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
    fail(Errc::shape_mismatch, "mask: bit count does not match height*width");
  }
}

std::size_t PixelMask::count() const {
  return static_cast<std::size_t>(
      std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

PatchSelection downsample_mask(const PixelMask& mask, int grid_h, int grid_w) {
  if (grid_h < 1 || grid_w < 1 || mask.height() < grid_h || mask.width() < grid_w) {
    fail(Errc::invalid_argument, "downsample_mask: mask smaller than patch grid");
  }
  const auto grid =
      kernels::patch_coverage(mask.bits(), mask.height(), mask.width(), grid_h, grid_w);

  PatchSelection selected;
  bool any_covered = false;
  PatchIndex best{};
  std::uint64_t best_num = 0;
  std::uint64_t best_den = 1;
  for (int row = 0; row < grid_h; ++row) {
    for (int col = 0; col < grid_w; ++col) {
      const std::size_t cell = grid.at(row, col);
      const std::uint64_t covered = grid.covered[cell];
      const std::uint64_t footprint = grid.footprint[cell];
      if (covered == 0) continue;
      any_covered = true;
      if (2 * covered >= footprint) selected.push_back({row, col});
      // Strict comparison keeps the first (smallest row, col) on ties.
      if (covered * best_den > best_num * footprint) {
        best = {row, col};
        best_num = covered;
        best_den = footprint;
      }
    }
  }
  if (!any_covered) fail(Errc::empty_mask, "empty mask");
  if (selected.empty()) selected.push_back(best);
  return selected;
}

InstanceEmbedding normalize(std::span<const double> values) {
  double sq = 0.0;
  for (double v : values) sq += v * v;
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    fail(Errc::degenerate_embedding, "degenerate embedding");
  }
  InstanceEmbedding out;
  out.values.resize(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    out.values[k] = static_cast<float>(values[k] / norm);
  }
  out.normalized = true;
  return out;
}

InstanceEmbedding normalize(std::span<const float> values) {
  std::vector<double> wide(values.begin(), values.end());
  return normalize(std::span<const double>(wide));
}

InstanceEmbedding pool_over_selection(const PatchFeatureMap& fmap,
                                      const PatchSelection& selection) {
  if (selection.empty()) fail(Errc::empty_selection, "pool: empty selection");
  std::vector<std::size_t> rows;
  rows.reserve(selection.size());
  for (const auto& p : selection) {
    if (p.row < 0 || p.row >= fmap.grid_h() || p.col < 0 || p.col >= fmap.grid_w()) {
      fail(Errc::invalid_argument, "pool: patch index outside grid");
    }
    rows.push_back(static_cast<std::size_t>(p.row) * fmap.grid_w() +
                   static_cast<std::size_t>(p.col));
  }
  const auto mean =
      kernels::mean_rows(fmap.data(), static_cast<std::size_t>(fmap.dim()), rows);
  return normalize(std::span<const double>(mean));
}

PixelMask rasterize(const BoundingBox& box, int image_h, int image_w) {
  if (box.empty()) fail(Errc::invalid_argument, "bbox: zero area");
  if (!box.fits(image_w, image_h)) fail(Errc::invalid_argument, "bbox: outside image");
  PixelMask mask(image_h, image_w);
  for (int y = box.y0; y < box.y1; ++y) {
    for (int x = box.x0; x < box.x1; ++x) mask.set(y, x);
  }
  return mask;
}

PatchSelection bbox_to_selection(const BoundingBox& box, const PatchFeatureMap& fmap) {
  return downsample_mask(rasterize(box, fmap.image_h(), fmap.image_w()), fmap.grid_h(),
                         fmap.grid_w());
}

double cosine_similarity(const InstanceEmbedding& a, const InstanceEmbedding& b) {
  if (a.dim() != b.dim()) fail(Errc::dim_mismatch, "cosine: dimension mismatch");
  const double ab = kernels::dot(a.values.data(), b.values.data(), a.dim());
  const double aa = kernels::dot(a.values.data(), a.values.data(), a.dim());
  const double bb = kernels::dot(b.values.data(), b.values.data(), b.dim());
  if (!(aa > 0.0) || !(bb > 0.0)) fail(Errc::degenerate_embedding, "cosine: zero-norm input");
  if (!std::isfinite(ab) || !std::isfinite(aa) || !std::isfinite(bb)) {
    fail(Errc::invalid_argument, "cosine: non-finite input");
  }
  return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

}  // namespace pekit
