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

#include "pekit/kernels.hpp"

#include <cstdint>

#include <omp.h>

namespace pekit::kernels {
namespace {

// Below these sizes thread startup costs more than the loop.
constexpr std::size_t kMinPixelsForOmp = 1 << 16;
constexpr std::size_t kMinRowElementsForOmp = 1 << 15;

// First pixel row whose patch row is >= `patch_row`: ceil(patch_row*H/gh).
std::int64_t first_pixel_row(std::int64_t patch_row, std::int64_t height,
                             std::int64_t grid_h) {
  return (patch_row * height + grid_h - 1) / grid_h;
}

}  // namespace

namespace omp {

CoverageGrid patch_coverage(std::span<const std::uint8_t> bits, int height,
                            int width, int grid_h, int grid_w) {
  CoverageGrid grid;
  grid.grid_h = grid_h;
  grid.grid_w = grid_w;
  const auto cells = static_cast<std::size_t>(grid_h) * grid_w;
  grid.covered.assign(cells, 0);
  grid.footprint.assign(cells, 0);

  // Each thread owns whole patch rows, so no two threads touch one cell.
#pragma omp parallel for schedule(static)
  for (int row = 0; row < grid_h; ++row) {
    const std::int64_t y_begin = first_pixel_row(row, height, grid_h);
    const std::int64_t y_end = first_pixel_row(row + 1, height, grid_h);
    for (std::int64_t y = y_begin; y < y_end; ++y) {
      const std::uint8_t* line = bits.data() + static_cast<std::size_t>(y) * width;
      for (int x = 0; x < width; ++x) {
        const int col = static_cast<int>(static_cast<std::int64_t>(x) * grid_w / width);
        const std::size_t cell = grid.at(row, col);
        ++grid.footprint[cell];
        if (line[x] != 0) ++grid.covered[cell];
      }
    }
  }
  return grid;
}

std::vector<double> mean_rows(std::span<const float> matrix, std::size_t dim,
                              std::span<const std::size_t> rows) {
  std::vector<double> mean(dim, 0.0);
  // Each thread owns a contiguous block of coordinates and walks the rows in
  // serial order, so every coordinate is summed exactly as in serial::.
#pragma omp parallel
  {
    const auto threads = static_cast<std::size_t>(omp_get_num_threads());
    const auto t = static_cast<std::size_t>(omp_get_thread_num());
    const std::size_t begin = dim * t / threads;
    const std::size_t end = dim * (t + 1) / threads;
    for (std::size_t r : rows) {
      const float* row = matrix.data() + r * dim;
      for (std::size_t k = begin; k < end; ++k) mean[k] += static_cast<double>(row[k]);
    }
  }
  const double n = static_cast<double>(rows.size());
  for (double& m : mean) m /= n;
  return mean;
}

void dot_rows(std::span<const float> matrix, std::size_t dim,
              std::span<const float> query, std::span<double> out) {
  const auto n_rows = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < n_rows; ++r) {
    out[r] = dot(matrix.data() + r * dim, query.data(), dim);
  }
}

}  // namespace omp

CoverageGrid patch_coverage(std::span<const std::uint8_t> bits, int height,
                            int width, int grid_h, int grid_w) {
  if (bits.size() >= kMinPixelsForOmp && grid_h > 1) {
    return omp::patch_coverage(bits, height, width, grid_h, grid_w);
  }
  return serial::patch_coverage(bits, height, width, grid_h, grid_w);
}

std::vector<double> mean_rows(std::span<const float> matrix, std::size_t dim,
                              std::span<const std::size_t> rows) {
  if (rows.size() * dim >= kMinRowElementsForOmp) {
    return omp::mean_rows(matrix, dim, rows);
  }
  return serial::mean_rows(matrix, dim, rows);
}

void dot_rows(std::span<const float> matrix, std::size_t dim,
              std::span<const float> query, std::span<double> out) {
  if (out.size() * dim >= kMinRowElementsForOmp) {
    omp::dot_rows(matrix, dim, query, out);
  } else {
    serial::dot_rows(matrix, dim, query, out);
  }
}

}  // namespace pekit::kernels
