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

// Data-parallel inner loops shared by pooling and flat search.
//
// Every kernel exists twice: `serial::` is the reference used by tests and
// `omp::` is the OpenMP version. Both produce bit-identical results: the
// parallel versions split work so that each output element is accumulated by
// exactly one thread in the same order as the serial loop. The unqualified
// entry points pick one based on problem size.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pekit::kernels {

/// Per-patch pixel counts for a boolean mask laid over a patch grid.
/// Pixel (y, x) belongs to patch (y*grid_h/H, x*grid_w/W) (integer floor).
struct CoverageGrid {
  int grid_h = 0;
  int grid_w = 0;
  std::vector<std::uint32_t> covered;    // true pixels per patch
  std::vector<std::uint32_t> footprint;  // total pixels per patch

  std::size_t at(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(grid_w) +
           static_cast<std::size_t>(col);
  }
};

inline double dot(const float* a, const float* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += static_cast<double>(a[k]) * static_cast<double>(b[k]);
  }
  return acc;
}

namespace serial {

CoverageGrid patch_coverage(std::span<const std::uint8_t> bits, int height,
                            int width, int grid_h, int grid_w);

/// Mean of the listed rows of a row-major matrix with `dim` columns.
std::vector<double> mean_rows(std::span<const float> matrix, std::size_t dim,
                              std::span<const std::size_t> rows);

/// out[r] = dot(matrix row r, query) for every row.
void dot_rows(std::span<const float> matrix, std::size_t dim,
              std::span<const float> query, std::span<double> out);

}  // namespace serial

namespace omp {

CoverageGrid patch_coverage(std::span<const std::uint8_t> bits, int height,
                            int width, int grid_h, int grid_w);
std::vector<double> mean_rows(std::span<const float> matrix, std::size_t dim,
                              std::span<const std::size_t> rows);
void dot_rows(std::span<const float> matrix, std::size_t dim,
              std::span<const float> query, std::span<double> out);

}  // namespace omp

CoverageGrid patch_coverage(std::span<const std::uint8_t> bits, int height,
                            int width, int grid_h, int grid_w);
std::vector<double> mean_rows(std::span<const float> matrix, std::size_t dim,
                              std::span<const std::size_t> rows);
void dot_rows(std::span<const float> matrix, std::size_t dim,
              std::span<const float> query, std::span<double> out);

}  // namespace pekit::kernels
