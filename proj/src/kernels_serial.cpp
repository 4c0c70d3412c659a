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

namespace pekit::kernels::serial {

CoverageGrid patch_coverage(std::span<const std::uint8_t> bits, int height,
                            int width, int grid_h, int grid_w) {
  CoverageGrid grid;
  grid.grid_h = grid_h;
  grid.grid_w = grid_w;
  const auto cells = static_cast<std::size_t>(grid_h) * grid_w;
  grid.covered.assign(cells, 0);
  grid.footprint.assign(cells, 0);

  for (int y = 0; y < height; ++y) {
    const int row = static_cast<int>(static_cast<std::int64_t>(y) * grid_h / height);
    const std::uint8_t* line = bits.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      const int col = static_cast<int>(static_cast<std::int64_t>(x) * grid_w / width);
      const std::size_t cell = grid.at(row, col);
      ++grid.footprint[cell];
      if (line[x] != 0) ++grid.covered[cell];
    }
  }
  return grid;
}

std::vector<double> mean_rows(std::span<const float> matrix, std::size_t dim,
                              std::span<const std::size_t> rows) {
  std::vector<double> mean(dim, 0.0);
  for (std::size_t r : rows) {
    const float* v = matrix.data() + r * dim;
    for (std::size_t k = 0; k < dim; ++k) mean[k] += static_cast<double>(v[k]);
  }
  const double n = static_cast<double>(rows.size());
  for (double& m : mean) m /= n;
  return mean;
}

void dot_rows(std::span<const float> matrix, std::size_t dim,
              std::span<const float> query, std::span<double> out) {
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r] = dot(matrix.data() + r * dim, query.data(), dim);
  }
}

}  // namespace pekit::kernels::serial
