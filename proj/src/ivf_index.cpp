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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "pekit/error.hpp"
#include "pekit/kernels.hpp"
#include "pekit/memory.hpp"

namespace pekit {
namespace {

void normalize_in_place(float* v, std::size_t dim) {
  const double norm = std::sqrt(kernels::dot(v, v, dim));
  if (norm <= 0.0) return;
  for (std::size_t k = 0; k < dim; ++k) v[k] = static_cast<float>(v[k] / norm);
}

std::size_t argmax(const std::vector<double>& scores) {
  return static_cast<std::size_t>(
      std::distance(scores.begin(), std::max_element(scores.begin(), scores.end())));
}

}  // namespace

IvfIndex::IvfIndex(std::span<const float> rows, std::size_t dim, const IvfParams& params)
    : rows_(rows), dim_(dim) {
  if (dim == 0 || rows.empty() || rows.size() % dim != 0) {
    fail(Errc::invalid_argument, "ivf: empty or ragged row matrix");
  }
  const std::size_t n_rows = rows.size() / dim;
  std::size_t nlist = params.nlist != 0
                          ? params.nlist
                          : static_cast<std::size_t>(std::lround(std::sqrt(double(n_rows))));
  nlist = std::clamp<std::size_t>(nlist, 1, n_rows);
  nprobe_ = std::clamp<std::size_t>(params.nprobe, 1, nlist);

  // Seed centroids with distinct rows chosen by a fixed-seed shuffle.
  std::vector<std::size_t> order(n_rows);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937 rng(params.seed);
  std::shuffle(order.begin(), order.end(), rng);
  centroids_.resize(nlist * dim);
  for (std::size_t c = 0; c < nlist; ++c) {
    std::copy_n(rows.data() + order[c] * dim, dim, centroids_.data() + c * dim);
  }

  std::vector<std::size_t> assignment(n_rows, 0);
  std::vector<double> scores(nlist);
  for (int iter = 0; iter < std::max(params.iterations, 1); ++iter) {
    for (std::size_t r = 0; r < n_rows; ++r) {
      kernels::dot_rows(centroids_, dim, rows.subspan(r * dim, dim), scores);
      assignment[r] = argmax(scores);
    }
    std::vector<double> sums(nlist * dim, 0.0);
    std::vector<std::size_t> counts(nlist, 0);
    for (std::size_t r = 0; r < n_rows; ++r) {
      const std::size_t c = assignment[r];
      ++counts[c];
      for (std::size_t k = 0; k < dim; ++k) sums[c * dim + k] += rows[r * dim + k];
    }
    for (std::size_t c = 0; c < nlist; ++c) {
      if (counts[c] == 0) continue;  // keep the previous centroid
      for (std::size_t k = 0; k < dim; ++k) {
        centroids_[c * dim + k] = static_cast<float>(sums[c * dim + k] / double(counts[c]));
      }
      normalize_in_place(centroids_.data() + c * dim, dim);
    }
  }

  lists_.assign(nlist, {});
  for (std::size_t r = 0; r < n_rows; ++r) {
    kernels::dot_rows(centroids_, dim, rows.subspan(r * dim, dim), scores);
    lists_[argmax(scores)].push_back(r);
  }
}

std::optional<std::size_t> IvfIndex::nearest(std::span<const float> query) const {
  if (query.size() != dim_) fail(Errc::dim_mismatch, "ivf: query dimension mismatch");
  std::vector<double> cell_scores(lists_.size());
  kernels::dot_rows(centroids_, dim_, query, cell_scores);
  std::vector<std::size_t> cells(lists_.size());
  std::iota(cells.begin(), cells.end(), 0);
  std::partial_sort(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(nprobe_),
                    cells.end(), [&](std::size_t a, std::size_t b) {
                      if (cell_scores[a] != cell_scores[b]) return cell_scores[a] > cell_scores[b];
                      return a < b;
                    });

  std::optional<std::size_t> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nprobe_; ++i) {
    for (std::size_t r : lists_[cells[i]]) {
      const double s = kernels::dot(rows_.data() + r * dim_, query.data(), dim_);
      if (s > best_score || (s == best_score && best && r < *best)) {
        best_score = s;
        best = r;
      }
    }
  }
  return best;
}

}  // namespace pekit
