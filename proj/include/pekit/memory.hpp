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

// Memory of personalized objects.
//
// Each object keeps one unit-norm embedding per reference view, in the order
// the views were supplied, plus its name, optional context and generic
// category. All view rows of all objects are laid out in one flat row-major
// matrix that is scanned exactly on every query. An inverted-file index can
// be switched on for top-1 lookups on large stores; full per-object scoring
// always uses the exact scan.
//
// Thread safety: any number of concurrent readers or one writer.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "pekit/features.hpp"

namespace pekit {

struct ObjectEntry {
  std::string id;
  std::string name;
  std::string context;
  std::string category;
  std::size_t dim = 0;
  std::vector<float> embeddings;  // row-major num_views x dim

  std::size_t num_views() const { return dim == 0 ? 0 : embeddings.size() / dim; }
  std::span<const float> view(std::size_t k) const {
    return std::span<const float>(embeddings).subspan(k * dim, dim);
  }
};

struct ObjectSummary {
  std::string id;
  std::string name;
  std::string context;
  std::string category;
  std::size_t num_views = 0;
};

/// Best view of one object for a query.
struct ObjectScore {
  std::string object_id;
  std::size_t view_index = 0;
  double score = 0.0;
};

struct IvfParams {
  std::size_t nlist = 0;   // 0 = round(sqrt(rows))
  std::size_t nprobe = 16;
  int iterations = 12;
  std::uint32_t seed = 1234;
};

/// Inverted-file index over unit vectors: spherical k-means coarse cells,
/// exact re-scoring inside the `nprobe` best cells.
class IvfIndex {
 public:
  IvfIndex(std::span<const float> rows, std::size_t dim, const IvfParams& params);

  /// Row with the highest dot product among probed cells (smallest row on ties).
  std::optional<std::size_t> nearest(std::span<const float> query) const;

  std::size_t nlist() const { return lists_.size(); }

 private:
  std::span<const float> rows_;
  std::size_t dim_;
  std::size_t nprobe_;
  std::vector<float> centroids_;
  std::vector<std::vector<std::size_t>> lists_;
};

class MemoryStore {
 public:
  MemoryStore();
  ~MemoryStore();
  MemoryStore(const MemoryStore&) = delete;
  MemoryStore& operator=(const MemoryStore&) = delete;

  /// Adds one object; the first insert fixes the store dimension. Returns the
  /// object id (generated as "obj-NNNN" unless `explicit_id` is given).
  std::string insert_object(const std::string& name, const std::string& context,
                            const std::string& category,
                            const std::vector<InstanceEmbedding>& embeddings,
                            const std::optional<std::string>& explicit_id = std::nullopt);

  void remove_object(const std::string& id);

  std::vector<ObjectSummary> list_objects() const;
  std::optional<ObjectEntry> find(const std::string& id) const;

  /// One item per object: best view score, sorted by descending score then
  /// ascending id. Empty store gives an empty list.
  std::vector<ObjectScore> query_all_objects(const InstanceEmbedding& query) const;

  /// Top object for `query`; uses the approximate index when enabled.
  std::optional<ObjectScore> best_match(const InstanceEmbedding& query) const;

  /// 0 until the first insert.
  std::size_t dim() const;
  std::size_t size() const;
  std::size_t row_count() const;

  void enable_approximate(const IvfParams& params = {});
  void disable_approximate();
  bool approximate_enabled() const;

  /// Writes manifest.json plus one emb_<id>.f32 per object into `dir`.
  void save(const std::filesystem::path& dir) const;
  static MemoryStore load(const std::filesystem::path& dir);

 private:
  struct State {
    std::size_t dim = 0;
    std::map<std::string, ObjectEntry> entries;
    std::vector<float> rows;
    std::vector<std::pair<const ObjectEntry*, std::size_t>> row_owner;
    std::optional<IvfParams> ivf_params;
    std::unique_ptr<IvfIndex> ivf;
    std::uint64_t next_id = 1;
  };

  explicit MemoryStore(State state);

  void rebuild_index_locked();
  void check_query_locked(const InstanceEmbedding& query) const;

  mutable std::shared_mutex mutex_;
  State state_;
};

}  // namespace pekit
