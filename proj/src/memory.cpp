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

#include "pekit/memory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <set>

#include <json.hpp>

#include "pekit/codec.hpp"
#include "pekit/error.hpp"
#include "pekit/kernels.hpp"

namespace pekit {
namespace {

constexpr double kUnitTolerance = 1e-6;
constexpr int kManifestVersion = 1;

bool valid_id(const std::string& id) {
  if (id.empty() || id.size() > 128 || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '-' || c == '_' || c == '.';
  });
}

std::string generated_id(std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "obj-%04llu", static_cast<unsigned long long>(n));
  return buf;
}

std::string embedding_file(const std::string& id) { return "emb_" + id + ".f32"; }

void check_unit_rows(std::span<const float> rows, std::size_t dim, const std::string& what) {
  for (std::size_t r = 0; r * dim < rows.size(); ++r) {
    const float* v = rows.data() + r * dim;
    if (!std::all_of(v, v + dim, [](float x) { return std::isfinite(x); })) {
      fail(Errc::invalid_argument, what + ": non-finite embedding value");
    }
    const double norm = std::sqrt(kernels::dot(v, v, dim));
    if (std::abs(norm - 1.0) > kUnitTolerance) {
      fail(Errc::invalid_argument, what + ": embedding row " + std::to_string(r) +
                                       " is not unit norm");
    }
  }
}

}  // namespace

MemoryStore::MemoryStore() = default;
MemoryStore::~MemoryStore() = default;

MemoryStore::MemoryStore(State state) : state_(std::move(state)) { rebuild_index_locked(); }

std::string MemoryStore::insert_object(const std::string& name, const std::string& context,
                                       const std::string& category,
                                       const std::vector<InstanceEmbedding>& embeddings,
                                       const std::optional<std::string>& explicit_id) {
  if (name.empty()) fail(Errc::invalid_argument, "insert: name must be non-empty");
  if (embeddings.empty()) fail(Errc::invalid_argument, "insert: empty embedding list");
  if (explicit_id && !valid_id(*explicit_id)) {
    fail(Errc::invalid_argument, "insert: invalid object id '" + *explicit_id + "'");
  }

  ObjectEntry entry;
  entry.name = name;
  entry.context = context;
  entry.category = category;
  entry.dim = embeddings.front().dim();
  if (entry.dim == 0) fail(Errc::invalid_argument, "insert: zero-dimensional embedding");
  entry.embeddings.reserve(entry.dim * embeddings.size());
  for (const auto& e : embeddings) {
    if (e.dim() != entry.dim) fail(Errc::dim_mismatch, "insert: views differ in dimension");
    if (!e.normalized) fail(Errc::invalid_argument, "insert: embedding not normalized");
    entry.embeddings.insert(entry.embeddings.end(), e.values.begin(), e.values.end());
  }
  check_unit_rows(entry.embeddings, entry.dim, "insert");

  std::unique_lock lock(mutex_);
  if (state_.dim != 0 && state_.dim != entry.dim) {
    fail(Errc::dim_mismatch, "insert: store dim " + std::to_string(state_.dim) +
                                 ", embedding dim " + std::to_string(entry.dim));
  }
  if (explicit_id) {
    if (state_.entries.contains(*explicit_id)) {
      fail(Errc::duplicate_object, "insert: duplicate object id '" + *explicit_id + "'");
    }
    entry.id = *explicit_id;
  } else {
    do {
      entry.id = generated_id(state_.next_id++);
    } while (state_.entries.contains(entry.id));
  }
  std::string id = entry.id;
  state_.dim = entry.dim;
  state_.entries.emplace(id, std::move(entry));
  rebuild_index_locked();
  return id;
}

void MemoryStore::remove_object(const std::string& id) {
  std::unique_lock lock(mutex_);
  if (state_.entries.erase(id) == 0) fail(Errc::unknown_object, "unknown object id '" + id + "'");
  rebuild_index_locked();
}

std::vector<ObjectSummary> MemoryStore::list_objects() const {
  std::shared_lock lock(mutex_);
  std::vector<ObjectSummary> out;
  out.reserve(state_.entries.size());
  for (const auto& [id, e] : state_.entries) {
    out.push_back({id, e.name, e.context, e.category, e.num_views()});
  }
  return out;
}

std::optional<ObjectEntry> MemoryStore::find(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = state_.entries.find(id);
  if (it == state_.entries.end()) return std::nullopt;
  return it->second;
}

void MemoryStore::check_query_locked(const InstanceEmbedding& query) const {
  if (query.dim() != state_.dim) {
    fail(Errc::dim_mismatch, "query: store dim " + std::to_string(state_.dim) +
                                 ", query dim " + std::to_string(query.dim()));
  }
  if (!query.normalized) fail(Errc::invalid_argument, "query: embedding not normalized");
}

std::vector<ObjectScore> MemoryStore::query_all_objects(const InstanceEmbedding& query) const {
  std::shared_lock lock(mutex_);
  if (state_.entries.empty()) return {};
  check_query_locked(query);

  std::vector<double> scores(state_.row_owner.size());
  kernels::dot_rows(state_.rows, state_.dim, query.values, scores);

  // Rows are grouped per object in id order, views ascending.
  std::vector<ObjectScore> out;
  out.reserve(state_.entries.size());
  const ObjectEntry* current = nullptr;
  for (std::size_t r = 0; r < scores.size(); ++r) {
    const auto& [owner, view] = state_.row_owner[r];
    if (owner != current) {
      out.push_back({owner->id, view, scores[r]});
      current = owner;
    } else if (scores[r] > out.back().score) {
      out.back().view_index = view;
      out.back().score = scores[r];
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ObjectScore& a, const ObjectScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.object_id < b.object_id;
  });
  return out;
}

std::optional<ObjectScore> MemoryStore::best_match(const InstanceEmbedding& query) const {
  {
    std::shared_lock lock(mutex_);
    if (state_.entries.empty()) return std::nullopt;
    check_query_locked(query);
    if (state_.ivf) {
      auto row = state_.ivf->nearest(query.values);
      if (!row) return std::nullopt;
      const auto& [owner, view] = state_.row_owner[*row];
      const double score =
          kernels::dot(state_.rows.data() + *row * state_.dim, query.values.data(), state_.dim);
      return ObjectScore{owner->id, view, score};
    }
  }
  auto all = query_all_objects(query);
  if (all.empty()) return std::nullopt;
  return all.front();
}

std::size_t MemoryStore::dim() const {
  std::shared_lock lock(mutex_);
  return state_.dim;
}

std::size_t MemoryStore::size() const {
  std::shared_lock lock(mutex_);
  return state_.entries.size();
}

std::size_t MemoryStore::row_count() const {
  std::shared_lock lock(mutex_);
  return state_.row_owner.size();
}

void MemoryStore::enable_approximate(const IvfParams& params) {
  std::unique_lock lock(mutex_);
  state_.ivf_params = params;
  rebuild_index_locked();
}

void MemoryStore::disable_approximate() {
  std::unique_lock lock(mutex_);
  state_.ivf_params.reset();
  state_.ivf.reset();
}

bool MemoryStore::approximate_enabled() const {
  std::shared_lock lock(mutex_);
  return state_.ivf != nullptr;
}

void MemoryStore::rebuild_index_locked() {
  state_.rows.clear();
  state_.row_owner.clear();
  for (const auto& [id, e] : state_.entries) {
    state_.rows.insert(state_.rows.end(), e.embeddings.begin(), e.embeddings.end());
    for (std::size_t k = 0; k < e.num_views(); ++k) state_.row_owner.emplace_back(&e, k);
  }
  state_.ivf.reset();
  if (state_.ivf_params && !state_.row_owner.empty()) {
    state_.ivf = std::make_unique<IvfIndex>(state_.rows, state_.dim, *state_.ivf_params);
  }
}

void MemoryStore::save(const std::filesystem::path& dir) const {
  namespace fs = std::filesystem;
  std::shared_lock lock(mutex_);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(Errc::io, "save: cannot create " + dir.string() + ": " + ec.message());

  nlohmann::ordered_json manifest;
  manifest["version"] = kManifestVersion;
  manifest["dim"] = state_.dim;
  manifest["objects"] = nlohmann::ordered_json::array();
  std::set<std::string> written;
  for (const auto& [id, e] : state_.entries) {
    const Bytes bytes = pack_f32_le(e.embeddings);
    const std::string file = embedding_file(id);
    write_file(dir / file, bytes);
    written.insert(file);
    nlohmann::ordered_json obj;
    obj["id"] = id;
    obj["name"] = e.name;
    obj["context"] = e.context;
    obj["category"] = e.category;
    obj["num_views"] = e.num_views();
    obj["file"] = file;
    obj["sha256"] = sha256_hex(bytes);
    manifest["objects"].push_back(std::move(obj));
  }
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");

  // Embedding files of removed objects would otherwise linger.
  for (const auto& item : fs::directory_iterator(dir)) {
    const std::string fname = item.path().filename().string();
    if (fname.starts_with("emb_") && fname.ends_with(".f32") && !written.contains(fname)) {
      fs::remove(item.path(), ec);
    }
  }
}

MemoryStore MemoryStore::load(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_text_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::corrupt_manifest, "load: " + manifest_path.string() + ": " + e.what());
  }

  State state;
  try {
    if (manifest.at("version").get<int>() != kManifestVersion) {
      fail(Errc::corrupt_manifest, "load: unsupported manifest version");
    }
    state.dim = manifest.at("dim").get<std::size_t>();
    for (const auto& obj : manifest.at("objects")) {
      ObjectEntry e;
      e.id = obj.at("id").get<std::string>();
      e.name = obj.at("name").get<std::string>();
      e.context = obj.at("context").get<std::string>();
      e.category = obj.at("category").get<std::string>();
      e.dim = state.dim;
      const auto num_views = obj.at("num_views").get<std::size_t>();
      const auto file = obj.at("file").get<std::string>();
      const auto sha = obj.at("sha256").get<std::string>();
      if (!valid_id(e.id) || e.name.empty() || num_views == 0 || state.dim == 0) {
        fail(Errc::corrupt_manifest, "load: invalid entry for object '" + e.id + "'");
      }
      if (file != embedding_file(e.id)) {
        fail(Errc::corrupt_manifest, "load: unexpected file name '" + file + "'");
      }
      const Bytes bytes = read_file(dir / file);
      if (bytes.size() != num_views * state.dim * 4) {
        fail(Errc::shape_mismatch, "load: " + file + " holds " + std::to_string(bytes.size()) +
                                       " bytes, manifest expects " +
                                       std::to_string(num_views) + "x" +
                                       std::to_string(state.dim) + " float32");
      }
      if (sha256_hex(bytes) != sha) {
        fail(Errc::checksum_mismatch, "load: checksum mismatch for " + file);
      }
      e.embeddings = unpack_f32_le(bytes);
      check_unit_rows(e.embeddings, e.dim, "load " + file);
      if (!state.entries.emplace(e.id, e).second) {
        fail(Errc::corrupt_manifest, "load: duplicate object id '" + e.id + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::corrupt_manifest, std::string("load: malformed manifest: ") + e.what());
  }
  return MemoryStore(std::move(state));
}

}  // namespace pekit
