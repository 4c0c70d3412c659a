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

#include <thread>

#include <json.hpp>

#include "pekit/codec.hpp"
#include "pekit/memory.hpp"
#include "test_util.hpp"

namespace pekit {
namespace {

using testing::random_unit;
using testing::TempDir;
using testing::unit;

TEST(MemoryStore, GeneratesSequentialIds) {
  MemoryStore store;
  EXPECT_EQ(store.dim(), 0u);
  EXPECT_EQ(store.insert_object("mug", "", "cup", {unit({1, 0, 0})}), "obj-0001");
  EXPECT_EQ(store.insert_object("cat", "", "toy", {unit({0, 1, 0}), unit({0, 0, 1})}), "obj-0002");
  EXPECT_EQ(store.dim(), 3u);
  EXPECT_EQ(store.size(), 2u);
  EXPECT_EQ(store.row_count(), 3u);
}

TEST(MemoryStore, RejectsBadInserts) {
  MemoryStore store;
  store.insert_object("a", "", "c", {unit({1, 0})}, std::string("mine"));
  EXPECT_ERRC(store.insert_object("b", "", "c", {unit({1, 0, 0})}), Errc::dim_mismatch);
  EXPECT_ERRC(store.insert_object("b", "", "c", {unit({1, 0})}, std::string("mine")),
              Errc::duplicate_object);
  EXPECT_ERRC(store.insert_object("b", "", "c", {}), Errc::invalid_argument);
  EXPECT_ERRC(store.insert_object("", "", "c", {unit({1, 0})}), Errc::invalid_argument);
  InstanceEmbedding raw{{3.0f, 4.0f}, false};
  EXPECT_ERRC(store.insert_object("b", "", "c", {raw}), Errc::invalid_argument);
  EXPECT_EQ(store.size(), 1u);
}

TEST(MemoryStore, RemoveAndFind) {
  MemoryStore store;
  const auto id = store.insert_object("lamp", "desk lamp", "lamp", {unit({1, 1})});
  const auto entry = store.find(id);
  ASSERT_TRUE(entry.has_value());
  EXPECT_EQ(entry->name, "lamp");
  EXPECT_EQ(entry->context, "desk lamp");
  EXPECT_EQ(entry->num_views(), 1u);
  store.remove_object(id);
  EXPECT_FALSE(store.find(id).has_value());
  EXPECT_ERRC(store.remove_object(id), Errc::unknown_object);
  EXPECT_TRUE(store.query_all_objects(unit({1, 0})).empty());
}

TEST(MemoryStore, QueryAllObjectsTakesBestViewAndSorts) {
  MemoryStore store;
  store.insert_object("x", "", "c", {unit({1, 0, 0}), unit({0, 0, 1})});
  store.insert_object("y", "", "c", {unit({0, 1, 0}), unit({1, 1, 0})});
  const auto scores = store.query_all_objects(unit({0.2f, 1, 0}));
  ASSERT_EQ(scores.size(), 2u);
  EXPECT_EQ(scores[0].object_id, "obj-0002");
  EXPECT_EQ(scores[0].view_index, 0u);
  EXPECT_EQ(scores[1].object_id, "obj-0001");
  EXPECT_EQ(scores[1].view_index, 0u);
  EXPECT_GT(scores[0].score, scores[1].score);
}

TEST(MemoryStore, TiesBreakByIdAndViewIndex) {
  MemoryStore store;
  store.insert_object("b", "", "c", {unit({0, 1}), unit({0, 1})}, std::string("b"));
  store.insert_object("a", "", "c", {unit({0, 1})}, std::string("a"));
  const auto scores = store.query_all_objects(unit({0, 1}));
  ASSERT_EQ(scores.size(), 2u);
  EXPECT_EQ(scores[0].object_id, "a");
  EXPECT_EQ(scores[1].object_id, "b");
  EXPECT_EQ(scores[1].view_index, 0u);
}

TEST(MemoryStore, QueryChecksDimensionAndNormalization) {
  MemoryStore store;
  store.insert_object("a", "", "c", {unit({1, 0})});
  EXPECT_ERRC(store.query_all_objects(unit({1, 0, 0})), Errc::dim_mismatch);
  EXPECT_ERRC(store.best_match(InstanceEmbedding{{1.0f, 0.0f}, false}), Errc::invalid_argument);
}

TEST(MemoryStore, SaveLoadRoundTrip) {
  TempDir dir("mem");
  std::mt19937 rng(3);
  MemoryStore store;
  for (int i = 0; i < 5; ++i) {
    store.insert_object("n" + std::to_string(i), "ctx", "cat",
                        {random_unit(rng, 8), random_unit(rng, 8)});
  }
  store.save(dir.path());
  const auto loaded = MemoryStore::load(dir.path());
  EXPECT_EQ(loaded.size(), 5u);
  EXPECT_EQ(loaded.dim(), 8u);
  for (const auto& o : store.list_objects()) {
    EXPECT_EQ(loaded.find(o.id)->embeddings, store.find(o.id)->embeddings);
  }
  const auto manifest = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
  EXPECT_EQ(manifest["objects"][0]["file"], "emb_obj-0001.f32");
  EXPECT_EQ(read_file(dir / "emb_obj-0001.f32").size(), 2u * 8u * 4u);
}

TEST(MemoryStore, SaveRemovesStaleEmbeddingFiles) {
  TempDir dir("mem");
  MemoryStore store;
  const auto id = store.insert_object("a", "", "c", {unit({1, 0})});
  store.insert_object("b", "", "c", {unit({0, 1})});
  store.save(dir.path());
  store.remove_object(id);
  store.save(dir.path());
  EXPECT_FALSE(std::filesystem::exists(dir / ("emb_" + id + ".f32")));
  EXPECT_EQ(MemoryStore::load(dir.path()).size(), 1u);
}

TEST(MemoryStore, LoadDetectsCorruption) {
  TempDir dir("mem");
  MemoryStore store;
  store.insert_object("a", "", "c", {unit({1, 0, 0})});
  store.save(dir.path());

  auto bytes = read_file(dir / "emb_obj-0001.f32");
  bytes[0] ^= 0x01;
  write_file(dir / "emb_obj-0001.f32", bytes);
  EXPECT_ERRC(MemoryStore::load(dir.path()), Errc::checksum_mismatch);

  bytes.resize(8);
  write_file(dir / "emb_obj-0001.f32", bytes);
  EXPECT_ERRC(MemoryStore::load(dir.path()), Errc::shape_mismatch);

  write_text_file(dir / "manifest.json", "{\"version\": 1, \"dim\": ");
  EXPECT_ERRC(MemoryStore::load(dir.path()), Errc::corrupt_manifest);

  write_text_file(dir / "manifest.json", "{\"version\": 1}");
  EXPECT_ERRC(MemoryStore::load(dir.path()), Errc::corrupt_manifest);
}

TEST(MemoryStore, IdsContinueAfterReload) {
  TempDir dir("mem");
  MemoryStore store;
  store.insert_object("a", "", "c", {unit({1, 0})});
  store.insert_object("b", "", "c", {unit({0, 1})});
  store.save(dir.path());
  auto loaded = MemoryStore::load(dir.path());
  EXPECT_EQ(loaded.insert_object("c", "", "c", {unit({1, 1})}), "obj-0003");
}

TEST(MemoryStore, ConcurrentReadersAndWriter) {
  MemoryStore store;
  std::mt19937 rng(5);
  store.insert_object("seed", "", "c", {random_unit(rng, 16)});
  std::vector<InstanceEmbedding> queries;
  for (int i = 0; i < 8; ++i) queries.push_back(random_unit(rng, 16));
  std::atomic<bool> failed{false};
  std::vector<std::thread> readers;
  for (int t = 0; t < 4; ++t) {
    readers.emplace_back([&, t] {
      for (int i = 0; i < 200; ++i) {
        const auto r = store.query_all_objects(queries[(t + i) % queries.size()]);
        if (r.empty()) failed = true;
      }
    });
  }
  for (int i = 0; i < 50; ++i) store.insert_object("o", "", "c", {random_unit(rng, 16)});
  for (auto& th : readers) th.join();
  EXPECT_FALSE(failed);
  EXPECT_EQ(store.size(), 51u);
}

TEST(IvfIndex, AgreesWithExactSearchWhenProbingEverything) {
  std::mt19937 rng(8);
  MemoryStore store;
  for (int i = 0; i < 300; ++i) store.insert_object("o", "", "c", {random_unit(rng, 12)});
  IvfParams params;
  params.nprobe = 1000;
  store.enable_approximate(params);
  EXPECT_TRUE(store.approximate_enabled());
  for (int q = 0; q < 50; ++q) {
    const auto query = random_unit(rng, 12);
    const auto approx = store.best_match(query);
    const auto exact = store.query_all_objects(query).front();
    ASSERT_TRUE(approx.has_value());
    EXPECT_EQ(approx->object_id, exact.object_id);
    EXPECT_EQ(approx->score, exact.score);
  }
  store.disable_approximate();
  EXPECT_FALSE(store.approximate_enabled());
}

TEST(IvfIndex, ListCountDefaultsToSquareRoot) {
  std::mt19937 rng(2);
  std::vector<float> rows;
  for (int i = 0; i < 400; ++i) {
    const auto e = random_unit(rng, 4);
    rows.insert(rows.end(), e.values.begin(), e.values.end());
  }
  EXPECT_EQ(IvfIndex(rows, 4, {}).nlist(), 20u);
}

TEST(IvfIndex, RebuiltAfterInsert) {
  MemoryStore store;
  store.insert_object("a", "", "c", {unit({1, 0, 0})});
  store.enable_approximate();
  const auto id = store.insert_object("b", "", "c", {unit({0, 1, 0})});
  EXPECT_EQ(store.best_match(unit({0, 1, 0.1f}))->object_id, id);
}

}  // namespace
}  // namespace pekit
