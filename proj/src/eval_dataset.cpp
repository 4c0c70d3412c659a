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
#include <fstream>
#include <set>

#include "pekit/codec.hpp"
#include "pekit/error.hpp"
#include "pekit/eval.hpp"

namespace pekit::eval {
namespace fs = std::filesystem;
namespace {

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

// Sorted by file name so frame order follows the extraction order.
std::vector<fs::path> list_images(const fs::path& dir, bool required) {
  if (!fs::is_directory(dir)) {
    if (required) fail(Errc::dataset, "dataset: missing split directory " + dir.string());
    return {};
  }
  std::vector<fs::path> out;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (item.is_regular_file() && is_image_file(item.path())) out.push_back(item.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

const std::vector<fs::path>& BenchmarkObject::split(Split s) const {
  switch (s) {
    case Split::positive: return positive;
    case Split::hard_negative: return hard_negative;
    case Split::other: return other;
    case Split::fake: return fake;
  }
  return positive;
}

BenchmarkDataset load_dataset(const fs::path& root) {
  BenchmarkDataset ds;
  ds.root = root;
  const auto objects_path = root / "objects.json";
  if (!fs::exists(objects_path)) fail(Errc::dataset, "dataset: missing " + objects_path.string());

  nlohmann::json objects;
  try {
    objects = nlohmann::json::parse(read_text_file(objects_path));
    if (!objects.is_array()) fail(Errc::dataset, "dataset: objects.json must be an array");
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::dataset, "dataset: malformed objects.json: " + std::string(e.what()));
  }

  std::set<std::string> ids;
  for (const auto& o : objects) {
    BenchmarkObject obj;
    try {
      obj.id = o.at("id").get<std::string>();
      obj.name = o.at("name").get<std::string>();
      obj.context = o.value("context", std::string());
      obj.category = o.at("category").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::dataset, "dataset: malformed objects.json entry: " + std::string(e.what()));
    }
    if (obj.id.empty() || obj.id.find('/') != std::string::npos || obj.id == "." ||
        obj.id == "..") {
      fail(Errc::dataset, "dataset: invalid object id '" + obj.id + "'");
    }
    if (obj.name.empty() || obj.category.empty()) {
      fail(Errc::dataset, "dataset: object '" + obj.id + "' needs a name and a category");
    }
    if (!ids.insert(obj.id).second) fail(Errc::dataset, "dataset: duplicate object id " + obj.id);

    const auto dir = root / obj.id;
    obj.train = list_images(dir / "train", true);
    if (obj.train.empty()) {
      fail(Errc::dataset, "dataset: object '" + obj.id + "' has no train images");
    }
    obj.positive = list_images(dir / "val" / "positive", true);
    obj.hard_negative = list_images(dir / "val" / "hard_negative", true);
    obj.other = list_images(dir / "val" / "other", false);
    obj.fake = list_images(dir / "val" / "fake", false);
    ds.objects.push_back(std::move(obj));
  }

  const auto vqa_path = root / "vqa.jsonl";
  if (fs::exists(vqa_path)) {
    std::ifstream in(vqa_path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const std::string where = "dataset: vqa.jsonl line " + std::to_string(line_no);
      VqaItem item;
      std::string answer;
      try {
        const auto j = nlohmann::json::parse(line);
        item.image = root / j.at("image").get<std::string>();
        item.object_id = j.at("object_id").get<std::string>();
        item.question = j.at("question").get<std::string>();
        item.option_a = j.at("option_a").get<std::string>();
        item.option_b = j.at("option_b").get<std::string>();
        answer = j.at("answer").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        fail(Errc::dataset, where + ": " + e.what());
      }
      if (answer == "A" || answer == "a") {
        item.answer = 'A';
      } else if (answer == "B" || answer == "b") {
        item.answer = 'B';
      } else {
        fail(Errc::dataset, where + ": answer must be A or B");
      }
      if (!fs::is_regular_file(item.image)) {
        fail(Errc::dataset, where + ": image " + item.image.string() + " does not exist");
      }
      if (!ids.contains(item.object_id)) {
        fail(Errc::dataset, where + ": unknown object_id '" + item.object_id + "'");
      }
      ds.vqa.push_back(std::move(item));
    }
  }
  return ds;
}

}  // namespace pekit::eval
