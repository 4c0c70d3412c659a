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

// Regenerates fixtures/desk_scene: the synthetic images, a replay-mode
// config and the recorded tool responses for introducing the three objects
// and asking about the query images.
//
//   make_fixtures [output_dir]

#include <filesystem>
#include <iostream>
#include <memory>

#include <json.hpp>

#include "pekit/adapters.hpp"
#include "pekit/codec.hpp"
#include "pekit/memory.hpp"
#include "pekit/pipeline.hpp"
#include "toy_backend.hpp"

namespace fs = std::filesystem;
using namespace pekit;

namespace {

std::string slug(std::string s) {
  for (char& c : s) {
    if (c == ' ') c = '_';
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) try {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("fixtures/desk_scene");
  fs::remove_all(out);
  fs::create_directories(out / "images");

  auto backend = std::make_shared<toy::ToyBackend>();
  auto recorder = std::make_shared<FixtureTransport>(AdapterMode::record, out / "recorded", backend);
  const VisionTools tools(recorder, recorder, recorder, recorder);
  const auto scene = toy::make_desk_scene();

  nlohmann::ordered_json objects = nlohmann::ordered_json::array();
  MemoryStore store;
  for (const auto& obj : scene.objects) {
    IntroductionRequest req{obj.name, obj.context, obj.category, {}};
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < obj.references.size(); ++k) {
      const fs::path rel = fs::path("images") / (slug(obj.name) + "_" + std::to_string(k) + ".png");
      const Bytes png = backend->add_image(obj.references[k]);
      write_file(out / rel, png);
      req.reference_images.push_back({rel.string(), png});
      files.push_back(rel.string());
    }
    const auto id = introduce_object(req, store, tools);
    objects.push_back({{"id", id},
                       {"name", obj.name},
                       {"category", obj.category},
                       {"context", obj.context},
                       {"images", files},
                       {"query_box", {obj.query_box.x0, obj.query_box.y0, obj.query_box.x1,
                                      obj.query_box.y1}}});
  }

  const Bytes query = backend->add_image(scene.query);
  const Bytes empty_query = backend->add_image(scene.empty_query);
  write_file(out / "images/query.png", query);
  write_file(out / "images/query_empty.png", empty_query);

  const std::string question = "Describe the image.";
  const MemoryStore empty_store;
  const InferenceOptions options;
  const auto full = personalized_inference({"query.png", query}, question, store, options, tools);
  personalized_inference({"query_empty.png", empty_query}, question, store, options, tools);
  personalized_inference({"query.png", query}, question, empty_store, options, tools);

  nlohmann::ordered_json cfg;
  cfg["store_path"] = "store";
  for (const char* ep : {"segment", "propose", "embed", "generate"}) {
    cfg["adapters"][ep] = {{"mode", "replay"}, {"fixture_dir", "recorded"}};
  }
  cfg["retrieval"] = {{"tau", kDefaultTau}};
  write_text_file(out / "config.json", cfg.dump(2) + "\n");

  nlohmann::ordered_json scene_json;
  scene_json["question"] = question;
  scene_json["objects"] = objects;
  scene_json["query"] = "images/query.png";
  scene_json["query_empty"] = "images/query_empty.png";
  write_text_file(out / "scene.json", scene_json.dump(2) + "\n");

  std::cout << "wrote " << out.string() << ": " << full.detections.size()
            << " detections, answer: " << full.answer << "\n";
  return full.detections.size() == scene.objects.size() ? 0 : 1;
} catch (const std::exception& e) {
  std::cerr << "make_fixtures: " << e.what() << "\n";
  return 1;
}
