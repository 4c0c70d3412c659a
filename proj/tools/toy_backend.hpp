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

// In-process stand-in for the vision-tool servers, used to record replay
// fixtures and in tests. Images are synthetic: flat-colored rectangles on a
// background. Each registered image carries the answers the tools should
// give for it (masks, proposals, patch features), so that embedding
// similarities can be engineered exactly.

#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pekit/adapters.hpp"
#include "pekit/image.hpp"

namespace pekit::toy {

struct Region {
  BoundingBox box;
  Rgb color{};
  std::vector<float> direction;  // feature of patches whose centre is inside
};

struct ScoredBox {
  BoundingBox box;
  double score = 0.0;
};

struct ImageSpec {
  int width = 64;
  int height = 64;
  int grid_h = 4;
  int grid_w = 4;
  Rgb background{128, 128, 128};
  std::vector<float> background_direction;
  std::vector<Region> regions;       // later regions paint over earlier ones
  std::vector<ScoredBox> masks;      // /v1/segment answer, boxes rasterized
  std::vector<ScoredBox> proposals;  // /v1/propose answer
  float noise = 0.0f;                // per-patch uniform noise amplitude
  std::uint32_t seed = 0;
};

Image render(const ImageSpec& spec);
PatchFeatureMap features(const ImageSpec& spec);

/// Deterministic pseudo-random unit vector.
std::vector<float> random_direction(std::size_t dim, std::uint32_t seed);

class ToyBackend : public Transport {
 public:
  /// Registers the spec and returns the PNG bytes the backend will recognise.
  Bytes add_image(const ImageSpec& spec);

  HttpResponse post(const std::string& path, const std::string& body) override;

  int calls(const std::string& path) const;

 private:
  std::map<std::string, ImageSpec> images_;  // by sha256 of PNG bytes
  std::map<std::string, int> calls_;
};

/// The three-object desk scene: names, contexts, categories, reference
/// views and one query image containing all three plus an unknown mug.
struct SceneObject {
  std::string name;
  std::string context;
  std::string category;
  std::vector<ImageSpec> references;
  BoundingBox query_box;
};

struct Scene {
  std::vector<SceneObject> objects;
  ImageSpec query;
  ImageSpec empty_query;  // background and the mug only
};

Scene make_desk_scene();

}  // namespace pekit::toy
