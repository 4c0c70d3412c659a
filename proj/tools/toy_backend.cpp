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

#include "toy_backend.hpp"

#include <cmath>

#include "pekit/codec.hpp"
#include "pekit/error.hpp"
#include "pekit/wire.hpp"

namespace pekit::toy {
namespace {

using wire::Json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [-1, 1), fully determined by the key.
double unit_noise(std::uint64_t key) {
  return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-52 - 1.0;
}

std::vector<float> normalized(std::vector<double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double n = std::sqrt(sq);
  std::vector<float> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = static_cast<float>(v[k] / n);
  return out;
}

// Gram-Schmidt over pseudo-random vectors.
std::vector<std::vector<float>> orthonormal(std::size_t count, std::size_t dim,
                                            std::uint32_t seed) {
  std::vector<std::vector<double>> basis;
  for (std::size_t i = 0; basis.size() < count; ++i) {
    std::vector<double> v(dim);
    for (std::size_t k = 0; k < dim; ++k) v[k] = unit_noise((std::uint64_t{seed} << 32) + i * 1000 + k);
    for (const auto& b : basis) {
      double d = 0.0;
      for (std::size_t k = 0; k < dim; ++k) d += v[k] * b[k];
      for (std::size_t k = 0; k < dim; ++k) v[k] -= d * b[k];
    }
    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (sq < 1e-6) continue;
    for (double& x : v) x /= std::sqrt(sq);
    basis.push_back(std::move(v));
  }
  std::vector<std::vector<float>> out;
  for (const auto& b : basis) out.emplace_back(b.begin(), b.end());
  return out;
}

std::vector<float> perturbed(const std::vector<float>& base, double amount, std::uint32_t seed) {
  std::vector<double> v(base.begin(), base.end());
  const auto noise = random_direction(base.size(), seed);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += amount * noise[k];
  return normalized(std::move(v));
}

HttpResponse error_response(int status, const std::string& message) {
  return {status, Json{{"error", message}}.dump()};
}

std::vector<std::string> quoted_names(const std::string& prompt) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto open = prompt.find('"', pos);
    if (open == std::string::npos) break;
    const auto close = prompt.find('"', open + 1);
    if (close == std::string::npos) break;
    out.push_back(prompt.substr(open + 1, close - open - 1));
    pos = close + 1;
  }
  return out;
}

std::string canned_answer(const std::string& prompt) {
  const auto names = quoted_names(prompt);
  if (names.empty()) return "A desk with a few everyday objects on it.";
  std::string out = "In this image";
  for (std::size_t i = 0; i < names.size(); ++i) {
    out += i == 0 ? " " : (i + 1 == names.size() ? " and " : ", ");
    out += "the \"" + names[i] + "\"";
  }
  out += names.size() == 1 ? " is visible. Answer: A" : " are visible. Answer: A";
  return out;
}

}  // namespace

std::vector<float> random_direction(std::size_t dim, std::uint32_t seed) {
  std::vector<double> v(dim);
  for (std::size_t k = 0; k < dim; ++k) v[k] = unit_noise((std::uint64_t{seed} << 20) ^ (k + 1));
  return normalized(std::move(v));
}

Image render(const ImageSpec& spec) {
  Image img(spec.width, spec.height, spec.background);
  for (const auto& r : spec.regions) {
    for (int y = r.box.y0; y < r.box.y1; ++y) {
      for (int x = r.box.x0; x < r.box.x1; ++x) img.set(y, x, r.color);
    }
  }
  return img;
}

PatchFeatureMap features(const ImageSpec& spec) {
  const std::size_t dim = spec.background_direction.size();
  std::vector<float> data;
  data.reserve(static_cast<std::size_t>(spec.grid_h) * spec.grid_w * dim);
  for (int i = 0; i < spec.grid_h; ++i) {
    for (int j = 0; j < spec.grid_w; ++j) {
      const double cy = (i + 0.5) * spec.height / spec.grid_h;
      const double cx = (j + 0.5) * spec.width / spec.grid_w;
      const std::vector<float>* dir = &spec.background_direction;
      for (const auto& r : spec.regions) {
        if (cx >= r.box.x0 && cx < r.box.x1 && cy >= r.box.y0 && cy < r.box.y1) dir = &r.direction;
      }
      for (std::size_t k = 0; k < dim; ++k) {
        const std::uint64_t key = (std::uint64_t{spec.seed} << 40) ^
                                  (static_cast<std::uint64_t>(i) << 24) ^
                                  (static_cast<std::uint64_t>(j) << 12) ^ k;
        data.push_back(static_cast<float>((*dir)[k] + spec.noise * unit_noise(key)));
      }
    }
  }
  return PatchFeatureMap(spec.grid_h, spec.grid_w, static_cast<int>(dim), spec.height,
                         spec.width, std::move(data));
}

Bytes ToyBackend::add_image(const ImageSpec& spec) {
  Bytes png = encode_png(render(spec));
  images_[sha256_hex(png)] = spec;
  return png;
}

int ToyBackend::calls(const std::string& path) const {
  auto it = calls_.find(path);
  return it == calls_.end() ? 0 : it->second;
}

HttpResponse ToyBackend::post(const std::string& path, const std::string& body) {
  ++calls_[path];
  Json req;
  try {
    req = Json::parse(body);
  } catch (const Json::exception&) {
    return error_response(400, "malformed JSON body");
  }
  if (!req.is_object() || !req.contains("image_b64")) {
    return error_response(400, "missing image_b64");
  }

  if (path == "/v1/generate") {
    if (!req.contains("prompt") || !req.contains("max_tokens")) {
      return error_response(400, "missing prompt or max_tokens");
    }
    return {200, Json{{"text", canned_answer(req["prompt"].get<std::string>()) + "\n"},
                      {"truncated", false}}
                     .dump()};
  }

  const Bytes image = base64_decode(req["image_b64"].get<std::string>());
  auto it = images_.find(sha256_hex(image));
  if (it == images_.end()) return error_response(404, "unknown image");
  const ImageSpec& spec = it->second;

  if (path == "/v1/segment") {
    if (req.value("text_query", std::string()).empty()) {
      return error_response(400, "missing text_query");
    }
    Json masks = Json::array();
    Json scores = Json::array();
    for (const auto& m : spec.masks) {
      masks.push_back(wire::rle_to_json(wire::encode_rle(rasterize(m.box, spec.height, spec.width))));
      scores.push_back(m.score);
    }
    return {200, Json{{"masks", masks}, {"scores", scores}}.dump()};
  }
  if (path == "/v1/propose") {
    if (req.value("text_query", std::string()) != "object") {
      return error_response(400, "proposal query must be 'object'");
    }
    Json boxes = Json::array();
    Json scores = Json::array();
    for (const auto& p : spec.proposals) {
      boxes.push_back(wire::box_to_json(p.box));
      scores.push_back(p.score);
    }
    return {200, Json{{"boxes", boxes}, {"scores", scores}}.dump()};
  }
  if (path == "/v1/embed") {
    return {200, wire::feature_map_to_json(features(spec)).dump()};
  }
  return error_response(404, "unknown endpoint " + path);
}

Scene make_desk_scene() {
  constexpr std::size_t kDim = 16;
  const auto dirs = orthonormal(6, kDim, 2024);
  const auto& background = dirs[0];
  const auto& mug_dir = dirs[4];

  struct Seed {
    const char* name;
    const char* context;
    const char* category;
    Rgb color;
    BoundingBox query_box;
  };
  const Seed seeds[] = {
      {"ghost figurine", "It was won at a game convention and sits next to the monitor.", "toy",
       {90, 60, 120}, {0, 16, 32, 48}},
      {"woolly penguin", "Bought at an aquarium gift shop; it lives on the bookshelf.",
       "stuffed animal", {20, 20, 30}, {48, 16, 80, 64}},
      {"ceramic piggy bank", "Holds coins saved for a trip to the sea.", "piggy bank",
       {200, 60, 80}, {96, 48, 128, 80}},
  };
  const BoundingBox view_boxes[] = {
      {0, 0, 32, 32}, {32, 0, 64, 32}, {16, 16, 48, 48}, {0, 32, 32, 64}, {32, 32, 64, 64}};

  Scene scene;
  for (std::size_t o = 0; o < 3; ++o) {
    SceneObject obj{seeds[o].name, seeds[o].context, seeds[o].category, {}, seeds[o].query_box};
    for (std::uint32_t k = 0; k < 5; ++k) {
      ImageSpec ref;
      ref.width = 64;
      ref.height = 64;
      ref.grid_h = 4;
      ref.grid_w = 4;
      ref.background = {static_cast<std::uint8_t>(100 + 20 * k), 120, 110};
      ref.background_direction = perturbed(background, 0.3, 500 + 10 * o + k);
      const auto view_dir = perturbed(dirs[1 + o], 0.25, 100 + 10 * o + k);
      ref.regions.push_back({view_boxes[k], seeds[o].color, view_dir});
      const BoundingBox decoy = k == 4 ? BoundingBox{0, 0, 8, 8} : BoundingBox{56, 56, 64, 64};
      // Lower-scored decoy first: the client must sort.
      ref.masks = {{decoy, 0.35}, {view_boxes[k], 0.92}};
      ref.noise = 0.02f;
      ref.seed = 1000 + 10 * o + k;
      obj.references.push_back(std::move(ref));
    }
    scene.objects.push_back(std::move(obj));
  }

  ImageSpec q;
  q.width = 128;
  q.height = 96;
  q.grid_h = 6;
  q.grid_w = 8;
  q.background = {128, 128, 128};
  q.background_direction = background;
  const BoundingBox mug_box{16, 64, 48, 96};
  q.regions.push_back({mug_box, {240, 240, 220}, mug_dir});
  q.noise = 0.05f;
  q.seed = 77;
  scene.empty_query = q;
  scene.empty_query.proposals = {{{0, 0, 128, 96}, 0.30}, {mug_box, 0.85}, {{96, 0, 128, 32}, 0.40}};

  for (std::size_t o = 0; o < 3; ++o) {
    q.regions.push_back({seeds[o].query_box, seeds[o].color, dirs[1 + o]});
  }
  q.proposals = {
      {{0, 0, 128, 96}, 0.30},   {mug_box, 0.85},          {{96, 48, 128, 80}, 0.80},
      {{48, 16, 80, 64}, 0.90},  {{0, 16, 32, 48}, 0.88},  {{50, 18, 80, 62}, 0.60},
      {{96, 0, 128, 32}, 0.40},
  };
  scene.query = q;
  return scene;
}

}  // namespace pekit::toy
