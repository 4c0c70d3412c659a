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

#include "pekit/prompting.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pekit/error.hpp"

namespace pekit {

const Palette& default_palette() {
  static const Palette palette = {
      {"red", {255, 0, 0}},      {"green", {0, 200, 0}},     {"blue", {0, 90, 255}},
      {"orange", {255, 140, 0}}, {"purple", {160, 32, 240}},
  };
  return palette;
}

void validate_palette(const Palette& palette) {
  if (palette.empty()) fail(Errc::invalid_argument, "palette: empty");
  std::set<std::string> names;
  std::set<Rgb> colors;
  for (const auto& c : palette) {
    if (c.name.empty()) fail(Errc::invalid_argument, "palette: empty color name");
    if (!names.insert(c.name).second || !colors.insert(c.rgb).second) {
      fail(Errc::invalid_argument, "palette: duplicate entry '" + c.name + "'");
    }
  }
}

ColorAssignment color_for_slot(int slot, const Palette& palette) {
  if (slot < 0) fail(Errc::invalid_argument, "color slot must be non-negative");
  if (palette.empty()) fail(Errc::invalid_argument, "palette: empty");
  const auto& c = palette[static_cast<std::size_t>(slot) % palette.size()];
  return {slot, c.rgb, c.name};
}

std::vector<DetectedInstance> assign_colors(std::vector<DetectedInstance> detections) {
  for (std::size_t i = 0; i < detections.size(); ++i) {
    detections[i].color_slot = static_cast<int>(i);
  }
  return detections;
}

int stroke_width(int image_w, int image_h) {
  const long scaled = std::lround(0.006 * std::min(image_w, image_h));
  return static_cast<int>(std::max(3L, scaled));
}

Image annotate_image(const Image& image, const std::vector<DetectedInstance>& detections,
                     const Palette& palette) {
  Image out = image;
  const int w = stroke_width(image.width, image.height);
  for (const auto& d : detections) {
    const auto& b = d.bbox;
    if (!b.fits(image.width, image.height)) {
      fail(Errc::invalid_argument, "annotate: box outside image for '" + d.name + "'");
    }
    const Rgb color = color_for_slot(d.color_slot, palette).rgb;
    for (int y = b.y0; y < b.y1; ++y) {
      const bool edge_row = y < b.y0 + w || y >= b.y1 - w;
      for (int x = b.x0; x < b.x1; ++x) {
        if (edge_row || x < b.x0 + w || x >= b.x1 - w) out.set(y, x, color);
      }
    }
  }
  return out;
}

std::string render_clause(std::string_view clause_template, std::string_view color_name,
                          std::string_view name, std::string_view context) {
  std::string out;
  std::size_t i = 0;
  while (i < clause_template.size()) {
    const auto rest = clause_template.substr(i);
    if (rest.starts_with("{color_name}")) {
      out += color_name;
      i += 12;
    } else if (rest.starts_with("{name}")) {
      out += name;
      i += 6;
    } else if (rest.starts_with("{context}")) {
      out += context;
      i += 9;
    } else {
      out += clause_template[i++];
    }
  }
  if (context.empty()) {
    while (!out.empty() && (out.back() == ' ' || out.back() == '\t' || out.back() == '\n')) {
      out.pop_back();
    }
  }
  return out;
}

std::string build_instruction(const std::vector<DetectedInstance>& detections,
                              std::string_view user_query, const PromptOptions& options) {
  std::string out;
  for (const auto& d : detections) {
    const auto color = color_for_slot(d.color_slot, options.palette);
    out += render_clause(options.clause_template, color.color_name, d.name, d.context);
    out += ' ';
  }
  out += user_query;
  return out;
}

VisualPrompt make_visual_prompt(const Image& image, std::vector<DetectedInstance> detections,
                                std::string_view user_query, const PromptOptions& options) {
  VisualPrompt prompt;
  prompt.detections = assign_colors(std::move(detections));
  prompt.annotated_image = annotate_image(image, prompt.detections, options.palette);
  prompt.instruction = build_instruction(prompt.detections, user_query, options);
  return prompt;
}

}  // namespace pekit
