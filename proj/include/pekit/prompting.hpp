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

// Visual prompts: colored box outlines on the query image plus one
// instruction clause per detected object, followed by the user's question.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pekit/image.hpp"
#include "pekit/retrieval.hpp"

namespace pekit {

struct PaletteColor {
  std::string name;
  Rgb rgb;
};

using Palette = std::vector<PaletteColor>;

/// red, green, blue, orange, purple.
const Palette& default_palette();

/// Non-empty, names and colors pairwise distinct.
void validate_palette(const Palette& palette);

struct ColorAssignment {
  int slot = 0;
  Rgb rgb{};
  std::string color_name;
};

ColorAssignment color_for_slot(int slot, const Palette& palette = default_palette());

/// Slot i = position i in the list; the color is palette[i mod size].
std::vector<DetectedInstance> assign_colors(std::vector<DetectedInstance> detections);

/// max(3, round(0.006 * min(width, height))).
int stroke_width(int image_w, int image_h);

/// Draws each box outline inward from its edges in its slot color; pixels
/// outside the stroke bands are untouched. Later boxes draw over earlier ones.
Image annotate_image(const Image& image, const std::vector<DetectedInstance>& detections,
                     const Palette& palette = default_palette());

inline constexpr std::string_view kDefaultClauseTemplate =
    R"(The object inside the {color_name} bounding box is "{name}". {context})";

struct PromptOptions {
  std::string clause_template{kDefaultClauseTemplate};
  Palette palette = default_palette();
};

/// Placeholders {color_name}, {name}, {context}. With an empty context the
/// rendered clause is right-trimmed.
std::string render_clause(std::string_view clause_template, std::string_view color_name,
                          std::string_view name, std::string_view context);

std::string build_instruction(const std::vector<DetectedInstance>& detections,
                              std::string_view user_query,
                              const PromptOptions& options = {});

struct VisualPrompt {
  Image annotated_image;
  std::string instruction;
  std::vector<DetectedInstance> detections;
};

VisualPrompt make_visual_prompt(const Image& image, std::vector<DetectedInstance> detections,
                                std::string_view user_query, const PromptOptions& options = {});

}  // namespace pekit
