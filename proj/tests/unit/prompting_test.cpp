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
#include "test_util.hpp"

namespace pekit {
namespace {

DetectedInstance det(BoundingBox box, std::string name, std::string context = "") {
  DetectedInstance d;
  d.bbox = box;
  d.object_id = "id-" + name;
  d.name = std::move(name);
  d.context = std::move(context);
  d.score = 0.9;
  return d;
}

TEST(Palette, DefaultOrderAndWrap) {
  const auto& p = default_palette();
  ASSERT_EQ(p.size(), 5u);
  EXPECT_EQ(p[0].name, "red");
  EXPECT_EQ(p[0].rgb, (Rgb{255, 0, 0}));
  EXPECT_EQ(p[4].name, "purple");
  EXPECT_EQ(color_for_slot(5).color_name, "red");
  EXPECT_EQ(color_for_slot(6).rgb, p[1].rgb);
}

TEST(Palette, ValidationRejectsDuplicates) {
  EXPECT_ERRC(validate_palette({}), Errc::invalid_argument);
  EXPECT_ERRC(validate_palette({{"red", {1, 2, 3}}, {"red", {4, 5, 6}}}), Errc::invalid_argument);
  EXPECT_ERRC(validate_palette({{"a", {1, 2, 3}}, {"b", {1, 2, 3}}}), Errc::invalid_argument);
}

TEST(Colors, AssignedByPosition) {
  const auto dets = assign_colors({det({0, 0, 4, 4}, "a"), det({4, 4, 8, 8}, "b")});
  EXPECT_EQ(dets[0].color_slot, 0);
  EXPECT_EQ(dets[1].color_slot, 1);
}

TEST(Stroke, WidthRule) {
  EXPECT_EQ(stroke_width(64, 64), 3);
  EXPECT_EQ(stroke_width(1000, 500), 3);
  EXPECT_EQ(stroke_width(1000, 1000), 6);
  EXPECT_EQ(stroke_width(4000, 3000), 18);
}

TEST(Annotate, OnlyStrokeBandsChange) {
  const Image img(40, 30, {10, 20, 30});
  const auto dets = assign_colors({det({5, 5, 20, 25}, "a"), det({22, 2, 40, 12}, "b")});
  const Image out = annotate_image(img, dets);
  const int sw = stroke_width(40, 30);
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 40; ++x) {
      int expected_slot = -1;
      for (const auto& d : dets) {
        const auto& b = d.bbox;
        const bool inside = x >= b.x0 && x < b.x1 && y >= b.y0 && y < b.y1;
        const bool band = x < b.x0 + sw || x >= b.x1 - sw || y < b.y0 + sw || y >= b.y1 - sw;
        if (inside && band) expected_slot = d.color_slot;
      }
      const Rgb want = expected_slot < 0 ? img.at(y, x) : color_for_slot(expected_slot).rgb;
      ASSERT_EQ(out.at(y, x), want) << "pixel " << x << "," << y;
    }
  }
}

TEST(Annotate, BoxOutsideImageFails) {
  const Image img(10, 10);
  auto dets = assign_colors({det({5, 5, 11, 8}, "a")});
  EXPECT_ERRC(annotate_image(img, dets), Errc::invalid_argument);
}

TEST(Clause, TemplateAndTrim) {
  EXPECT_EQ(render_clause(kDefaultClauseTemplate, "red", "Bo", "A dog."),
            "The object inside the red bounding box is \"Bo\". A dog.");
  EXPECT_EQ(render_clause(kDefaultClauseTemplate, "blue", "Bo", ""),
            "The object inside the blue bounding box is \"Bo\".");
  EXPECT_EQ(render_clause("{name}/{color_name}/{name}", "green", "x", ""), "x/green/x");
}

TEST(Instruction, ClausesInOrderThenQuery) {
  const auto dets = assign_colors({det({0, 0, 4, 4}, "mug", "Blue."), det({4, 4, 8, 8}, "cat")});
  EXPECT_EQ(build_instruction(dets, "What is here?"),
            "The object inside the red bounding box is \"mug\". Blue. "
            "The object inside the green bounding box is \"cat\". What is here?");
  EXPECT_EQ(build_instruction({}, "Just the question"), "Just the question");
}

TEST(VisualPrompt, ColorsAndImageAgree) {
  const Image img(16, 16, {0, 0, 0});
  const auto vp = make_visual_prompt(img, {det({0, 0, 8, 8}, "a"), det({8, 8, 16, 16}, "b")}, "Q");
  ASSERT_EQ(vp.detections.size(), 2u);
  EXPECT_EQ(vp.detections[1].color_slot, 1);
  EXPECT_EQ(vp.annotated_image.at(15, 15), color_for_slot(1).rgb);
  EXPECT_EQ(vp.annotated_image.at(0, 0), color_for_slot(0).rgb);
  EXPECT_NE(vp.instruction.find("green bounding box is \"b\""), std::string::npos);
}

}  // namespace
}  // namespace pekit
