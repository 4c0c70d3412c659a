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

#include "pekit/pipeline.hpp"

#include <algorithm>

#include "pekit/error.hpp"
#include "pekit/image.hpp"

namespace pekit {
namespace {

// Runs `fn`, prefixing any library error with the stage name.
template <typename Fn>
auto staged(std::string_view stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(stage) + ": " + e.what());
  }
}

BoundingBox clamp_box(const BoundingBox& b, int image_w, int image_h) {
  return {std::clamp(b.x0, 0, image_w), std::clamp(b.y0, 0, image_h),
          std::clamp(b.x1, 0, image_w), std::clamp(b.y1, 0, image_h)};
}

}  // namespace

std::vector<InstanceEmbedding> extract_reference_views(const IntroductionRequest& request,
                                                       const VisionTools& tools) {
  if (request.name.empty()) fail(Errc::invalid_argument, "introduce: name is required");
  if (request.category.empty()) fail(Errc::invalid_argument, "introduce: category is required");
  if (request.reference_images.empty()) {
    fail(Errc::invalid_argument, "introduce: at least one reference image is required");
  }

  std::vector<InstanceEmbedding> views;
  const std::size_t n = request.reference_images.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& image = request.reference_images[i];
    const std::string where = "reference image " + std::to_string(i + 1) + "/" +
                              std::to_string(n) + " (" + image.label + ")";
    try {
      auto masks = staged("segment", [&] { return tools.segment(image, request.category); });
      auto fmap = staged("embed", [&] { return tools.embed(image); });
      views.push_back(staged("pool", [&] {
        const auto selection = downsample_mask(masks.front().mask, fmap.grid_h(), fmap.grid_w());
        return pool_over_selection(fmap, selection);
      }));
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.what());
    }
  }
  return views;
}

std::string introduce_object(const IntroductionRequest& request, MemoryStore& store,
                             const VisionTools& tools,
                             const std::optional<std::string>& explicit_id) {
  // All views are computed before the store is touched.
  auto views = extract_reference_views(request, tools);
  return staged("memory", [&] {
    return store.insert_object(request.name, request.context, request.category, views,
                               explicit_id);
  });
}

std::vector<DetectedInstance> detect_instances(const ImagePayload& image,
                                               const MemoryStore& store,
                                               const RetrievalConfig& cfg,
                                               const VisionTools& tools) {
  cfg.validate();
  if (store.size() == 0) return {};
  const auto proposals = staged("propose", [&] { return tools.propose(image); });
  if (proposals.empty()) return {};
  const auto fmap = staged("embed", [&] { return tools.embed(image); });

  std::vector<ProposalEmbedding> pooled;
  pooled.reserve(proposals.size());
  staged("pool", [&] {
    for (const auto& p : proposals) {
      const auto box = clamp_box(p.bbox, fmap.image_w(), fmap.image_h());
      if (box.empty()) continue;
      pooled.push_back({box, pool_over_selection(fmap, bbox_to_selection(box, fmap))});
    }
    return 0;
  });
  return staged("retrieve", [&] { return retrieve_instances(pooled, store, cfg); });
}

InferenceResult personalized_inference(const ImagePayload& image, std::string_view question,
                                       const MemoryStore& store, const InferenceOptions& options,
                                       const VisionTools& tools) {
  if (question.empty()) fail(Errc::invalid_argument, "infer: question must be non-empty");
  InferenceResult result;
  auto detections = detect_instances(image, store, options.retrieval, tools);

  if (detections.empty()) {
    result.prompt_used = std::string(question);
    const auto reply = staged("generate", [&] {
      return tools.generate(image, result.prompt_used, options.max_tokens);
    });
    result.answer = reply.text;
    result.truncated = reply.truncated;
    return result;
  }

  const auto prompt = staged("annotate", [&] {
    return make_visual_prompt(decode_image(image.bytes), std::move(detections), question,
                              options.prompt);
  });
  result.detections = prompt.detections;
  result.prompt_used = prompt.instruction;
  result.annotated_image = encode_png(prompt.annotated_image);
  const ImagePayload annotated{image.label + " (annotated)", result.annotated_image};
  const auto reply = staged("generate", [&] {
    return tools.generate(annotated, result.prompt_used, options.max_tokens);
  });
  result.answer = reply.text;
  result.truncated = reply.truncated;
  return result;
}

}  // namespace pekit
