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

// The two user-facing workflows.
//
// Introduction: every reference image is segmented with the object's generic
// category, the top mask is pooled over the image's patch features, and all
// views are inserted as one memory entry. Any failing image aborts the whole
// introduction and leaves the store untouched.
//
// Inference: proposals from the query image are pooled, matched against the
// memory, drawn onto the image and described in the instruction handed to
// the vision-language model. Without any match the model gets the original
// image and the raw question.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pekit/adapters.hpp"
#include "pekit/memory.hpp"
#include "pekit/prompting.hpp"
#include "pekit/retrieval.hpp"

namespace pekit {

struct IntroductionRequest {
  std::string name;
  std::string context;
  std::string category;
  std::vector<ImagePayload> reference_images;
};

struct InferenceOptions {
  RetrievalConfig retrieval;
  PromptOptions prompt;
  int max_tokens = 512;
};

struct InferenceResult {
  std::string answer;
  bool truncated = false;
  std::vector<DetectedInstance> detections;
  std::string prompt_used;
  /// PNG of the annotated image; empty when nothing was detected.
  Bytes annotated_image;
};

/// Pools one normalized embedding per reference image, in order.
std::vector<InstanceEmbedding> extract_reference_views(const IntroductionRequest& request,
                                                       const VisionTools& tools);

std::string introduce_object(const IntroductionRequest& request, MemoryStore& store,
                             const VisionTools& tools,
                             const std::optional<std::string>& explicit_id = std::nullopt);

/// Proposal -> pooled embedding -> retrieval. Does not call the detector or
/// encoder when the store is empty.
std::vector<DetectedInstance> detect_instances(const ImagePayload& image,
                                               const MemoryStore& store,
                                               const RetrievalConfig& cfg,
                                               const VisionTools& tools);

InferenceResult personalized_inference(const ImagePayload& image, std::string_view question,
                                       const MemoryStore& store, const InferenceOptions& options,
                                       const VisionTools& tools);

}  // namespace pekit
