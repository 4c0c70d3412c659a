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

#include <map>
#include <set>

#include "pekit/error.hpp"
#include "pekit/eval.hpp"

namespace pekit::eval {
namespace fs = std::filesystem;

std::string format_vqa_question(const VqaItem& item) {
  return item.question + "\nA. " + item.option_a + "\nB. " + item.option_b +
         "\nAnswer with the letter of the correct option.";
}

MetricsReport run_benchmark(const BenchmarkDataset& dataset, const VisionTools& tools,
                            const HarnessOptions& options) {
  constexpr Split kSplits[] = {Split::positive, Split::hard_negative, Split::other, Split::fake};
  auto frames = [&](const BenchmarkObject& obj, Split s) {
    return options.sample_frames ? sample_validation_frames(obj.split(s)) : obj.split(s);
  };

  MemoryStore store;
  for (const auto& obj : dataset.objects) {
    IntroductionRequest req{obj.name, obj.context, obj.category, {}};
    for (const auto& p : obj.train) req.reference_images.push_back(ImagePayload::from_file(p));
    try {
      introduce_object(req, store, tools, obj.id);
    } catch (const Error& e) {
      throw Error(e.code(), "introduce '" + obj.id + "': " + e.what());
    }
  }

  // Each validation image is processed once; several objects may share it.
  std::map<fs::path, std::set<std::string>> detected;
  auto detect = [&](const fs::path& image) -> const std::set<std::string>& {
    auto it = detected.find(image);
    if (it != detected.end()) return it->second;
    std::set<std::string> ids;
    try {
      for (const auto& d : detect_instances(ImagePayload::from_file(image), store,
                                            options.inference.retrieval, tools)) {
        ids.insert(d.object_id);
      }
    } catch (const Error& e) {
      throw Error(e.code(), image.string() + ": " + e.what());
    }
    return detected.emplace(image, std::move(ids)).first->second;
  };

  std::vector<RecognitionOutcome> outcomes;
  for (const auto& obj : dataset.objects) {
    for (Split s : kSplits) {
      for (const auto& image : frames(obj, s)) {
        outcomes.push_back({obj.id, s, detect(image).contains(obj.id)});
      }
    }
  }
  MetricsReport report = recognition_metrics(outcomes);
  if (options.recognition_only) return report;

  if (!dataset.vqa.empty()) {
    std::vector<std::string> answers;
    std::vector<char> gold;
    for (const auto& item : dataset.vqa) {
      const auto result =
          personalized_inference(ImagePayload::from_file(item.image), format_vqa_question(item),
                                 store, options.inference, tools);
      answers.push_back(result.answer);
      gold.push_back(item.answer);
    }
    report.vqa_acc = vqa_accuracy(answers, gold);
  }

  std::vector<CaptionSet> captions;
  for (const auto& obj : dataset.objects) {
    CaptionSet set{obj.name, {}};
    for (const auto& image : frames(obj, Split::positive)) {
      set.captions.push_back(personalized_inference(ImagePayload::from_file(image),
                                                    options.caption_query, store,
                                                    options.inference, tools)
                                 .answer);
    }
    captions.push_back(std::move(set));
  }
  report.personalization_recall = personalization_recall(captions);
  return report;
}

}  // namespace pekit::eval
