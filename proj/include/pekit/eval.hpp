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

// Personalization benchmark: dataset layout, recognition/VQA/caption metrics
// and the end-to-end harness.
//
// Dataset layout:
//
//   root/objects.json                 [{"id", "name", "context", "category"}]
//   root/<id>/train/*.{png,jpg,jpeg}  reference views
//   root/<id>/val/positive/*          object visible
//   root/<id>/val/hard_negative/*     same scenes, object not visible
//   root/<id>/val/other/*             (optional) scenes of other objects
//   root/<id>/val/fake/*              (optional) synthetic look-alikes
//   root/vqa.jsonl                    (optional) {"image", "object_id", "question",
//                                                 "option_a", "option_b", "answer"}
//
// All recognition metrics are computed per object and macro-averaged, and
// reported as percentages.

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pekit/adapters.hpp"
#include "pekit/pipeline.hpp"

namespace pekit::eval {

enum class Split { positive, hard_negative, other, fake };

std::string_view to_string(Split split);

struct BenchmarkObject {
  std::string id;
  std::string name;
  std::string context;
  std::string category;
  std::vector<std::filesystem::path> train;
  std::vector<std::filesystem::path> positive;
  std::vector<std::filesystem::path> hard_negative;
  std::vector<std::filesystem::path> other;
  std::vector<std::filesystem::path> fake;

  const std::vector<std::filesystem::path>& split(Split s) const;
};

struct VqaItem {
  std::filesystem::path image;
  std::string object_id;
  std::string question;
  std::string option_a;
  std::string option_b;
  char answer = 'A';
};

struct BenchmarkDataset {
  std::filesystem::path root;
  std::vector<BenchmarkObject> objects;
  std::vector<VqaItem> vqa;
};

/// Throws Errc::dataset with the offending path or vqa.jsonl line number.
BenchmarkDataset load_dataset(const std::filesystem::path& root);

inline constexpr std::size_t kValidationStride = 10;

/// Keeps zero-based indices 0, stride, 2*stride, ...
template <typename T>
std::vector<T> sample_validation_frames(const std::vector<T>& frames,
                                        std::size_t stride = kValidationStride) {
  std::vector<T> out;
  for (std::size_t i = 0; i < frames.size(); i += stride) out.push_back(frames[i]);
  return out;
}

struct RecognitionOutcome {
  std::string object_id;
  Split split = Split::positive;
  bool predicted_present = false;

  bool ground_truth_present() const { return split == Split::positive; }
};

struct NegativeAccuracy {
  std::optional<double> other;
  std::optional<double> hard;
  std::optional<double> fake;
  double pooled = 0.0;
};

struct ObjectRecognition {
  std::string object_id;
  std::size_t true_positive = 0;
  std::size_t false_negative = 0;
  std::size_t true_negative = 0;
  std::size_t false_positive = 0;
  double precision = 0.0;
  double positive_acc = 0.0;
  NegativeAccuracy negative_acc;
};

struct MetricsReport {
  double precision = 0.0;
  double positive_acc = 0.0;
  NegativeAccuracy negative_acc_by_split;
  double weighted_acc = 0.0;
  double avg_visual_recognition = 0.0;
  std::optional<double> vqa_acc;
  std::optional<double> personalization_recall;
  std::vector<ObjectRecognition> per_object;
};

/// Mean of positive and pooled negative accuracy.
double weighted_accuracy(double positive_acc, double negative_acc);

/// Mean of the available columns among precision, positive, other, hard, fake.
double average_visual_recognition(double precision, double positive_acc,
                                  std::optional<double> other, std::optional<double> hard,
                                  std::optional<double> fake);

/// Throws Errc::invalid_argument for an object without positives or negatives.
MetricsReport recognition_metrics(const std::vector<RecognitionOutcome>& outcomes);

/// First standalone "a"/"b" (case-insensitive, word boundaries) in `answer`.
std::optional<char> parse_choice(std::string_view answer);

double vqa_accuracy(const std::vector<std::string>& model_answers, const std::vector<char>& gold);

/// Lowercase, curly/modifier apostrophes folded to ASCII, whitespace collapsed.
std::string normalize_for_match(std::string_view text);
bool caption_mentions(std::string_view caption, std::string_view name);

struct CaptionSet {
  std::string name;
  std::vector<std::string> captions;
};

/// Macro-average over objects of the share of captions that mention the name.
double personalization_recall(const std::vector<CaptionSet>& per_object);

/// Half-up rounding used for display ("93.75" -> "93.8").
double round_half_up(double value, int decimals);

nlohmann::ordered_json report_to_json(const MetricsReport& report);
std::string report_table(const MetricsReport& report);

struct HarnessOptions {
  InferenceOptions inference;
  bool recognition_only = false;
  bool sample_frames = false;
  std::string caption_query = "Describe the image.";
};

/// Introduces every object from its train views into a fresh store, runs
/// detection on every validation image and, unless recognition_only, the
/// VQA and captioning tasks.
MetricsReport run_benchmark(const BenchmarkDataset& dataset, const VisionTools& tools,
                            const HarnessOptions& options);

std::string format_vqa_question(const VqaItem& item);

}  // namespace pekit::eval
