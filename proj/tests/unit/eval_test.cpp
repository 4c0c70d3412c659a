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

#include <json.hpp>

#include "pekit/codec.hpp"
#include "pekit/eval.hpp"
#include "test_util.hpp"
#include "toy_backend.hpp"

namespace pekit::eval {
namespace {

using testing::TempDir;
namespace fs = std::filesystem;

void add(std::vector<RecognitionOutcome>& out, const std::string& id, Split s, int yes, int no) {
  for (int i = 0; i < yes; ++i) out.push_back({id, s, true});
  for (int i = 0; i < no; ++i) out.push_back({id, s, false});
}

TEST(Metrics, PerObjectCountsAndMacroAverage) {
  std::vector<RecognitionOutcome> o;
  add(o, "a", Split::positive, 3, 1);
  add(o, "a", Split::hard_negative, 1, 3);
  add(o, "b", Split::positive, 1, 1);
  add(o, "b", Split::other, 0, 4);
  const auto r = recognition_metrics(o);
  ASSERT_EQ(r.per_object.size(), 2u);
  EXPECT_EQ(r.per_object[0].true_positive, 3u);
  EXPECT_EQ(r.per_object[0].false_positive, 1u);
  EXPECT_DOUBLE_EQ(r.per_object[0].precision, 75.0);
  EXPECT_DOUBLE_EQ(r.per_object[1].precision, 100.0);
  EXPECT_DOUBLE_EQ(r.positive_acc, (75.0 + 50.0) / 2);
  EXPECT_DOUBLE_EQ(r.negative_acc_by_split.pooled, (75.0 + 100.0) / 2);
  EXPECT_DOUBLE_EQ(*r.negative_acc_by_split.hard, 75.0);
  EXPECT_DOUBLE_EQ(*r.negative_acc_by_split.other, 100.0);
  EXPECT_FALSE(r.negative_acc_by_split.fake.has_value());
  EXPECT_DOUBLE_EQ(r.weighted_acc, (62.5 + 87.5) / 2);
  EXPECT_DOUBLE_EQ(r.avg_visual_recognition, (87.5 + 62.5 + 100.0 + 75.0) / 4);
}

TEST(Metrics, NoPositivePredictionsGivesFullPrecision) {
  std::vector<RecognitionOutcome> o;
  add(o, "a", Split::positive, 0, 2);
  add(o, "a", Split::fake, 0, 2);
  EXPECT_DOUBLE_EQ(recognition_metrics(o).precision, 100.0);
}

TEST(Metrics, ObjectsNeedBothClasses) {
  std::vector<RecognitionOutcome> o;
  add(o, "a", Split::positive, 1, 0);
  EXPECT_ERRC(recognition_metrics(o), Errc::invalid_argument);
  EXPECT_ERRC(recognition_metrics({}), Errc::invalid_argument);
}

TEST(Metrics, Rounding) {
  EXPECT_DOUBLE_EQ(round_half_up(93.75, 1), 93.8);
  EXPECT_DOUBLE_EQ(round_half_up(82.855, 2), 82.86);
  EXPECT_DOUBLE_EQ(round_half_up(0.125, 2), 0.13);
  EXPECT_DOUBLE_EQ(round_half_up(1.0 / 3.0, 2), 0.33);
}

TEST(Metrics, WeightedAndAverage) {
  EXPECT_DOUBLE_EQ(weighted_accuracy(96.6, 90.9), 93.75);
  EXPECT_NEAR(average_visual_recognition(90.1, 69.0, 99.9, 96.0, 59.3), 82.86, 1e-9);
  EXPECT_DOUBLE_EQ(average_visual_recognition(80, 60, std::nullopt, 70, std::nullopt), 70.0);
}

TEST(Choice, Parsing) {
  EXPECT_EQ(parse_choice("B"), 'B');
  EXPECT_EQ(parse_choice("The answer is (a)"), 'A');
  EXPECT_EQ(parse_choice("b."), 'B');
  EXPECT_EQ(parse_choice("Abba"), std::nullopt);
  EXPECT_EQ(parse_choice("snake_a"), std::nullopt);
  EXPECT_EQ(parse_choice("caf\xc3\xa9" "a"), std::nullopt);
  EXPECT_EQ(parse_choice(""), std::nullopt);
  EXPECT_DOUBLE_EQ(vqa_accuracy({"A", "b", "???"}, {'A', 'A', 'B'}), 100.0 / 3);
  EXPECT_ERRC(vqa_accuracy({"A"}, {}), Errc::invalid_argument);
}

TEST(Recall, ApostrophesAndWhitespace) {
  EXPECT_EQ(normalize_for_match("  Reynard\xe2\x80\x99s \t Work  Chair "), "reynard's work chair");
  EXPECT_TRUE(caption_mentions("I see Reynard\xca\xbcs work chair.", "Reynard's Work Chair"));
  EXPECT_FALSE(caption_mentions("I see a work chair.", "Reynard's Work Chair"));
  EXPECT_DOUBLE_EQ(personalization_recall({{"Bo", {"Bo runs", "a dog"}}, {"Cy", {"cy"}}}), 75.0);
}

TEST(Sampling, EveryTenthFromZero) {
  std::vector<int> frames(25);
  for (int i = 0; i < 25; ++i) frames[i] = i;
  EXPECT_EQ(sample_validation_frames(frames), (std::vector<int>{0, 10, 20}));
  EXPECT_TRUE(sample_validation_frames(std::vector<int>{}).empty());
}

TEST(Report, JsonKeysAndTable) {
  std::vector<RecognitionOutcome> o;
  add(o, "a", Split::positive, 1, 0);
  add(o, "a", Split::hard_negative, 0, 1);
  auto r = recognition_metrics(o);
  r.vqa_acc = 50.0;
  const auto j = report_to_json(r);
  EXPECT_EQ(j["precision"], 100.0);
  EXPECT_EQ(j["vqa_acc"], 50.0);
  EXPECT_TRUE(j["personalization_recall"].is_null());
  EXPECT_NE(report_table(r).find("Weighted"), std::string::npos);
}

class DatasetTest : public ::testing::Test {
 protected:
  DatasetTest() : dir_("ds"), backend_(std::make_shared<toy::ToyBackend>()) {
    const auto scene = toy::make_desk_scene();
    const Bytes query = backend_->add_image(scene.query);
    const Bytes empty = backend_->add_image(scene.empty_query);
    nlohmann::json objects = nlohmann::json::array();
    for (std::size_t o = 0; o < 2; ++o) {
      const auto& obj = scene.objects[o];
      const std::string id = o == 0 ? "ghost" : "penguin";
      objects.push_back({{"id", id}, {"name", obj.name}, {"context", obj.context},
                         {"category", obj.category}});
      fs::create_directories(dir_ / (id + "/train"));
      fs::create_directories(dir_ / (id + "/val/positive"));
      fs::create_directories(dir_ / (id + "/val/hard_negative"));
      for (std::size_t k = 0; k < obj.references.size(); ++k) {
        write_file(dir_ / (id + "/train/" + std::to_string(k) + ".png"),
                   backend_->add_image(obj.references[k]));
      }
      write_file(dir_ / (id + "/val/positive/0.png"), query);
      write_file(dir_ / (id + "/val/hard_negative/0.png"), empty);
    }
    write_text_file(dir_ / "objects.json", objects.dump());
    write_text_file(dir_ / "vqa.jsonl",
                    R"({"image": "ghost/val/positive/0.png", "object_id": "ghost", "question": "Q1", "option_a": "x", "option_b": "y", "answer": "A"})"
                    "\n\n"
                    R"({"image": "penguin/val/positive/0.png", "object_id": "penguin", "question": "Q2", "option_a": "x", "option_b": "y", "answer": "B"})"
                    "\n");
  }
  TempDir dir_;
  std::shared_ptr<toy::ToyBackend> backend_;
};

TEST_F(DatasetTest, LoadsLayout) {
  const auto ds = load_dataset(dir_.path());
  ASSERT_EQ(ds.objects.size(), 2u);
  EXPECT_EQ(ds.objects[0].train.size(), 5u);
  EXPECT_EQ(ds.objects[0].positive.size(), 1u);
  EXPECT_TRUE(ds.objects[0].other.empty());
  ASSERT_EQ(ds.vqa.size(), 2u);
  EXPECT_EQ(ds.vqa[1].answer, 'B');
}

TEST_F(DatasetTest, ReportsBadFiles) {
  write_text_file(dir_ / "vqa.jsonl", "{\"image\": \"missing.png\"}\n");
  try {
    load_dataset(dir_.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::dataset);
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
  fs::remove_all(dir_ / "penguin/val/hard_negative");
  EXPECT_ERRC(load_dataset(dir_.path()), Errc::dataset);
  fs::remove(dir_ / "objects.json");
  EXPECT_ERRC(load_dataset(dir_.path()), Errc::dataset);
}

TEST_F(DatasetTest, EndToEndBenchmark) {
  const VisionTools tools(backend_, backend_, backend_, backend_);
  const auto report = run_benchmark(load_dataset(dir_.path()), tools, {});
  EXPECT_DOUBLE_EQ(report.precision, 100.0);
  EXPECT_DOUBLE_EQ(report.positive_acc, 100.0);
  EXPECT_DOUBLE_EQ(report.negative_acc_by_split.pooled, 100.0);
  ASSERT_TRUE(report.vqa_acc.has_value());
  EXPECT_DOUBLE_EQ(*report.vqa_acc, 50.0);
  ASSERT_TRUE(report.personalization_recall.has_value());
  EXPECT_DOUBLE_EQ(*report.personalization_recall, 100.0);

  HarnessOptions recognition;
  recognition.recognition_only = true;
  const int before = backend_->calls("/v1/propose");
  const auto r2 = run_benchmark(load_dataset(dir_.path()), tools, recognition);
  EXPECT_FALSE(r2.vqa_acc.has_value());
  EXPECT_FALSE(r2.personalization_recall.has_value());
  // Four validation files, each detected once.
  EXPECT_EQ(backend_->calls("/v1/propose") - before, 4);
}

}  // namespace
}  // namespace pekit::eval
