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

#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "pekit/cli.hpp"
#include "pekit/codec.hpp"
#include "pekit/memory.hpp"
#include "test_util.hpp"

namespace pekit {
namespace {

using testing::TempDir;
namespace fs = std::filesystem;

const fs::path kFixtures = PEKIT_FIXTURE_DIR;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  CliTest() : dir_("cli") { ::unsetenv("PEKIT_CONFIG"); }
  ~CliTest() override { ::unsetenv("PEKIT_CONFIG"); }

  std::vector<std::string> base() const {
    return {"--config", (kFixtures / "config.json").string(), "--store", (dir_ / "store").string()};
  }

  CliRun with_base(std::vector<std::string> tail) const {
    auto args = base();
    args.insert(args.end(), tail.begin(), tail.end());
    return cli(args);
  }

  void introduce_all() {
    const auto scene = nlohmann::json::parse(read_text_file(kFixtures / "scene.json"));
    for (const auto& obj : scene["objects"]) {
      std::vector<std::string> args = {"introduce", "--name", obj["name"], "--category",
                                       obj["category"], "--context", obj["context"], "--images"};
      for (const auto& img : obj["images"]) args.push_back((kFixtures / img.get<std::string>()).string());
      const auto r = with_base(args);
      ASSERT_EQ(r.code, kExitOk) << r.err;
      EXPECT_EQ(r.out, obj["id"].get<std::string>() + "\n");
    }
  }

  TempDir dir_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"bogus"}).code, kExitUsage);
  EXPECT_EQ(cli({"infer", "--image", "x.png"}).code, kExitUsage);
  EXPECT_EQ(cli({"--mode", "sometimes", "memory", "list"}).code, kExitUsage);
  EXPECT_EQ(cli({"memory"}).code, kExitUsage);
  const auto help = cli({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("introduce"), std::string::npos);
}

TEST_F(CliTest, ReplayWorkflow) {
  introduce_all();
  const auto list = with_base({"memory", "list"});
  ASSERT_EQ(list.code, kExitOk);
  EXPECT_NE(list.out.find("woolly penguin"), std::string::npos);

  const auto report = dir_ / "report.json";
  const auto annotated = dir_ / "annotated.png";
  const auto infer = with_base({"infer", "--image", (kFixtures / "images/query.png").string(),
                                "--question", "Describe the image.", "--report",
                                report.string(), "--save-annotated", annotated.string()});
  ASSERT_EQ(infer.code, kExitOk) << infer.err;
  EXPECT_NE(infer.out.find("\"ghost figurine\""), std::string::npos);
  const auto j = nlohmann::json::parse(read_text_file(report));
  ASSERT_EQ(j["detections"].size(), 3u);
  EXPECT_EQ(j["detections"][0]["color"], "red");
  EXPECT_EQ(j["annotated_image"], annotated.string());
  EXPECT_TRUE(fs::exists(annotated));

  const auto exported = dir_ / "copy";
  ASSERT_EQ(with_base({"memory", "export", exported.string()}).code, kExitOk);
  EXPECT_EQ(MemoryStore::load(exported).size(), 3u);

  ASSERT_EQ(with_base({"memory", "remove", "obj-0002"}).code, kExitOk);
  EXPECT_EQ(MemoryStore::load(dir_ / "store").size(), 2u);
  const auto again = with_base({"memory", "remove", "obj-0002"});
  EXPECT_EQ(again.code, kExitRuntime);
  EXPECT_NE(again.err.find("obj-0002"), std::string::npos);
}

TEST_F(CliTest, TauFlagOverridesConfig) {
  introduce_all();
  // With a near-1 threshold nothing matches and the raw question is sent.
  const auto r = with_base({"--tau", "0.999", "infer", "--image",
                            (kFixtures / "images/query.png").string(), "--question",
                            "Describe the image."});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "A desk with a few everyday objects on it.\n");
}

TEST_F(CliTest, ConfigFromEnvironment) {
  ::setenv("PEKIT_CONFIG", (kFixtures / "config.json").c_str(), 1);
  const auto r = cli({"--store", (dir_ / "empty").string(), "infer", "--image",
                      (kFixtures / "images/query.png").string(), "--question",
                      "Describe the image."});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "A desk with a few everyday objects on it.\n");
}

TEST_F(CliTest, MissingFixtureIsRuntimeError) {
  const auto r = cli({"--config", (kFixtures / "config.json").string(), "--store",
                      (dir_ / "empty").string(), "--fixtures", (dir_ / "nothing").string(),
                      "infer", "--image", (kFixtures / "images/query.png").string(),
                      "--question", "Describe the image."});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("generate: replay: no fixture"), std::string::npos) << r.err;
}

TEST_F(CliTest, LiveAdapterDownIsStageLabeled) {
  nlohmann::json cfg;
  for (const char* ep : {"segment", "propose", "embed", "generate"}) {
    cfg["adapters"][ep] = {{"base_url", "http://127.0.0.1:9"}, {"timeout_ms", 300}, {"retries", 0}};
  }
  write_text_file(dir_ / "live.json", cfg.dump());
  const auto r = cli({"--config", (dir_ / "live.json").string(), "--store",
                      (dir_ / "empty").string(), "infer", "--image",
                      (kFixtures / "images/query.png").string(), "--question", "q"});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_EQ(r.err.rfind("error: generate: ", 0), 0u) << r.err;
}

TEST_F(CliTest, EmptyStoreListsHeaderOnly) {
  const auto r = with_base({"memory", "list"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1);
}

TEST_F(CliTest, MissingImageIsRuntimeError) {
  const auto r = with_base({"infer", "--image", (dir_ / "nope.png").string(), "--question", "q"});
  EXPECT_EQ(r.code, kExitRuntime);
}

}  // namespace
}  // namespace pekit
