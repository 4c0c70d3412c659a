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

#include "pekit/cli.hpp"

#include <cstdlib>
#include <iomanip>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pekit/codec.hpp"
#include "pekit/config.hpp"
#include "pekit/error.hpp"
#include "pekit/eval.hpp"
#include "pekit/pipeline.hpp"

namespace pekit {
namespace fs = std::filesystem;
namespace {

struct GlobalFlags {
  std::string config;
  std::string store;
  std::optional<double> tau;
  std::string mode;
  std::string fixtures;
};

AppConfig resolve_config(const GlobalFlags& flags) {
  AppConfig cfg;
  if (!flags.config.empty()) {
    cfg = AppConfig::load(flags.config);
  } else if (const char* env = std::getenv("PEKIT_CONFIG"); env != nullptr && *env != '\0') {
    cfg = AppConfig::load(env);
  }
  if (!flags.store.empty()) cfg.store_path = flags.store;
  if (flags.tau) cfg.retrieval.tau = *flags.tau;
  for (auto* ep : {&cfg.adapters.segment, &cfg.adapters.propose, &cfg.adapters.embed,
                   &cfg.adapters.generate}) {
    if (!flags.mode.empty()) ep->mode = parse_adapter_mode(flags.mode);
    if (!flags.fixtures.empty()) ep->fixture_dir = flags.fixtures;
  }
  cfg.validate();
  return cfg;
}

MemoryStore open_store(const fs::path& path) {
  if (fs::exists(path / "manifest.json")) return MemoryStore::load(path);
  return MemoryStore();
}

int cmd_introduce(const AppConfig& cfg, const std::string& name, const std::string& category,
                  const std::string& context, const std::vector<std::string>& images,
                  const std::string& id, std::ostream& out) {
  auto store = open_store(cfg.store_path);
  IntroductionRequest req{name, context, category, {}};
  for (const auto& p : images) req.reference_images.push_back(ImagePayload::from_file(p));
  const auto tools = make_tools(cfg.adapters);
  const auto object_id = introduce_object(
      req, store, tools, id.empty() ? std::nullopt : std::optional<std::string>(id));
  store.save(cfg.store_path);
  out << object_id << "\n";
  return kExitOk;
}

int cmd_infer(const AppConfig& cfg, const std::string& image_path, const std::string& question,
              const std::string& save_annotated, const std::string& report_path,
              std::ostream& out) {
  const auto store = open_store(cfg.store_path);
  const auto tools = make_tools(cfg.adapters);
  InferenceOptions options{cfg.retrieval, cfg.prompt, cfg.max_tokens};
  const auto result = personalized_inference(ImagePayload::from_file(image_path), question,
                                             store, options, tools);

  std::string annotated_ref;
  if (!save_annotated.empty()) {
    // Without detections the model saw the original image; save that.
    const Bytes& bytes =
        result.annotated_image.empty() ? read_file(image_path) : result.annotated_image;
    write_file(save_annotated, bytes);
    annotated_ref = save_annotated;
  }
  if (!report_path.empty()) {
    nlohmann::ordered_json j;
    j["answer"] = result.answer;
    j["truncated"] = result.truncated;
    j["prompt"] = result.prompt_used;
    j["detections"] = nlohmann::ordered_json::array();
    for (const auto& d : result.detections) {
      j["detections"].push_back(
          {{"object_id", d.object_id},
           {"name", d.name},
           {"score", d.score},
           {"bbox", {d.bbox.x0, d.bbox.y0, d.bbox.x1, d.bbox.y1}},
           {"color", color_for_slot(d.color_slot, cfg.prompt.palette).color_name}});
    }
    j["annotated_image"] = annotated_ref.empty() ? nlohmann::ordered_json(nullptr)
                                                 : nlohmann::ordered_json(annotated_ref);
    write_text_file(report_path, j.dump(2) + "\n");
  }
  out << result.answer << "\n";
  return kExitOk;
}

int cmd_eval(const AppConfig& cfg, const std::string& dataset_root, const std::string& report_path,
             bool recognition_only, bool sample_frames, std::ostream& out) {
  const auto dataset = eval::load_dataset(dataset_root);
  const auto tools = make_tools(cfg.adapters);
  eval::HarnessOptions options;
  options.inference = {cfg.retrieval, cfg.prompt, cfg.max_tokens};
  options.recognition_only = recognition_only;
  options.sample_frames = sample_frames;
  const auto report = eval::run_benchmark(dataset, tools, options);
  write_text_file(report_path, eval::report_to_json(report).dump(2) + "\n");
  out << eval::report_table(report);
  return kExitOk;
}

int cmd_memory_list(const AppConfig& cfg, std::ostream& out) {
  const auto store = open_store(cfg.store_path);
  out << std::left << std::setw(16) << "ID" << std::setw(28) << "NAME" << std::setw(20)
      << "CATEGORY"
      << "VIEWS\n";
  for (const auto& o : store.list_objects()) {
    out << std::left << std::setw(16) << o.id << std::setw(28) << o.name << std::setw(20)
        << o.category << o.num_views << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Answer questions about images that contain objects you have introduced", "pekit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  app.add_option("--config", flags.config, "JSON config file (overrides $PEKIT_CONFIG)");
  app.add_option("--store", flags.store, "Memory store directory");
  app.add_option("--tau", flags.tau, "Similarity threshold");
  app.add_option("--mode", flags.mode, "Adapter mode for all endpoints")
      ->check(CLI::IsMember({"live", "record", "replay"}));
  app.add_option("--fixtures", flags.fixtures, "Fixture directory for all endpoints");

  std::string name, category, context, id;
  std::vector<std::string> images;
  auto* introduce = app.add_subcommand("introduce", "Add a personalized object to the memory");
  introduce->add_option("--name", name, "Object name")->required();
  introduce->add_option("--category", category, "Generic category used for segmentation")
      ->required();
  introduce->add_option("--context", context, "Optional context text");
  introduce->add_option("--images", images, "Reference images")->required()->expected(1, -1);
  introduce->add_option("--id", id, "Explicit object id");

  std::string image, question, save_annotated, infer_report;
  auto* infer = app.add_subcommand("infer", "Answer a question about an image");
  infer->add_option("--image", image, "Query image")->required();
  infer->add_option("--question", question, "Question or instruction")->required();
  infer->add_option("--save-annotated", save_annotated, "Write the image sent to the model");
  infer->add_option("--report", infer_report, "Write detections and prompt as JSON");

  std::string dataset, eval_report;
  bool recognition_only = false;
  bool sample_frames = false;
  auto* evaluate = app.add_subcommand("eval", "Run the personalization benchmark");
  evaluate->add_option("--dataset", dataset, "Dataset root")->required();
  evaluate->add_option("--report", eval_report, "Output JSON report")->required();
  evaluate->add_flag("--recognition-only", recognition_only, "Skip VQA and captioning");
  evaluate->add_flag("--sample-frames", sample_frames, "Keep every 10th validation frame");

  std::string remove_id, export_path;
  auto* memory = app.add_subcommand("memory", "Inspect or edit the memory store");
  memory->require_subcommand(1);
  auto* list = memory->add_subcommand("list", "List stored objects");
  auto* remove = memory->add_subcommand("remove", "Remove an object");
  remove->add_option("id", remove_id, "Object id")->required();
  auto* exporter = memory->add_subcommand("export", "Save a copy of the store");
  exporter->add_option("path", export_path, "Destination directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    const AppConfig cfg = resolve_config(flags);
    if (introduce->parsed()) return cmd_introduce(cfg, name, category, context, images, id, out);
    if (infer->parsed()) {
      return cmd_infer(cfg, image, question, save_annotated, infer_report, out);
    }
    if (evaluate->parsed()) {
      return cmd_eval(cfg, dataset, eval_report, recognition_only, sample_frames, out);
    }
    if (list->parsed()) return cmd_memory_list(cfg, out);
    if (remove->parsed()) {
      auto store = open_store(cfg.store_path);
      store.remove_object(remove_id);
      store.save(cfg.store_path);
      return kExitOk;
    }
    if (exporter->parsed()) {
      open_store(cfg.store_path).save(export_path);
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace pekit
