// tools/scriptkit.cpp

// Copyright 2026  Scriptkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.
//
// Command-line entry point exposing the pipeline stages as subcommands over
// the JSONL formats.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scriptkit/adapters.hpp"
#include "scriptkit/scriptkit.hpp"

namespace fs = std::filesystem;
using namespace scriptkit;

namespace {

struct BackendOptions {
  std::string kind = "toy";  // toy | remote
  std::string toy_dir = "assets/toy";
  std::string host = "127.0.0.1";
  int port = 8421;
};

void add_backend_flags(CLI::App *cmd, BackendOptions &opts) {
  cmd->add_option("--backend", opts.kind, "Model backend: toy or remote")
      ->check(CLI::IsMember({"toy", "remote"}));
  cmd->add_option("--toy-dir", opts.toy_dir, "Toy fixture directory (captions/instructions/decoders)");
  cmd->add_option("--host", opts.host, "Remote backend host");
  cmd->add_option("--port", opts.port, "Remote backend port");
}

BackendSet open_backends(const BackendOptions &opts) {
  if (opts.kind == "toy") return load_toy_backends(opts.toy_dir);
  RemoteConfig config;
  config.host = opts.host;
  config.port = opts.port;
  return make_remote_backends(config);
}

struct DecodeOptions {
  std::string strategy = "greedy";
  int beam_width = 0;  // 0 = derive from strategy (1 greedy / 5 beam)
  int max_steps = 16;
  int max_tokens_per_step = 24;
};

void add_decode_flags(CLI::App *cmd, DecodeOptions &opts) {
  cmd->add_option("--strategy", opts.strategy, "Decoding strategy: greedy or beam")
      ->check(CLI::IsMember({"greedy", "beam"}));
  cmd->add_option("--beam-width", opts.beam_width, "Beam width (beam strategy)");
  cmd->add_option("--max-steps", opts.max_steps, "Maximum generated steps");
  cmd->add_option("--max-tokens-per-step", opts.max_tokens_per_step, "Token budget per step");
}

GenerationConfig make_config(const DecodeOptions &opts) {
  GenerationConfig config;
  config.decode_strategy = opts.strategy == "beam" ? DecodeStrategy::kBeam : DecodeStrategy::kGreedy;
  config.beam_width = opts.beam_width > 0 ? opts.beam_width
                                          : (config.decode_strategy == DecodeStrategy::kBeam ? 5 : 1);
  config.max_steps = opts.max_steps;
  config.max_tokens_per_step = opts.max_tokens_per_step;
  return config;
}

PromptTemplate open_template(const std::string &path) {
  return path.empty() ? default_prompt_template() : load_prompt_template(path);
}

void require_input(const std::string &path, const std::string &flag) {
  if (!fs::exists(path)) throw Error("config", flag + " path does not exist: " + path);
}

void write_json_file(const std::string &path, const json &obj) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("io", "cannot write " + path);
  out << obj.dump(2) << "\n";
}

template <typename T>
void write_jsonl(const std::vector<T> &items, const std::string &path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("io", "cannot write " + path);
  for (const T &item : items) out << to_json(item).dump() << "\n";
}

int run(int argc, char **argv) {
  CLI::App app{"Task-oriented multimodal script learning toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value config file; command-line flags win");

  // --- build-dataset ------------------------------------------------------
  std::string articles_path, out_dir, ratios_text = "0.80,0.05,0.15", template_dir;
  std::uint64_t seed = 0;
  int min_k = 0, tolerance = 0;
  auto *build = app.add_subcommand("build-dataset", "Construct task instances from an article corpus");
  build->add_option("--articles", articles_path, "Articles JSONL file")->required();
  build->add_option("--out-dir", out_dir, "Output directory")->required();
  build->add_option("--seed", seed, "Split shuffle seed");
  build->add_option("--ratios", ratios_text, "Train,dev,test ratios");
  build->add_option("--transition-template", template_dir,
                    "Directory with exemplar.png, mask.png, template.json");
  build->add_option("--min-k", min_k, "Smallest preceding-step count for prediction instances");
  build->add_option("--tolerance", tolerance, "End-frame matching tolerance");
  build->callback([&] {
    require_input(articles_path, "--articles");
    BuildOptions opts;
    opts.out_dir = out_dir;
    opts.seed = seed;
    opts.min_k = min_k;
    opts.end_frame_tolerance = tolerance;
    std::vector<std::string> parts;
    std::stringstream ss(ratios_text);
    std::string part;
    while (std::getline(ss, part, ',')) parts.push_back(part);
    if (parts.size() != 3) throw Error("config", "--ratios needs three comma-separated values");
    opts.ratios = {std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2])};
    if (!template_dir.empty()) {
      require_input(template_dir, "--transition-template");
      opts.transition_template = load_transition_template(template_dir);
    }
    std::vector<Article> articles = read_articles(articles_path);
    fs::create_directories(out_dir);
    BuildResult result = build_dataset(articles, opts);
    write_instances(result.msg, (fs::path(out_dir) / "msg.jsonl").string());
    write_instances(result.ssp, (fs::path(out_dir) / "ssp.jsonl").string());
    write_json_file((fs::path(out_dir) / "build_report.json").string(), to_json(result.report));
    std::cout << "built " << result.report.built_msg << " script instances, " << result.report.built_ssp
              << " next-step instances from " << result.report.articles_eligible << "/"
              << result.report.articles_total << " articles\n";
  });

  // --- extract-steps ------------------------------------------------------
  std::string video_dir, out_path;
  double fps = 30.0;
  BackendOptions extract_backend;
  auto *extract = app.add_subcommand("extract-steps", "Keyframes and captions for one frame directory");
  extract->add_option("--video", video_dir, "Frame directory")->required();
  extract->add_option("--fps", fps, "Frames per second of the directory");
  extract->add_option("--out", out_path, "Output JSON path (default stdout)");
  add_backend_flags(extract, extract_backend);
  extract->callback([&] {
    require_input(video_dir, "--video");
    std::size_t count = 0;
    while (fs::exists(fs::path(video_dir) / frame_file_name(count))) ++count;
    VideoRef ref{video_dir, count, fps};
    auto source = open_frames(ref);
    std::vector<Keyframe> keys = extract_keyframes(*source);
    BackendSet backends = open_backends(extract_backend);
    json out{{"keyframes", json::array()}, {"captions", json::array()}};
    for (const Keyframe &k : keys) {
      out["keyframes"].push_back({{"frame_index", k.frame_index}, {"timestamp_s", k.timestamp_s}});
      out["captions"].push_back(backends.captioner->caption(source->frame(k.frame_index)));
    }
    if (out_path.empty()) {
      std::cout << out.dump(2) << "\n";
    } else {
      write_json_file(out_path, out);
    }
  });

  // --- prompt-knowledge ---------------------------------------------------
  std::string goal, template_path, knowledge_out;
  BackendOptions prompt_backend;
  auto *prompt = app.add_subcommand("prompt-knowledge", "Prompt the LLM for a goal's instructional steps");
  prompt->add_option("--goal", goal, "Task goal")->required();
  prompt->add_option("--template", template_path, "Prompt template file");
  prompt->add_option("--out", knowledge_out, "Output JSON path (default stdout)");
  add_backend_flags(prompt, prompt_backend);
  prompt->callback([&] {
    PromptTemplate tmpl = open_template(template_path);
    BackendSet backends = open_backends(prompt_backend);
    std::string text = build_prompt(goal, tmpl);
    std::string raw = backends.instruction_llm->instruct(text);
    std::optional<InstructionalKnowledge> knowledge = parse_instructions(raw);
    json out{{"prompt", text}, {"raw", raw}, {"parsed", knowledge.has_value()}};
    out["steps"] = knowledge ? json(knowledge->steps) : json::array();
    if (knowledge_out.empty()) {
      std::cout << out.dump(2) << "\n";
    } else {
      write_json_file(knowledge_out, out);
    }
  });

  // --- generate-script ----------------------------------------------------
  std::string gen_in, gen_out, gen_template;
  unsigned jobs = 1;
  BackendOptions gen_backend;
  DecodeOptions gen_decode;
  auto *generate = app.add_subcommand("generate-script", "Generate full scripts for instance JSONL");
  generate->add_option("--in", gen_in, "Script-generation instances JSONL")->required();
  generate->add_option("--out", gen_out, "Predictions JSONL")->required();
  generate->add_option("--template", gen_template, "Prompt template file");
  generate->add_option("--jobs", jobs, "Parallel instance workers");
  add_backend_flags(generate, gen_backend);
  add_decode_flags(generate, gen_decode);
  generate->callback([&] {
    require_input(gen_in, "--in");
    std::vector<MSGInstance> instances = read_msg_instances(gen_in);
    BackendSet backends = open_backends(gen_backend);
    std::vector<ScriptPrediction> preds =
        generate_scripts(instances, backends, open_template(gen_template), make_config(gen_decode), jobs);
    write_jsonl(preds, gen_out);
    std::cout << "generated " << preds.size() << " scripts\n";
  });

  // --- predict-step -------------------------------------------------------
  std::string pred_in, pred_out, pred_template;
  unsigned pred_jobs = 1;
  BackendOptions pred_backend;
  DecodeOptions pred_decode;
  auto *predict = app.add_subcommand("predict-step", "Predict the next step for instance JSONL");
  predict->add_option("--in", pred_in, "Next-step instances JSONL")->required();
  predict->add_option("--out", pred_out, "Predictions JSONL")->required();
  predict->add_option("--template", pred_template, "Prompt template file");
  predict->add_option("--jobs", pred_jobs, "Parallel instance workers");
  add_backend_flags(predict, pred_backend);
  add_decode_flags(predict, pred_decode);
  predict->callback([&] {
    require_input(pred_in, "--in");
    std::vector<SSPInstance> instances = read_ssp_instances(pred_in);
    BackendSet backends = open_backends(pred_backend);
    std::vector<StepPrediction> preds =
        predict_steps(instances, backends, open_template(pred_template), make_config(pred_decode), pred_jobs);
    write_jsonl(preds, pred_out);
    std::cout << "predicted " << preds.size() << " steps\n";
  });

  // --- sample-nli ---------------------------------------------------------
  std::string nli_in, nli_out;
  int negatives = 4;
  std::uint64_t nli_seed = 0;
  auto *nli = app.add_subcommand("sample-nli", "Emit NLI fine-tuning pairs from script instances");
  nli->add_option("--in", nli_in, "Script instances JSONL")->required();
  nli->add_option("--out", nli_out, "Pairs JSONL")->required();
  nli->add_option("--negatives", negatives, "Negatives per positive");
  nli->add_option("--seed", nli_seed, "Sampling seed");
  nli->callback([&] {
    require_input(nli_in, "--in");
    std::vector<MSGInstance> instances = read_msg_instances(nli_in);
    std::vector<NLIPair> pairs;
    for (const MSGInstance &inst : instances) {
      const int n = static_cast<int>(inst.script.size());
      for (int k = 0; k <= n - 1; ++k) {
        std::uint64_t pair_seed = nli_seed ^ fnv1a64(inst.id) ^ (static_cast<std::uint64_t>(k) << 32);
        std::vector<NLIPair> batch = sample_nli_pairs(inst.goal, inst.script, k, negatives, pair_seed);
        pairs.insert(pairs.end(), batch.begin(), batch.end());
      }
    }
    write_jsonl(pairs, nli_out);
    std::cout << "sampled " << pairs.size() << " premise/hypothesis pairs\n";
  });

  // --- evaluate -----------------------------------------------------------
  std::string eval_pred, eval_gold, eval_out_dir, model_name = "model";
  BackendOptions eval_backend;
  auto *evaluate = app.add_subcommand("evaluate", "Score predictions against gold instances");
  evaluate->add_option("--pred", eval_pred, "Predictions JSONL")->required();
  evaluate->add_option("--gold", eval_gold, "Gold instances JSONL")->required();
  evaluate->add_option("--out-dir", eval_out_dir, "Where report.json and report.md are written");
  evaluate->add_option("--name", model_name, "Row label for the report table");
  add_backend_flags(evaluate, eval_backend);
  evaluate->callback([&] {
    require_input(eval_pred, "--pred");
    require_input(eval_gold, "--gold");
    BackendSet backends = open_backends(eval_backend);
    EvaluationResult result = evaluate_files(eval_pred, eval_gold, *backends.embedding_scorer);
    std::string table = markdown_report(model_name, result.report);
    std::cout << table;
    if (!eval_out_dir.empty()) {
      fs::create_directories(eval_out_dir);
      json instances = json::array();
      for (const InstanceScore &inst : result.instances) {
        json rec{{"id", inst.id}};
        for (std::size_t m = 0; m < kMetricNames.size(); ++m) rec[kMetricNames[m]] = inst.values[m];
        instances.push_back(std::move(rec));
      }
      json report{{"model", model_name}, {"report", to_json(result.report)}, {"instances", instances}};
      write_json_file((fs::path(eval_out_dir) / "report.json").string(), report);
      std::ofstream md(fs::path(eval_out_dir) / "report.md", std::ios::trunc);
      md << table;
    }
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  try {
    return run(argc, argv);
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
