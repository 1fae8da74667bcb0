// include/scriptkit/generator.hpp

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
// Full-script generation pipeline: keyframes -> captions -> prompted
// knowledge -> assembled text context -> decoded step sequence.

#ifndef SCRIPTKIT_GENERATOR_HPP_
#define SCRIPTKIT_GENERATOR_HPP_

#include <optional>
#include <string>
#include <vector>

#include "scriptkit/backends.hpp"
#include "scriptkit/common.hpp"
#include "scriptkit/corpus.hpp"
#include "scriptkit/decoding.hpp"
#include "scriptkit/knowledge.hpp"
#include "scriptkit/video.hpp"

namespace scriptkit {

/// Concatenates goal, captions and knowledge steps with the split token, in
/// that order. Absent knowledge is omitted entirely.
inline std::string assemble_context(const std::string &goal, const std::vector<std::string> &captions,
                                    const std::optional<InstructionalKnowledge> &knowledge) {
  std::vector<std::string> parts;
  parts.push_back(goal);
  for (const std::string &c : captions) parts.push_back(c);
  if (knowledge) {
    for (const std::string &p : knowledge->steps) parts.push_back(p);
  }
  return join(parts, std::string(" ") + kSepToken + " ");
}

namespace detail {

template <typename Fn>
auto stage(const char *label, Fn &&fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error &e) {
    throw Error(label, e.what());
  } catch (const std::exception &e) {
    throw Error(label, e.what());
  }
}

}  // namespace detail

/// Captions the keyframes of a video; an empty video has no captions.
inline std::vector<std::string> caption_keyframes(const VideoRef &video, const BackendSet &backends,
                                                  const KeyframeConfig &kf_config = {}) {
  std::vector<std::string> captions;
  if (video.empty()) return captions;
  auto source = open_frames(video);
  std::vector<Keyframe> keys = extract_keyframes(*source, kf_config);
  captions.reserve(keys.size());
  for (const Keyframe &k : keys) captions.push_back(backends.captioner->caption(source->frame(k.frame_index)));
  return captions;
}

/// Prompts the instruction LLM for the goal and parses its answer; returns
/// nullopt when the answer cannot be parsed (the pipelines then degrade to
/// knowledge-free generation).
inline std::optional<InstructionalKnowledge> prompt_knowledge(const std::string &goal,
                                                              const BackendSet &backends,
                                                              const PromptTemplate &tmpl) {
  std::string prompt = build_prompt(goal, tmpl);
  std::string raw = backends.instruction_llm->instruct(prompt);
  return parse_instructions(raw);
}

/// Runs the full generation pipeline for one (goal, video) pair and returns
/// the ordered step descriptions. Backend failures carry stage labels.
inline std::vector<std::string> generate_script(const std::string &goal, const VideoRef &video,
                                                const BackendSet &backends, const PromptTemplate &tmpl,
                                                const GenerationConfig &config,
                                                const KeyframeConfig &kf_config = {}) {
  config.validate();
  std::vector<std::string> captions =
      detail::stage("step-extractor", [&] { return caption_keyframes(video, backends, kf_config); });
  std::optional<InstructionalKnowledge> knowledge =
      detail::stage("knowledge-prompter", [&] { return prompt_knowledge(goal, backends, tmpl); });
  std::string context = assemble_context(goal, captions, knowledge);
  const StepDecoder &decoder = *backends.decoder_with_knowledge;
  std::vector<std::string> tokens = detail::stage("generator", [&] {
    return decode([&](const std::vector<std::string> &prefix) {
      return decoder.next_token_dist(goal, context, video, prefix);
    }, config);
  });
  std::vector<std::string> steps = split_steps(tokens, config);
  if (steps.empty()) throw Error("generator", "decoded an empty script for goal \"" + goal + "\"");
  return steps;
}

/// Prediction record written for one instance.
struct ScriptPrediction {
  std::string id;
  std::vector<std::string> script;
};

inline json to_json(const ScriptPrediction &p) { return json{{"id", p.id}, {"script", p.script}}; }

inline ScriptPrediction script_prediction_from_json(const json &obj) {
  ScriptPrediction p;
  p.id = detail::require_string(obj, "id");
  const json &script = detail::require_field(obj, "script");
  if (!script.is_array()) throw Error("schema", "field \"script\" must be an array");
  for (const auto &s : script) p.script.push_back(s.get<std::string>());
  return p;
}

/// Batch mode over task instances; `jobs` enables instance-level parallelism
/// while keeping output in input order.
inline std::vector<ScriptPrediction> generate_scripts(const std::vector<MSGInstance> &instances,
                                                      const BackendSet &backends, const PromptTemplate &tmpl,
                                                      const GenerationConfig &config, unsigned jobs = 1) {
  std::vector<ScriptPrediction> out(instances.size());
  parallel_for(instances.size(), jobs, [&](std::size_t i) {
    out[i].id = instances[i].id;
    out[i].script = generate_script(instances[i].goal, instances[i].video, backends, tmpl, config);
  });
  return out;
}

}  // namespace scriptkit

#endif  // SCRIPTKIT_GENERATOR_HPP_
