// include/scriptkit/predictor.hpp

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
// Next-step prediction pipeline: preceding steps are recovered by the script
// generator, prompted knowledge is gated by an NLI confidence score, and the
// two decoder distributions are fused at every decoding step.

#ifndef SCRIPTKIT_PREDICTOR_HPP_
#define SCRIPTKIT_PREDICTOR_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scriptkit/backends.hpp"
#include "scriptkit/common.hpp"
#include "scriptkit/corpus.hpp"
#include "scriptkit/decoding.hpp"
#include "scriptkit/distribution.hpp"
#include "scriptkit/generator.hpp"
#include "scriptkit/knowledge.hpp"

namespace scriptkit {

/// How strongly the prompted knowledge is trusted for one instance: the
/// maximum entailment score of any knowledge step against the goal-plus-
/// preceding-steps premise. Empty knowledge scores zero.
struct ConfidenceScore {
  double value = 0.0;
  std::vector<std::pair<std::string, double>> per_step;
};

/// Premise used for both the confidence score and the NLI training pairs:
/// the goal followed by the preceding steps, joined with the split token.
inline std::string make_premise(const std::string &goal, const std::vector<std::string> &preceding) {
  std::vector<std::string> parts;
  parts.push_back(goal);
  for (const std::string &s : preceding) parts.push_back(s);
  return join(parts, std::string(" ") + kSepToken + " ");
}

inline ConfidenceScore confidence(const std::string &goal, const std::vector<std::string> &preceding_steps,
                                  const std::optional<InstructionalKnowledge> &knowledge,
                                  const NliScorer &nli) {
  ConfidenceScore score;
  if (!knowledge || knowledge->steps.empty()) return score;
  const std::string premise = make_premise(goal, preceding_steps);
  for (const std::string &step : knowledge->steps) {
    double s = nli.entail(premise, step);
    s = std::min(1.0, std::max(0.0, s));
    score.per_step.emplace_back(step, s);
    score.value = std::max(score.value, s);
  }
  return score;
}

struct StepPrediction {
  std::string id;
  std::string step;
  double confidence = 0.0;
};

inline json to_json(const StepPrediction &p) {
  return json{{"id", p.id}, {"step", p.step}, {"confidence", p.confidence}};
}

inline StepPrediction step_prediction_from_json(const json &obj) {
  StepPrediction p;
  p.id = detail::require_string(obj, "id");
  p.step = detail::require_string(obj, "step");
  if (obj.contains("confidence")) p.confidence = obj["confidence"].get<double>();
  return p;
}

/// Predicts the single most plausible next step for (goal, partial video).
///
/// The preceding steps are recovered by running the script generator on the
/// partial video (an empty video means nothing has been done yet). Knowledge
/// is prompted once per instance and its confidence c is fixed before
/// decoding; each decoding step then fuses the knowledge-free distribution
/// D_g with the knowledge-aware D_k under that c.
inline StepPrediction predict_step(const std::string &goal, const VideoRef &partial_video,
                                   const BackendSet &backends, const PromptTemplate &tmpl,
                                   const GenerationConfig &config) {
  config.validate();
  std::vector<std::string> preceding;
  if (!partial_video.empty()) {
    preceding = detail::stage("preceding-step-extractor", [&] {
      return generate_script(goal, partial_video, backends, tmpl, config);
    });
  }
  std::optional<InstructionalKnowledge> knowledge =
      detail::stage("knowledge-prompter", [&] { return prompt_knowledge(goal, backends, tmpl); });
  ConfidenceScore conf = confidence(goal, preceding, knowledge, *backends.nli_scorer);

  // Context for D_g: goal ++ preceding steps. Context for D_k additionally
  // carries the knowledge steps between the goal and the preceding steps, so
  // both contexts end on the most recent step.
  std::vector<std::string> parts_g{goal};
  for (const std::string &s : preceding) parts_g.push_back(s);
  std::vector<std::string> parts_k{goal};
  if (knowledge) {
    for (const std::string &p : knowledge->steps) parts_k.push_back(p);
  }
  for (const std::string &s : preceding) parts_k.push_back(s);
  const std::string sep = std::string(" ") + kSepToken + " ";
  const std::string context_g = join(parts_g, sep);
  const std::string context_k = join(parts_k, sep);

  const StepDecoder &dec_g = *backends.decoder_without_knowledge;
  const StepDecoder &dec_k = *backends.decoder_with_knowledge;
  const double c = conf.value;

  // The partial video is already summarized by the preceding steps, so the
  // fused decode conditions on text alone; an empty video ref signals that
  // the decoders are continuing past the demonstration, not describing it.
  const VideoRef no_video{};
  std::vector<std::string> tokens = detail::stage("adaptive-generator", [&] {
    return decode([&](const std::vector<std::string> &prefix) {
      TokenDistribution d_g = dec_g.next_token_dist(goal, context_g, no_video, prefix);
      if (c == 0.0) return d_g;  // fuse() would return d_g bit-for-bit; skip the work
      TokenDistribution d_k = dec_k.next_token_dist(goal, context_k, no_video, prefix);
      return fuse(d_g, d_k, c);
    }, config);
  });
  std::vector<std::string> steps = split_steps(tokens, config);
  if (steps.empty()) {
    throw Error("adaptive-generator", "decoded an empty step for goal \"" + goal + "\"");
  }
  return StepPrediction{"", steps.front(), c};
}

inline std::vector<StepPrediction> predict_steps(const std::vector<SSPInstance> &instances,
                                                 const BackendSet &backends, const PromptTemplate &tmpl,
                                                 const GenerationConfig &config, unsigned jobs = 1) {
  std::vector<StepPrediction> out(instances.size());
  parallel_for(instances.size(), jobs, [&](std::size_t i) {
    out[i] = predict_step(instances[i].goal, instances[i].partial_video, backends, tmpl, config);
    out[i].id = instances[i].id;
  });
  return out;
}

// ---------------------------------------------------------------------------
// NLI fine-tuning pair sampling
// ---------------------------------------------------------------------------

enum class NliLabel { kEntail, kNotEntail };

inline std::string to_string(NliLabel l) { return l == NliLabel::kEntail ? "entail" : "not_entail"; }

/// One premise/hypothesis training pair. The premise always starts with the
/// task goal text.
struct NLIPair {
  std::string premise;
  std::string hypothesis;
  NliLabel label = NliLabel::kEntail;
};

inline json to_json(const NLIPair &p) {
  return json{{"premise", p.premise}, {"hypothesis", p.hypothesis}, {"label", to_string(p.label)}};
}

/// Training pairs for one (script, k) position: the gold next step S_{k+1}
/// is the positive hypothesis; negatives are drawn without replacement from
/// the preceding steps and the future steps that do not immediately follow
/// (S_1..S_k and S_{k+2}..S_n).
inline std::vector<NLIPair> sample_nli_pairs(const std::string &goal,
                                             const std::vector<std::string> &script, int k,
                                             int negatives_per_positive, std::uint64_t seed) {
  const int n = static_cast<int>(script.size());
  if (k < 0 || k > n - 1) throw Error("nli-pairs", "k must be in [0, n-1]");
  if (negatives_per_positive < 0) throw Error("nli-pairs", "negatives_per_positive must be >= 0");

  std::vector<std::string> preceding(script.begin(), script.begin() + k);
  const std::string premise = make_premise(goal, preceding);

  std::vector<NLIPair> pairs;
  pairs.push_back(NLIPair{premise, script[static_cast<std::size_t>(k)], NliLabel::kEntail});

  // Pool: preceding steps script[0..k-1] plus future steps script[k+1..n-1]
  // (S_{k+2}..S_n); only the gold step script[k] is excluded.
  std::vector<std::string> pool;
  for (int i = 0; i < n; ++i) {
    if (i == k) continue;
    pool.push_back(script[static_cast<std::size_t>(i)]);
  }
  SplitMix64 rng(seed);
  seeded_shuffle(pool, rng);
  const std::size_t take = std::min<std::size_t>(pool.size(), static_cast<std::size_t>(negatives_per_positive));
  for (std::size_t i = 0; i < take; ++i) {
    pairs.push_back(NLIPair{premise, pool[i], NliLabel::kNotEntail});
  }
  return pairs;
}

}  // namespace scriptkit

#endif  // SCRIPTKIT_PREDICTOR_HPP_
