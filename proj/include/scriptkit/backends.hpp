// include/scriptkit/backends.hpp

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
// Model-backend contracts (captioner, instruction LLM, NLI scorer, step
// decoders, embedding scorer) and the deterministic toy implementations used
// by the test suites. Toy backends are immutable after construction and safe
// for concurrent calls.

#ifndef SCRIPTKIT_BACKENDS_HPP_
#define SCRIPTKIT_BACKENDS_HPP_

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scriptkit/common.hpp"
#include "scriptkit/distribution.hpp"
#include "scriptkit/frames.hpp"

namespace scriptkit {

// ---------------------------------------------------------------------------
// Contracts
// ---------------------------------------------------------------------------

/// Produces a one-sentence description of a single frame.
class Captioner {
 public:
  virtual ~Captioner() = default;
  virtual std::string caption(const Image &frame) const = 0;
};

/// Wraps an instruction-following LLM: prompt text in, completion text out.
class InstructionModel {
 public:
  virtual ~InstructionModel() = default;
  virtual std::string instruct(const std::string &prompt) const = 0;
};

/// Entailment probability of hypothesis given premise, in [0, 1].
class NliScorer {
 public:
  virtual ~NliScorer() = default;
  virtual double entail(const std::string &premise, const std::string &hypothesis) const = 0;
};

/// Next-token distribution of a conditional step decoder. `text_context` is
/// the [SEP]-joined textual input; `video` may be empty (zero frames).
class StepDecoder {
 public:
  virtual ~StepDecoder() = default;
  virtual TokenDistribution next_token_dist(const std::string &goal, const std::string &text_context,
                                            const VideoRef &video,
                                            const std::vector<std::string> &prefix) const = 0;
  virtual std::shared_ptr<const std::vector<std::string>> vocab() const = 0;
};

/// Sparse embedding vector keyed by feature hash.
using SparseVec = std::map<std::uint64_t, double>;

inline double cosine(const SparseVec &a, const SparseVec &b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto &[k, v] : a) {
    na += v * v;
    auto it = b.find(k);
    if (it != b.end()) dot += v * it->second;
  }
  for (const auto &[k, v] : b) nb += v * v;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Token- and sentence-level embeddings for the semantic metrics.
class EmbeddingScorer {
 public:
  virtual ~EmbeddingScorer() = default;
  virtual SparseVec embed_token(const std::string &token) const = 0;
  virtual SparseVec embed_sentence(const std::string &text) const = 0;
};

/// The full set of models a pipeline run needs. The two decoders share one
/// vocabulary; they differ in whether their text context carries prompted
/// instructional knowledge.
struct BackendSet {
  std::shared_ptr<const Captioner> captioner;
  std::shared_ptr<const InstructionModel> instruction_llm;
  std::shared_ptr<const NliScorer> nli_scorer;
  std::shared_ptr<const StepDecoder> decoder_with_knowledge;
  std::shared_ptr<const StepDecoder> decoder_without_knowledge;
  std::shared_ptr<const EmbeddingScorer> embedding_scorer;

  void validate() const {
    if (!captioner || !instruction_llm || !nli_scorer || !decoder_with_knowledge ||
        !decoder_without_knowledge || !embedding_scorer) {
      throw Error("backends", "backend set is incomplete");
    }
    if (*decoder_with_knowledge->vocab() != *decoder_without_knowledge->vocab()) {
      throw Error("backends", "decoders must share one vocabulary");
    }
  }
};

// ---------------------------------------------------------------------------
// Toy implementations
// ---------------------------------------------------------------------------

/// Caption lookup on a frame-content fingerprint with a fixed fallback.
class ToyCaptioner : public Captioner {
 public:
  explicit ToyCaptioner(std::map<std::string, std::string> by_fingerprint = {},
                        std::string fallback = "a frame")
      : by_fingerprint_(std::move(by_fingerprint)), fallback_(std::move(fallback)) {}

  void register_frame(const Image &frame, const std::string &caption) {
    by_fingerprint_[frame.fingerprint()] = caption;
  }

  std::string caption(const Image &frame) const override {
    auto it = by_fingerprint_.find(frame.fingerprint());
    return it == by_fingerprint_.end() ? fallback_ : it->second;
  }

 private:
  std::map<std::string, std::string> by_fingerprint_;
  std::string fallback_;
};

/// Canned completions keyed on the prompt's final question line; anything
/// unregistered yields an empty completion.
class ToyInstructionModel : public InstructionModel {
 public:
  explicit ToyInstructionModel(std::map<std::string, std::string> answers = {})
      : answers_(std::move(answers)) {}

  void register_answer(const std::string &question, const std::string &answer) {
    answers_[question] = answer;
  }

  std::string instruct(const std::string &prompt) const override {
    std::string question;
    std::size_t pos = 0;
    while (true) {
      std::size_t nl = prompt.find('\n', pos);
      std::string line = prompt.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
      std::string t = trim(line);
      if (t.rfind("Question:", 0) == 0) question = trim(t.substr(9));
      if (nl == std::string::npos) break;
      pos = nl + 1;
    }
    auto it = answers_.find(question);
    return it == answers_.end() ? "" : it->second;
  }

 private:
  std::map<std::string, std::string> answers_;
};

/// Word-overlap entailment: |premise-words ∩ hypothesis-words| over the
/// number of distinct hypothesis words.
class ToyNliScorer : public NliScorer {
 public:
  double entail(const std::string &premise, const std::string &hypothesis) const override {
    std::set<std::string> hyp;
    for (auto &t : tokenize(hypothesis)) hyp.insert(std::move(t));
    if (hyp.empty()) return 0.0;
    std::set<std::string> prem;
    for (auto &t : tokenize(premise)) prem.insert(std::move(t));
    std::size_t overlap = 0;
    for (const auto &t : hyp) overlap += prem.count(t);
    double score = static_cast<double>(overlap) / static_cast<double>(hyp.size());
    return std::min(1.0, std::max(0.0, score));
  }
};

/// Count-based n-gram decoder over a small training corpus of scripts.
///
/// Conditioning walks the [SEP]-joined text context for its last in-vocabulary
/// content token (the "entry" point, typically the tail of the last preceding
/// step or caption) and continues the chain from there through the generated
/// prefix. Order-3 counts with a bigram fallback keep the chain unambiguous
/// across repeated step separators; plain order-2 counts collapse every
/// separator into one state and loop on scripts with three or more steps.
///
/// When the instance carries a nonempty video, the decoder stops opening new
/// steps once the step count implied by the video duration is reached
/// (duration / seconds_per_step, rounded up): the separator's probability
/// mass moves onto the end token.
class ToyNgramDecoder : public StepDecoder {
 public:
  ToyNgramDecoder(const std::vector<std::string> &corpus,
                  std::shared_ptr<const std::vector<std::string>> vocab,
                  double seconds_per_step = 2.0)
      : vocab_(std::move(vocab)), seconds_per_step_(seconds_per_step) {
    if (!vocab_ || vocab_->empty()) throw Error("backends", "decoder vocabulary is empty");
    for (std::size_t i = 0; i < vocab_->size(); ++i) vocab_index_[(*vocab_)[i]] = i;
    for (const std::string &line : corpus) {
      std::vector<std::string> seq;
      seq.emplace_back(kBosToken);
      seq.emplace_back(kBosToken);
      for (auto &t : tokenize_keep_sep(line)) seq.push_back(std::move(t));
      seq.emplace_back(kEosToken);
      for (std::size_t j = 2; j < seq.size(); ++j) {
        if (!vocab_index_.count(seq[j])) {
          throw Error("backends", "corpus token \"" + seq[j] + "\" missing from decoder vocabulary");
        }
        trigram_[seq[j - 2] + "\x1f" + seq[j - 1]][seq[j]]++;
        bigram_[seq[j - 1]][seq[j]]++;
      }
    }
  }

  /// Vocabulary for a corpus (or several): end token, separator, then the
  /// sorted distinct corpus tokens.
  static std::shared_ptr<const std::vector<std::string>> build_vocab(
      const std::vector<std::vector<std::string>> &corpora) {
    std::set<std::string> words;
    for (const auto &corpus : corpora) {
      for (const std::string &line : corpus) {
        for (auto &t : tokenize_keep_sep(line)) {
          if (t != kSepToken) words.insert(std::move(t));
        }
      }
    }
    auto vocab = std::make_shared<std::vector<std::string>>();
    vocab->emplace_back(kEosToken);
    vocab->emplace_back(kSepToken);
    vocab->insert(vocab->end(), words.begin(), words.end());
    return vocab;
  }

  std::shared_ptr<const std::vector<std::string>> vocab() const override { return vocab_; }

  TokenDistribution next_token_dist(const std::string &goal, const std::string &text_context,
                                    const VideoRef &video,
                                    const std::vector<std::string> &prefix) const override {
    (void)goal;  // the goal reaches the toy only through the text context
    TokenDistribution dist;
    dist.vocab = vocab_;
    const std::size_t v = vocab_->size();

    for (const std::string &t : prefix) {
      if (!vocab_index_.count(t)) {
        dist.probs.assign(v, 1.0 / static_cast<double>(v));
        return dist;
      }
    }

    std::vector<std::string> cond;
    cond.emplace_back(kBosToken);
    std::string entry = context_entry(text_context);
    if (!entry.empty()) cond.push_back(std::move(entry));
    cond.insert(cond.end(), prefix.begin(), prefix.end());

    const std::string &b = cond.back();
    const std::string &a = cond.size() >= 2 ? cond[cond.size() - 2] : cond.back();

    const std::map<std::string, std::size_t> *row = nullptr;
    auto tri = trigram_.find((cond.size() >= 2 ? a : std::string(kBosToken)) + "\x1f" + b);
    if (tri != trigram_.end()) {
      row = &tri->second;
    } else {
      auto bi = bigram_.find(b);
      if (bi != bigram_.end()) row = &bi->second;
    }

    dist.probs.assign(v, 0.0);
    if (row == nullptr) {
      dist.probs.assign(v, 1.0 / static_cast<double>(v));
    } else {
      std::size_t total = 0;
      for (const auto &[tok, count] : *row) total += count;
      const double denom = static_cast<double>(total) + static_cast<double>(v);
      for (std::size_t i = 0; i < v; ++i) dist.probs[i] = 1.0 / denom;
      for (const auto &[tok, count] : *row) {
        dist.probs[vocab_index_.at(tok)] += static_cast<double>(count) / denom;
      }
    }

    if (!video.empty() && video.fps > 0 && seconds_per_step_ > 0) {
      const auto expected = static_cast<std::size_t>(
          std::max(1.0, std::ceil(video.duration_s() / seconds_per_step_)));
      std::size_t seps = 0;
      for (const std::string &t : prefix) {
        if (t == kSepToken) ++seps;
      }
      if (seps + 1 >= expected) {
        // No further step may open: the separator is ruled out and the rest
        // of the row is renormalized. Smoothing keeps every entry positive,
        // so the divisor never vanishes.
        const std::size_t sep_i = vocab_index_.at(kSepToken);
        const double rest = 1.0 - dist.probs[sep_i];
        dist.probs[sep_i] = 0.0;
        for (double &p : dist.probs) p /= rest;
      }
    }
    return dist;
  }

 private:
  /// Last in-vocabulary content token of the text context, if any.
  std::string context_entry(const std::string &context) const {
    std::vector<std::string> toks = tokenize_keep_sep(context);
    for (auto it = toks.rbegin(); it != toks.rend(); ++it) {
      if (*it == kSepToken || *it == kEosToken) continue;
      if (vocab_index_.count(*it)) return *it;
    }
    return "";
  }

  std::shared_ptr<const std::vector<std::string>> vocab_;
  std::unordered_map<std::string, std::size_t> vocab_index_;
  std::unordered_map<std::string, std::map<std::string, std::size_t>> trigram_;
  std::unordered_map<std::string, std::map<std::string, std::size_t>> bigram_;
  double seconds_per_step_;
};

/// Hashed bag-of-words embeddings: one sparse axis per distinct token, so
/// disjoint token sets are exactly orthogonal and identical sentences have
/// cosine one.
class ToyEmbeddingScorer : public EmbeddingScorer {
 public:
  SparseVec embed_token(const std::string &token) const override {
    return SparseVec{{fnv1a64(normalize_token(token)), 1.0}};
  }

  SparseVec embed_sentence(const std::string &text) const override {
    SparseVec vec;
    for (const std::string &t : tokenize(text)) vec[fnv1a64(t)] += 1.0;
    return vec;
  }
};

// ---------------------------------------------------------------------------
// Toy fixture loading
// ---------------------------------------------------------------------------

/// In-memory description of a toy backend set.
struct ToyFixture {
  std::map<std::string, std::string> captions_by_fingerprint;
  std::string caption_fallback = "a frame";
  std::map<std::string, std::string> instruction_answers;  // question -> raw answer
  std::vector<std::string> knowledge_corpus;
  std::vector<std::string> plain_corpus;
  double seconds_per_step = 2.0;
};

inline BackendSet make_toy_backends(const ToyFixture &fixture) {
  auto vocab = ToyNgramDecoder::build_vocab({fixture.knowledge_corpus, fixture.plain_corpus});
  BackendSet set;
  set.captioner = std::make_shared<ToyCaptioner>(fixture.captions_by_fingerprint, fixture.caption_fallback);
  set.instruction_llm = std::make_shared<ToyInstructionModel>(fixture.instruction_answers);
  set.nli_scorer = std::make_shared<ToyNliScorer>();
  set.decoder_with_knowledge =
      std::make_shared<ToyNgramDecoder>(fixture.knowledge_corpus, vocab, fixture.seconds_per_step);
  set.decoder_without_knowledge =
      std::make_shared<ToyNgramDecoder>(fixture.plain_corpus, vocab, fixture.seconds_per_step);
  set.embedding_scorer = std::make_shared<ToyEmbeddingScorer>();
  set.validate();
  return set;
}

/// Loads captions.json, instructions.json and decoders.json from a fixture
/// directory.
inline ToyFixture load_toy_fixture(const std::string &dir) {
  namespace fs = std::filesystem;
  auto load = [](const fs::path &path) {
    std::ifstream in(path);
    if (!in) throw Error("backends", "cannot open fixture file " + path.string());
    return nlohmann::json::parse(in);
  };
  ToyFixture fixture;
  nlohmann::json captions = load(fs::path(dir) / "captions.json");
  for (auto &[k, v] : captions.at("fingerprints").items()) {
    fixture.captions_by_fingerprint[k] = v.get<std::string>();
  }
  if (captions.contains("fallback")) fixture.caption_fallback = captions["fallback"].get<std::string>();
  nlohmann::json instructions = load(fs::path(dir) / "instructions.json");
  for (auto &[k, v] : instructions.at("answers").items()) {
    fixture.instruction_answers[k] = v.get<std::string>();
  }
  nlohmann::json decoders = load(fs::path(dir) / "decoders.json");
  for (const auto &s : decoders.at("knowledge_corpus")) fixture.knowledge_corpus.push_back(s.get<std::string>());
  for (const auto &s : decoders.at("plain_corpus")) fixture.plain_corpus.push_back(s.get<std::string>());
  if (decoders.contains("seconds_per_step")) fixture.seconds_per_step = decoders["seconds_per_step"].get<double>();
  return fixture;
}

inline BackendSet load_toy_backends(const std::string &dir) {
  return make_toy_backends(load_toy_fixture(dir));
}

}  // namespace scriptkit

#endif  // SCRIPTKIT_BACKENDS_HPP_
