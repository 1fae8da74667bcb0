// include/scriptkit/metrics.hpp

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
// Text-generation metrics: BLEU-1..4, METEOR, ROUGE-L, BERTScore and STS,
// plus corpus-level reporting with their arithmetic mean. All metrics share
// one tokenizer: lowercase, strip punctuation, split on whitespace.

#ifndef SCRIPTKIT_METRICS_HPP_
#define SCRIPTKIT_METRICS_HPP_

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "scriptkit/backends.hpp"
#include "scriptkit/common.hpp"
#include "scriptkit/corpus.hpp"

namespace scriptkit {

using TokenSeq = std::vector<std::string>;

// ---------------------------------------------------------------------------
// BLEU
// ---------------------------------------------------------------------------

inline constexpr double kBleuEpsilon = 1e-9;

/// Modified n-gram precision with brevity penalty, geometric mean over orders
/// 1..n. Zero-count orders are smoothed with the fixed epsilon.
inline double bleu_n(std::span<const std::string> reference, std::span<const std::string> hypothesis, int n) {
  if (n < 1 || n > 4) throw Error("metrics", "BLEU order must be in 1..4");
  if (hypothesis.empty()) return 0.0;

  double log_sum = 0.0;
  for (int order = 1; order <= n; ++order) {
    std::map<std::string, std::size_t> ref_counts;
    for (std::size_t i = 0; i + order <= reference.size(); ++i) {
      std::string gram;
      for (int j = 0; j < order; ++j) gram += reference[i + j] + "\x1f";
      ref_counts[gram]++;
    }
    std::map<std::string, std::size_t> hyp_counts;
    std::size_t total = 0;
    for (std::size_t i = 0; i + order <= hypothesis.size(); ++i) {
      std::string gram;
      for (int j = 0; j < order; ++j) gram += hypothesis[i + j] + "\x1f";
      hyp_counts[gram]++;
      ++total;
    }
    std::size_t clipped = 0;
    for (const auto &[gram, count] : hyp_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) clipped += std::min(count, it->second);
    }
    double p = total == 0 ? kBleuEpsilon
                          : (static_cast<double>(clipped) + kBleuEpsilon) /
                                (static_cast<double>(total) + kBleuEpsilon);
    log_sum += std::log(p);
  }
  double brevity = 1.0;
  if (hypothesis.size() < reference.size()) {
    brevity = std::exp(1.0 - static_cast<double>(reference.size()) / static_cast<double>(hypothesis.size()));
  }
  return brevity * std::exp(log_sum / static_cast<double>(n));
}

inline double bleu_n(const std::string &reference, const std::string &hypothesis, int n) {
  TokenSeq ref = tokenize(reference), hyp = tokenize(hypothesis);
  return bleu_n(ref, hyp, n);
}

// ---------------------------------------------------------------------------
// ROUGE-L
// ---------------------------------------------------------------------------

inline std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// LCS-based F1 (beta = 1): P = LCS/|hyp|, R = LCS/|ref|.
inline double rouge_l(std::span<const std::string> reference, std::span<const std::string> hypothesis) {
  if (reference.empty() || hypothesis.empty()) return 0.0;
  const double lcs = static_cast<double>(lcs_length(reference, hypothesis));
  if (lcs == 0.0) return 0.0;
  const double p = lcs / static_cast<double>(hypothesis.size());
  const double r = lcs / static_cast<double>(reference.size());
  return 2.0 * p * r / (p + r);
}

inline double rouge_l(const std::string &reference, const std::string &hypothesis) {
  TokenSeq ref = tokenize(reference), hyp = tokenize(hypothesis);
  return rouge_l(ref, hyp);
}

// ---------------------------------------------------------------------------
// METEOR
// ---------------------------------------------------------------------------

/// Lightweight suffix stemmer used by METEOR's second matching stage.
inline std::string light_stem(const std::string &token) {
  static const std::array<const char *, 5> kSuffixes = {"ing", "ed", "es", "ly", "s"};
  for (const char *suffix : kSuffixes) {
    std::size_t len = std::char_traits<char>::length(suffix);
    if (token.size() >= len + 3 && token.compare(token.size() - len, len, suffix) == 0) {
      return token.substr(0, token.size() - len);
    }
  }
  return token;
}

/// Unigram-alignment METEOR with exact and stem matching stages, recall
/// weight 9 and fragmentation penalty 0.5 * (chunks/matches)^3. The WordNet
/// synonym stage of the reference tool is intentionally not included.
inline double meteor(std::span<const std::string> reference, std::span<const std::string> hypothesis) {
  if (reference.empty() || hypothesis.empty()) return 0.0;
  std::vector<int> hyp_to_ref(hypothesis.size(), -1);
  std::vector<bool> ref_used(reference.size(), false);

  // Stage 1: exact matches, earliest unmatched reference token first.
  for (std::size_t i = 0; i < hypothesis.size(); ++i) {
    for (std::size_t j = 0; j < reference.size(); ++j) {
      if (!ref_used[j] && reference[j] == hypothesis[i]) {
        hyp_to_ref[i] = static_cast<int>(j);
        ref_used[j] = true;
        break;
      }
    }
  }
  // Stage 2: stem matches on what is left.
  for (std::size_t i = 0; i < hypothesis.size(); ++i) {
    if (hyp_to_ref[i] != -1) continue;
    const std::string stem = light_stem(hypothesis[i]);
    for (std::size_t j = 0; j < reference.size(); ++j) {
      if (!ref_used[j] && light_stem(reference[j]) == stem) {
        hyp_to_ref[i] = static_cast<int>(j);
        ref_used[j] = true;
        break;
      }
    }
  }

  std::size_t matches = 0;
  for (int j : hyp_to_ref) matches += (j != -1);
  if (matches == 0) return 0.0;

  const double m = static_cast<double>(matches);
  const double precision = m / static_cast<double>(hypothesis.size());
  const double recall = m / static_cast<double>(reference.size());
  const double f_mean = 10.0 * precision * recall / (recall + 9.0 * precision);

  std::size_t chunks = 0;
  int prev_ref = -2;
  for (std::size_t i = 0; i < hypothesis.size(); ++i) {
    if (hyp_to_ref[i] == -1) continue;
    if (hyp_to_ref[i] != prev_ref + 1) ++chunks;
    prev_ref = hyp_to_ref[i];
  }
  const double penalty = 0.5 * std::pow(static_cast<double>(chunks) / m, 3.0);
  return f_mean * (1.0 - penalty);
}

inline double meteor(const std::string &reference, const std::string &hypothesis) {
  TokenSeq ref = tokenize(reference), hyp = tokenize(hypothesis);
  return meteor(ref, hyp);
}

// ---------------------------------------------------------------------------
// Embedding metrics
// ---------------------------------------------------------------------------

/// Greedy token-level cosine matching F1 over the scorer's token embeddings.
inline double bert_score(const std::string &reference, const std::string &hypothesis,
                         const EmbeddingScorer &scorer) {
  TokenSeq ref = tokenize(reference), hyp = tokenize(hypothesis);
  if (ref.empty() && hyp.empty()) return 1.0;
  if (ref.empty() || hyp.empty()) return 0.0;
  std::vector<SparseVec> ref_vecs, hyp_vecs;
  for (const auto &t : ref) ref_vecs.push_back(scorer.embed_token(t));
  for (const auto &t : hyp) hyp_vecs.push_back(scorer.embed_token(t));
  auto side = [](const std::vector<SparseVec> &from, const std::vector<SparseVec> &to) {
    double total = 0.0;
    for (const SparseVec &f : from) {
      double best = 0.0;
      for (const SparseVec &t : to) best = std::max(best, cosine(f, t));
      total += best;
    }
    return total / static_cast<double>(from.size());
  };
  const double p = side(hyp_vecs, ref_vecs);
  const double r = side(ref_vecs, hyp_vecs);
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

/// Cosine of the sentence embeddings rescaled from [-1, 1] to [0, 1].
inline double sts(const std::string &reference, const std::string &hypothesis,
                  const EmbeddingScorer &scorer) {
  SparseVec a = scorer.embed_sentence(reference);
  SparseVec b = scorer.embed_sentence(hypothesis);
  if (a.empty() && b.empty()) return 1.0;
  return (cosine(a, b) + 1.0) / 2.0;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline constexpr std::array<const char *, 8> kMetricNames = {
    "bleu1", "bleu2", "bleu3", "bleu4", "meteor", "rouge_l", "bert_score", "sts"};

/// The eight metric values in percent plus their arithmetic mean.
struct MetricReport {
  std::array<double, 8> values{};  // percents, ordered as kMetricNames
  double average = 0.0;

  double recomputed_average() const {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
  }
};

inline json to_json(const MetricReport &r) {
  json out;
  for (std::size_t i = 0; i < kMetricNames.size(); ++i) out[kMetricNames[i]] = r.values[i];
  out["average"] = r.average;
  return out;
}

/// All eight metrics for one reference/hypothesis pair, as fractions in [0,1].
inline std::array<double, 8> score_pair(const std::string &reference, const std::string &hypothesis,
                                        const EmbeddingScorer &scorer) {
  return {bleu_n(reference, hypothesis, 1), bleu_n(reference, hypothesis, 2),
          bleu_n(reference, hypothesis, 3), bleu_n(reference, hypothesis, 4),
          meteor(reference, hypothesis),    rouge_l(reference, hypothesis),
          bert_score(reference, hypothesis, scorer), sts(reference, hypothesis, scorer)};
}

struct InstanceScore {
  std::string id;
  std::array<double, 8> values{};  // fractions
};

struct EvaluationResult {
  MetricReport report;
  std::vector<InstanceScore> instances;
};

/// Corpus scores are per-instance means, reported in percent; the average
/// column is computed last from the eight corpus values.
inline EvaluationResult evaluate_pairs(const std::vector<std::pair<std::string, std::string>> &ref_hyp,
                                       const EmbeddingScorer &scorer,
                                       const std::vector<std::string> *ids = nullptr) {
  if (ref_hyp.empty()) throw Error("evaluate", "nothing to evaluate");
  EvaluationResult result;
  std::array<double, 8> sums{};
  for (std::size_t i = 0; i < ref_hyp.size(); ++i) {
    InstanceScore inst;
    inst.id = ids ? (*ids)[i] : std::to_string(i);
    inst.values = score_pair(ref_hyp[i].first, ref_hyp[i].second, scorer);
    for (std::size_t m = 0; m < 8; ++m) sums[m] += inst.values[m];
    result.instances.push_back(std::move(inst));
  }
  for (std::size_t m = 0; m < 8; ++m) {
    result.report.values[m] = 100.0 * sums[m] / static_cast<double>(ref_hyp.size());
  }
  result.report.average = result.report.recomputed_average();
  return result;
}

/// Multi-step scripts are flattened to one text before scoring; the joiner
/// disappears under tokenization so it never matches as a token.
inline std::string flatten_script(const std::vector<std::string> &steps) {
  return join(steps, " ; ");
}

/// Scores a predictions JSONL file against a gold instance file. Gold lines
/// holding "script" are treated as full-script instances (predictions carry
/// "script" too); gold lines holding "target_step" as next-step instances
/// (predictions carry "step"). Prediction and gold id sets must match.
inline EvaluationResult evaluate_files(const std::string &pred_path, const std::string &gold_path,
                                       const EmbeddingScorer &scorer) {
  std::map<std::string, std::string> gold;  // id -> flattened reference text
  std::vector<std::string> gold_order;
  for_each_jsonl(gold_path, [&](const json &obj, std::size_t) {
    std::string id = detail::require_string(obj, "id");
    std::string text;
    if (obj.contains("script")) {
      std::vector<std::string> steps = obj.at("script").get<std::vector<std::string>>();
      text = flatten_script(steps);
    } else if (obj.contains("target_step")) {
      text = obj.at("target_step").get<std::string>();
    } else {
      throw Error("schema", "gold line carries neither \"script\" nor \"target_step\"");
    }
    if (gold.count(id)) throw Error("schema", "duplicate gold id \"" + id + "\"");
    gold[id] = std::move(text);
    gold_order.push_back(id);
  });
  if (gold.empty()) throw Error("evaluate", "gold file " + gold_path + " is empty");

  std::map<std::string, std::string> preds;
  for_each_jsonl(pred_path, [&](const json &obj, std::size_t) {
    std::string id = detail::require_string(obj, "id");
    std::string text;
    if (obj.contains("script")) {
      std::vector<std::string> steps = obj.at("script").get<std::vector<std::string>>();
      text = flatten_script(steps);
    } else if (obj.contains("step")) {
      text = obj.at("step").get<std::string>();
    } else {
      throw Error("schema", "prediction line carries neither \"script\" nor \"step\"");
    }
    if (preds.count(id)) throw Error("schema", "duplicate prediction id \"" + id + "\"");
    preds[id] = std::move(text);
  });
  if (preds.empty()) throw Error("evaluate", "predictions file " + pred_path + " is empty");

  std::vector<std::string> missing, extra;
  for (const auto &[id, _] : gold) {
    if (!preds.count(id)) missing.push_back(id);
  }
  for (const auto &[id, _] : preds) {
    if (!gold.count(id)) extra.push_back(id);
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "prediction/gold id mismatch;";
    if (!missing.empty()) msg += " missing predictions for: " + join(missing, ", ") + ";";
    if (!extra.empty()) msg += " predictions without gold: " + join(extra, ", ");
    throw Error("evaluate", msg);
  }

  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(gold_order.size());
  for (const std::string &id : gold_order) pairs.emplace_back(gold.at(id), preds.at(id));
  return evaluate_pairs(pairs, scorer, &gold_order);
}

/// One row of the results table (percent, two decimals).
inline std::string markdown_report(const std::string &model_name, const MetricReport &report) {
  std::ostringstream out;
  out << "| Model | BLEU-1 | BLEU-2 | BLEU-3 | BLEU-4 | METEOR | ROUGE-L | BERTScore | STS | Average |\n";
  out << "|---|---|---|---|---|---|---|---|---|---|\n";
  out << "| " << model_name << " |";
  out.setf(std::ios::fixed);
  out.precision(2);
  for (double v : report.values) out << " " << v << " |";
  out << " " << report.average << " |\n";
  return out.str();
}

}  // namespace scriptkit

#endif  // SCRIPTKIT_METRICS_HPP_
