// tests/metrics_test.cpp

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

#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "scriptkit/metrics.hpp"
#include "testutil.hpp"

using namespace scriptkit;
using testutil::TempDir;

namespace {

// ---------------------------------------------------------------------------
// Independent oracles. These deliberately avoid the implementation's data
// structures: plain recursion and quadratic scans.
// ---------------------------------------------------------------------------

std::size_t oracle_lcs(const std::vector<std::string> &a, const std::vector<std::string> &b,
                       std::size_t i, std::size_t j) {
  if (i == a.size() || j == b.size()) return 0;
  if (a[i] == b[j]) return 1 + oracle_lcs(a, b, i + 1, j + 1);
  return std::max(oracle_lcs(a, b, i + 1, j), oracle_lcs(a, b, i, j + 1));
}

double oracle_rouge(const std::vector<std::string> &ref, const std::vector<std::string> &hyp) {
  if (ref.empty() || hyp.empty()) return 0.0;
  double lcs = static_cast<double>(oracle_lcs(ref, hyp, 0, 0));
  if (lcs == 0.0) return 0.0;
  double p = lcs / hyp.size(), r = lcs / ref.size();
  return 2 * p * r / (p + r);
}

// Clipped n-gram precision by direct scanning, no hash maps.
double oracle_clipped_precision(const std::vector<std::string> &ref,
                                const std::vector<std::string> &hyp, int order) {
  if (hyp.size() < static_cast<std::size_t>(order)) return 1e-9;
  auto gram_at = [order](const std::vector<std::string> &s, std::size_t i, std::size_t j) {
    for (int t = 0; t < order; ++t) {
      if (s[i + t] != s[j + t]) return false;
    }
    return true;
  };
  auto cross_gram = [order](const std::vector<std::string> &a, std::size_t i,
                            const std::vector<std::string> &b, std::size_t j) {
    for (int t = 0; t < order; ++t) {
      if (a[i + t] != b[j + t]) return false;
    }
    return true;
  };
  const std::size_t h = hyp.size() - order + 1;
  std::size_t clipped = 0;
  for (std::size_t i = 0; i < h; ++i) {
    bool first = true;  // count each distinct hyp n-gram once
    for (std::size_t j = 0; j < i; ++j) {
      if (gram_at(hyp, i, j)) {
        first = false;
        break;
      }
    }
    if (!first) continue;
    std::size_t hyp_count = 0;
    for (std::size_t j = 0; j < h; ++j) hyp_count += gram_at(hyp, i, j);
    std::size_t ref_count = 0;
    if (ref.size() >= static_cast<std::size_t>(order)) {
      for (std::size_t j = 0; j + order <= ref.size(); ++j) ref_count += cross_gram(hyp, i, ref, j);
    }
    clipped += std::min(hyp_count, ref_count);
  }
  if (clipped == 0) return 1e-9;
  return (static_cast<double>(clipped) + 1e-9) / (static_cast<double>(h) + 1e-9);
}

double oracle_bleu(const std::vector<std::string> &ref, const std::vector<std::string> &hyp, int n) {
  if (hyp.empty()) return 0.0;
  double log_sum = 0.0;
  for (int order = 1; order <= n; ++order) log_sum += std::log(oracle_clipped_precision(ref, hyp, order));
  double bp = hyp.size() < ref.size()
                  ? std::exp(1.0 - static_cast<double>(ref.size()) / static_cast<double>(hyp.size()))
                  : 1.0;
  return bp * std::exp(log_sum / n);
}

// ---------------------------------------------------------------------------

TEST(Bleu, IdenticalSentencesScoreOne) {
  const std::string s = "take the toast out and butter it";
  for (int n = 1; n <= 4; ++n) EXPECT_NEAR(bleu_n(s, s, n), 1.0, 1e-12);
}

TEST(Bleu, DisjointSentencesScoreNearZero) {
  for (int n = 1; n <= 4; ++n) {
    EXPECT_LT(bleu_n("alpha beta gamma delta", "one two three four", n), 1e-6);
  }
}

TEST(Bleu, HandCheckedClippingExample) {
  // ref "the cat sat on the mat", hyp "the cat the cat":
  // clipped unigrams: the -> min(2,2)=2, cat -> min(2,1)=1; p1 = 3/4
  // brevity penalty exp(1 - 6/4)
  const std::string ref = "the cat sat on the mat";
  const std::string hyp = "the cat the cat";
  double expected = ((3.0 + 1e-9) / (4.0 + 1e-9)) * std::exp(1.0 - 6.0 / 4.0);
  EXPECT_NEAR(bleu_n(ref, hyp, 1), expected, 1e-12);
  EXPECT_NEAR(bleu_n(ref, hyp, 1), oracle_bleu(tokenize(ref), tokenize(hyp), 1), 1e-12);
}

TEST(Bleu, EmptyHypothesisScoresZero) {
  EXPECT_DOUBLE_EQ(bleu_n("a b c", "", 2), 0.0);
}

TEST(Bleu, MatchesOracleOnRandomPairs) {
  SplitMix64 rng(2024);
  const std::vector<std::string> words = {"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> ref, hyp;
    for (std::size_t i = 0, n = 1 + rng.below(10); i < n; ++i) ref.push_back(words[rng.below(words.size())]);
    for (std::size_t i = 0, n = 1 + rng.below(10); i < n; ++i) hyp.push_back(words[rng.below(words.size())]);
    for (int n = 1; n <= 4; ++n) {
      EXPECT_NEAR(bleu_n(ref, hyp, n), oracle_bleu(ref, hyp, n), 1e-9)
          << "n=" << n << " ref=" << join(ref, " ") << " hyp=" << join(hyp, " ");
    }
  }
}

TEST(Bleu, NonIncreasingInOrder) {
  SplitMix64 rng(55);
  const std::vector<std::string> words = {"x", "y", "z"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> ref, hyp;
    for (std::size_t i = 0, n = 2 + rng.below(8); i < n; ++i) ref.push_back(words[rng.below(words.size())]);
    for (std::size_t i = 0, n = 2 + rng.below(8); i < n; ++i) hyp.push_back(words[rng.below(words.size())]);
    double prev = 2.0;
    for (int n = 1; n <= 4; ++n) {
      double cur = bleu_n(ref, hyp, n);
      EXPECT_LE(cur, prev + 1e-12);
      prev = cur;
    }
  }
}

TEST(RougeL, HandCheckedLcsExample) {
  // ref "a b c d", hyp "a c d": LCS 3, P 1.0, R 0.75, F 6/7
  EXPECT_NEAR(rouge_l("a b c d", "a c d"), 6.0 / 7.0, 1e-12);
  EXPECT_DOUBLE_EQ(rouge_l("same words here", "same words here"), 1.0);
  EXPECT_DOUBLE_EQ(rouge_l("abc def", "ghi jkl"), 0.0);
  EXPECT_DOUBLE_EQ(rouge_l("", "a"), 0.0);
  EXPECT_DOUBLE_EQ(rouge_l("a", ""), 0.0);
}

TEST(RougeL, MatchesBruteForceOracleOnShortPairs) {
  // exhaustive over a 3-token alphabet up to length 4 here; the acceptance
  // suite runs the full length-8 sweep
  const std::vector<std::string> alphabet = {"a", "b", "c"};
  std::vector<std::vector<std::string>> sentences = {{}};
  std::vector<std::vector<std::string>> frontier = {{}};
  for (int len = 1; len <= 4; ++len) {
    std::vector<std::vector<std::string>> next;
    for (const auto &s : frontier) {
      for (const auto &t : alphabet) {
        auto e = s;
        e.push_back(t);
        next.push_back(e);
        sentences.push_back(e);
      }
    }
    frontier = std::move(next);
  }
  for (const auto &ref : sentences) {
    for (const auto &hyp : sentences) {
      ASSERT_NEAR(rouge_l(ref, hyp), oracle_rouge(ref, hyp), 1e-12);
    }
  }
}

TEST(Meteor, IdentityMatchesClosedForm) {
  // identical sentences: F_mean 1, one chunk, penalty 0.5 * (1/m)^3
  const std::string s = "boil fresh water";
  EXPECT_NEAR(meteor(s, s), 1.0 - 0.5 / 27.0, 1e-12);
  const std::string longer = "take the toast out and butter it";
  EXPECT_NEAR(meteor(longer, longer), 1.0 - 0.5 / std::pow(7.0, 3.0), 1e-12);
}

TEST(Meteor, DisjointScoresZero) {
  EXPECT_DOUBLE_EQ(meteor("alpha beta", "gamma delta"), 0.0);
  EXPECT_DOUBLE_EQ(meteor("", "x"), 0.0);
}

TEST(Meteor, SingleSharedWordFormula) {
  // ref "a b c", hyp "a x y": m=1, P=R=1/3, F=1/3, chunks=1, penalty=1/2
  EXPECT_NEAR(meteor("a b c", "a x y"), (1.0 / 3.0) * 0.5, 1e-12);
}

TEST(Meteor, StemStageAlignsInflectedForms) {
  // "boiling" and "boiled" share the stem "boil"
  double with_stem = meteor("boiling water", "boiled water");
  EXPECT_GT(with_stem, meteor("boiling water", "cold milk"));
  EXPECT_GT(with_stem, 0.5);
}

TEST(EmbeddingMetrics, IdentityAndOrthogonality) {
  ToyEmbeddingScorer scorer;
  EXPECT_DOUBLE_EQ(bert_score("pour into a cup", "pour into a cup", scorer), 1.0);
  EXPECT_DOUBLE_EQ(sts("pour into a cup", "pour into a cup", scorer), 1.0);
  // disjoint token sets embed orthogonally; cosine 0 rescales to 0.5
  EXPECT_DOUBLE_EQ(sts("alpha beta", "gamma delta", scorer), 0.5);
  EXPECT_DOUBLE_EQ(bert_score("alpha beta", "gamma delta", scorer), 0.0);
}

TEST(EmbeddingMetrics, GoldenToyValues) {
  ToyEmbeddingScorer scorer;
  // 2 of 3 hypothesis tokens match, 2 of 4 reference tokens match:
  // P = 2/3, R = 2/4, F = 2PR/(P+R) = 4/7
  EXPECT_NEAR(bert_score("a b c d", "a b x", scorer), 4.0 / 7.0, 1e-12);
  // sentence vectors (1,1,1,1) and (1,1,1) over the hash axes share 3 axes:
  // cosine = 3 / (2 * sqrt(3)); sts rescales
  double cos = 3.0 / (2.0 * std::sqrt(3.0));
  EXPECT_NEAR(sts("a b c d", "a b c", scorer), (cos + 1.0) / 2.0, 1e-12);
}

TEST(Reports, AverageRecomputesFromFields) {
  std::vector<std::pair<std::string, std::string>> pairs = {
      {"boil fresh water ; steep one teabag", "boil fresh water ; steep one teabag"},
      {"pour into a cup", "pour into a mug"},
  };
  ToyEmbeddingScorer scorer;
  EvaluationResult result = evaluate_pairs(pairs, scorer);
  EXPECT_NEAR(result.report.average, result.report.recomputed_average(), 1e-9);
  ASSERT_EQ(result.instances.size(), 2u);
  // corpus values are the per-instance means
  for (std::size_t m = 0; m < 8; ++m) {
    double mean = 50.0 * (result.instances[0].values[m] + result.instances[1].values[m]);
    EXPECT_NEAR(result.report.values[m], mean, 1e-9);
  }
}

TEST(Reports, PerfectPredictionsScoreHundred) {
  TempDir tmp;
  const std::string gold_path = tmp.sub("gold.jsonl");
  const std::string pred_path = tmp.sub("pred.jsonl");
  {
    std::ofstream gold(gold_path), pred(pred_path);
    gold << R"({"id":"i1","goal":"g","video":{"uri":"v","frame_count":1,"fps":2.0},)"
         << R"("script":["boil fresh water","steep one teabag"],"article_id":"a","method_index":1,"split":"test"})"
         << "\n";
    pred << R"({"id":"i1","script":["boil fresh water","steep one teabag"]})" << "\n";
  }
  ToyEmbeddingScorer scorer;
  EvaluationResult result = evaluate_files(pred_path, gold_path, scorer);
  for (std::size_t m = 0; m < 8; ++m) {
    if (kMetricNames[m] == std::string("meteor")) {
      EXPECT_GT(result.report.values[m], 99.0);  // identity keeps its fragmentation penalty
    } else {
      EXPECT_NEAR(result.report.values[m], 100.0, 1e-9);
    }
  }
}

TEST(Reports, IdMismatchListsMissingIds) {
  TempDir tmp;
  const std::string gold_path = tmp.sub("gold.jsonl");
  const std::string pred_path = tmp.sub("pred.jsonl");
  {
    std::ofstream gold(gold_path), pred(pred_path);
    gold << R"({"id":"g1","target_step":"a"})" << "\n";
    gold << R"({"id":"g2","target_step":"b"})" << "\n";
    pred << R"({"id":"g1","step":"a"})" << "\n";
    pred << R"({"id":"zz","step":"b"})" << "\n";
  }
  ToyEmbeddingScorer scorer;
  try {
    evaluate_files(pred_path, gold_path, scorer);
    FAIL() << "expected id mismatch error";
  } catch (const Error &e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("g2"), std::string::npos);
    EXPECT_NE(msg.find("zz"), std::string::npos);
  }
}

TEST(Reports, EmptyPredictionsFileIsAnError) {
  TempDir tmp;
  const std::string gold_path = tmp.sub("gold.jsonl");
  const std::string pred_path = tmp.sub("pred.jsonl");
  std::ofstream(gold_path) << R"({"id":"g1","target_step":"a"})" << "\n";
  std::ofstream(pred_path).close();
  ToyEmbeddingScorer scorer;
  EXPECT_THROW(evaluate_files(pred_path, gold_path, scorer), Error);
}

TEST(Reports, MarkdownTableHasTwoDecimals) {
  MetricReport report;
  report.values = {10.0, 20.5, 30.25, 40.0, 50.0, 60.0, 70.0, 80.0};
  report.average = report.recomputed_average();
  std::string table = markdown_report("toy", report);
  EXPECT_NE(table.find("| toy | 10.00 | 20.50 | 30.25 |"), std::string::npos);
  EXPECT_NE(table.find("| 45.09 |"), std::string::npos);
}

TEST(Tokenization, LowercasesStripsPunctuationSplitsWhitespace) {
  EXPECT_EQ(tokenize("Pre-heat; the OVEN, please!"), (TokenSeq{"preheat", "the", "oven", "please"}));
  EXPECT_TRUE(tokenize("  ...  !!  ").empty());
  // the script flattener's joiner disappears entirely
  EXPECT_EQ(tokenize(flatten_script({"a b", "c"})), (TokenSeq{"a", "b", "c"}));
}

}  // namespace
