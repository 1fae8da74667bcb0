// tests/fusion_test.cpp

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

#include <gtest/gtest.h>

#include "scriptkit/distribution.hpp"
#include "scriptkit/predictor.hpp"
#include "testutil.hpp"

using namespace scriptkit;

namespace {

std::shared_ptr<const std::vector<std::string>> small_vocab() {
  return std::make_shared<std::vector<std::string>>(std::vector<std::string>{"x", "y"});
}

TokenDistribution make_dist(std::shared_ptr<const std::vector<std::string>> vocab,
                            std::vector<double> probs) {
  return TokenDistribution{std::move(vocab), std::move(probs)};
}

TokenDistribution random_dist(std::shared_ptr<const std::vector<std::string>> vocab, SplitMix64 &rng) {
  std::vector<double> probs(vocab->size());
  double sum = 0.0;
  for (double &p : probs) {
    p = rng.unit() + 1e-6;
    sum += p;
  }
  for (double &p : probs) p /= sum;
  return make_dist(std::move(vocab), std::move(probs));
}

TEST(Fuse, ZeroConfidenceIsIdentity) {
  auto vocab = small_vocab();
  TokenDistribution g = make_dist(vocab, {0.7, 0.3});
  TokenDistribution k = make_dist(vocab, {0.2, 0.8});
  TokenDistribution f = fuse(g, k, 0.0);
  EXPECT_EQ(f.probs, g.probs);  // bitwise
}

TEST(Fuse, EqualInputsAreAFixedPoint) {
  auto vocab = small_vocab();
  TokenDistribution g = make_dist(vocab, {0.25, 0.75});
  for (double c : {0.0, 0.3, 0.5, 1.0}) {
    TokenDistribution f = fuse(g, g, c);
    for (std::size_t i = 0; i < f.probs.size(); ++i) EXPECT_NEAR(f.probs[i], g.probs[i], 1e-12);
  }
}

TEST(Fuse, HandComputedExample) {
  auto vocab = small_vocab();
  TokenDistribution g = make_dist(vocab, {0.7, 0.3});
  TokenDistribution k = make_dist(vocab, {0.2, 0.8});
  TokenDistribution f = fuse(g, k, 0.5);
  // (0.7 + 0.5*0.2) / 1.5 = 8/15, (0.3 + 0.5*0.8) / 1.5 = 7/15
  EXPECT_NEAR(f.probs[0], 8.0 / 15.0, 1e-15);
  EXPECT_NEAR(f.probs[1], 7.0 / 15.0, 1e-15);
}

TEST(Fuse, RejectsBadInputs) {
  auto vocab = small_vocab();
  TokenDistribution g = make_dist(vocab, {0.7, 0.3});
  TokenDistribution k = make_dist(vocab, {0.2, 0.8});
  EXPECT_THROW(fuse(g, k, -0.1), Error);
  EXPECT_THROW(fuse(g, k, 1.1), Error);
  auto other = std::make_shared<std::vector<std::string>>(std::vector<std::string>{"x", "z"});
  EXPECT_THROW(fuse(g, make_dist(other, {0.2, 0.8}), 0.5), Error);
}

TEST(Fuse, StaysInSimplexAndPreservesArgmaxOfRawSum) {
  SplitMix64 rng(123);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.below(30);
    auto vocab = std::make_shared<std::vector<std::string>>();
    for (std::size_t i = 0; i < n; ++i) vocab->push_back("t" + std::to_string(i));
    TokenDistribution g = random_dist(vocab, rng);
    TokenDistribution k = random_dist(vocab, rng);
    const double c = rng.unit();
    TokenDistribution f = fuse(g, k, c);
    EXPECT_TRUE(f.valid());
    std::size_t raw_best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (g.probs[i] + c * k.probs[i] > g.probs[raw_best] + c * k.probs[raw_best]) raw_best = i;
    }
    EXPECT_EQ(f.argmax(), raw_best);
  }
}

// Where the knowledge decoder puts more mass than the plain one, the fused
// probability grows with c.
TEST(Fuse, MonotoneTowardKnowledge) {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(10);
    auto vocab = std::make_shared<std::vector<std::string>>();
    for (std::size_t i = 0; i < n; ++i) vocab->push_back("t" + std::to_string(i));
    TokenDistribution g = random_dist(vocab, rng);
    TokenDistribution k = random_dist(vocab, rng);
    double c1 = rng.unit(), c2 = rng.unit();
    if (c1 > c2) std::swap(c1, c2);
    TokenDistribution f1 = fuse(g, k, c1);
    TokenDistribution f2 = fuse(g, k, c2);
    for (std::size_t i = 0; i < n; ++i) {
      if (k.probs[i] > g.probs[i]) {
        EXPECT_GE(f2.probs[i] + 1e-15, f1.probs[i]);
      }
    }
  }
}

TEST(Confidence, EmptyKnowledgeScoresZero) {
  ToyNliScorer nli;
  ConfidenceScore c = confidence("make tea", {"boil water"}, std::nullopt, nli);
  EXPECT_DOUBLE_EQ(c.value, 0.0);
  EXPECT_TRUE(c.per_step.empty());
  InstructionalKnowledge empty;
  c = confidence("make tea", {}, empty, nli);
  EXPECT_DOUBLE_EQ(c.value, 0.0);
}

TEST(Confidence, FullyCoveredStepScoresOne) {
  ToyNliScorer nli;
  InstructionalKnowledge k;
  k.steps = {"boil the water"};
  ConfidenceScore c = confidence("make tea", {"boil the water carefully"}, k, nli);
  EXPECT_DOUBLE_EQ(c.value, 1.0);
}

TEST(Confidence, TakesTheMaximumPerStepScore) {
  // Mock scorer returning fixed values per hypothesis.
  class FixedNli : public NliScorer {
   public:
    double entail(const std::string &, const std::string &hyp) const override {
      if (hyp == "p1") return 0.2;
      if (hyp == "p2") return 0.7;
      return 0.4;
    }
  };
  FixedNli nli;
  InstructionalKnowledge k;
  k.steps = {"p1", "p2", "p3"};
  ConfidenceScore c = confidence("goal", {}, k, nli);
  EXPECT_DOUBLE_EQ(c.value, 0.7);
  ASSERT_EQ(c.per_step.size(), 3u);
  EXPECT_DOUBLE_EQ(c.per_step[0].second, 0.2);
  EXPECT_DOUBLE_EQ(c.per_step[1].second, 0.7);
  EXPECT_DOUBLE_EQ(c.per_step[2].second, 0.4);
}

// Confidence takes a max over per-step scores, so knowledge order is
// irrelevant.
TEST(Confidence, PermutationInvariant) {
  ToyNliScorer nli;
  InstructionalKnowledge k;
  k.steps = {"boil fresh water", "pour into a cup", "steep one teabag"};
  std::vector<std::string> preceding = {"boil fresh water", "steep one teabag"};
  double base = confidence("make tea", preceding, k, nli).value;
  std::sort(k.steps.begin(), k.steps.end());
  do {
    EXPECT_DOUBLE_EQ(confidence("make tea", preceding, k, nli).value, base);
  } while (std::next_permutation(k.steps.begin(), k.steps.end()));
}

}  // namespace
