// include/scriptkit/decoding.hpp

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

#ifndef SCRIPTKIT_DECODING_HPP_
#define SCRIPTKIT_DECODING_HPP_

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "scriptkit/common.hpp"
#include "scriptkit/distribution.hpp"

namespace scriptkit {

enum class DecodeStrategy { kGreedy, kBeam };

struct GenerationConfig {
  DecodeStrategy decode_strategy = DecodeStrategy::kGreedy;
  int beam_width = 1;  // 1 exactly when greedy
  int max_steps = 16;
  int max_tokens_per_step = 24;
  std::string step_separator_token = kSepToken;
  std::string eos_token = kEosToken;

  void validate() const {
    if (beam_width < 1) throw Error("decode", "beam_width must be >= 1");
    if (decode_strategy == DecodeStrategy::kGreedy && beam_width != 1) {
      throw Error("decode", "beam_width must be 1 for greedy decoding");
    }
    if (max_steps < 1 || max_tokens_per_step < 1) {
      throw Error("decode", "max_steps and max_tokens_per_step must be >= 1");
    }
  }

  std::size_t max_total_tokens() const {
    return static_cast<std::size_t>(max_steps) * (static_cast<std::size_t>(max_tokens_per_step) + 1);
  }
};

/// Yields the next-token distribution for a generated prefix.
using DistFn = std::function<TokenDistribution(const std::vector<std::string> &prefix)>;

namespace detail {

inline void check_dist(const TokenDistribution &dist) {
  if (!dist.valid()) throw Error("decode", "decoder returned an invalid distribution");
}

inline int find_token(const std::vector<std::string> &vocab, const std::string &token) {
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (vocab[i] == token) return static_cast<int>(i);
  }
  return -1;
}

struct Beam {
  std::vector<std::size_t> tokens;
  double log_sum = 0.0;
  // Normalized over emitted tokens plus the end token when finished.
  double score(bool finished) const {
    std::size_t len = tokens.size() + (finished ? 1 : 0);
    return len == 0 ? 0.0 : log_sum / static_cast<double>(len);
  }
};

inline bool lex_less(const std::vector<std::size_t> &a, const std::vector<std::size_t> &b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace detail

/// Greedy decode: argmax at every step with ties resolved to the lowest
/// vocabulary index; stops at the end token or the length cap.
inline std::vector<std::string> greedy_decode(const DistFn &dist_fn, const GenerationConfig &config) {
  std::vector<std::string> out;
  const std::size_t cap = config.max_total_tokens();
  while (out.size() < cap) {
    TokenDistribution dist = dist_fn(out);
    detail::check_dist(dist);
    const std::string &tok = (*dist.vocab)[dist.argmax()];
    if (tok == config.eos_token) break;
    out.push_back(tok);
  }
  return out;
}

/// Length-normalized beam search. Finished hypotheses are set aside in a
/// candidate pool rather than holding a beam slot; the answer is the pooled
/// hypothesis with the best mean log-probability, ties resolved toward the
/// lexicographically smaller token-index sequence (so a tie falls to the
/// lowest vocabulary index, matching greedy).
inline std::vector<std::string> beam_decode(const DistFn &dist_fn, const GenerationConfig &config) {
  const std::size_t cap = config.max_total_tokens();
  const std::size_t width = static_cast<std::size_t>(config.beam_width);

  std::vector<detail::Beam> live{detail::Beam{}};
  std::vector<std::pair<detail::Beam, bool>> pool;  // (beam, finished-with-eos)
  std::vector<std::string> vocab_cache;
  int eos_index = -2;

  auto prefix_of = [&](const detail::Beam &b) {
    std::vector<std::string> prefix;
    prefix.reserve(b.tokens.size());
    for (std::size_t idx : b.tokens) prefix.push_back(vocab_cache[idx]);
    return prefix;
  };

  for (std::size_t depth = 0; depth < cap && !live.empty(); ++depth) {
    std::vector<detail::Beam> candidates;
    for (const detail::Beam &beam : live) {
      // At depth 0 the only live beam is empty, so prefix_of never needs the
      // vocabulary before the first call resolves it.
      TokenDistribution dist = dist_fn(prefix_of(beam));
      detail::check_dist(dist);
      if (eos_index == -2) {
        vocab_cache = *dist.vocab;
        eos_index = detail::find_token(vocab_cache, config.eos_token);
      } else if (*dist.vocab != vocab_cache) {
        throw Error("decode", "decoder changed its vocabulary mid-run");
      }
      for (std::size_t t = 0; t < dist.probs.size(); ++t) {
        detail::Beam next = beam;
        next.tokens.push_back(t);
        next.log_sum += std::log(dist.probs[t]);
        if (static_cast<int>(t) == eos_index) {
          detail::Beam done = beam;
          done.log_sum = next.log_sum;  // include the eos term in the score
          pool.emplace_back(detail::Beam{done.tokens, done.log_sum}, true);
        } else {
          candidates.push_back(std::move(next));
        }
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const detail::Beam &a, const detail::Beam &b) {
      double sa = a.score(false), sb = b.score(false);
      if (sa != sb) return sa > sb;
      return detail::lex_less(a.tokens, b.tokens);
    });
    if (candidates.size() > width) candidates.resize(width);
    live = std::move(candidates);
  }
  for (detail::Beam &beam : live) pool.emplace_back(std::move(beam), false);

  if (pool.empty()) return {};
  const std::pair<detail::Beam, bool> *best = &pool[0];
  for (const auto &cand : pool) {
    double sc = cand.first.score(cand.second);
    double sb = best->first.score(best->second);
    if (sc > sb || (sc == sb && detail::lex_less(cand.first.tokens, best->first.tokens))) {
      best = &cand;
    }
  }
  std::vector<std::string> out;
  out.reserve(best->first.tokens.size());
  for (std::size_t idx : best->first.tokens) out.push_back(vocab_cache[idx]);
  return out;
}

/// Decodes one token stream with the configured strategy.
inline std::vector<std::string> decode(const DistFn &dist_fn, const GenerationConfig &config) {
  config.validate();
  return config.decode_strategy == DecodeStrategy::kGreedy ? greedy_decode(dist_fn, config)
                                                           : beam_decode(dist_fn, config);
}

/// Splits a decoded token stream into step strings at the separator token,
/// dropping empty steps.
inline std::vector<std::string> split_steps(const std::vector<std::string> &tokens,
                                            const GenerationConfig &config) {
  std::vector<std::string> steps;
  std::vector<std::string> current;
  auto flush = [&]() {
    if (!current.empty()) {
      steps.push_back(join(current, " "));
      current.clear();
    }
  };
  for (const std::string &tok : tokens) {
    if (tok == config.step_separator_token) {
      flush();
    } else {
      current.push_back(tok);
    }
  }
  flush();
  if (steps.size() > static_cast<std::size_t>(config.max_steps)) {
    steps.resize(static_cast<std::size_t>(config.max_steps));
  }
  return steps;
}

}  // namespace scriptkit

#endif  // SCRIPTKIT_DECODING_HPP_
