// include/scriptkit/common.hpp

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

#ifndef SCRIPTKIT_COMMON_HPP_
#define SCRIPTKIT_COMMON_HPP_

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace scriptkit {

/// Error type carried through the toolkit. `stage` labels the pipeline
/// stage that failed so CLI output can point at the right component.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
  Error(const std::string &stage, const std::string &msg)
      : std::runtime_error(stage + ": " + msg), stage_(stage) {}

  const std::string &stage() const { return stage_; }

 private:
  std::string stage_;
};

// The split token used to concatenate text inputs for the generators.
inline constexpr const char *kSepToken = "[SEP]";

// Start / end-of-sequence markers shared by the decoders.
inline constexpr const char *kBosToken = "<s>";
inline constexpr const char *kEosToken = "</s>";

inline std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

inline std::string trim(std::string_view s) {
  const char *ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return "";
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

/// Lowercases and strips ASCII punctuation. Bytes outside ASCII are kept
/// verbatim so multi-byte UTF-8 text passes through undamaged.
inline std::string normalize_token(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (unsigned char c : raw) {
    if (c < 0x80 && std::ispunct(c)) continue;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

/// Whitespace tokenization after lowercasing and punctuation stripping.
/// This is the tokenizer used artifact-wide (metrics, NLI, decoders).
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> toks;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      std::string t = normalize_token(text.substr(i, j - i));
      if (!t.empty()) toks.push_back(std::move(t));
    }
    i = j;
  }
  return toks;
}

/// Like tokenize() but preserves the [SEP] marker as its own token.
inline std::vector<std::string> tokenize_keep_sep(std::string_view text) {
  std::vector<std::string> toks;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) {
      std::string_view word = text.substr(i, j - i);
      if (word == kSepToken || word == "[sep]") {
        toks.emplace_back(kSepToken);
      } else {
        std::string t = normalize_token(word);
        if (!t.empty()) toks.push_back(std::move(t));
      }
    }
    i = j;
  }
  return toks;
}

inline std::string join(const std::vector<std::string> &parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

/// FNV-1a over an arbitrary byte sequence; used for frame fingerprints and
/// the toy embedding hash. Stable across platforms.
inline std::uint64_t fnv1a64(const void *data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto *p = static_cast<const unsigned char *>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ull) {
  return fnv1a64(s.data(), s.size(), seed);
}

/// Minimal xorshift-based PRNG with a fixed, documented sequence so shuffles
/// and samplers are reproducible across standard libraries and platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, bound) by rejection; bound must be nonzero.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * ((~0ull) / bound);
    std::uint64_t v;
    do {
      v = next();
    } while (v >= limit);
    return v % bound;
  }

  double unit() {  // [0, 1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/// Fisher-Yates with SplitMix64 draws; deterministic for a fixed seed.
template <typename T>
void seeded_shuffle(std::vector<T> &items, SplitMix64 &rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

/// Applies fn to 0..count-1 on up to `jobs` threads. Results are written by
/// index so output order never depends on scheduling. Exceptions from workers
/// are rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn &&fn) {
  if (count == 0) return;
  if (jobs <= 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  jobs = std::min<std::size_t>(jobs, count);
  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (unsigned t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = cursor.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto &th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace scriptkit

#endif  // SCRIPTKIT_COMMON_HPP_
