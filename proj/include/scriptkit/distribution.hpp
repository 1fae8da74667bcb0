// include/scriptkit/distribution.hpp

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

#ifndef SCRIPTKIT_DISTRIBUTION_HPP_
#define SCRIPTKIT_DISTRIBUTION_HPP_

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "scriptkit/common.hpp"

namespace scriptkit {

/// Probability distribution over an ordered token vocabulary. The vocabulary
/// is shared between producers, so it is held by shared_ptr and compared by
/// pointer first, contents second.
struct TokenDistribution {
  std::shared_ptr<const std::vector<std::string>> vocab;
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }

  bool same_vocab(const TokenDistribution &o) const {
    if (vocab == o.vocab) return true;
    if (!vocab || !o.vocab) return false;
    return *vocab == *o.vocab;
  }

  /// Nonnegative entries summing to one within 1e-9.
  bool valid(double sum_tolerance = 1e-9) const {
    if (!vocab || vocab->size() != probs.size() || probs.empty()) return false;
    double sum = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0) || !std::isfinite(p)) return false;
      sum += p;
    }
    return std::fabs(sum - 1.0) <= sum_tolerance;
  }

  /// Index of the largest probability; ties resolve to the lowest index.
  std::size_t argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i) {
      if (probs[i] > probs[best]) best = i;
    }
    return best;
  }
};

/// Combines the knowledge-free distribution with the knowledge-aware one,
/// weighted by the confidence score c in [0, 1]:
///
///   D_f = (D_g + c * D_k) / (1 + c)
///
/// The (1 + c) normalization keeps the result a probability distribution and
/// never changes which token ranks highest, since it rescales every entry of
/// the raw sum D_g + c * D_k by the same positive factor.
inline TokenDistribution fuse(const TokenDistribution &d_g, const TokenDistribution &d_k, double c) {
  if (!(c >= 0.0) || !(c <= 1.0)) {
    throw Error("fuse", "confidence must be in [0, 1], got " + std::to_string(c));
  }
  if (!d_g.same_vocab(d_k)) throw Error("fuse", "distributions use different vocabularies");
  if (d_g.probs.size() != d_k.probs.size()) throw Error("fuse", "distribution sizes differ");
  TokenDistribution out;
  out.vocab = d_g.vocab;
  out.probs.resize(d_g.probs.size());
  const double denom = 1.0 + c;
  for (std::size_t i = 0; i < out.probs.size(); ++i) {
    out.probs[i] = (d_g.probs[i] + c * d_k.probs[i]) / denom;
  }
  return out;
}

}  // namespace scriptkit

#endif  // SCRIPTKIT_DISTRIBUTION_HPP_
