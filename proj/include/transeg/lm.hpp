// transeg/lm.hpp

// Copyright 2026 The transeg Authors
//
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

#ifndef TRANSEG_LM_HPP_
#define TRANSEG_LM_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "transeg/models.hpp"

namespace transeg {

/// Explicit n-gram table over the label units, no backoff. Rows are indexed by
/// the last n-1 labels (begin padded) and distribute over V plus sentence end.
class NGramLM {
 public:
  NGramLM(Vocabulary vocab, int order);

  static NGramLM uniform(Vocabulary vocab, int order);

  int order() const { return order_; }
  const Vocabulary& vocabulary() const { return vocab_; }
  const ContextCodec& codec() const { return codec_; }

  const Distribution& row(int ctx) const;
  void set_row(int ctx, Distribution row);

  /// -ln p(next | history); next is a label or kSentenceEnd. Throws
  /// DomainError for labels outside the vocabulary.
  LogScore score(std::span<const Label> history, Label next) const;

  /// Well-formed context indices in canonical order.
  std::vector<int> contexts() const;

 private:
  Vocabulary vocab_;
  int order_;
  ContextCodec codec_;
  std::vector<Distribution> rows_;
};

/// sum_s -ln p(a_s | ctx) - ln p(# | final ctx).
LogScore lm_score(const NGramLM& lm, std::span<const Label> labels);

/// Log-linear LM term added on label emission and on sentence end. Inactive
/// (exactly zero cost) without an LM or with scale 0.
struct LmFusion {
  const NGramLM* lm = nullptr;
  double scale = 0.0;

  bool active() const { return lm != nullptr && scale != 0.0; }
  LogScore label_cost(std::span<const Label> history, Label a) const {
    return active() ? scale * lm->score(history, a) : LogScore::one();
  }
  LogScore end_cost(std::span<const Label> history) const {
    return active() ? scale * lm->score(history, kSentenceEnd) : LogScore::one();
  }
};

NGramLM generate_random_lm(std::uint64_t seed, const Vocabulary& vocab, int order,
                           double smoothness);

std::vector<Violation> validate_lm(const NGramLM& lm);

inline constexpr int kLmFormatVersion = 1;

std::string lm_to_json(const NGramLM& lm);
NGramLM lm_from_json(std::string_view text);
void save_lm(const NGramLM& lm, const std::string& path);
NGramLM load_lm(const std::string& path);

}  // namespace transeg

#endif  // TRANSEG_LM_HPP_
