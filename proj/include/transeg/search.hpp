// transeg/search.hpp

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

// Viterbi beam search. Time-synchronous search expands transducer paths frame
// by frame; label-synchronous search expands segmental hypotheses (a_s, t_s)
// segment by segment, either jointly or in two stages (boundary first, then
// label). Hypotheses are merged only when label sequence and position state
// coincide; there is no recombination of distinct label histories.

#ifndef TRANSEG_SEARCH_HPP_
#define TRANSEG_SEARCH_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "transeg/lm.hpp"
#include "transeg/models.hpp"
#include "transeg/oracle.hpp"

namespace transeg {

/// Unset members disable the corresponding pruning.
struct PruneConfig {
  std::optional<double> q_prune;     // score threshold relative to the step best
  std::optional<int> beam;           // B, global hypothesis beam
  std::optional<int> boundary_beam;  // B_t, per-hypothesis boundary beam

  static PruneConfig none() { return {}; }
  /// Throws DomainError unless Q > 0, B >= 1, B_t >= 1.
  void check() const;
  bool unpruned() const { return !q_prune && !beam && !boundary_beam; }
  std::string describe() const;
};

enum class Strategy { kTimeSync, kLabelSyncFull, kLabelSyncTwoStage };

std::string_view to_string(Strategy s);
Strategy strategy_from_string(std::string_view s);

struct Hypothesis {
  LabelSeq labels;
  std::vector<int> boundaries;
  int t_prev = 0;  // frame of the last label, t_0 if none
  LogScore score = LogScore::one();
  bool ended = false;
};

struct DecodeOptions {
  PruneConfig prune;
  const NGramLM* lm = nullptr;
  double lm_scale = 0.0;
  int nbest = 1;
  /// Time-synchronous RNNT: consecutive labels allowed within one frame.
  int max_labels_per_frame = 3;
  /// Label-synchronous step cap; 0 picks T + 1 (strict) or 4T + 16 (RNNT).
  int max_steps = 0;
  /// Hypotheses placed in the ended pool before search starts (testing).
  std::vector<Hypothesis> seed_ended;
};

struct DecodeStats {
  std::int64_t expanded = 0;   // hypotheses generated
  std::int64_t pruned = 0;     // hypotheses removed by pruning
  std::int64_t peak_beam = 0;  // largest live set after pruning
  int steps = 0;               // frames or segment steps executed
  bool step_cap_hit = false;
  double wall_ms = 0.0;
  /// Live hypotheses kept after pruning, per step.
  std::vector<std::int64_t> live_per_step;
};

struct DecodeResult {
  /// Sorted by score, then labels, then boundaries.
  std::vector<ScoredSequence> nbest;
  DecodeStats stats;
  /// Describes any view inserted by decode(); empty when none.
  std::string note;
  /// Identity of the model actually searched.
  const void* searched_model = nullptr;

  const ScoredSequence& best() const;
};

DecodeResult decode_time_sync(const TransducerScorer& model, const DecodeOptions& options);

DecodeResult decode_label_sync_full(const SegmentalScorer& model, const DecodeOptions& options);

DecodeResult decode_label_sync_two_stage(const SegmentalScorer& model,
                                         const DecodeOptions& options);

using ScorerPtr = std::variant<std::shared_ptr<const TransducerScorer>,
                               std::shared_ptr<const SegmentalScorer>>;

ScorerPtr as_scorer(const AnyModelPtr& model);

/// Runs `strategy` on either model kind, inserting the transform view when the
/// strategy's native kind differs. A view of the needed kind is unwrapped
/// instead of wrapped again.
DecodeResult decode(const ScorerPtr& model, Strategy strategy, const DecodeOptions& options);

}  // namespace transeg

#endif  // TRANSEG_SEARCH_HPP_
