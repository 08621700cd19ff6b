// transeg/oracle.hpp

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

// Exhaustive and dynamic-programming reference computations at desk scale.
// Every full sum has two implementations (enumeration and forward DP) so each
// can check the other.

#ifndef TRANSEG_ORACLE_HPP_
#define TRANSEG_ORACLE_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "transeg/lm.hpp"
#include "transeg/models.hpp"

namespace transeg {

/// Largest number of alignments enumerate_paths will produce.
inline constexpr std::uint64_t kEnumerationGuard = 1000000;

struct ScoredPath {
  AlignmentPath path;
  LogScore score;
};

struct ScoredSequence {
  LabelSeq labels;
  LogScore score = kZeroProb;
  std::optional<Segmentation> segmentation;  // best alignment, when known
};

/// -ln prod_u q(y_u | ...) along one alignment.
LogScore path_score(const TransducerScorer& model, const AlignmentPath& path);

/// -ln of the segmental factorization along one segmentation, including the
/// final sentence-end segment.
LogScore segmentation_score(const SegmentalScorer& model, const Segmentation& seg);

/// All alignments of `labels`, in lexicographic boundary order. Throws
/// GuardExceeded beyond kEnumerationGuard alignments.
std::vector<ScoredPath> enumerate_paths(const TransducerScorer& model,
                                        std::span<const Label> labels);

enum class SumMethod { kEnumerate, kDynamic };

LogScore full_sum_transducer(const TransducerScorer& model, std::span<const Label> labels,
                             SumMethod method = SumMethod::kDynamic);

LogScore full_sum_segmental(const SegmentalScorer& model, std::span<const Label> labels,
                            SumMethod method = SumMethod::kDynamic);

/// Largest recombined lattice exact_best will search.
inline constexpr std::int64_t kBestSearchGuard = 50000000;

/// argmin over (labels, alignment) of path score + lm_scale * LM score.
/// Uniform-cost search over the lattice of (t, t_prev, last-K labels) states,
/// K covering both the model and LM contexts. Ties are broken by label ids
/// lexicographically (shorter first), then earliest boundaries, among the
/// prefixes competing for a lattice state. Factors above one by more than
/// 1e-9 are rejected.
ScoredSequence exact_best(const TransducerScorer& model, const LmFusion& lm = {},
                          std::int64_t guard = kBestSearchGuard);
/// Runs on the transducer view of the segmental model; per-alignment scores
/// are identical.
ScoredSequence exact_best(std::shared_ptr<const SegmentalScorer> model, const LmFusion& lm = {},
                          std::int64_t guard = kBestSearchGuard);

struct MassReport {
  LogScore mass = kZeroProb;
  /// Every label sequence with S <= max_labels and its full-sum score, in
  /// (length, lexicographic) order.
  std::vector<ScoredSequence> contributions;
  /// True when every label sequence was covered; otherwise mass is a lower
  /// bound.
  bool exact = false;
  int max_labels = 0;
};

inline constexpr int kDefaultMassLabels = 4;

/// Strict monotonic models are covered exactly (S <= T); RNNT mass is
/// summed over S <= max_labels.
MassReport total_mass(const TransducerScorer& model, int max_labels = kDefaultMassLabels);
MassReport total_mass(const SegmentalScorer& model, int max_labels = kDefaultMassLabels);

}  // namespace transeg

#endif  // TRANSEG_ORACLE_HPP_
