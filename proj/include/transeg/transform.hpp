// transeg/transform.hpp

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

// Exact rewrites between transducer and segmental models.
//
// Transducer -> segmental. With blank regarded as segment continuation, the
// boundary of segment s (starting after t_{s-1}) is distributed as
//
//   p(t_s | ...) = prod_{t in [t_{s-1}, t_s)} q(eps at t) * (1 - q(eps at t_s))
//
// where the product starts at t_{s-1} for RNNT (zero-length segments allowed)
// and at t_{s-1} + 1 for strict monotonic topologies. The label is the
// blank-renormalized label posterior at the boundary, q(a) / (1 - q(eps)).
// RNNT sentence end at t_{S+1} = T is the odds q(eps) / (1 - q(eps)) of the
// terminating blank and may exceed one. For strict monotonic topologies the
// sentence end is the pure continuation product prod_{t > t_S} q(eps at t),
// exposed as the boundary row's continuation mass.
//
// Segmental -> transducer. With S(t) the boundary mass beyond t (including
// continuation mass), blank is the survival ratio S(t) / S(t-1) and label a
// gets p(a | t) * p(t) / S(t-1). At t = T the terminating blank carries the
// sentence-end mass instead of survival.

#ifndef TRANSEG_TRANSFORM_HPP_
#define TRANSEG_TRANSFORM_HPP_

#include <memory>

#include "transeg/models.hpp"

namespace transeg {

/// Lazy segmental view of a transducer; nothing is cached.
class SegmentalView final : public SegmentalScorer {
 public:
  explicit SegmentalView(std::shared_ptr<const TransducerScorer> model);

  const Vocabulary& vocabulary() const override { return model_->vocabulary(); }
  const Topology& topology() const override { return model_->topology(); }
  int context_order() const override { return model_->context_order(); }

  BoundaryRow boundary(int t_prev, std::span<const Label> history) const override;
  /// Throws UnreachableError when q(eps) = 1 at the boundary and DomainError
  /// for inadmissible boundaries (including zero-length strict segments).
  Distribution label(int t_prev, int t, std::span<const Label> history) const override;

  /// Sentence-end factor after the last label at `t_last`: the blank odds
  /// at (T, S) for RNNT, the continuation product for strict monotonic.
  LogScore sentence_end_factor(int t_last, std::span<const Label> history) const;

  const TransducerScorer& wrapped() const { return *model_; }
  std::shared_ptr<const TransducerScorer> wrapped_ptr() const { return model_; }

 private:
  std::shared_ptr<const TransducerScorer> model_;
};

/// Lazy transducer view of a segmental model. Zero-mass states yield rows
/// flagged unreachable with all probabilities zero.
class TransducerView final : public TransducerScorer {
 public:
  explicit TransducerView(std::shared_ptr<const SegmentalScorer> model);

  const Vocabulary& vocabulary() const override { return model_->vocabulary(); }
  const Topology& topology() const override { return model_->topology(); }
  int context_order() const override { return model_->context_order(); }
  bool segment_aware() const override { return true; }

  Distribution step(int t, int t_prev, std::span<const Label> history) const override;

  const SegmentalScorer& wrapped() const { return *model_; }
  std::shared_ptr<const SegmentalScorer> wrapped_ptr() const { return model_; }

 private:
  std::shared_ptr<const SegmentalScorer> model_;
};

std::shared_ptr<const SegmentalView> transducer_to_segmental(
    std::shared_ptr<const TransducerScorer> model);
std::shared_ptr<const TransducerView> segmental_to_transducer(
    std::shared_ptr<const SegmentalScorer> model);

/// Bakes a scorer into a standalone table over all reachable rows. Rows the
/// scorer reports as unreachable keep the explicit marker.
SegmentalModel materialize(const SegmentalScorer& view);
TransducerModel materialize(const TransducerScorer& view);

}  // namespace transeg

#endif  // TRANSEG_TRANSFORM_HPP_
