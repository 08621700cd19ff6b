// src/transform.cpp

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

#include "transeg/transform.hpp"

namespace transeg {

namespace {

void check_prev(const Topology& topo, int t_prev) {
  if (t_prev < topo.initial_boundary() || t_prev > topo.frames)
    throw DomainError("previous boundary " + std::to_string(t_prev) + " outside [" +
                      std::to_string(topo.initial_boundary()) + ", " +
                      std::to_string(topo.frames) + "]");
}

}  // namespace

SegmentalView::SegmentalView(std::shared_ptr<const TransducerScorer> model)
    : model_(std::move(model)) {
  if (!model_) throw DomainError("null transducer model");
}

BoundaryRow SegmentalView::boundary(int t_prev, std::span<const Label> history) const {
  const Topology& topo = topology();
  check_prev(topo, t_prev);
  BoundaryRow row;
  row.first = topo.first_boundary(t_prev);
  LogScore stay = LogScore::one();  // all blanks so far
  for (int t = row.first; t <= topo.frames; ++t) {
    const Distribution q = model_->step(t, t_prev, history);
    if (q.unreachable) {
      row.scores.resize(static_cast<std::size_t>(topo.frames - row.first + 1), kZeroProb);
      stay = kZeroProb;
      break;
    }
    // 1 - q(eps) evaluated as the label mass.
    row.scores.push_back(stay + q.label_mass());
    stay += q.extra();
  }
  row.continuation = stay;
  return row;
}

Distribution SegmentalView::label(int t_prev, int t, std::span<const Label> history) const {
  const Topology& topo = topology();
  check_prev(topo, t_prev);
  if (topo.strict() && t == t_prev)
    throw DomainError("zero-length segment at t = " + std::to_string(t) +
                      " under strict monotonicity");
  if (t < topo.first_boundary(t_prev) || t > topo.frames)
    throw DomainError("boundary " + std::to_string(t) + " not admissible after " +
                      std::to_string(t_prev));
  const Distribution q = model_->step(t, t_prev, history);
  const LogScore mass = q.label_mass();
  if (q.unreachable || mass.is_inf())
    throw UnreachableError("boundary t = " + std::to_string(t) + " is unreachable: q(" +
                           std::string(kBlankName) + ") = 1");
  Distribution out;
  out.scores.reserve(q.scores.size());
  for (Label a = 0; a < q.vocab_size(); ++a) out.scores.push_back(q.label(a) - mass);
  out.scores.push_back(topo.rnnt() && t == topo.frames ? q.extra() - mass : kZeroProb);
  return out;
}

LogScore SegmentalView::sentence_end_factor(int t_last, std::span<const Label> history) const {
  const Topology& topo = topology();
  check_prev(topo, t_last);
  if (topo.strict()) return boundary(t_last, history).continuation;
  const Distribution q = model_->step(topo.frames, t_last, history);
  const LogScore mass = q.label_mass();
  if (q.unreachable || mass.is_inf())
    throw UnreachableError("final boundary is unreachable: q(" + std::string(kBlankName) +
                           ") = 1 at T");
  return q.extra() - mass;
}

// ---------------------------------------------------------------------------

TransducerView::TransducerView(std::shared_ptr<const SegmentalScorer> model)
    : model_(std::move(model)) {
  if (!model_) throw DomainError("null segmental model");
}

Distribution TransducerView::step(int t, int t_prev, std::span<const Label> history) const {
  const Topology& topo = topology();
  const int T = topo.frames;
  if (t < 1 || t > T)
    throw DomainError("frame t = " + std::to_string(t) + " outside [1, " + std::to_string(T) +
                      "]");
  check_prev(topo, t_prev);
  if (t < topo.first_boundary(t_prev))
    throw DomainError("frame " + std::to_string(t) + " precedes the segment start " +
                      std::to_string(t_prev));
  const int V = vocabulary().size();
  const BoundaryRow row = model_->boundary(t_prev, history);
  if (row.unreachable) return Distribution::unreachable_row(V);

  // tail[i] = S(first - 1 + i): boundary mass beyond frame first - 1 + i.
  const int n = T - row.first + 1;
  std::vector<LogScore> tail(static_cast<std::size_t>(n) + 1);
  tail[static_cast<std::size_t>(n)] = row.continuation;
  for (int i = n - 1; i >= 0; --i)
    tail[static_cast<std::size_t>(i)] =
        log_add(row.scores[static_cast<std::size_t>(i)], tail[static_cast<std::size_t>(i) + 1]);
  const LogScore before = tail[static_cast<std::size_t>(t - row.first)];
  const LogScore after = tail[static_cast<std::size_t>(t - row.first) + 1];
  if (before.is_inf()) return Distribution::unreachable_row(V);

  Distribution out;
  out.scores.assign(static_cast<std::size_t>(V) + 1, kZeroProb);
  const LogScore p_t = row.at(t);
  const LogScore leave = p_t - before;  // 1 - survival ratio
  Distribution lab;
  if (p_t.finite()) {
    lab = model_->label(t_prev, t, history);
    if (!lab.unreachable)
      for (Label a = 0; a < V; ++a) out.scores[static_cast<std::size_t>(a)] = lab.label(a) + leave;
  }
  const LogScore survive = after - before;
  if (t < T) {
    out.extra() = survive;
  } else {
    const LogScore end = p_t.finite() && !lab.unreachable ? lab.extra() + leave : kZeroProb;
    // RNNT mass beyond T never terminates; strict continuation ends at T.
    out.extra() = topo.rnnt() ? end : log_add(survive, end);
  }
  return out;
}

std::shared_ptr<const SegmentalView> transducer_to_segmental(
    std::shared_ptr<const TransducerScorer> model) {
  return std::make_shared<const SegmentalView>(std::move(model));
}

std::shared_ptr<const TransducerView> segmental_to_transducer(
    std::shared_ptr<const SegmentalScorer> model) {
  return std::make_shared<const TransducerView>(std::move(model));
}

// ---------------------------------------------------------------------------

SegmentalModel materialize(const SegmentalScorer& view) {
  SegmentalModel out(view.vocabulary(), view.topology(), view.context_order());
  const int V = view.vocabulary().size();
  for (const auto& key : out.reachable_boundary_keys()) {
    const LabelSeq history = out.codec().history(key.ctx);
    out.set_boundary_row(key.t_prev, key.ctx, view.boundary(key.t_prev, history));
    for (int t = view.topology().first_boundary(key.t_prev); t <= view.topology().frames; ++t) {
      Distribution lab;
      try {
        lab = view.label(key.t_prev, t, history);
      } catch (const UnreachableError&) {
        lab = Distribution::unreachable_row(V);
      }
      out.set_label_row(key.t_prev, t, key.ctx, std::move(lab));
    }
  }
  return out;
}

TransducerModel materialize(const TransducerScorer& view) {
  TransducerModel out(view.vocabulary(), view.topology(), view.context_order(),
                      view.segment_aware());
  const int V = view.vocabulary().size();
  for (const auto& key : out.reachable_keys()) {
    const LabelSeq history = out.codec().history(key.ctx);
    Distribution row;
    try {
      row = view.step(key.t, key.t_prev, history);
    } catch (const UnreachableError&) {
      row = Distribution::unreachable_row(V);
    }
    out.set_row(key.t, key.t_prev, key.ctx, std::move(row));
  }
  return out;
}

}  // namespace transeg
