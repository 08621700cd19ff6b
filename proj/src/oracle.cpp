// src/oracle.cpp

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

#include "transeg/oracle.hpp"

#include <algorithm>
#include <queue>

#include "transeg/transform.hpp"

namespace transeg {

namespace {

std::span<const Label> prefix(std::span<const Label> labels, int s) {
  return labels.subspan(0, static_cast<std::size_t>(s));
}

void check_labels(const Vocabulary& vocab, std::span<const Label> labels) {
  for (Label a : labels)
    if (a < 0 || a >= vocab.size())
      throw DomainError("label id " + std::to_string(a) + " outside the vocabulary");
}

// Label posterior of a segmental model, zero when the boundary is unreachable.
Distribution safe_label(const SegmentalScorer& model, int t_prev, int t,
                        std::span<const Label> history) {
  try {
    return model.label(t_prev, t, history);
  } catch (const UnreachableError&) {
    return Distribution::unreachable_row(model.vocabulary().size());
  }
}

LogScore safe_end(const SegmentalScorer& model, int t_prev, std::span<const Label> history) {
  try {
    return sentence_end_score(model, t_prev, history);
  } catch (const UnreachableError&) {
    return kZeroProb;
  }
}

void check_guard(const Topology& topo, std::size_t num_labels) {
  const std::uint64_t n = count_boundary_tuples(topo, static_cast<int>(num_labels));
  if (n > kEnumerationGuard)
    throw GuardExceeded(std::to_string(n) + " alignments exceed the enumeration guard of " +
                        std::to_string(kEnumerationGuard));
}

}  // namespace

LogScore path_score(const TransducerScorer& model, const AlignmentPath& path) {
  path.check();
  const Topology& topo = model.topology();
  if (!(path.topology == topo)) throw DomainError("path topology differs from the model");
  LabelSeq history;
  int t_prev = topo.initial_boundary();
  int t = 1;
  LogScore total = LogScore::one();
  for (Label y : path.symbols) {
    const Distribution q = model.step(t, t_prev, history);
    if (q.unreachable) return kZeroProb;
    if (y == kBlank) {
      total += q.extra();
      ++t;
      continue;
    }
    if (y < 0 || y >= model.vocabulary().size())
      throw DomainError("label id " + std::to_string(y) + " outside the vocabulary");
    total += q.label(y);
    history.push_back(y);
    t_prev = t;
    if (topo.strict()) ++t;
  }
  return total;
}

LogScore segmentation_score(const SegmentalScorer& model, const Segmentation& seg) {
  seg.check();
  const Topology& topo = model.topology();
  if (!(seg.topology == topo)) throw DomainError("segmentation topology differs from the model");
  check_labels(model.vocabulary(), seg.labels);
  LabelSeq history;
  int t_prev = topo.initial_boundary();
  LogScore total = LogScore::one();
  for (int s = 0; s < seg.size(); ++s) {
    const int t = seg.boundaries[static_cast<std::size_t>(s)];
    const BoundaryRow row = model.boundary(t_prev, history);
    if (row.unreachable) return kZeroProb;
    const LogScore p = row.at(t);
    if (p.is_inf()) return kZeroProb;
    const Distribution lab = safe_label(model, t_prev, t, history);
    if (lab.unreachable) return kZeroProb;
    total += p + lab.label(seg.labels[static_cast<std::size_t>(s)]);
    history.push_back(seg.labels[static_cast<std::size_t>(s)]);
    t_prev = t;
  }
  return total + safe_end(model, t_prev, history);
}

std::vector<ScoredPath> enumerate_paths(const TransducerScorer& model,
                                        std::span<const Label> labels) {
  const Topology& topo = model.topology();
  check_labels(model.vocabulary(), labels);
  check_guard(topo, labels.size());
  std::vector<ScoredPath> out;
  const LabelSeq seq(labels.begin(), labels.end());
  for (auto& b : enumerate_boundaries(topo, static_cast<int>(labels.size()))) {
    AlignmentPath path = segmentation_to_path(Segmentation{seq, std::move(b), topo});
    const LogScore score = path_score(model, path);
    out.push_back({std::move(path), score});
  }
  return out;
}

LogScore full_sum_transducer(const TransducerScorer& model, std::span<const Label> labels,
                             SumMethod method) {
  check_labels(model.vocabulary(), labels);
  if (method == SumMethod::kEnumerate) {
    std::vector<LogScore> scores;
    for (const ScoredPath& p : enumerate_paths(model, labels)) scores.push_back(p.score);
    return log_sum(scores);
  }
  const Topology& topo = model.topology();
  const int T = topo.frames;
  const int S = static_cast<int>(labels.size());
  if (topo.strict() && S > T) return kZeroProb;
  // alpha(s, t_prev, t): s labels emitted, the last at t_prev, next symbol at t.
  const std::size_t np = static_cast<std::size_t>(T) + 1;
  const std::size_t nt = static_cast<std::size_t>(T) + 2;
  std::vector<LogScore> alpha(static_cast<std::size_t>(S + 1) * np * nt, kZeroProb);
  auto at = [&](int s, int tp, int t) -> LogScore& {
    return alpha[(static_cast<std::size_t>(s) * np + static_cast<std::size_t>(tp)) * nt +
                 static_cast<std::size_t>(t)];
  };
  at(0, topo.initial_boundary(), 1) = LogScore::one();
  LogScore total = kZeroProb;
  for (int t = 1; t <= T; ++t) {
    for (int s = 0; s <= S; ++s) {
      const int tp_hi = topo.rnnt() ? t : t - 1;
      for (int tp = topo.initial_boundary(); tp <= tp_hi; ++tp) {
        const LogScore a = at(s, tp, t);
        if (a.is_inf()) continue;
        const Distribution q = model.step(t, tp, prefix(labels, s));
        if (q.unreachable) continue;
        if (s < S) {
          LogScore& next = topo.rnnt() ? at(s + 1, t, t) : at(s + 1, t, t + 1);
          next = log_add(next, a + q.label(labels[static_cast<std::size_t>(s)]));
        }
        LogScore& stay = at(s, tp, t + 1);
        stay = log_add(stay, a + q.extra());
      }
    }
  }
  for (int tp = topo.initial_boundary(); tp <= T; ++tp) total = log_add(total, at(S, tp, T + 1));
  return total;
}

LogScore full_sum_segmental(const SegmentalScorer& model, std::span<const Label> labels,
                            SumMethod method) {
  check_labels(model.vocabulary(), labels);
  const Topology& topo = model.topology();
  const int T = topo.frames;
  const int S = static_cast<int>(labels.size());
  const LabelSeq seq(labels.begin(), labels.end());
  if (method == SumMethod::kEnumerate) {
    check_guard(topo, labels.size());
    std::vector<LogScore> scores;
    for (auto& b : enumerate_boundaries(topo, S))
      scores.push_back(segmentation_score(model, Segmentation{seq, std::move(b), topo}));
    return log_sum(scores);
  }
  if (topo.strict() && S > T) return kZeroProb;
  // alpha[s][t]: a_1^s placed with t_s = t.
  std::vector<std::vector<LogScore>> alpha(static_cast<std::size_t>(S) + 1,
                                           std::vector<LogScore>(static_cast<std::size_t>(T) + 1,
                                                                 kZeroProb));
  alpha[0][static_cast<std::size_t>(topo.initial_boundary())] = LogScore::one();
  for (int s = 0; s < S; ++s) {
    const auto history = prefix(labels, s);
    for (int tp = topo.initial_boundary(); tp <= T; ++tp) {
      const LogScore a = alpha[static_cast<std::size_t>(s)][static_cast<std::size_t>(tp)];
      if (a.is_inf()) continue;
      const BoundaryRow row = model.boundary(tp, history);
      if (row.unreachable) continue;
      for (int t = row.first; t <= row.last(); ++t) {
        const LogScore p = row.at(t);
        if (p.is_inf()) continue;
        const Distribution lab = safe_label(model, tp, t, history);
        if (lab.unreachable) continue;
        LogScore& next = alpha[static_cast<std::size_t>(s) + 1][static_cast<std::size_t>(t)];
        next = log_add(next, a + p + lab.label(labels[static_cast<std::size_t>(s)]));
      }
    }
  }
  LogScore total = kZeroProb;
  for (int tp = topo.initial_boundary(); tp <= T; ++tp) {
    const LogScore a = alpha[static_cast<std::size_t>(S)][static_cast<std::size_t>(tp)];
    if (a.is_inf()) continue;
    total = log_add(total, a + safe_end(model, tp, labels));
  }
  return total;
}

// ---------------------------------------------------------------------------

namespace {

struct Node {
  LogScore cost;
  LabelSeq labels;
  std::vector<int> boundaries;
  int t = 1;       // frame of the next symbol
  int t_prev = 0;  // frame of the last label, t_0 if none
  bool done = false;
};

// Priority: lower cost, then smaller labels, then earlier boundaries.
struct NodeAfter {
  bool operator()(const Node& a, const Node& b) const {
    if (a.cost != b.cost) return a.cost > b.cost;
    if (a.labels != b.labels) return label_seq_less(b.labels, a.labels);
    if (a.boundaries != b.boundaries) return b.boundaries < a.boundaries;
    return !a.done && b.done;
  }
};

constexpr double kNegativeSlack = 1e-9;

LogScore checked(LogScore factor) {
  if (factor.value < -kNegativeSlack)
    throw DomainError("factor with probability above one; exact_best needs normalized rows");
  return factor;
}

}  // namespace

ScoredSequence exact_best(const TransducerScorer& model, const LmFusion& lm,
                          std::int64_t guard) {
  const Topology& topo = model.topology();
  const int T = topo.frames;
  const int V = model.vocabulary().size();
  // Futures depend on (t, t_prev, last K labels) only, so prefixes reaching
  // the same lattice state are recombined; the first one popped wins.
  const int K = std::max(model.context_order(), lm.active() ? lm.lm->order() - 1 : 0);
  const ContextCodec codec(V, K);
  const std::int64_t num_states = static_cast<std::int64_t>(T) * (T + 1) * codec.size();
  if (num_states > guard)
    throw GuardExceeded("exact_best lattice has " + std::to_string(num_states) +
                        " states, above the guard of " + std::to_string(guard));
  std::vector<char> closed(static_cast<std::size_t>(num_states), 0);
  auto state = [&](const Node& n) {
    const int tp = model.segment_aware() ? n.t_prev : 0;
    return ((static_cast<std::size_t>(n.t) - 1) * (T + 1) + static_cast<std::size_t>(tp)) *
               static_cast<std::size_t>(codec.size()) +
           static_cast<std::size_t>(codec.encode(n.labels));
  };

  std::priority_queue<Node, std::vector<Node>, NodeAfter> open;
  Node start;
  start.cost = LogScore::one();
  start.t = 1;
  start.t_prev = topo.initial_boundary();
  open.push(start);
  while (!open.empty()) {
    Node n = open.top();
    open.pop();
    if (n.done) {
      Segmentation seg{n.labels, n.boundaries, topo};
      return ScoredSequence{std::move(n.labels), n.cost, std::move(seg)};
    }
    char& seen = closed[state(n)];
    if (seen) continue;
    seen = 1;
    const Distribution q = model.step(n.t, n.t_prev, n.labels);
    if (q.unreachable) continue;
    for (Label a = 0; a < V; ++a) {
      const LogScore f = checked(q.label(a));
      if (f.is_inf()) continue;
      Node m;
      m.cost = n.cost + f + checked(lm.label_cost(n.labels, a));
      m.labels = n.labels;
      m.labels.push_back(a);
      m.boundaries = n.boundaries;
      m.boundaries.push_back(n.t);
      m.t_prev = n.t;
      m.t = topo.rnnt() ? n.t : n.t + 1;
      if (m.t > T) {
        m.cost += checked(lm.end_cost(m.labels));
        m.done = true;
      }
      if (m.cost.finite()) open.push(std::move(m));
    }
    const LogScore f = checked(q.extra());
    if (f.is_inf()) continue;
    Node m;
    m.cost = n.cost + f;
    m.labels = std::move(n.labels);
    m.boundaries = std::move(n.boundaries);
    m.t_prev = n.t_prev;
    m.t = n.t + 1;
    if (m.t > T) {
      m.cost += checked(lm.end_cost(m.labels));
      m.done = true;
    }
    if (m.cost.finite()) open.push(std::move(m));
  }
  throw UnreachableError("model assigns zero probability to every label sequence");
}

ScoredSequence exact_best(std::shared_ptr<const SegmentalScorer> model, const LmFusion& lm,
                          std::int64_t guard) {
  if (auto view = std::dynamic_pointer_cast<const SegmentalView>(model))
    return exact_best(view->wrapped(), lm, guard);
  const TransducerView view(std::move(model));
  return exact_best(view, lm, guard);
}

// ---------------------------------------------------------------------------

namespace {

template <typename Model, typename Sum>
MassReport collect_mass(const Model& model, int max_labels, Sum sum) {
  const Topology& topo = model.topology();
  MassReport report;
  report.exact = topo.strict();
  report.max_labels = topo.strict() ? topo.frames : max_labels;
  std::vector<LogScore> scores;
  for (LabelSeq& seq : enumerate_label_sequences(model.vocabulary().size(), report.max_labels)) {
    const LogScore s = sum(model, seq);
    scores.push_back(s);
    report.contributions.push_back({std::move(seq), s, std::nullopt});
  }
  report.mass = log_sum(scores);
  return report;
}

}  // namespace

MassReport total_mass(const TransducerScorer& model, int max_labels) {
  return collect_mass(model, max_labels, [](const TransducerScorer& m, const LabelSeq& seq) {
    return full_sum_transducer(m, seq);
  });
}

MassReport total_mass(const SegmentalScorer& model, int max_labels) {
  return collect_mass(model, max_labels, [](const SegmentalScorer& m, const LabelSeq& seq) {
    return full_sum_segmental(m, seq);
  });
}

}  // namespace transeg
