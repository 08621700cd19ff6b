// src/search.cpp

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

#include "transeg/search.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "transeg/transform.hpp"

namespace transeg {

void PruneConfig::check() const {
  if (q_prune && !(*q_prune > 0.0)) throw DomainError("Q_prune must be > 0");
  if (beam && *beam < 1) throw DomainError("beam size B must be >= 1");
  if (boundary_beam && *boundary_beam < 1) throw DomainError("boundary beam B_t must be >= 1");
}

std::string PruneConfig::describe() const {
  std::ostringstream os;
  os << "Q=";
  if (q_prune) os << *q_prune; else os << "inf";
  os << " B=";
  if (beam) os << *beam; else os << "inf";
  os << " B_t=";
  if (boundary_beam) os << *boundary_beam; else os << "inf";
  return os.str();
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kTimeSync: return "time-sync";
    case Strategy::kLabelSyncFull: return "label-sync";
    case Strategy::kLabelSyncTwoStage: return "label-sync-2stage";
  }
  return "?";
}

Strategy strategy_from_string(std::string_view s) {
  if (s == "time-sync" || s == "time_sync" || s == "TIME_SYNC") return Strategy::kTimeSync;
  if (s == "label-sync" || s == "label-sync-full" || s == "LABEL_SYNC_FULL")
    return Strategy::kLabelSyncFull;
  if (s == "label-sync-2stage" || s == "label-sync-two-stage" || s == "LABEL_SYNC_TWO_STAGE")
    return Strategy::kLabelSyncTwoStage;
  throw DomainError("unknown strategy '" + std::string(s) + "'");
}

const ScoredSequence& DecodeResult::best() const {
  if (nbest.empty()) throw UnreachableError("decode produced no complete hypothesis");
  return nbest.front();
}

namespace {

bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score < b.score;
  if (a.labels != b.labels) return label_seq_less(a.labels, b.labels);
  return a.boundaries < b.boundaries;
}

// Keeps the better of hypotheses sharing labels (and t_prev if `by_position`),
// then orders the pool best first.
void merge(std::vector<Hypothesis>& pool, bool by_position) {
  std::sort(pool.begin(), pool.end(), [&](const Hypothesis& a, const Hypothesis& b) {
    if (a.labels != b.labels) return a.labels < b.labels;
    if (by_position && a.t_prev != b.t_prev) return a.t_prev < b.t_prev;
    return better(a, b);
  });
  auto same = [&](const Hypothesis& a, const Hypothesis& b) {
    return a.labels == b.labels && (!by_position || a.t_prev == b.t_prev);
  };
  pool.erase(std::unique(pool.begin(), pool.end(), same), pool.end());
  std::sort(pool.begin(), pool.end(), better);
}

// Score threshold against the best of this step, then the beam. The best
// hypothesis always survives. `pool` must be sorted best first.
void prune(std::vector<Hypothesis>& pool, const PruneConfig& cfg, DecodeStats& stats) {
  if (pool.empty()) return;
  std::size_t keep = pool.size();
  if (cfg.q_prune) {
    const double limit = pool.front().score.value + *cfg.q_prune;
    keep = 1;
    while (keep < pool.size() && pool[keep].score.value <= limit) ++keep;
  }
  if (cfg.beam) keep = std::min(keep, static_cast<std::size_t>(*cfg.beam));
  stats.pruned += static_cast<std::int64_t>(pool.size() - keep);
  pool.resize(keep);
}

void record_step(const std::vector<Hypothesis>& live, DecodeStats& stats) {
  const auto n = static_cast<std::int64_t>(live.size());
  stats.live_per_step.push_back(n);
  stats.peak_beam = std::max(stats.peak_beam, n);
  ++stats.steps;
}

std::vector<ScoredSequence> extract_nbest(std::vector<Hypothesis> ended, const Topology& topo,
                                          int nbest) {
  // Alignments of the same label sequence: keep the Viterbi one.
  merge(ended, false);
  std::vector<ScoredSequence> out;
  for (Hypothesis& h : ended) {
    if (static_cast<int>(out.size()) >= nbest) break;
    Segmentation seg{h.labels, std::move(h.boundaries), topo};
    out.push_back({std::move(h.labels), h.score, std::move(seg)});
  }
  return out;
}

Hypothesis extend(const Hypothesis& h, Label a, int t, LogScore cost) {
  Hypothesis g;
  g.labels = h.labels;
  g.labels.push_back(a);
  g.boundaries = h.boundaries;
  g.boundaries.push_back(t);
  g.t_prev = t;
  g.score = h.score + cost;
  return g;
}

Hypothesis finish(const Hypothesis& h, LogScore cost) {
  Hypothesis g = h;
  g.score = h.score + cost;
  g.ended = true;
  return g;
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void check_options(const DecodeOptions& o) {
  o.prune.check();
  if (o.nbest < 1) throw DomainError("nbest must be >= 1");
  if (o.max_labels_per_frame < 1) throw DomainError("max_labels_per_frame must be >= 1");
  if (o.max_steps < 0) throw DomainError("max_steps must be >= 0");
  if (o.lm_scale < 0.0) throw DomainError("LM scale must be >= 0");
}

Distribution label_or_zero(const SegmentalScorer& model, int t_prev, int t,
                           std::span<const Label> history) {
  try {
    return model.label(t_prev, t, history);
  } catch (const UnreachableError&) {
    return Distribution::unreachable_row(model.vocabulary().size());
  }
}

LogScore end_or_zero(const SegmentalScorer& model, const BoundaryRow& row, int t_prev,
                     std::span<const Label> history) {
  try {
    return sentence_end_score(model, row, t_prev, history);
  } catch (const UnreachableError&) {
    return kZeroProb;
  }
}

int step_cap(const Topology& topo, const DecodeOptions& o) {
  if (o.max_steps > 0) return o.max_steps;
  return topo.strict() ? topo.frames + 1 : 4 * topo.frames + 16;
}

// Stop once the n-th best ended hypothesis is no worse than the best live one:
// every completion of a live hypothesis costs at least its current score.
bool nbest_settled(std::vector<Hypothesis>& ended, const std::vector<Hypothesis>& live,
                   int nbest) {
  merge(ended, false);
  if (static_cast<int>(ended.size()) < nbest) return false;
  if (live.empty()) return true;
  return ended[static_cast<std::size_t>(nbest) - 1].score <= live.front().score;
}

}  // namespace

// ---------------------------------------------------------------------------

DecodeResult decode_time_sync(const TransducerScorer& model, const DecodeOptions& options) {
  check_options(options);
  const Timer timer;
  const Topology& topo = model.topology();
  const int T = topo.frames;
  const int V = model.vocabulary().size();
  const bool aware = model.segment_aware();
  const LmFusion lm{options.lm, options.lm_scale};
  DecodeResult result;
  DecodeStats& stats = result.stats;

  std::vector<Hypothesis> live(1);
  live[0].t_prev = topo.initial_boundary();
  std::vector<Hypothesis> ended = options.seed_ended;

  for (int t = 1; t <= T && !live.empty(); ++t) {
    std::vector<Hypothesis> next;
    std::vector<Hypothesis> layer = std::move(live);
    // RNNT: labels within frame t come in layers of consecutive emissions.
    for (int j = 0; !layer.empty(); ++j) {
      std::vector<Hypothesis> deeper;
      const bool may_emit = topo.strict() || j < options.max_labels_per_frame;
      for (const Hypothesis& h : layer) {
        const Distribution q = model.step(t, h.t_prev, h.labels);
        if (q.unreachable) continue;
        if (q.extra().finite()) {
          ++stats.expanded;
          Hypothesis g = h;
          g.score += q.extra();
          if (t == T)
            ended.push_back(finish(g, lm.end_cost(g.labels)));
          else
            next.push_back(std::move(g));
        }
        if (!may_emit) continue;
        for (Label a = 0; a < V; ++a) {
          if (q.label(a).is_inf()) continue;
          ++stats.expanded;
          Hypothesis g = extend(h, a, t, q.label(a) + lm.label_cost(h.labels, a));
          if (topo.rnnt())
            deeper.push_back(std::move(g));
          else if (t == T)
            ended.push_back(finish(g, lm.end_cost(g.labels)));
          else
            next.push_back(std::move(g));
        }
      }
      if (topo.strict()) break;
      merge(deeper, aware);
      layer = std::move(deeper);
    }
    merge(next, aware);
    prune(next, options.prune, stats);
    record_step(next, stats);
    live = std::move(next);
  }
  result.nbest = extract_nbest(std::move(ended), topo, options.nbest);
  stats.wall_ms = timer.ms();
  result.searched_model = &model;
  return result;
}

DecodeResult decode_label_sync_full(const SegmentalScorer& model, const DecodeOptions& options) {
  check_options(options);
  const Timer timer;
  const Topology& topo = model.topology();
  const int V = model.vocabulary().size();
  const LmFusion lm{options.lm, options.lm_scale};
  const int cap = step_cap(topo, options);
  DecodeResult result;
  DecodeStats& stats = result.stats;

  std::vector<Hypothesis> live(1);
  live[0].t_prev = topo.initial_boundary();
  std::vector<Hypothesis> ended = options.seed_ended;

  while (!live.empty()) {
    if (stats.steps >= cap) {
      stats.step_cap_hit = true;
      break;
    }
    std::vector<Hypothesis> next;
    for (const Hypothesis& h : live) {
      const BoundaryRow row = model.boundary(h.t_prev, h.labels);
      if (row.unreachable) continue;
      const LogScore end = end_or_zero(model, row, h.t_prev, h.labels);
      if (end.finite()) {
        ++stats.expanded;
        ended.push_back(finish(h, end + lm.end_cost(h.labels)));
      }
      for (int t = row.first; t <= row.last(); ++t) {
        const LogScore p = row.at(t);
        if (p.is_inf()) continue;
        const Distribution lab = label_or_zero(model, h.t_prev, t, h.labels);
        if (lab.unreachable) continue;
        for (Label a = 0; a < V; ++a) {
          if (lab.label(a).is_inf()) continue;
          ++stats.expanded;
          next.push_back(extend(h, a, t, p + lab.label(a) + lm.label_cost(h.labels, a)));
        }
      }
    }
    merge(next, true);
    prune(next, options.prune, stats);
    record_step(next, stats);
    live = std::move(next);
    if (nbest_settled(ended, live, options.nbest)) break;
  }
  result.nbest = extract_nbest(std::move(ended), topo, options.nbest);
  stats.wall_ms = timer.ms();
  result.searched_model = &model;
  return result;
}

DecodeResult decode_label_sync_two_stage(const SegmentalScorer& model,
                                         const DecodeOptions& options) {
  check_options(options);
  const Timer timer;
  const Topology& topo = model.topology();
  const int V = model.vocabulary().size();
  const LmFusion lm{options.lm, options.lm_scale};
  const int cap = step_cap(topo, options);
  DecodeResult result;
  DecodeStats& stats = result.stats;

  // Boundary candidate; the sentence end is a pseudo-position after T whose
  // score is the whole final-segment factor.
  struct Position {
    int t;
    bool end;
    LogScore boundary;  // p(t_s | ...), or the final-segment factor
    LogScore score;     // parent score plus `boundary`
  };

  std::vector<Hypothesis> live(1);
  live[0].t_prev = topo.initial_boundary();
  std::vector<Hypothesis> ended = options.seed_ended;

  while (!live.empty()) {
    if (stats.steps >= cap) {
      stats.step_cap_hit = true;
      break;
    }
    std::vector<Hypothesis> next;
    for (const Hypothesis& h : live) {
      const BoundaryRow row = model.boundary(h.t_prev, h.labels);
      if (row.unreachable) continue;
      std::vector<Position> positions;
      for (int t = row.first; t <= row.last(); ++t) {
        const LogScore p = row.at(t);
        if (p.finite()) positions.push_back({t, false, p, h.score + p});
      }
      const LogScore end = end_or_zero(model, row, h.t_prev, h.labels);
      if (end.finite()) positions.push_back({topo.frames + 1, true, end, h.score + end});
      stats.expanded += static_cast<std::int64_t>(positions.size());
      std::sort(positions.begin(), positions.end(), [](const Position& x, const Position& y) {
        if (x.score != y.score) return x.score < y.score;
        return x.t < y.t;
      });
      if (options.prune.boundary_beam &&
          positions.size() > static_cast<std::size_t>(*options.prune.boundary_beam)) {
        stats.pruned += static_cast<std::int64_t>(positions.size()) - *options.prune.boundary_beam;
        positions.resize(static_cast<std::size_t>(*options.prune.boundary_beam));
      }
      for (const Position& pos : positions) {
        if (pos.end) {
          ended.push_back(finish(h, pos.boundary + lm.end_cost(h.labels)));
          continue;
        }
        const Distribution lab = label_or_zero(model, h.t_prev, pos.t, h.labels);
        if (lab.unreachable) continue;
        for (Label a = 0; a < V; ++a) {
          if (lab.label(a).is_inf()) continue;
          ++stats.expanded;
          next.push_back(
              extend(h, a, pos.t, pos.boundary + lab.label(a) + lm.label_cost(h.labels, a)));
        }
      }
    }
    merge(next, true);
    prune(next, options.prune, stats);
    record_step(next, stats);
    live = std::move(next);
    if (nbest_settled(ended, live, options.nbest)) break;
  }
  result.nbest = extract_nbest(std::move(ended), topo, options.nbest);
  stats.wall_ms = timer.ms();
  result.searched_model = &model;
  return result;
}

// ---------------------------------------------------------------------------

ScorerPtr as_scorer(const AnyModelPtr& model) {
  return std::visit([](const auto& p) -> ScorerPtr { return p; }, model);
}

DecodeResult decode(const ScorerPtr& model, Strategy strategy, const DecodeOptions& options) {
  if (strategy == Strategy::kTimeSync) {
    if (const auto* t = std::get_if<std::shared_ptr<const TransducerScorer>>(&model))
      return decode_time_sync(**t, options);
    const auto& seg = std::get<std::shared_ptr<const SegmentalScorer>>(model);
    if (auto view = std::dynamic_pointer_cast<const SegmentalView>(seg)) {
      DecodeResult r = decode_time_sync(view->wrapped(), options);
      r.note = "segmental view unwrapped to its transducer";
      return r;
    }
    const auto view = segmental_to_transducer(seg);
    DecodeResult r = decode_time_sync(*view, options);
    r.note = "segmental model wrapped with segmental_to_transducer";
    return r;
  }
  auto run = [&](const SegmentalScorer& m) {
    return strategy == Strategy::kLabelSyncFull ? decode_label_sync_full(m, options)
                                                : decode_label_sync_two_stage(m, options);
  };
  if (const auto* s = std::get_if<std::shared_ptr<const SegmentalScorer>>(&model)) return run(**s);
  const auto& tr = std::get<std::shared_ptr<const TransducerScorer>>(model);
  if (auto view = std::dynamic_pointer_cast<const TransducerView>(tr)) {
    DecodeResult r = run(view->wrapped());
    r.note = "transducer view unwrapped to its segmental model";
    return r;
  }
  const auto view = transducer_to_segmental(tr);
  DecodeResult r = run(*view);
  r.note = "transducer model wrapped with transducer_to_segmental";
  return r;
}

}  // namespace transeg
