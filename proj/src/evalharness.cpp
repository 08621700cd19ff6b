// src/evalharness.cpp

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

#include "transeg/evalharness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include "json.hpp"
#include "transeg/random.hpp"
#include "transeg/transform.hpp"

namespace transeg {

using nlohmann::json;

WerResult wer(std::span<const Label> reference, std::span<const Label> hypothesis) {
  const std::size_t n = reference.size(), m = hypothesis.size();
  // d[i][j]: edits turning reference[0, i) into hypothesis[0, j).
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j) {
      const int sub = d[i - 1][j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      d[i][j] = std::min({sub, d[i][j - 1] + 1, d[i - 1][j] + 1});
    }
  WerResult r;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        d[i][j] == d[i - 1][j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1)) {
      if (reference[i - 1] != hypothesis[j - 1]) ++r.substitutions;
      --i;
      --j;
    } else if (j > 0 && d[i][j] == d[i][j - 1] + 1) {
      ++r.insertions;
      --j;
    } else {
      ++r.deletions;
      --i;
    }
  }
  r.reference_length = static_cast<int>(n);
  r.empty_reference = n == 0;
  r.rate = static_cast<double>(r.errors()) / static_cast<double>(std::max<std::size_t>(n, 1));
  return r;
}

std::string_view to_string(ReferenceMode m) {
  return m == ReferenceMode::kOracleBest ? "oracle-best" : "sampled";
}

ReferenceMode reference_mode_from_string(std::string_view s) {
  if (s == "oracle-best") return ReferenceMode::kOracleBest;
  if (s == "sampled") return ReferenceMode::kSampled;
  throw DomainError("unknown reference mode '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------

namespace {

Label draw(Rng& rng, const Distribution& q, bool allow_labels) {
  const int V = static_cast<int>(q.scores.size()) - 1;
  double total = q.extra().prob();
  if (allow_labels)
    for (Label a = 0; a < V; ++a) total += q.label(a).prob();
  if (!(total > 0.0)) throw UnreachableError("sampling reached a zero-mass row");
  double u = rng.uniform() * total;
  if (allow_labels)
    for (Label a = 0; a < V; ++a) {
      u -= q.label(a).prob();
      if (u < 0.0) return a;
    }
  return kBlank;
}

int max_in_one_frame(const std::vector<int>& boundaries) {
  int best = 0;
  for (std::size_t i = 0; i < boundaries.size();) {
    std::size_t j = i;
    while (j < boundaries.size() && boundaries[j] == boundaries[i]) ++j;
    best = std::max(best, static_cast<int>(j - i));
    i = j;
  }
  return best;
}

}  // namespace

Segmentation sample_segmentation(const TransducerScorer& model, std::uint64_t seed,
                                 int max_labels_per_frame) {
  const Topology& topo = model.topology();
  Rng rng(seed);
  Segmentation seg{{}, {}, topo};
  int t_prev = topo.initial_boundary();
  for (int t = 1; t <= topo.frames; ++t) {
    for (int emitted = 0;; ++emitted) {
      const Distribution q = model.step(t, t_prev, seg.labels);
      if (q.unreachable) throw UnreachableError("sampling reached an unreachable row");
      const bool allow = topo.strict() || emitted < max_labels_per_frame;
      const Label y = draw(rng, q, allow);
      if (y == kBlank) break;
      seg.labels.push_back(y);
      seg.boundaries.push_back(t);
      t_prev = t;
      if (topo.strict()) break;
    }
  }
  return seg;
}

UtteranceSet generate_utterance_set(std::uint64_t seed, int count, const SuiteParams& params) {
  if (count < 0) throw DomainError("utterance count must be >= 0");
  UtteranceSet set;
  set.seed = seed;
  set.params = params;
  for (int i = 0; i < count; ++i) {
    Rng rng(mix_seed(seed, 2 * static_cast<std::uint64_t>(i) + 1));
    GeneratorParams gp = params.model;
    if (params.max_frames > gp.frames)
      gp.frames += static_cast<int>(rng.below(static_cast<std::uint64_t>(params.max_frames - gp.frames + 1)));
    const std::uint64_t base = mix_seed(seed, 2 * static_cast<std::uint64_t>(i));
    Utterance u;
    char id[32];
    std::snprintf(id, sizeof id, "utt%04d", i);
    u.id = id;
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 1000) throw GuardExceeded("no model satisfied the per-frame label cap");
      u.model_seed = attempt == 0 ? base : mix_seed(base, static_cast<std::uint64_t>(attempt));
      std::shared_ptr<const TransducerScorer> steps;
      if (params.kind == ModelKind::kTransducer) {
        auto m = std::make_shared<const TransducerModel>(generate_random_transducer(u.model_seed, gp));
        steps = m;
        u.model = std::shared_ptr<const TransducerScorer>(m);
      } else {
        auto m = std::make_shared<const SegmentalModel>(generate_random_segmental(u.model_seed, gp));
        steps = segmental_to_transducer(m);
        u.model = std::shared_ptr<const SegmentalScorer>(m);
      }
      const ScoredSequence best = exact_best(*steps);
      if (gp.topology == TopologyKind::kRnnt && params.max_labels_per_frame > 0 &&
          max_in_one_frame(best.segmentation->boundaries) > params.max_labels_per_frame)
        continue;
      u.reference = params.reference == ReferenceMode::kOracleBest
                        ? best.labels
                        : sample_segmentation(*steps, rng.below(~0ULL)).labels;
      break;
    }
    set.utterances.push_back(std::move(u));
  }
  return set;
}

// ---------------------------------------------------------------------------

namespace {

bool same_labels(const UtteranceResult& r, const LabelSeq& labels) {
  return r.best && r.best->labels == labels;
}

double pct(int num, std::size_t den) {
  return den == 0 ? 100.0 : 100.0 * num / static_cast<double>(den);
}

}  // namespace

ComparisonReport compare_decodes(const std::vector<UtteranceResult>& a,
                                 const std::vector<UtteranceResult>& b, double tolerance,
                                 const std::vector<LabelSeq>* references) {
  if (a.size() != b.size())
    throw DomainError("result lists differ in length (" + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
  if (references && references->size() != a.size())
    throw DomainError("reference list differs in length from the results");
  if (!(tolerance >= 0.0)) throw DomainError("tolerance must be >= 0");
  ComparisonReport rep;
  rep.tolerance = tolerance;
  int trans = 0, score = 0, errors = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].id != b[i].id)
      throw DomainError("utterance id mismatch at position " + std::to_string(i) + ": '" +
                        a[i].id + "' vs '" + b[i].id + "'");
    UtteranceComparison c;
    c.id = a[i].id;
    if (a[i].best) {
      c.labels_a = a[i].best->labels;
      c.score_a = a[i].best->score;
    }
    if (b[i].best) {
      c.labels_b = b[i].best->labels;
      c.score_b = b[i].best->score;
    }
    c.same_trans = a[i].best && b[i].best && c.labels_a == c.labels_b;
    c.same_score = c.same_trans && std::abs(c.score_a.value - c.score_b.value) <= tolerance;
    trans += c.same_trans;
    score += c.same_score;
    if (!a[i].best || (b[i].best && c.score_a.value > c.score_b.value + tolerance)) ++errors;
    rep.records.push_back(std::move(c));
  }
  rep.same_trans_pct = pct(trans, a.size());
  rep.same_score_pct = pct(score, a.size());
  rep.search_error_rate = a.empty() ? 0.0 : errors / static_cast<double>(a.size());
  if (references) {
    rep.wer_a = corpus_wer(*references, a);
    rep.wer_b = corpus_wer(*references, b);
  }
  return rep;
}

double corpus_wer(const std::vector<LabelSeq>& references,
                  const std::vector<UtteranceResult>& results) {
  if (references.size() != results.size())
    throw DomainError("reference list differs in length from the results");
  long edits = 0, words = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    // A failed decode is scored as the empty hypothesis.
    const LabelSeq empty;
    const WerResult w = wer(references[i], results[i].best ? results[i].best->labels : empty);
    edits += w.errors();
    words += w.reference_length;
  }
  return static_cast<double>(edits) / static_cast<double>(std::max(words, 1L));
}

bool is_search_error(const UtteranceResult& result, const ScoredSequence& exact,
                     double tolerance) {
  return !result.best || result.best->score.value > exact.score.value + tolerance;
}

// ---------------------------------------------------------------------------

std::vector<GridPoint> q_prune_grid(const std::vector<double>& values,
                                    std::optional<int> beam) {
  std::vector<GridPoint> grid;
  for (double q : values) {
    GridPoint g;
    char name[48];
    std::snprintf(name, sizeof name, "Q=%g", q);
    g.name = name;
    g.prune.q_prune = q;
    g.prune.beam = beam;
    g.prune.check();
    grid.push_back(std::move(g));
  }
  return grid;
}

std::vector<GridPoint> beam_grid(const std::vector<int>& values) {
  std::vector<GridPoint> grid;
  for (int b : values) {
    GridPoint g;
    g.name = "B=" + std::to_string(b);
    g.prune.beam = b;
    g.prune.boundary_beam = b;
    g.prune.check();
    grid.push_back(std::move(g));
  }
  return grid;
}

namespace {

std::shared_ptr<const TransducerScorer> transducer_side(const ScorerPtr& m) {
  if (const auto* t = std::get_if<std::shared_ptr<const TransducerScorer>>(&m)) return *t;
  return segmental_to_transducer(std::get<std::shared_ptr<const SegmentalScorer>>(m));
}

}  // namespace

SweepResult pruning_sweep(const UtteranceSet& set, const SweepConfig& config) {
  if (config.grid.empty()) throw DomainError("empty pruning grid");
  if (config.strategies.empty()) throw DomainError("no strategies to sweep");
  if (config.workers < 1) throw DomainError("workers must be >= 1");
  for (const GridPoint& g : config.grid) g.prune.check();

  const std::size_t n = set.utterances.size();
  const std::size_t nrows = config.grid.size() * config.strategies.size();
  SweepResult out;
  out.exact.resize(n);
  out.results.assign(nrows, std::vector<UtteranceResult>(n));
  std::vector<std::vector<DecodeStats>> stats(nrows, std::vector<DecodeStats>(n));
  for (const Utterance& u : set.utterances) {
    out.ids.push_back(u.id);
    out.references.push_back(u.reference);
  }

  const LmFusion fusion{config.lm, config.lm_scale};
  auto work = [&](std::size_t i) {
    const Utterance& u = set.utterances[i];
    out.exact[i] = exact_best(*transducer_side(u.model), fusion);
    for (std::size_t g = 0; g < config.grid.size(); ++g)
      for (std::size_t s = 0; s < config.strategies.size(); ++s) {
        const std::size_t row = g * config.strategies.size() + s;
        DecodeOptions o;
        o.prune = config.grid[g].prune;
        o.lm = config.lm;
        o.lm_scale = config.lm_scale;
        o.max_labels_per_frame = config.max_labels_per_frame;
        o.max_steps = config.max_steps;
        UtteranceResult& r = out.results[row][i];
        r.id = u.id;
        try {
          DecodeResult d = decode(u.model, config.strategies[s], o);
          if (d.nbest.empty())
            r.error = "no complete hypothesis";
          else
            r.best = std::move(d.nbest.front());
          stats[row][i] = std::move(d.stats);
        } catch (const Error& e) {
          r.error = e.what();
        }
      }
  };

  if (config.workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(config.workers), n);
    for (std::size_t w = 0; w < k; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) work(i);
      });
    for (std::thread& t : pool) t.join();
  }

  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    for (std::size_t s = 0; s < config.strategies.size(); ++s) {
      const std::size_t row = g * config.strategies.size() + s;
      const auto& res = out.results[row];
      SweepRow r;
      r.grid_point = config.grid[g].name;
      r.strategy = config.strategies[s];
      r.wer = corpus_wer(out.references, res);
      int errors = 0, trans = 0, score = 0;
      for (std::size_t i = 0; i < n; ++i) {
        errors += is_search_error(res[i], out.exact[i], config.search_error_tolerance);
        const bool t = same_labels(res[i], out.exact[i].labels);
        trans += t;
        score += t && std::abs(res[i].best->score.value - out.exact[i].score.value) <=
                          config.tolerance;
        r.failures += !res[i].best;
        r.hypotheses_expanded += stats[row][i].expanded;
        if (config.record_timing) r.wall_ms += stats[row][i].wall_ms;
      }
      r.search_error_rate = n == 0 ? 0.0 : errors / static_cast<double>(n);
      r.same_trans_pct = pct(trans, n);
      r.same_score_pct = pct(score, n);
      out.rows.push_back(r);
    }
    if (config.strategies.size() >= 2) {
      const std::size_t base = g * config.strategies.size();
      out.pairwise.push_back(compare_decodes(out.results[base], out.results[base + 1],
                                             config.tolerance, &out.references));
    }
  }
  return out;
}

const SweepRow& find_row(const SweepResult& sweep, std::string_view grid_point, Strategy s) {
  for (const SweepRow& r : sweep.rows)
    if (r.grid_point == grid_point && r.strategy == s) return r;
  throw DomainError("no sweep row for " + std::string(grid_point) + " / " +
                    std::string(to_string(s)));
}

// ---------------------------------------------------------------------------

std::string sweep_csv(const SweepResult& sweep) {
  std::string out = std::string("# unit-level WER: labels stand in for words\n") +
                    kSweepCsvHeader + "\n";
  char buf[512];
  for (const SweepRow& r : sweep.rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%.6f,%.6f,%.4f,%.4f,%lld,%.3f\n",
                  r.grid_point.c_str(), std::string(to_string(r.strategy)).c_str(), r.wer,
                  r.search_error_rate, r.same_trans_pct, r.same_score_pct,
                  static_cast<long long>(r.hypotheses_expanded), r.wall_ms);
    out += buf;
  }
  return out;
}

namespace {

json score_json(LogScore s) { return s.finite() ? json(s.value) : json(nullptr); }

json scored_json(const std::optional<ScoredSequence>& s) {
  if (!s) return nullptr;
  json j = {{"labels", s->labels}, {"score", score_json(s->score)}};
  if (s->segmentation) j["boundaries"] = s->segmentation->boundaries;
  return j;
}

json comparison_to_json(const ComparisonReport& r) {
  json j = {{"same_trans_pct", r.same_trans_pct},
            {"same_score_pct", r.same_score_pct},
            {"search_error_rate", r.search_error_rate},
            {"tolerance", r.tolerance}};
  if (r.wer_a) j["wer_a"] = *r.wer_a;
  if (r.wer_b) j["wer_b"] = *r.wer_b;
  json recs = json::array();
  for (const UtteranceComparison& c : r.records)
    recs.push_back({{"id", c.id},
                    {"labels_a", c.labels_a},
                    {"labels_b", c.labels_b},
                    {"score_a", score_json(c.score_a)},
                    {"score_b", score_json(c.score_b)},
                    {"same_trans", c.same_trans},
                    {"same_score", c.same_score}});
  j["records"] = std::move(recs);
  return j;
}

}  // namespace

std::string comparison_json(const ComparisonReport& report) {
  return comparison_to_json(report).dump(2) + "\n";
}

std::string sweep_json(const SweepResult& sweep, const SweepConfig& config) {
  json j;
  j["note"] = "unit-level WER: labels stand in for words";
  json grid = json::array();
  for (const GridPoint& g : config.grid) grid.push_back({{"name", g.name}, {"prune", g.prune.describe()}});
  json strategies = json::array();
  for (Strategy s : config.strategies) strategies.push_back(std::string(to_string(s)));
  j["config"] = {{"grid", grid},
                 {"strategies", strategies},
                 {"lm_scale", config.lm_scale},
                 {"max_labels_per_frame", config.max_labels_per_frame},
                 {"max_steps", config.max_steps},
                 {"tolerance", config.tolerance},
                 {"search_error_tolerance", config.search_error_tolerance},
                 {"record_timing", config.record_timing}};
  json rows = json::array();
  for (const SweepRow& r : sweep.rows)
    rows.push_back({{"grid_point", r.grid_point},
                    {"strategy", std::string(to_string(r.strategy))},
                    {"wer", r.wer},
                    {"search_error_rate", r.search_error_rate},
                    {"same_trans_pct", r.same_trans_pct},
                    {"same_score_pct", r.same_score_pct},
                    {"hypotheses_expanded", r.hypotheses_expanded},
                    {"wall_ms", r.wall_ms},
                    {"failures", r.failures}});
  j["rows"] = std::move(rows);
  json utts = json::array();
  for (std::size_t i = 0; i < sweep.ids.size(); ++i) {
    json u = {{"id", sweep.ids[i]},
              {"reference", sweep.references[i]},
              {"exact", scored_json(sweep.exact[i])}};
    json res = json::array();
    for (std::size_t row = 0; row < sweep.rows.size(); ++row) {
      const UtteranceResult& r = sweep.results[row][i];
      json e = {{"grid_point", sweep.rows[row].grid_point},
                {"strategy", std::string(to_string(sweep.rows[row].strategy))},
                {"best", scored_json(r.best)}};
      if (!r.error.empty()) e["error"] = r.error;
      res.push_back(std::move(e));
    }
    u["results"] = std::move(res);
    utts.push_back(std::move(u));
  }
  j["utterances"] = std::move(utts);
  json pw = json::array();
  for (std::size_t g = 0; g < sweep.pairwise.size(); ++g) {
    json c = comparison_to_json(sweep.pairwise[g]);
    c["grid_point"] = config.grid[g].name;
    pw.push_back(std::move(c));
  }
  j["pairwise"] = std::move(pw);
  return j.dump(2) + "\n";
}

}  // namespace transeg
