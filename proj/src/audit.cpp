// src/audit.cpp

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

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "transeg/evalharness.hpp"
#include "transeg/transform.hpp"

namespace transeg {

bool AuditReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.passed; });
}

const AuditCheck& AuditReport::check(std::string_view name) const {
  for (const AuditCheck& c : checks)
    if (c.name == name) return c;
  throw DomainError("no audit check named '" + std::string(name) + "'");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Log-domain distance; two zero probabilities agree.
double log_gap(LogScore x, LogScore y) {
  if (x.is_inf() && y.is_inf()) return 0.0;
  if (x.is_inf() || y.is_inf()) return kInf;
  return std::abs(x.value - y.value);
}

double prob_gap(LogScore x, LogScore y) { return std::abs(x.prob() - y.prob()); }

// Tracks the worst deviation and the first place it exceeded the tolerance.
struct Tracker {
  AuditCheck c;
  Tracker(std::string name, double tol) {
    c.name = std::move(name);
    c.tolerance = tol;
    c.passed = true;
  }
  void see(double gap, const std::string& where) {
    if (!(gap <= c.worst)) c.worst = gap;  // NaN propagates
    if (!(gap <= c.tolerance) && c.passed) {
      c.passed = false;
      std::ostringstream os;
      os << where << ": deviation " << gap;
      c.detail = os.str();
    }
  }
  void fail(const std::string& why) {
    c.passed = false;
    if (c.detail.empty()) c.detail = why;
  }
};

template <typename F>
AuditCheck guarded(const std::string& name, double tol, F&& body) {
  Tracker tr(name, tol);
  try {
    body(tr);
  } catch (const Error& e) {
    tr.fail(e.what());
  }
  return tr.c;
}

std::vector<LabelSeq> audit_sequences(const Topology& topo, int V, int max_labels) {
  return enumerate_label_sequences(V, topo.strict() ? topo.frames : max_labels);
}

std::string seq_text(const Vocabulary& v, const LabelSeq& s) {
  return "labels [" + v.format(s) + "]";
}

AuditCheck mass_check(const MassReport& mass, const AuditOptions& o, bool strict) {
  Tracker tr("normalization", o.mass_tolerance);
  const double m = mass.mass.prob();
  if (strict) {
    tr.see(std::abs(m - 1.0), "total mass " + std::to_string(m));
  } else {
    // RNNT mass is only summed over short sequences: a lower bound.
    tr.see(std::max(0.0, m - 1.0), "total mass lower bound " + std::to_string(m));
    if (tr.c.passed)
      tr.c.detail = "lower bound " + std::to_string(m) + " over S <= " +
                    std::to_string(mass.max_labels);
  }
  return tr.c;
}

AuditCheck best_check(const ScoredSequence& best, const TransducerScorer& steps,
                      const std::vector<LabelSeq>& seqs, bool covers_all,
                      const AuditOptions& o) {
  Tracker tr("exact_best", o.best_tolerance);
  LogScore min = kZeroProb;
  for (const LabelSeq& s : seqs)
    for (const ScoredPath& p : enumerate_paths(steps, s)) min = std::min(min, p.score);
  const bool in_range = covers_all || static_cast<int>(best.labels.size()) <=
                                          static_cast<int>(seqs.empty() ? 0 : seqs.back().size());
  if (in_range)
    tr.see(log_gap(best.score, min), "exact best vs minimum enumerated path");
  else
    tr.see(std::max(0.0, best.score.value - min.value), "enumerated path beats exact best");
  if (best.segmentation)
    tr.see(log_gap(path_score(steps, segmentation_to_path(*best.segmentation)), best.score),
           "exact best score vs its own alignment");
  return tr.c;
}

AuditReport audit_transducer(const std::shared_ptr<const TransducerModel>& m,
                             const AuditOptions& o) {
  AuditReport rep;
  rep.model_kind = "transducer";
  const Topology& topo = m->topology();
  rep.topology = std::string(to_string(topo.kind));
  const Vocabulary& vocab = m->vocabulary();
  const auto seqs = audit_sequences(topo, vocab.size(), o.max_labels);
  const auto view = transducer_to_segmental(m);

  rep.checks.push_back(guarded("validation", 0.0, [&](Tracker& tr) {
    for (const Violation& v : validate_model(*m)) tr.fail(v.row + ": " + v.defect);
  }));
  rep.checks.push_back(guarded("equivalence", o.equivalence_tolerance, [&](Tracker& tr) {
    for (const LabelSeq& s : seqs)
      tr.see(log_gap(full_sum_transducer(*m, s), full_sum_segmental(*view, s)),
             seq_text(vocab, s));
  }));
  rep.checks.push_back(guarded("round_trip", o.round_trip_tolerance, [&](Tracker& tr) {
    const TransducerModel back = materialize(*segmental_to_transducer(view));
    for (const auto& key : back.reachable_keys()) {
      const Distribution& r = back.row(key.t, key.t_prev, key.ctx);
      if (r.unreachable) continue;
      const Distribution orig = m->step(key.t, key.t_prev, back.codec().history(key.ctx));
      for (std::size_t i = 0; i < r.scores.size(); ++i)
        tr.see(prob_gap(r.scores[i], orig.scores[i]),
               "row t=" + std::to_string(key.t) + " t_prev=" + std::to_string(key.t_prev));
    }
  }));
  rep.checks.push_back([&] {
    try {
      return mass_check(total_mass(*m, o.max_labels), o, topo.strict());
    } catch (const Error& e) {
      AuditCheck c{"normalization", false, 0.0, o.mass_tolerance, e.what()};
      return c;
    }
  }());
  rep.checks.push_back(guarded("dp_vs_enumeration", o.dp_tolerance, [&](Tracker& tr) {
    for (const LabelSeq& s : seqs) {
      tr.see(log_gap(full_sum_transducer(*m, s, SumMethod::kEnumerate),
                     full_sum_transducer(*m, s, SumMethod::kDynamic)),
             "transducer " + seq_text(vocab, s));
      tr.see(log_gap(full_sum_segmental(*view, s, SumMethod::kEnumerate),
                     full_sum_segmental(*view, s, SumMethod::kDynamic)),
             "segmental view " + seq_text(vocab, s));
    }
  }));
  rep.checks.push_back([&] {
    try {
      return best_check(exact_best(*m), *m, seqs, topo.strict(), o);
    } catch (const Error& e) {
      AuditCheck c{"exact_best", false, 0.0, o.best_tolerance, e.what()};
      return c;
    }
  }());
  return rep;
}

AuditReport audit_segmental(const std::shared_ptr<const SegmentalModel>& m,
                            const AuditOptions& o) {
  AuditReport rep;
  rep.model_kind = "segmental";
  const Topology& topo = m->topology();
  const int T = topo.frames;
  rep.topology = std::string(to_string(topo.kind));
  const Vocabulary& vocab = m->vocabulary();
  const auto seqs = audit_sequences(topo, vocab.size(), o.max_labels);
  const auto steps = segmental_to_transducer(m);

  rep.checks.push_back(guarded("validation", 0.0, [&](Tracker& tr) {
    auto v = validate_model(*m, Normalization::kNative);
    if (!v.empty() && validate_model(*m, Normalization::kDerived).empty()) {
      tr.c.detail = "derived normalization";
      return;
    }
    for (const Violation& x : v) tr.fail(x.row + ": " + x.defect);
  }));
  rep.checks.push_back(guarded("equivalence", o.equivalence_tolerance, [&](Tracker& tr) {
    for (const LabelSeq& s : seqs)
      tr.see(log_gap(full_sum_segmental(*m, s), full_sum_transducer(*steps, s)),
             seq_text(vocab, s));
  }));
  rep.checks.push_back(guarded("round_trip", o.round_trip_tolerance, [&](Tracker& tr) {
    const SegmentalModel back = materialize(*transducer_to_segmental(
        std::shared_ptr<const TransducerScorer>(std::make_shared<const TransducerModel>(
            materialize(*steps)))));
    const int V = vocab.size();
    for (const auto& key : m->reachable_boundary_keys()) {
      const BoundaryRow& orig = m->boundary_row(key.t_prev, key.ctx);
      if (orig.unreachable) continue;
      const LabelSeq h = m->codec().history(key.ctx);
      const BoundaryRow got = back.boundary(key.t_prev, h);
      const std::string where = "boundary row t_prev=" + std::to_string(key.t_prev);
      for (int t = orig.first; t <= orig.last(); ++t) {
        if (orig.at(t).is_inf() && got.at(t).is_inf()) continue;
        const Distribution ol = m->label(key.t_prev, t, h);
        const Distribution gl = back.label(key.t_prev, t, h);
        if (t < T) {
          tr.see(prob_gap(orig.at(t), got.at(t)), where + " t=" + std::to_string(t));
          for (int i = 0; i <= V; ++i)
            tr.see(prob_gap(ol.scores[i], gl.scores[i]),
                   "label row t_prev=" + std::to_string(key.t_prev) + " t=" + std::to_string(t));
        } else {
          // The split of p(T) and the label factor at T is fixed by the
          // transducer side; only the joint is determined.
          for (Label a = 0; a < V; ++a)
            tr.see(prob_gap(orig.at(t) + ol.label(a), got.at(t) + gl.label(a)),
                   where + " joint at T");
        }
      }
      tr.see(prob_gap(sentence_end_score(*m, orig, key.t_prev, h),
                      sentence_end_score(back, got, key.t_prev, h)),
             where + " sentence end");
    }
  }));
  rep.checks.push_back([&] {
    try {
      return mass_check(total_mass(*m, o.max_labels), o, topo.strict());
    } catch (const Error& e) {
      AuditCheck c{"normalization", false, 0.0, o.mass_tolerance, e.what()};
      return c;
    }
  }());
  rep.checks.push_back(guarded("dp_vs_enumeration", o.dp_tolerance, [&](Tracker& tr) {
    for (const LabelSeq& s : seqs) {
      tr.see(log_gap(full_sum_segmental(*m, s, SumMethod::kEnumerate),
                     full_sum_segmental(*m, s, SumMethod::kDynamic)),
             "segmental " + seq_text(vocab, s));
      tr.see(log_gap(full_sum_transducer(*steps, s, SumMethod::kEnumerate),
                     full_sum_transducer(*steps, s, SumMethod::kDynamic)),
             "transducer view " + seq_text(vocab, s));
    }
  }));
  rep.checks.push_back([&] {
    try {
      return best_check(exact_best(std::shared_ptr<const SegmentalScorer>(m)), *steps, seqs,
                        topo.strict(), o);
    } catch (const Error& e) {
      AuditCheck c{"exact_best", false, 0.0, o.best_tolerance, e.what()};
      return c;
    }
  }());
  return rep;
}

}  // namespace

AuditReport audit_model(const AnyModelPtr& model, const AuditOptions& options) {
  if (options.max_labels < 0) throw DomainError("max_labels must be >= 0");
  if (const auto* t = std::get_if<std::shared_ptr<const TransducerModel>>(&model))
    return audit_transducer(*t, options);
  return audit_segmental(std::get<std::shared_ptr<const SegmentalModel>>(model), options);
}

std::string audit_json(const AuditReport& report) {
  nlohmann::json j;
  j["model_kind"] = report.model_kind;
  j["topology"] = report.topology;
  j["passed"] = report.passed();
  nlohmann::json checks = nlohmann::json::array();
  for (const AuditCheck& c : report.checks) {
    nlohmann::json x = {{"name", c.name},
                        {"passed", c.passed},
                        {"tolerance", c.tolerance},
                        {"detail", c.detail}};
    x["worst"] = std::isfinite(c.worst) ? nlohmann::json(c.worst) : nlohmann::json("inf");
    checks.push_back(std::move(x));
  }
  j["checks"] = std::move(checks);
  return j.dump(2) + "\n";
}

}  // namespace transeg
