// python/bindings.cpp

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

// pybind11 module transeg._core: thin wrappers over the C++ library. Results
// come back as plain dicts and lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "transeg/evalharness.hpp"
#include "transeg/lm.hpp"
#include "transeg/models.hpp"
#include "transeg/oracle.hpp"
#include "transeg/search.hpp"
#include "transeg/transform.hpp"

namespace py = pybind11;
using namespace transeg;

namespace {

// Model handle over either table kind.
struct Model {
  AnyModelPtr ptr;

  bool is_transducer() const {
    return std::holds_alternative<std::shared_ptr<const TransducerModel>>(ptr);
  }
  template <typename F>
  decltype(auto) visit(F&& f) const {
    return std::visit([&](const auto& p) -> decltype(auto) { return f(*p); }, ptr);
  }
  const Topology& topology() const {
    return visit([](const auto& m) -> const Topology& { return m.topology(); });
  }
  const Vocabulary& vocabulary() const {
    return visit([](const auto& m) -> const Vocabulary& { return m.vocabulary(); });
  }
  std::shared_ptr<const TransducerScorer> steps() const {
    if (is_transducer()) return std::get<std::shared_ptr<const TransducerModel>>(ptr);
    return segmental_to_transducer(std::get<std::shared_ptr<const SegmentalModel>>(ptr));
  }
  std::shared_ptr<const SegmentalScorer> segments() const {
    if (!is_transducer()) return std::get<std::shared_ptr<const SegmentalModel>>(ptr);
    return transducer_to_segmental(std::get<std::shared_ptr<const TransducerModel>>(ptr));
  }
};

py::dict scored(const ScoredSequence& s) {
  py::dict d;
  d["labels"] = s.labels;
  d["score"] = s.score.value;
  if (s.segmentation) d["boundaries"] = s.segmentation->boundaries;
  return d;
}

TopologyKind topology_of(const std::string& s) {
  if (s == "rnnt") return TopologyKind::kRnnt;
  if (s == "strict") return TopologyKind::kStrictMonotonic;
  throw DomainError("unknown topology '" + s + "' (rnnt | strict)");
}

Model generate_model(const std::string& kind, const std::string& topology, int frames,
                     int vocab_size, int context_order, double smoothness, double blank_bias,
                     std::uint64_t seed) {
  GeneratorParams gp;
  gp.topology = topology_of(topology);
  gp.frames = frames;
  gp.vocab_size = vocab_size;
  gp.context_order = context_order;
  gp.smoothness = smoothness;
  gp.blank_bias = blank_bias;
  if (kind == "transducer")
    return {std::make_shared<const TransducerModel>(generate_random_transducer(seed, gp))};
  if (kind == "segmental")
    return {std::make_shared<const SegmentalModel>(generate_random_segmental(seed, gp))};
  throw DomainError("unknown model kind '" + kind + "' (transducer | segmental)");
}

py::dict decode_py(const Model& m, const std::string& strategy, std::optional<double> q_prune,
                   std::optional<int> beam, std::optional<int> boundary_beam,
                   const NGramLM* lm, double lm_scale, int nbest, int max_labels_per_frame,
                   int max_steps) {
  DecodeOptions o;
  o.prune = {q_prune, beam, boundary_beam};
  o.lm = lm;
  o.lm_scale = lm_scale;
  o.nbest = nbest;
  o.max_labels_per_frame = max_labels_per_frame;
  o.max_steps = max_steps;
  DecodeResult r;
  {
    py::gil_scoped_release release;
    r = decode(as_scorer(m.ptr), strategy_from_string(strategy), o);
  }
  py::list hyps;
  for (const ScoredSequence& h : r.nbest) hyps.append(scored(h));
  py::dict stats;
  stats["expanded"] = r.stats.expanded;
  stats["pruned"] = r.stats.pruned;
  stats["peak_beam"] = r.stats.peak_beam;
  stats["steps"] = r.stats.steps;
  stats["step_cap_hit"] = r.stats.step_cap_hit;
  stats["live_per_step"] = r.stats.live_per_step;
  py::dict d;
  d["nbest"] = hyps;
  d["note"] = r.note;
  d["stats"] = stats;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "transducer / segmental model equivalence toolkit (C++ core)";

  // Translators run most recent first, so the base class goes first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<VersionError>(m, "VersionError", PyExc_ValueError);
  py::register_exception<UnreachableError>(m, "UnreachableError", PyExc_ArithmeticError);
  py::register_exception<GuardExceeded>(m, "GuardExceeded", PyExc_RuntimeError);

  py::class_<Model>(m, "Model")
      .def_static("from_json", [](const std::string& text) { return Model{model_from_json(text)}; })
      .def_static("load", [](const std::string& path) { return Model{load_model(path)}; })
      .def("to_json", [](const Model& x) {
        return x.visit([](const auto& mm) { return model_to_json(mm); });
      })
      .def("save", [](const Model& x, const std::string& path) {
        x.visit([&](const auto& mm) { save_model(mm, path); });
      })
      .def_property_readonly("kind", [](const Model& x) {
        return x.is_transducer() ? "transducer" : "segmental";
      })
      .def_property_readonly("topology", [](const Model& x) {
        return x.topology().rnnt() ? "rnnt" : "strict";
      })
      .def_property_readonly("frames", [](const Model& x) { return x.topology().frames; })
      .def_property_readonly("vocabulary", [](const Model& x) { return x.vocabulary().labels(); })
      .def("__repr__", [](const Model& x) {
        return std::string("<transeg.Model ") + (x.is_transducer() ? "transducer " : "segmental ") +
               (x.topology().rnnt() ? "rnnt" : "strict") + " T=" +
               std::to_string(x.topology().frames) + ">";
      });

  py::class_<NGramLM>(m, "LM")
      .def_static("uniform", [](int vocab_size, int order) {
        return NGramLM::uniform(Vocabulary::make_default(vocab_size), order);
      })
      .def_static("generate", [](std::uint64_t seed, int vocab_size, int order, double smoothness) {
        return generate_random_lm(seed, Vocabulary::make_default(vocab_size), order, smoothness);
      }, py::arg("seed"), py::arg("vocab_size"), py::arg("order"), py::arg("smoothness") = 0.5)
      .def_static("from_json", [](const std::string& text) { return lm_from_json(text); })
      .def_static("load", &load_lm)
      .def("to_json", &lm_to_json)
      .def("save", [](const NGramLM& lm, const std::string& path) { save_lm(lm, path); })
      .def_property_readonly("order", &NGramLM::order)
      .def("score", [](const NGramLM& lm, const LabelSeq& labels) {
        return lm_score(lm, labels).value;
      });

  m.def("generate_model", &generate_model, py::arg("kind") = "transducer",
        py::arg("topology") = "strict", py::arg("frames") = 4, py::arg("vocab_size") = 2,
        py::arg("context_order") = 0, py::arg("smoothness") = 0.5, py::arg("blank_bias") = 0.0,
        py::arg("seed") = 0);

  m.def("t2s", [](const Model& x) {
    if (!x.is_transducer()) throw DomainError("t2s needs a transducer model");
    return Model{std::make_shared<const SegmentalModel>(materialize(*x.segments()))};
  }, "Materialized segmental model of a transducer model.");
  m.def("s2t", [](const Model& x) {
    if (x.is_transducer()) throw DomainError("s2t needs a segmental model");
    return Model{std::make_shared<const TransducerModel>(materialize(*x.steps()))};
  }, "Materialized transducer model of a segmental model.");

  m.def("full_sum", [](const Model& x, const LabelSeq& labels, const std::string& method) {
    const SumMethod sm = method == "enumerate" ? SumMethod::kEnumerate : SumMethod::kDynamic;
    if (x.is_transducer()) return full_sum_transducer(*x.steps(), labels, sm).value;
    return full_sum_segmental(*x.segments(), labels, sm).value;
  }, py::arg("model"), py::arg("labels"), py::arg("method") = "dp",
     "-ln of the summed probability of all alignments of `labels`.");

  m.def("total_mass", [](const Model& x, int max_labels) {
    const MassReport r = x.is_transducer() ? total_mass(*x.steps(), max_labels)
                                           : total_mass(*x.segments(), max_labels);
    py::dict d;
    d["mass"] = r.mass.prob();
    d["exact"] = r.exact;
    d["max_labels"] = r.max_labels;
    return d;
  }, py::arg("model"), py::arg("max_labels") = kDefaultMassLabels);

  m.def("exact_best", [](const Model& x, const NGramLM* lm, double lm_scale) {
    return scored(exact_best(*x.steps(), LmFusion{lm, lm_scale}));
  }, py::arg("model"), py::arg("lm") = nullptr, py::arg("lm_scale") = 0.0);

  m.def("decode", &decode_py, py::arg("model"), py::arg("strategy") = "time-sync",
        py::arg("q_prune") = py::none(), py::arg("beam") = py::none(),
        py::arg("boundary_beam") = py::none(), py::arg("lm") = nullptr,
        py::arg("lm_scale") = 0.0, py::arg("nbest") = 1, py::arg("max_labels_per_frame") = 3,
        py::arg("max_steps") = 0);

  m.def("wer", [](const LabelSeq& ref, const LabelSeq& hyp) {
    const WerResult w = wer(ref, hyp);
    py::dict d;
    d["substitutions"] = w.substitutions;
    d["insertions"] = w.insertions;
    d["deletions"] = w.deletions;
    d["rate"] = w.rate;
    d["empty_reference"] = w.empty_reference;
    return d;
  });

  m.def("audit_json", [](const Model& x, int max_labels) {
    AuditOptions o;
    o.max_labels = max_labels;
    return audit_json(audit_model(x.ptr, o));
  }, py::arg("model"), py::arg("max_labels") = kDefaultMassLabels);

  m.def("sweep_csv", [](std::uint64_t seed, int count, const std::string& topology, int frames,
                        int max_frames, int vocab_size, int context_order, double smoothness,
                        double blank_bias, const std::vector<double>& q_grid,
                        std::optional<int> beam, const std::vector<std::string>& strategies) {
    SuiteParams p;
    p.model.topology = topology_of(topology);
    p.model.frames = frames;
    p.model.vocab_size = vocab_size;
    p.model.context_order = context_order;
    p.model.smoothness = smoothness;
    p.model.blank_bias = blank_bias;
    p.max_frames = max_frames;
    SweepConfig c;
    c.grid = q_prune_grid(q_grid, beam);
    c.strategies.clear();
    for (const std::string& s : strategies) c.strategies.push_back(strategy_from_string(s));
    py::gil_scoped_release release;
    return sweep_csv(pruning_sweep(generate_utterance_set(seed, count, p), c));
  }, py::arg("seed") = 1, py::arg("count") = 10, py::arg("topology") = "strict",
     py::arg("frames") = 4, py::arg("max_frames") = 0, py::arg("vocab_size") = 2,
     py::arg("context_order") = 1, py::arg("smoothness") = 0.5, py::arg("blank_bias") = 0.0,
     py::arg("q_grid") = kDefaultQGrid, py::arg("beam") = py::none(),
     py::arg("strategies") = std::vector<std::string>{"time-sync", "label-sync"});
}
