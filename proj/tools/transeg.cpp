// tools/transeg.cpp

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

// transeg command-line driver: generate | transform | decode | compare |
// sweep | verify. Exit codes: 0 success, 1 validation or audit failure,
// 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "transeg/evalharness.hpp"
#include "transeg/lm.hpp"
#include "transeg/models.hpp"
#include "transeg/search.hpp"
#include "transeg/transform.hpp"

namespace {

using nlohmann::json;
using namespace transeg;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Usage problems detected after parsing (bad combinations of flags).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Seeds may be overridden from the environment for CI fuzzing.
std::uint64_t resolve_seed(std::uint64_t seed) {
  if (const char* env = std::getenv("TRANSEG_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw UsageError("TRANSEG_SEED is not an unsigned integer");
    std::cerr << "transeg: seed " << seed << " overridden by TRANSEG_SEED=" << v << "\n";
    return v;
  }
  return seed;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TopologyKind topology_arg(const std::string& s) {
  return s == "rnnt" ? TopologyKind::kRnnt : TopologyKind::kStrictMonotonic;
}

const std::vector<std::string> kTopologies = {"rnnt", "strict"};
const std::vector<std::string> kStrategies = {"time-sync", "label-sync", "label-sync-2stage"};

const Vocabulary& vocabulary_of(const AnyModelPtr& m) {
  return std::visit([](const auto& p) -> const Vocabulary& { return p->vocabulary(); }, m);
}

json labels_json(const Vocabulary& v, const LabelSeq& labels) {
  return {{"text", v.format(labels)}, {"ids", labels}};
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string kind = "transducer";
  std::string topology = "strict";
  GeneratorParams gp;
  int lm_order = 2;
  std::uint64_t seed = 0;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  GeneratorParams gp = a.gp;
  gp.topology = topology_arg(a.topology);
  const std::uint64_t seed = resolve_seed(a.seed);
  const json config = {{"command", "generate"}, {"kind", a.kind},
                       {"topology", a.topology}, {"frames", gp.frames},
                       {"vocab_size", gp.vocab_size}, {"context_order", gp.context_order},
                       {"smoothness", gp.smoothness}, {"blank_bias", gp.blank_bias},
                       {"lm_order", a.lm_order}, {"seed", seed}, {"out", a.out}};
  if (a.kind == "transducer") {
    write_text(a.out, model_to_json(generate_random_transducer(seed, gp)));
  } else if (a.kind == "segmental") {
    write_text(a.out, model_to_json(generate_random_segmental(seed, gp)));
  } else {
    write_text(a.out, lm_to_json(generate_random_lm(seed, Vocabulary::make_default(gp.vocab_size),
                                                    a.lm_order, gp.smoothness)));
  }
  std::cerr << config.dump() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct TransformArgs {
  std::string in;
  std::string direction;
  bool materialize = true;
  std::string out;
};

int run_transform(const TransformArgs& a) {
  if (!a.materialize)
    throw UsageError("lazy views cannot be written to a file; drop --no-materialize");
  const AnyModelPtr m = load_model(a.in);
  std::string text;
  if (a.direction == "t2s") {
    const auto* t = std::get_if<std::shared_ptr<const TransducerModel>>(&m);
    if (!t) throw Error("t2s needs a transducer model; '" + a.in + "' is segmental");
    text = model_to_json(materialize(*transducer_to_segmental(*t)));
  } else {
    const auto* s = std::get_if<std::shared_ptr<const SegmentalModel>>(&m);
    if (!s) throw Error("s2t needs a segmental model; '" + a.in + "' is a transducer");
    text = model_to_json(materialize(*segmental_to_transducer(*s)));
  }
  write_text(a.out, text);
  std::cerr << json{{"command", "transform"}, {"in", a.in}, {"direction", a.direction},
                    {"materialize", a.materialize}, {"out", a.out}}.dump()
            << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct PruneArgs {
  std::optional<double> q_prune;
  std::optional<int> beam;
  std::optional<int> boundary_beam;

  PruneConfig config() const { return {q_prune, beam, boundary_beam}; }
};

json prune_json(const PruneConfig& p) {
  auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  return {{"q_prune", opt(p.q_prune)}, {"beam_b", opt(p.beam)}, {"beam_bt", opt(p.boundary_beam)}};
}

struct DecodeArgs {
  std::vector<std::string> models;
  std::string strategy = "time-sync";
  PruneArgs prune;
  std::string lm;
  double lm_scale = 0.0;
  int nbest = 1;
  int max_labels_per_frame = 3;
  int max_steps = 0;
  bool record_timing = false;
  std::string out;
};

int run_decode(const DecodeArgs& a) {
  std::optional<NGramLM> lm;
  if (!a.lm.empty()) lm = load_lm(a.lm);
  DecodeOptions o;
  o.prune = a.prune.config();
  o.prune.check();
  o.lm = lm ? &*lm : nullptr;
  o.lm_scale = a.lm_scale;
  o.nbest = a.nbest;
  o.max_labels_per_frame = a.max_labels_per_frame;
  o.max_steps = a.max_steps;
  const Strategy strategy = strategy_from_string(a.strategy);

  json results = json::array();
  for (const std::string& path : a.models) {
    const AnyModelPtr m = load_model(path);
    const Vocabulary& vocab = vocabulary_of(m);
    if (lm && !(lm->vocabulary() == vocab))
      throw Error("LM vocabulary differs from the vocabulary of '" + path + "'");
    const DecodeResult r = decode(as_scorer(m), strategy, o);
    json nbest = json::array();
    for (const ScoredSequence& h : r.nbest) {
      json e = labels_json(vocab, h.labels);
      e["score"] = h.score.value;
      if (h.segmentation) e["boundaries"] = h.segmentation->boundaries;
      nbest.push_back(std::move(e));
    }
    json stats = {{"expanded", r.stats.expanded},  {"pruned", r.stats.pruned},
                  {"peak_beam", r.stats.peak_beam}, {"steps", r.stats.steps},
                  {"step_cap_hit", r.stats.step_cap_hit},
                  {"wall_ms", a.record_timing ? r.stats.wall_ms : 0.0}};
    json entry = {{"id", std::filesystem::path(path).stem().string()},
                  {"model", path}, {"note", r.note}, {"nbest", nbest}, {"stats", stats}};
    if (!r.nbest.empty()) {
      entry["labels"] = r.nbest.front().labels;
      entry["score"] = r.nbest.front().score.value;
    } else {
      entry["error"] = "no complete hypothesis";
    }
    results.push_back(std::move(entry));
  }
  const json config = {{"command", "decode"},
                       {"models", a.models},
                       {"strategy", a.strategy},
                       {"prune", prune_json(o.prune)},
                       {"lm", a.lm},
                       {"lm_scale", a.lm_scale},
                       {"nbest", a.nbest},
                       {"max_labels_per_frame", a.max_labels_per_frame},
                       {"max_steps", a.max_steps},
                       {"record_timing", a.record_timing}};
  write_text(a.out, json{{"config", config}, {"results", results}}.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------

std::vector<UtteranceResult> read_results(const std::string& path) {
  const json j = json::parse(read_text(path), nullptr, false);
  if (j.is_discarded() || !j.contains("results") || !j["results"].is_array())
    throw Error("'" + path + "' is not a decode result file");
  std::vector<UtteranceResult> out;
  for (const json& e : j["results"]) {
    UtteranceResult r;
    r.id = e.at("id").get<std::string>();
    if (e.contains("labels") && e.contains("score")) {
      ScoredSequence s;
      s.labels = e["labels"].get<LabelSeq>();
      s.score = LogScore{e["score"].get<double>()};
      r.best = std::move(s);
    } else {
      r.error = e.value("error", std::string("missing result"));
    }
    out.push_back(std::move(r));
  }
  return out;
}

struct CompareArgs {
  std::string a, b;
  double tolerance = kSameScoreTolerance;
  std::string out;
};

int run_compare(const CompareArgs& a) {
  const ComparisonReport rep = compare_decodes(read_results(a.a), read_results(a.b), a.tolerance);
  json j = json::parse(comparison_json(rep));
  j["config"] = {{"command", "compare"}, {"a", a.a}, {"b", a.b}, {"tolerance", a.tolerance}};
  write_text(a.out, j.dump(2) + "\n");
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  std::uint64_t seed = 1;
  int count = 20;
  std::string kind = "transducer";
  std::string topology = "strict";
  std::string reference = "oracle-best";
  GeneratorParams gp;
  int max_frames = 0;
  std::vector<double> q_grid = kDefaultQGrid;
  std::vector<int> beam_grid;
  std::optional<int> fixed_beam;
  std::vector<std::string> strategies = {"time-sync", "label-sync"};
  std::string lm;
  double lm_scale = 0.0;
  int max_labels_per_frame = 3;
  int max_steps = 0;
  double tolerance = kSameScoreTolerance;
  int workers = 1;
  bool record_timing = false;
  std::string csv = "-";
  std::string json_out;
};

int run_sweep(const SweepArgs& a) {
  SuiteParams p;
  p.model = a.gp;
  p.model.topology = topology_arg(a.topology);
  p.kind = a.kind == "segmental" ? ModelKind::kSegmental : ModelKind::kTransducer;
  p.reference = reference_mode_from_string(a.reference);
  p.max_frames = a.max_frames;
  p.max_labels_per_frame = p.model.topology == TopologyKind::kRnnt ? a.max_labels_per_frame : 0;
  const std::uint64_t seed = resolve_seed(a.seed);

  std::optional<NGramLM> lm;
  if (!a.lm.empty()) lm = load_lm(a.lm);
  SweepConfig c;
  c.grid = a.beam_grid.empty() ? q_prune_grid(a.q_grid, a.fixed_beam) : beam_grid(a.beam_grid);
  c.strategies.clear();
  for (const std::string& s : a.strategies) c.strategies.push_back(strategy_from_string(s));
  c.lm = lm ? &*lm : nullptr;
  c.lm_scale = a.lm_scale;
  c.max_labels_per_frame = a.max_labels_per_frame;
  c.max_steps = a.max_steps;
  c.tolerance = a.tolerance;
  c.workers = a.workers;
  c.record_timing = a.record_timing;

  const UtteranceSet set = generate_utterance_set(seed, a.count, p);
  if (lm && !(lm->vocabulary() == Vocabulary::make_default(p.model.vocab_size)))
    throw Error("LM vocabulary differs from the suite vocabulary");
  const SweepResult r = pruning_sweep(set, c);

  const json config = {{"command", "sweep"},
                       {"seed", seed},
                       {"count", a.count},
                       {"kind", a.kind},
                       {"topology", a.topology},
                       {"reference", a.reference},
                       {"frames", p.model.frames},
                       {"max_frames", a.max_frames},
                       {"vocab_size", p.model.vocab_size},
                       {"context_order", p.model.context_order},
                       {"smoothness", p.model.smoothness},
                       {"blank_bias", p.model.blank_bias},
                       {"q_grid", a.beam_grid.empty() ? json(a.q_grid) : json(nullptr)},
                       {"beam_grid", a.beam_grid.empty() ? json(nullptr) : json(a.beam_grid)},
                       {"beam_b", a.fixed_beam ? json(*a.fixed_beam) : json(nullptr)},
                       {"strategies", a.strategies},
                       {"lm", a.lm},
                       {"lm_scale", a.lm_scale},
                       {"max_labels_per_frame", a.max_labels_per_frame},
                       {"max_steps", a.max_steps},
                       {"tolerance", a.tolerance},
                       {"workers", a.workers},
                       {"record_timing", a.record_timing}};
  write_text(a.csv, sweep_csv(r));
  if (!a.json_out.empty()) {
    json j = json::parse(sweep_json(r, c));
    j["run_config"] = config;
    write_text(a.json_out, j.dump(2) + "\n");
  } else {
    std::cerr << config.dump() << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string model;
  int s_max = kDefaultMassLabels;
  std::string out;
};

int run_verify(const VerifyArgs& a) {
  AnyModelPtr m;
  try {
    m = load_model(a.model);
  } catch (const ParseError& e) {
    std::cerr << "transeg verify: " << e.what() << "\n";
    return kExitFailure;
  }
  AuditOptions o;
  o.max_labels = a.s_max;
  const AuditReport rep = audit_model(m, o);
  json j = json::parse(audit_json(rep));
  j["config"] = {{"command", "verify"}, {"model", a.model}, {"s_max", a.s_max}};
  write_text(a.out, j.dump(2) + "\n");
  for (const AuditCheck& c : rep.checks)
    if (!c.passed) std::cerr << "FAILED " << c.name << ": " << c.detail << "\n";
  return rep.passed() ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transeg: transducer / segmental equivalence toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "transeg 0.1.0");

  auto topo_check = CLI::IsMember(kTopologies);

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Write a random model or label LM");
  gen->add_option("--kind", ga.kind, "transducer | segmental | lm")
      ->check(CLI::IsMember({"transducer", "segmental", "lm"}));
  gen->add_option("--topology", ga.topology, "rnnt | strict")->check(topo_check);
  gen->add_option("--frames,-T", ga.gp.frames)->check(CLI::PositiveNumber);
  gen->add_option("--vocab,-V", ga.gp.vocab_size)->check(CLI::PositiveNumber);
  gen->add_option("--context-order,-k", ga.gp.context_order)->check(CLI::NonNegativeNumber);
  gen->add_option("--smoothness", ga.gp.smoothness)->check(CLI::Range(0.0, 1.0));
  gen->add_option("--blank-bias", ga.gp.blank_bias);
  gen->add_option("--lm-order", ga.lm_order)->check(CLI::PositiveNumber);
  gen->add_option("--seed", ga.seed);
  gen->add_option("--out,-o", ga.out, "output path ('-' for stdout)")->required();

  TransformArgs ta;
  auto* tr = app.add_subcommand("transform", "t2s or s2t, written as a table");
  tr->add_option("--in,-i", ta.in)->required()->check(CLI::ExistingFile);
  tr->add_option("--direction", ta.direction, "t2s | s2t")
      ->required()
      ->check(CLI::IsMember({"t2s", "s2t"}));
  tr->add_flag("--materialize,!--no-materialize", ta.materialize);
  tr->add_option("--out,-o", ta.out)->required();

  DecodeArgs da;
  auto* dec = app.add_subcommand("decode", "Beam search on one or more model files");
  dec->add_option("--model,-m", da.models, "model file (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  dec->add_option("--strategy", da.strategy)->check(CLI::IsMember(kStrategies));
  dec->add_option("--q-prune", da.prune.q_prune, "score threshold Q_prune")
      ->check(CLI::PositiveNumber);
  dec->add_option("--beam-b", da.prune.beam, "hypothesis beam B")->check(CLI::PositiveNumber);
  dec->add_option("--beam-bt", da.prune.boundary_beam, "boundary beam B_t")
      ->check(CLI::PositiveNumber);
  dec->add_option("--lm", da.lm)->check(CLI::ExistingFile);
  dec->add_option("--lm-scale", da.lm_scale, "LM scale lambda")->check(CLI::NonNegativeNumber);
  dec->add_option("--nbest", da.nbest)->check(CLI::PositiveNumber);
  dec->add_option("--max-labels-per-frame", da.max_labels_per_frame)->check(CLI::PositiveNumber);
  dec->add_option("--max-steps", da.max_steps)->check(CLI::NonNegativeNumber);
  dec->add_flag("--record-timing", da.record_timing);
  dec->add_option("--out,-o", da.out);

  CompareArgs ca;
  auto* cmp = app.add_subcommand("compare", "Same-transcription / same-score report");
  cmp->add_option("a", ca.a)->required()->check(CLI::ExistingFile);
  cmp->add_option("b", ca.b)->required()->check(CLI::ExistingFile);
  cmp->add_option("--tolerance", ca.tolerance)->check(CLI::NonNegativeNumber);
  cmp->add_option("--out,-o", ca.out);

  SweepArgs sa;
  auto* sw = app.add_subcommand("sweep", "Pruning sweep over a synthetic utterance set");
  sw->add_option("--seed", sa.seed);
  sw->add_option("--count", sa.count)->check(CLI::PositiveNumber);
  sw->add_option("--kind", sa.kind)->check(CLI::IsMember({"transducer", "segmental"}));
  sw->add_option("--topology", sa.topology)->check(topo_check);
  sw->add_option("--reference", sa.reference)->check(CLI::IsMember({"oracle-best", "sampled"}));
  sw->add_option("--frames,-T", sa.gp.frames)->check(CLI::PositiveNumber);
  sw->add_option("--max-frames", sa.max_frames)->check(CLI::NonNegativeNumber);
  sw->add_option("--vocab,-V", sa.gp.vocab_size)->check(CLI::PositiveNumber);
  sw->add_option("--context-order,-k", sa.gp.context_order)->check(CLI::NonNegativeNumber);
  sw->add_option("--smoothness", sa.gp.smoothness)->check(CLI::Range(0.0, 1.0));
  sw->add_option("--blank-bias", sa.gp.blank_bias);
  auto* qg = sw->add_option("--q-grid", sa.q_grid, "Q_prune values")->delimiter(',');
  sw->add_option("--beam-grid", sa.beam_grid, "B = B_t values")->delimiter(',')->excludes(qg);
  sw->add_option("--beam-b", sa.fixed_beam, "fixed B along the Q grid")
      ->check(CLI::PositiveNumber);
  sw->add_option("--strategies", sa.strategies)->delimiter(',')->check(CLI::IsMember(kStrategies));
  sw->add_option("--lm", sa.lm)->check(CLI::ExistingFile);
  sw->add_option("--lm-scale", sa.lm_scale)->check(CLI::NonNegativeNumber);
  sw->add_option("--max-labels-per-frame", sa.max_labels_per_frame)->check(CLI::PositiveNumber);
  sw->add_option("--max-steps", sa.max_steps)->check(CLI::NonNegativeNumber);
  sw->add_option("--tolerance", sa.tolerance)->check(CLI::NonNegativeNumber);
  sw->add_option("--workers,-j", sa.workers)->check(CLI::PositiveNumber);
  sw->add_flag("--record-timing", sa.record_timing);
  sw->add_option("--csv", sa.csv);
  sw->add_option("--json", sa.json_out);

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "Run the oracle property suite on one model");
  ver->add_option("--model,-m", va.model)->required()->check(CLI::ExistingFile);
  ver->add_option("--s-max", va.s_max, "longest RNNT label sequence covered")
      ->check(CLI::NonNegativeNumber);
  ver->add_option("--out,-o", va.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return run_generate(ga);
    if (*tr) return run_transform(ta);
    if (*dec) return run_decode(da);
    if (*cmp) return run_compare(ca);
    if (*sw) return run_sweep(sa);
    if (*ver) return run_verify(va);
  } catch (const UsageError& e) {
    std::cerr << "transeg: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "transeg: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
