// transeg/evalharness.hpp

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

// Measurement side: unit-level WER, pairwise decode comparison (same
// transcription / same score), search errors against exact_best, and pruning
// sweeps over synthetic utterance sets. Labels stand in for words throughout.

#ifndef TRANSEG_EVALHARNESS_HPP_
#define TRANSEG_EVALHARNESS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "transeg/models.hpp"
#include "transeg/oracle.hpp"
#include "transeg/search.hpp"

namespace transeg {

struct WerResult {
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;
  int reference_length = 0;
  /// (S + I + D) / max(1, reference length).
  double rate = 0.0;
  /// Reference was empty; the rate is I / 1 by convention.
  bool empty_reference = false;

  int errors() const { return substitutions + insertions + deletions; }
};

/// Levenshtein alignment with unit costs. Among minimal alignments the
/// backtrace prefers substitution (or match), then insertion, then deletion.
WerResult wer(std::span<const Label> reference, std::span<const Label> hypothesis);

// ---------------------------------------------------------------------------

enum class ModelKind { kTransducer, kSegmental };
enum class ReferenceMode { kOracleBest, kSampled };

std::string_view to_string(ReferenceMode m);
ReferenceMode reference_mode_from_string(std::string_view s);

struct SuiteParams {
  GeneratorParams model;
  ModelKind kind = ModelKind::kTransducer;
  ReferenceMode reference = ReferenceMode::kOracleBest;
  /// Frames drawn uniformly from [model.frames, max_frames] when larger.
  int max_frames = 0;
  /// RNNT only: redraw a model whose exact best puts more labels in one frame
  /// (0 disables). Keeps unpruned time-sync search exact.
  int max_labels_per_frame = 0;
};

struct Utterance {
  std::string id;
  std::uint64_t model_seed = 0;
  ScorerPtr model;
  LabelSeq reference;
};

struct UtteranceSet {
  std::uint64_t seed = 0;
  SuiteParams params;
  std::vector<Utterance> utterances;
};

/// Deterministic in (seed, count, params). Ids are "utt0000", "utt0001", ...
UtteranceSet generate_utterance_set(std::uint64_t seed, int count, const SuiteParams& params);

/// Ancestral sample of one alignment; a frame emits at most
/// `max_labels_per_frame` labels (RNNT) before the blank is forced.
Segmentation sample_segmentation(const TransducerScorer& model, std::uint64_t seed,
                                 int max_labels_per_frame = 8);

// ---------------------------------------------------------------------------

/// One system's output on one utterance; `best` is empty when decoding failed.
struct UtteranceResult {
  std::string id;
  std::optional<ScoredSequence> best;
  std::string error;
};

inline constexpr double kSameScoreTolerance = 1e-4;
inline constexpr double kSearchErrorTolerance = 1e-8;

struct UtteranceComparison {
  std::string id;
  LabelSeq labels_a;
  LabelSeq labels_b;
  LogScore score_a = kZeroProb;
  LogScore score_b = kZeroProb;
  bool same_trans = false;
  bool same_score = false;
};

struct ComparisonReport {
  std::vector<UtteranceComparison> records;
  double same_trans_pct = 0.0;
  double same_score_pct = 0.0;
  /// Fraction of utterances where A scores worse than B by more than the
  /// tolerance (B taken as the reference system); failures count as errors.
  double search_error_rate = 0.0;
  /// Filled when references are supplied.
  std::optional<double> wer_a;
  std::optional<double> wer_b;
  double tolerance = kSameScoreTolerance;
};

/// Lists must be aligned by utterance id (DomainError otherwise). Same score
/// is only evaluated on equal transcriptions, with |score_a - score_b| <=
/// tolerance in the log domain.
ComparisonReport compare_decodes(const std::vector<UtteranceResult>& a,
                                 const std::vector<UtteranceResult>& b,
                                 double tolerance = kSameScoreTolerance,
                                 const std::vector<LabelSeq>* references = nullptr);

/// Corpus-level WER: total edits over total reference length.
double corpus_wer(const std::vector<LabelSeq>& references,
                  const std::vector<UtteranceResult>& results);

/// Search error: the decode failed or scored worse than the exact best by
/// more than `tolerance`. A different label sequence with an equal score is a
/// tie, not an error.
bool is_search_error(const UtteranceResult& result, const ScoredSequence& exact,
                     double tolerance = kSearchErrorTolerance);

// ---------------------------------------------------------------------------

struct GridPoint {
  std::string name;
  PruneConfig prune;
};

/// Q_prune grid of the threshold sweep; an optional fixed B rides along (B_t
/// stays unset).
std::vector<GridPoint> q_prune_grid(const std::vector<double>& values,
                                    std::optional<int> beam = std::nullopt);
/// Beam grid; each entry sets B and B_t together.
std::vector<GridPoint> beam_grid(const std::vector<int>& values);
inline const std::vector<double> kDefaultQGrid = {4, 6, 8, 10, 12, 14, 20};

struct SweepConfig {
  std::vector<GridPoint> grid;
  std::vector<Strategy> strategies = {Strategy::kTimeSync, Strategy::kLabelSyncFull};
  const NGramLM* lm = nullptr;
  double lm_scale = 0.0;
  int max_labels_per_frame = 3;
  int max_steps = 0;
  double tolerance = kSameScoreTolerance;
  double search_error_tolerance = kSearchErrorTolerance;
  int workers = 1;
  /// Wall time is left at 0 unless set, so reruns are byte-identical.
  bool record_timing = false;
};

struct SweepRow {
  std::string grid_point;
  Strategy strategy = Strategy::kTimeSync;
  double wer = 0.0;
  double search_error_rate = 0.0;
  /// Agreement with the exact best (the synthetic stand-in for a saturated
  /// search).
  double same_trans_pct = 0.0;
  double same_score_pct = 0.0;
  std::int64_t hypotheses_expanded = 0;
  double wall_ms = 0.0;
  int failures = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // grid-major, strategies in config order
  std::vector<std::string> ids;
  std::vector<LabelSeq> references;
  std::vector<ScoredSequence> exact;
  /// results[row][utterance]
  std::vector<std::vector<UtteranceResult>> results;
  /// Pairwise comparison of the first two strategies, per grid point.
  std::vector<ComparisonReport> pairwise;
};

SweepResult pruning_sweep(const UtteranceSet& set, const SweepConfig& config);

const SweepRow& find_row(const SweepResult& sweep, std::string_view grid_point, Strategy s);

inline constexpr const char* kSweepCsvHeader =
    "grid_point,strategy,wer,search_error_rate,same_trans_pct,same_score_pct,"
    "hypotheses_expanded,wall_ms";

std::string sweep_csv(const SweepResult& sweep);
/// JSON mirror with per-utterance detail.
std::string sweep_json(const SweepResult& sweep, const SweepConfig& config);
std::string comparison_json(const ComparisonReport& report);

// ---------------------------------------------------------------------------
// Per-model audit: the oracle property suite run on one model.

struct AuditOptions {
  /// Label sequences up to this length are covered for RNNT (strict: all).
  int max_labels = 4;
  double equivalence_tolerance = 1e-9;   // |log full sums|
  double round_trip_tolerance = 1e-12;   // per probability
  double mass_tolerance = 1e-9;
  double dp_tolerance = 1e-10;           // enumeration vs DP, log domain
  double best_tolerance = 1e-12;
};

struct AuditCheck {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // largest deviation seen
  double tolerance = 0.0;
  std::string detail;
};

struct AuditReport {
  std::string model_kind;
  std::string topology;
  std::vector<AuditCheck> checks;

  bool passed() const;
  const AuditCheck& check(std::string_view name) const;
};

/// Checks: validation, equivalence (t2s or s2t full sums), round_trip,
/// normalization, dp_vs_enumeration, exact_best.
AuditReport audit_model(const AnyModelPtr& model, const AuditOptions& options = {});
std::string audit_json(const AuditReport& report);

}  // namespace transeg

#endif  // TRANSEG_EVALHARNESS_HPP_
