// transeg/models.hpp

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

#ifndef TRANSEG_MODELS_HPP_
#define TRANSEG_MODELS_HPP_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "transeg/core.hpp"

namespace transeg {

/// Distribution over V plus one extra symbol stored at index |V|: blank for
/// transducer rows, sentence end for segmental label rows.
struct Distribution {
  std::vector<LogScore> scores;
  bool unreachable = false;

  int vocab_size() const { return static_cast<int>(scores.size()) - 1; }
  LogScore label(Label a) const { return scores[static_cast<std::size_t>(a)]; }
  LogScore extra() const { return scores.back(); }
  LogScore& extra() { return scores.back(); }
  /// Total mass of the vocabulary labels, excluding the extra symbol.
  LogScore label_mass() const;
  LogScore total() const;

  static Distribution unreachable_row(int vocab_size);
};

/// Boundary distribution p(t_s | ...) over candidates [first, T] plus the
/// leftover continuation mass (zero for natively normalized models).
struct BoundaryRow {
  int first = 1;
  std::vector<LogScore> scores;
  LogScore continuation = kZeroProb;
  bool unreachable = false;

  int last() const { return first + static_cast<int>(scores.size()) - 1; }
  bool empty() const { return scores.empty(); }
  /// Score of candidate t; zero probability outside the support.
  LogScore at(int t) const;
  LogScore total() const;
};

/// Last-k label contexts with begin-of-sequence padding, indexed densely.
/// Index order equals lexicographic order of the padded context with the
/// padding symbol sorting first.
class ContextCodec {
 public:
  ContextCodec() = default;
  ContextCodec(int vocab_size, int order);

  int order() const { return order_; }
  int size() const { return size_; }

  int encode(std::span<const Label> history) const;
  /// Padded context, oldest first; padding is kBos.
  LabelSeq decode(int index) const;
  /// Padding only as a prefix.
  bool well_formed(int index) const;
  /// Number of non-padding labels.
  int num_labels(int index) const;
  /// The non-padding labels, usable as a representative history.
  LabelSeq history(int index) const;

 private:
  int vocab_size_ = 1;
  int order_ = 0;
  int size_ = 1;
};

/// Whether some label history with this context can have its last label at
/// `t_prev` (or no label, t_prev = t_0).
bool segment_start_reachable(const Topology& topo, const ContextCodec& codec, int ctx,
                             int t_prev);

/// Source of q(y_u | y_1^{u-1}, h_1^T). The conditioning is passed as the
/// frame t, the frame of the last emitted label (t_0 if none) and the
/// emitted labels; together they are a function of (y_1^{u-1}, u).
class TransducerScorer {
 public:
  virtual ~TransducerScorer() = default;
  virtual const Vocabulary& vocabulary() const = 0;
  virtual const Topology& topology() const = 0;
  virtual int context_order() const = 0;
  virtual bool segment_aware() const = 0;
  virtual Distribution step(int t, int t_prev, std::span<const Label> history) const = 0;
};

/// Source of p(t_s | a_1^{s-1}, t_1^{s-1}) and p(a_s | a_1^{s-1}, t_1^s).
class SegmentalScorer {
 public:
  virtual ~SegmentalScorer() = default;
  virtual const Vocabulary& vocabulary() const = 0;
  virtual const Topology& topology() const = 0;
  virtual int context_order() const = 0;
  virtual BoundaryRow boundary(int t_prev, std::span<const Label> history) const = 0;
  virtual Distribution label(int t_prev, int t, std::span<const Label> history) const = 0;
};

/// Score of terminating after the last label at `t_prev`: for RNNT the final
/// segment (t_{S+1} = T, #); for strict monotonic the continuation mass plus
/// any explicit (T, #) segment, and certainty once t_prev = T.
LogScore sentence_end_score(const SegmentalScorer& model, const BoundaryRow& row, int t_prev,
                            std::span<const Label> history);
LogScore sentence_end_score(const SegmentalScorer& model, int t_prev,
                            std::span<const Label> history);

// ---------------------------------------------------------------------------

class TransducerModel final : public TransducerScorer {
 public:
  /// Rows start out unreachable; fill them with set_row.
  TransducerModel(Vocabulary vocab, Topology topo, int context_order, bool segment_aware = false);

  const Vocabulary& vocabulary() const override { return vocab_; }
  const Topology& topology() const override { return topo_; }
  int context_order() const override { return codec_.order(); }
  bool segment_aware() const override { return segment_aware_; }
  const ContextCodec& codec() const { return codec_; }

  Distribution step(int t, int t_prev, std::span<const Label> history) const override;

  /// Direct table access; t_prev is ignored unless segment aware.
  const Distribution& row(int t, int t_prev, int ctx) const;
  void set_row(int t, int t_prev, int ctx, Distribution row);

  /// Whether (t, t_prev, ctx) is a structurally reachable table row.
  bool row_reachable(int t, int t_prev, int ctx) const;

  /// Row keys in canonical order: (t, t_prev, context). t_prev is t_0 for
  /// models that are not segment aware.
  struct Key {
    int t;
    int t_prev;
    int ctx;
  };
  std::vector<Key> reachable_keys() const;

 private:
  std::size_t slot(int t, int t_prev, int ctx) const;

  Vocabulary vocab_;
  Topology topo_;
  ContextCodec codec_;
  bool segment_aware_ = false;
  std::vector<Distribution> rows_;
};

class SegmentalModel final : public SegmentalScorer {
 public:
  SegmentalModel(Vocabulary vocab, Topology topo, int context_order);

  const Vocabulary& vocabulary() const override { return vocab_; }
  const Topology& topology() const override { return topo_; }
  int context_order() const override { return codec_.order(); }
  const ContextCodec& codec() const { return codec_; }

  BoundaryRow boundary(int t_prev, std::span<const Label> history) const override;
  Distribution label(int t_prev, int t, std::span<const Label> history) const override;

  const BoundaryRow& boundary_row(int t_prev, int ctx) const;
  const Distribution& label_row(int t_prev, int t, int ctx) const;
  void set_boundary_row(int t_prev, int ctx, BoundaryRow row);
  void set_label_row(int t_prev, int t, int ctx, Distribution row);

  struct BoundaryKey {
    int t_prev;
    int ctx;
  };
  struct LabelKey {
    int t_prev;
    int t;
    int ctx;
  };
  std::vector<BoundaryKey> reachable_boundary_keys() const;
  std::vector<LabelKey> reachable_label_keys() const;

 private:
  void check_prev(int t_prev) const;

  Vocabulary vocab_;
  Topology topo_;
  ContextCodec codec_;
  std::vector<BoundaryRow> boundary_rows_;  // [t_prev][ctx]
  std::vector<Distribution> label_rows_;    // [t_prev][t][ctx]
};

// ---------------------------------------------------------------------------
// Synthetic models

struct GeneratorParams {
  int frames = 4;
  int vocab_size = 2;
  int context_order = 0;
  TopologyKind topology = TopologyKind::kStrictMonotonic;
  /// 1: uniform rows, 0: near one-hot rows.
  double smoothness = 0.5;
  /// Additive logit on the blank (transducer) before normalization; negative
  /// values shorten segments.
  double blank_bias = 0.0;
};

TransducerModel generate_random_transducer(std::uint64_t seed, const GeneratorParams& params);

/// Natively normalized segmental model; sentence end only at t_s = T.
SegmentalModel generate_random_segmental(std::uint64_t seed, const GeneratorParams& params);

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string row;
  std::string defect;
};

inline constexpr double kNormTolerance = 1e-12;

std::vector<Violation> validate_model(const TransducerModel& model);

enum class Normalization {
  kNative,   // boundary rows sum to 1, label rows sum to 1
  kDerived,  // boundary rows may be deficient, # at T is an odds factor
};

std::vector<Violation> validate_model(const SegmentalModel& model,
                                      Normalization mode = Normalization::kNative);

// ---------------------------------------------------------------------------
// Model files (JSON, format_version 1)

inline constexpr int kModelFormatVersion = 1;

/// Parse failure with a location ("line 3" or "rows[2].probs").
class ParseError : public Error {
 public:
  ParseError(const std::string& where, const std::string& what)
      : Error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

class VersionError : public Error {
 public:
  using Error::Error;
};

using AnyModelPtr = std::variant<std::shared_ptr<const TransducerModel>,
                                 std::shared_ptr<const SegmentalModel>>;

std::string model_to_json(const TransducerModel& model);
std::string model_to_json(const SegmentalModel& model);
AnyModelPtr model_from_json(std::string_view text);

void save_model(const TransducerModel& model, const std::string& path);
void save_model(const SegmentalModel& model, const std::string& path);
AnyModelPtr load_model(const std::string& path);

/// Canonical probability text: 17 significant digits.
std::string format_prob(double p);

/// Row description used in diagnostics, e.g. "t=2 context=[a]".
std::string describe_context(const Vocabulary& vocab, const ContextCodec& codec, int ctx);

}  // namespace transeg

#endif  // TRANSEG_MODELS_HPP_
