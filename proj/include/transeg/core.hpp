// transeg/core.hpp

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

#ifndef TRANSEG_CORE_HPP_
#define TRANSEG_CORE_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace transeg {

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that violates a documented precondition (bad frame, bad boundary).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A query whose conditioning state carries zero probability mass.
class UnreachableError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive oracle refused to run because the search space is too large.
class GuardExceeded : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// LogScore

/// Negative natural logarithm of a probability. The sum of two scores is the
/// product of the underlying probabilities.
struct LogScore {
  double value = 0.0;

  static constexpr LogScore zero_prob() {
    return LogScore{std::numeric_limits<double>::infinity()};
  }
  static constexpr LogScore one() { return LogScore{0.0}; }
  static LogScore from_prob(double p);

  double prob() const;
  bool is_inf() const { return value == std::numeric_limits<double>::infinity(); }
  bool finite() const { return !is_inf(); }

  friend LogScore operator+(LogScore a, LogScore b) {
    return LogScore{a.value + b.value};
  }
  LogScore& operator+=(LogScore o) {
    value += o.value;
    return *this;
  }
  // Division of probabilities. The divisor must be finite.
  friend LogScore operator-(LogScore a, LogScore b) {
    return a.is_inf() ? a : LogScore{a.value - b.value};
  }
  friend LogScore operator*(double scale, LogScore a) {
    if (scale == 0.0) return LogScore{0.0};
    return LogScore{scale * a.value};
  }
  friend auto operator<=>(const LogScore&, const LogScore&) = default;
};

inline constexpr LogScore kZeroProb = LogScore::zero_prob();

/// -ln(e^-x + e^-y), factoring out the smaller score.
LogScore log_add(LogScore x, LogScore y);

/// log_add over a range.
LogScore log_sum(std::span<const LogScore> scores);

/// -ln(1 - p) for the probability p = e^-x; stable near p = 0 and p = 1.
LogScore neg_log1m(LogScore x);

/// -ln(e^-x - e^-y) for x <= y, i.e. probability difference. Returns
/// zero_prob() when the difference is not positive.
LogScore log_sub(LogScore x, LogScore y);

// ---------------------------------------------------------------------------
// Labels and vocabularies

/// Index of a label in its vocabulary; reserved symbols are negative.
using Label = std::int32_t;

inline constexpr Label kBlank = -1;
inline constexpr Label kSentenceEnd = -2;
inline constexpr Label kBos = -3;

inline constexpr std::string_view kBlankName = "<blank>";
inline constexpr std::string_view kSentenceEndName = "<eos>";
inline constexpr std::string_view kBosName = "<bos>";

using LabelSeq = std::vector<Label>;

class Vocabulary {
 public:
  Vocabulary() = default;
  /// Throws DomainError on duplicates, reserved names or an empty list.
  explicit Vocabulary(std::vector<std::string> labels);

  /// Vocabulary "a", "b", ... of the given size (letters then l<N>).
  static Vocabulary make_default(int size);

  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Name of a label or of a reserved symbol.
  std::string_view name(Label label) const;
  /// Label id (or reserved id) for a symbol name; throws DomainError if unknown.
  Label id(std::string_view name) const;
  bool contains(std::string_view name) const;

  LabelSeq parse(std::string_view text) const;   // whitespace separated
  std::string format(std::span<const Label> labels) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.labels_ == b.labels_;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Label> index_;
};

// ---------------------------------------------------------------------------
// Topologies

enum class TopologyKind { kRnnt, kStrictMonotonic };

std::string_view to_string(TopologyKind kind);
TopologyKind topology_kind_from_string(std::string_view s);

/// Label topology over a grid of T frames (1-indexed).
struct Topology {
  TopologyKind kind = TopologyKind::kRnnt;
  int frames = 1;

  bool rnnt() const { return kind == TopologyKind::kRnnt; }
  bool strict() const { return kind == TopologyKind::kStrictMonotonic; }

  /// Boundary sentinel t_0: 1 for RNNT, 0 for strict monotonic.
  int initial_boundary() const { return rnnt() ? 1 : 0; }
  /// Smallest admissible t_s following t_{s-1} = prev.
  int first_boundary(int prev) const { return rnnt() ? prev : prev + 1; }
  /// Grid coordinate u of the symbol emitted as label s at frame t.
  int grid_index(int t, int s) const { return rnnt() ? t + s - 1 : t; }
  /// Length U of an alignment path with `num_labels` non-blank symbols.
  int path_length(int num_labels) const {
    return rnnt() ? frames + num_labels : frames;
  }

  /// Throws DomainError if frames < 1.
  void check() const;

  friend bool operator==(const Topology&, const Topology&) = default;
};

// ---------------------------------------------------------------------------
// Alignment paths and segmentations

/// Blank-augmented alignment y_1^U.
struct AlignmentPath {
  std::vector<Label> symbols;  // labels or kBlank
  Topology topology;

  int num_labels() const;
  /// Throws DomainError when the path is malformed for its topology.
  void check() const;
  friend bool operator==(const AlignmentPath&, const AlignmentPath&) = default;
};

/// Segment labels a_1^S with their boundaries t_1^S.
struct Segmentation {
  LabelSeq labels;
  std::vector<int> boundaries;
  Topology topology;

  int size() const { return static_cast<int>(labels.size()); }
  /// Throws DomainError on boundary violations.
  void check() const;
  friend bool operator==(const Segmentation&, const Segmentation&) = default;
};

Segmentation path_to_segmentation(const AlignmentPath& path);
AlignmentPath segmentation_to_path(const Segmentation& seg);

/// All boundary tuples admissible for S labels over the topology, in
/// lexicographic order (earliest boundaries first).
std::vector<std::vector<int>> enumerate_boundaries(const Topology& topology,
                                                   int num_labels);

/// Number of admissible boundary tuples: C(T+S-1, S) for RNNT, C(T, S) for
/// strict monotonic. Saturates at uint64 max.
std::uint64_t count_boundary_tuples(const Topology& topology, int num_labels);

/// All label sequences over `vocab_size` labels with length <= max_len, in
/// (length, lexicographic) order.
std::vector<LabelSeq> enumerate_label_sequences(int vocab_size, int max_len);

/// Lexicographic comparison by label ids, shorter prefix first.
bool label_seq_less(std::span<const Label> a, std::span<const Label> b);

}  // namespace transeg

#endif  // TRANSEG_CORE_HPP_
