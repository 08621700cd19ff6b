// src/core.cpp

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

#include "transeg/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace transeg {

LogScore LogScore::from_prob(double p) {
  if (p <= 0.0) return kZeroProb;
  return LogScore{-std::log(p)};
}

double LogScore::prob() const { return is_inf() ? 0.0 : std::exp(-value); }

LogScore log_add(LogScore x, LogScore y) {
  if (x.is_inf()) return y;
  if (y.is_inf()) return x;
  const double lo = std::min(x.value, y.value);
  const double hi = std::max(x.value, y.value);
  return LogScore{lo - std::log1p(std::exp(lo - hi))};
}

LogScore log_sum(std::span<const LogScore> scores) {
  LogScore acc = kZeroProb;
  for (LogScore s : scores) acc = log_add(acc, s);
  return acc;
}

LogScore neg_log1m(LogScore x) {
  if (x.is_inf()) return LogScore::one();
  if (x.value <= 0.0) return kZeroProb;
  // ln 2 split: expm1 near p = 1, log1p near p = 0.
  if (x.value < 0.6931471805599453) return LogScore{-std::log(-std::expm1(-x.value))};
  return LogScore{-std::log1p(-std::exp(-x.value))};
}

LogScore log_sub(LogScore x, LogScore y) {
  if (y.is_inf()) return x;
  if (x.is_inf() || y.value <= x.value) return kZeroProb;
  return x + neg_log1m(LogScore{y.value - x.value});
}

// ---------------------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw DomainError("vocabulary must contain at least one label");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const std::string& l = labels_[i];
    if (l.empty()) throw DomainError("empty label name");
    if (l == kBlankName || l == kSentenceEndName || l == kBosName)
      throw DomainError("reserved symbol '" + l + "' used as a label");
    if (!index_.emplace(l, static_cast<Label>(i)).second)
      throw DomainError("duplicate label '" + l + "'");
  }
}

Vocabulary Vocabulary::make_default(int size) {
  if (size < 1) throw DomainError("vocabulary size must be >= 1");
  std::vector<std::string> names;
  for (int i = 0; i < size; ++i) {
    if (i < 26)
      names.emplace_back(1, static_cast<char>('a' + i));
    else
      names.push_back("l" + std::to_string(i));
  }
  return Vocabulary(std::move(names));
}

std::string_view Vocabulary::name(Label label) const {
  switch (label) {
    case kBlank: return kBlankName;
    case kSentenceEnd: return kSentenceEndName;
    case kBos: return kBosName;
    default: break;
  }
  if (label < 0 || label >= size())
    throw DomainError("label id " + std::to_string(label) + " out of range");
  return labels_[label];
}

Label Vocabulary::id(std::string_view n) const {
  if (n == kBlankName) return kBlank;
  if (n == kSentenceEndName) return kSentenceEnd;
  if (n == kBosName) return kBos;
  auto it = index_.find(std::string(n));
  if (it == index_.end()) throw DomainError("unknown symbol '" + std::string(n) + "'");
  return it->second;
}

bool Vocabulary::contains(std::string_view n) const {
  return index_.count(std::string(n)) > 0;
}

LabelSeq Vocabulary::parse(std::string_view text) const {
  LabelSeq out;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) {
    Label l = id(tok);
    if (l < 0) throw DomainError("reserved symbol '" + tok + "' in a label sequence");
    out.push_back(l);
  }
  return out;
}

std::string Vocabulary::format(std::span<const Label> labels) const {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ' ';
    out += name(labels[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(TopologyKind kind) {
  return kind == TopologyKind::kRnnt ? "rnnt" : "strict_monotonic";
}

TopologyKind topology_kind_from_string(std::string_view s) {
  if (s == "rnnt" || s == "RNNT") return TopologyKind::kRnnt;
  if (s == "strict_monotonic" || s == "STRICT_MONOTONIC" || s == "strict")
    return TopologyKind::kStrictMonotonic;
  throw DomainError("unknown topology kind '" + std::string(s) + "'");
}

void Topology::check() const {
  if (frames < 1) throw DomainError("topology needs T >= 1, got " + std::to_string(frames));
}

int AlignmentPath::num_labels() const {
  return static_cast<int>(std::count_if(symbols.begin(), symbols.end(),
                                        [](Label l) { return l != kBlank; }));
}

void AlignmentPath::check() const {
  topology.check();
  for (Label l : symbols)
    if (l < 0 && l != kBlank) throw DomainError("alignment path holds a reserved non-blank symbol");
  const int s = num_labels();
  const int expected = topology.path_length(s);
  if (static_cast<int>(symbols.size()) != expected)
    throw DomainError("alignment path has length " + std::to_string(symbols.size()) +
                      ", expected " + std::to_string(expected));
  if (topology.rnnt() && (symbols.empty() || symbols.back() != kBlank))
    throw DomainError("RNNT alignment path must end with a blank");
}

void Segmentation::check() const {
  topology.check();
  if (labels.size() != boundaries.size())
    throw DomainError("segmentation has " + std::to_string(labels.size()) + " labels but " +
                      std::to_string(boundaries.size()) + " boundaries");
  int prev = topology.initial_boundary();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw DomainError("segment label must be a vocabulary label");
    const int t = boundaries[i];
    if (t < topology.first_boundary(prev) || t > topology.frames)
      throw DomainError("boundary t_" + std::to_string(i + 1) + " = " + std::to_string(t) +
                        " violates monotonicity after " + std::to_string(prev));
    prev = t;
  }
}

Segmentation path_to_segmentation(const AlignmentPath& path) {
  path.check();
  Segmentation seg;
  seg.topology = path.topology;
  for (std::size_t u0 = 0; u0 < path.symbols.size(); ++u0) {
    const Label y = path.symbols[u0];
    if (y == kBlank) continue;
    const int u = static_cast<int>(u0) + 1;
    const int s = seg.size() + 1;
    seg.labels.push_back(y);
    seg.boundaries.push_back(path.topology.rnnt() ? u - s + 1 : u);
  }
  return seg;
}

AlignmentPath segmentation_to_path(const Segmentation& seg) {
  seg.check();
  AlignmentPath path;
  path.topology = seg.topology;
  path.symbols.assign(seg.topology.path_length(seg.size()), kBlank);
  for (int s = 1; s <= seg.size(); ++s) {
    const int u = seg.topology.grid_index(seg.boundaries[s - 1], s);
    path.symbols[u - 1] = seg.labels[s - 1];
  }
  return path;
}

namespace {

void boundaries_rec(const Topology& topo, int num_labels, int prev, std::vector<int>& cur,
                    std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == num_labels) {
    out.push_back(cur);
    return;
  }
  for (int t = topo.first_boundary(prev); t <= topo.frames; ++t) {
    cur.push_back(t);
    boundaries_rec(topo, num_labels, t, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<std::vector<int>> enumerate_boundaries(const Topology& topology, int num_labels) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  boundaries_rec(topology, num_labels, topology.initial_boundary(), cur, out);
  return out;
}

std::uint64_t count_boundary_tuples(const Topology& topology, int num_labels) {
  // C(n, k) computed incrementally; each partial product is an integer.
  const std::uint64_t n = topology.rnnt()
                              ? static_cast<std::uint64_t>(topology.frames + num_labels - 1)
                              : static_cast<std::uint64_t>(topology.frames);
  const std::uint64_t k = static_cast<std::uint64_t>(num_labels);
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t num = n - k + i;
    if (r > std::numeric_limits<std::uint64_t>::max() / num)
      return std::numeric_limits<std::uint64_t>::max();
    r = r * num / i;
  }
  return r;
}

std::vector<LabelSeq> enumerate_label_sequences(int vocab_size, int max_len) {
  std::vector<LabelSeq> out{LabelSeq{}};
  std::size_t level_begin = 0;
  for (int len = 1; len <= max_len; ++len) {
    const std::size_t level_end = out.size();
    for (std::size_t i = level_begin; i < level_end; ++i) {
      for (Label a = 0; a < vocab_size; ++a) {
        LabelSeq next = out[i];
        next.push_back(a);
        out.push_back(std::move(next));
      }
    }
    level_begin = level_end;
  }
  return out;
}

bool label_seq_less(std::span<const Label> a, std::span<const Label> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace transeg
