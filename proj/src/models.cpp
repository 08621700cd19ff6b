// src/models.cpp

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

#include "transeg/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "transeg/random.hpp"

namespace transeg {

LogScore Distribution::label_mass() const {
  return log_sum(std::span<const LogScore>(scores.data(), scores.size() - 1));
}

LogScore Distribution::total() const { return log_sum(scores); }

Distribution Distribution::unreachable_row(int vocab_size) {
  Distribution d;
  d.scores.assign(static_cast<std::size_t>(vocab_size) + 1, kZeroProb);
  d.unreachable = true;
  return d;
}

LogScore BoundaryRow::at(int t) const {
  if (t < first || t > last()) return kZeroProb;
  return scores[static_cast<std::size_t>(t - first)];
}

LogScore BoundaryRow::total() const { return log_add(log_sum(scores), continuation); }

// ---------------------------------------------------------------------------

ContextCodec::ContextCodec(int vocab_size, int order) : vocab_size_(vocab_size), order_(order) {
  if (order < 0) throw DomainError("context order must be >= 0");
  size_ = 1;
  for (int i = 0; i < order; ++i) size_ *= vocab_size + 1;
}

int ContextCodec::encode(std::span<const Label> history) const {
  int index = 0;
  const int n = static_cast<int>(history.size());
  for (int j = 0; j < order_; ++j) {
    // j-th slot, oldest first: history position n - order + j.
    const int pos = n - order_ + j;
    const int digit = pos < 0 ? 0 : history[static_cast<std::size_t>(pos)] + 1;
    index = index * (vocab_size_ + 1) + digit;
  }
  return index;
}

LabelSeq ContextCodec::decode(int index) const {
  LabelSeq out(static_cast<std::size_t>(order_));
  for (int j = order_ - 1; j >= 0; --j) {
    const int digit = index % (vocab_size_ + 1);
    index /= vocab_size_ + 1;
    out[static_cast<std::size_t>(j)] = digit == 0 ? kBos : digit - 1;
  }
  return out;
}

bool ContextCodec::well_formed(int index) const {
  const LabelSeq ctx = decode(index);
  bool seen_label = false;
  for (Label l : ctx) {
    if (l == kBos && seen_label) return false;
    if (l != kBos) seen_label = true;
  }
  return true;
}

int ContextCodec::num_labels(int index) const {
  const LabelSeq ctx = decode(index);
  return static_cast<int>(std::count_if(ctx.begin(), ctx.end(), [](Label l) { return l != kBos; }));
}

LabelSeq ContextCodec::history(int index) const {
  LabelSeq ctx = decode(index);
  std::erase(ctx, kBos);
  return ctx;
}

bool segment_start_reachable(const Topology& topo, const ContextCodec& codec, int ctx,
                             int t_prev) {
  if (!codec.well_formed(ctx)) return false;
  if (t_prev < topo.initial_boundary() || t_prev > topo.frames) return false;
  const int n = codec.num_labels(ctx);
  const bool full = n == codec.order();
  if (topo.strict()) {
    if (!full) return (n == 0) == (t_prev == 0) && n <= t_prev;
    return t_prev >= codec.order();
  }
  if (!full && n == 0) return t_prev == topo.initial_boundary();
  return true;
}

LogScore sentence_end_score(const SegmentalScorer& model, const BoundaryRow& row, int t_prev,
                            std::span<const Label> history) {
  const Topology& topo = model.topology();
  const int T = topo.frames;
  if (topo.strict() && t_prev == T) return LogScore::one();
  LogScore end = topo.strict() ? row.continuation : kZeroProb;
  const LogScore p_last = row.at(T);
  if (p_last.finite()) {
    const Distribution lab = model.label(t_prev, T, history);
    if (!lab.unreachable) end = log_add(end, p_last + lab.extra());
  }
  return end;
}

LogScore sentence_end_score(const SegmentalScorer& model, int t_prev,
                            std::span<const Label> history) {
  return sentence_end_score(model, model.boundary(t_prev, history), t_prev, history);
}

// ---------------------------------------------------------------------------

TransducerModel::TransducerModel(Vocabulary vocab, Topology topo, int context_order,
                                 bool segment_aware)
    : vocab_(std::move(vocab)),
      topo_(topo),
      codec_(vocab_.size(), context_order),
      segment_aware_(segment_aware) {
  topo_.check();
  const std::size_t prev_slots = segment_aware_ ? static_cast<std::size_t>(topo_.frames) + 1 : 1;
  rows_.assign(static_cast<std::size_t>(topo_.frames) * prev_slots * codec_.size(),
               Distribution::unreachable_row(vocab_.size()));
}

std::size_t TransducerModel::slot(int t, int t_prev, int ctx) const {
  if (t < 1 || t > topo_.frames)
    throw DomainError("frame t = " + std::to_string(t) + " outside [1, " +
                      std::to_string(topo_.frames) + "]");
  if (ctx < 0 || ctx >= codec_.size()) throw DomainError("context index out of range");
  std::size_t prev_slot = 0;
  std::size_t prev_slots = 1;
  if (segment_aware_) {
    if (t_prev < 0 || t_prev > topo_.frames)
      throw DomainError("t_prev = " + std::to_string(t_prev) + " out of range");
    prev_slot = static_cast<std::size_t>(t_prev);
    prev_slots = static_cast<std::size_t>(topo_.frames) + 1;
  }
  return ((static_cast<std::size_t>(t) - 1) * prev_slots + prev_slot) * codec_.size() +
         static_cast<std::size_t>(ctx);
}

Distribution TransducerModel::step(int t, int t_prev, std::span<const Label> history) const {
  return rows_[slot(t, t_prev, codec_.encode(history))];
}

const Distribution& TransducerModel::row(int t, int t_prev, int ctx) const {
  return rows_[slot(t, t_prev, ctx)];
}

void TransducerModel::set_row(int t, int t_prev, int ctx, Distribution row) {
  if (row.vocab_size() != vocab_.size())
    throw DomainError("row width does not match the vocabulary");
  rows_[slot(t, t_prev, ctx)] = std::move(row);
}

bool TransducerModel::row_reachable(int t, int t_prev, int ctx) const {
  if (t < 1 || t > topo_.frames || !codec_.well_formed(ctx)) return false;
  if (!segment_aware_) return topo_.rnnt() || codec_.num_labels(ctx) <= t - 1;
  if (topo_.strict() && t_prev >= t) return false;
  if (topo_.rnnt() && t_prev > t) return false;
  return segment_start_reachable(topo_, codec_, ctx, t_prev);
}

std::vector<TransducerModel::Key> TransducerModel::reachable_keys() const {
  std::vector<Key> keys;
  const int t0 = topo_.initial_boundary();
  for (int t = 1; t <= topo_.frames; ++t) {
    const int prev_hi = segment_aware_ ? topo_.frames : t0;
    for (int tp = t0; tp <= prev_hi; ++tp)
      for (int c = 0; c < codec_.size(); ++c)
        if (row_reachable(t, tp, c)) keys.push_back({t, tp, c});
  }
  return keys;
}

// ---------------------------------------------------------------------------

SegmentalModel::SegmentalModel(Vocabulary vocab, Topology topo, int context_order)
    : vocab_(std::move(vocab)), topo_(topo), codec_(vocab_.size(), context_order) {
  topo_.check();
  const std::size_t n = static_cast<std::size_t>(topo_.frames) + 1;
  BoundaryRow missing;
  missing.unreachable = true;
  boundary_rows_.assign(n * codec_.size(), missing);
  label_rows_.assign(n * n * codec_.size(), Distribution::unreachable_row(vocab_.size()));
}

void SegmentalModel::check_prev(int t_prev) const {
  if (t_prev < topo_.initial_boundary() || t_prev > topo_.frames)
    throw DomainError("previous boundary " + std::to_string(t_prev) + " outside [" +
                      std::to_string(topo_.initial_boundary()) + ", " +
                      std::to_string(topo_.frames) + "]");
}

const BoundaryRow& SegmentalModel::boundary_row(int t_prev, int ctx) const {
  check_prev(t_prev);
  return boundary_rows_[static_cast<std::size_t>(t_prev) * codec_.size() +
                        static_cast<std::size_t>(ctx)];
}

const Distribution& SegmentalModel::label_row(int t_prev, int t, int ctx) const {
  check_prev(t_prev);
  if (t < topo_.first_boundary(t_prev) || t > topo_.frames)
    throw DomainError("boundary " + std::to_string(t) + " not admissible after " +
                      std::to_string(t_prev));
  const std::size_t n = static_cast<std::size_t>(topo_.frames) + 1;
  return label_rows_[(static_cast<std::size_t>(t_prev) * n + static_cast<std::size_t>(t)) *
                         codec_.size() +
                     static_cast<std::size_t>(ctx)];
}

void SegmentalModel::set_boundary_row(int t_prev, int ctx, BoundaryRow row) {
  check_prev(t_prev);
  if (!row.empty() && (row.first != topo_.first_boundary(t_prev) || row.last() > topo_.frames))
    throw DomainError("boundary row support must be [" +
                      std::to_string(topo_.first_boundary(t_prev)) + ", T]");
  const_cast<BoundaryRow&>(boundary_row(t_prev, ctx)) = std::move(row);
}

void SegmentalModel::set_label_row(int t_prev, int t, int ctx, Distribution row) {
  if (row.vocab_size() != vocab_.size())
    throw DomainError("row width does not match the vocabulary");
  const_cast<Distribution&>(label_row(t_prev, t, ctx)) = std::move(row);
}

BoundaryRow SegmentalModel::boundary(int t_prev, std::span<const Label> history) const {
  return boundary_row(t_prev, codec_.encode(history));
}

Distribution SegmentalModel::label(int t_prev, int t, std::span<const Label> history) const {
  return label_row(t_prev, t, codec_.encode(history));
}

std::vector<SegmentalModel::BoundaryKey> SegmentalModel::reachable_boundary_keys() const {
  std::vector<BoundaryKey> keys;
  for (int tp = topo_.initial_boundary(); tp <= topo_.frames; ++tp)
    for (int c = 0; c < codec_.size(); ++c)
      if (segment_start_reachable(topo_, codec_, c, tp)) keys.push_back({tp, c});
  return keys;
}

std::vector<SegmentalModel::LabelKey> SegmentalModel::reachable_label_keys() const {
  std::vector<LabelKey> keys;
  for (const BoundaryKey& b : reachable_boundary_keys())
    for (int t = topo_.first_boundary(b.t_prev); t <= topo_.frames; ++t)
      keys.push_back({b.t_prev, t, b.ctx});
  return keys;
}

// ---------------------------------------------------------------------------

namespace {

// Sharpness of the temperature construction at smoothness 0.
constexpr double kMaxInverseTemperature = 8.0;

std::vector<double> draw_logits(Rng& rng, int n, double smoothness) {
  const double beta = (1.0 - std::clamp(smoothness, 0.0, 1.0)) * kMaxInverseTemperature;
  std::vector<double> z(static_cast<std::size_t>(n));
  for (double& v : z) v = rng.normal();
  // A unit gap on the winner keeps the sharp end one-hot-like.
  *std::max_element(z.begin(), z.end()) += 1.0;
  for (double& v : z) v *= beta;
  return z;
}

std::vector<LogScore> softmax_scores(const std::vector<double>& logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  const double lse = mx + std::log(sum);
  std::vector<LogScore> out;
  out.reserve(logits.size());
  for (double v : logits) out.push_back(LogScore{lse - v});
  return out;
}

void check_params(const GeneratorParams& p) {
  if (p.frames < 1) throw DomainError("generator needs T >= 1");
  if (p.vocab_size < 1) throw DomainError("generator needs |V| >= 1");
  if (p.context_order < 0) throw DomainError("generator needs k >= 0");
}

}  // namespace

TransducerModel generate_random_transducer(std::uint64_t seed, const GeneratorParams& params) {
  check_params(params);
  TransducerModel model(Vocabulary::make_default(params.vocab_size),
                        Topology{params.topology, params.frames}, params.context_order);
  Rng rng(seed);
  const int V = params.vocab_size;
  for (const auto& key : model.reachable_keys()) {
    std::vector<double> logits = draw_logits(rng, V + 1, params.smoothness);
    logits[static_cast<std::size_t>(V)] += params.blank_bias;
    Distribution row;
    row.scores = softmax_scores(logits);
    model.set_row(key.t, key.t_prev, key.ctx, std::move(row));
  }
  return model;
}

SegmentalModel generate_random_segmental(std::uint64_t seed, const GeneratorParams& params) {
  check_params(params);
  const Topology topo{params.topology, params.frames};
  SegmentalModel model(Vocabulary::make_default(params.vocab_size), topo, params.context_order);
  Rng rng(seed);
  const int V = params.vocab_size;
  const int T = params.frames;
  for (const auto& key : model.reachable_boundary_keys()) {
    BoundaryRow row;
    row.first = topo.first_boundary(key.t_prev);
    const int n = T - row.first + 1;
    if (n > 0) row.scores = softmax_scores(draw_logits(rng, n, params.smoothness));
    model.set_boundary_row(key.t_prev, key.ctx, std::move(row));
  }
  for (const auto& key : model.reachable_label_keys()) {
    Distribution row;
    if (key.t < T) {
      row.scores = softmax_scores(draw_logits(rng, V, params.smoothness));
      row.scores.push_back(kZeroProb);
    } else {
      row.scores = softmax_scores(draw_logits(rng, V + 1, params.smoothness));
    }
    model.set_label_row(key.t_prev, key.t, key.ctx, std::move(row));
  }
  return model;
}

// ---------------------------------------------------------------------------

std::string describe_context(const Vocabulary& vocab, const ContextCodec& codec, int ctx) {
  std::string out = "context=[";
  const LabelSeq c = codec.decode(ctx);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ',';
    out += vocab.name(c[i]);
  }
  return out + "]";
}

namespace {

std::string fmt_sum(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// NaN or probability above one; `odds_tail` exempts the last entry.
bool has_nan(const std::vector<LogScore>& scores, bool odds_tail = false) {
  const std::size_t n = scores.size() - (odds_tail && !scores.empty() ? 1 : 0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i].value)) return true;
    if (i < n && scores[i].value < 0.0) return true;
  }
  return false;
}

}  // namespace

std::vector<Violation> validate_model(const TransducerModel& model) {
  std::vector<Violation> out;
  for (const auto& key : model.reachable_keys()) {
    std::string where = "t=" + std::to_string(key.t);
    if (model.segment_aware()) where += " t_prev=" + std::to_string(key.t_prev);
    where += " " + describe_context(model.vocabulary(), model.codec(), key.ctx);
    const Distribution& row = model.row(key.t, key.t_prev, key.ctx);
    if (row.unreachable) {
      // Materialized views mark zero-mass states explicitly.
      if (!model.segment_aware()) out.push_back({where, "missing row"});
      continue;
    }
    if (has_nan(row.scores)) {
      out.push_back({where, "invalid probability"});
      continue;
    }
    const double sum = row.total().prob();
    if (std::abs(sum - 1.0) > kNormTolerance)
      out.push_back({where, "row sums to " + fmt_sum(sum)});
  }
  return out;
}

std::vector<Violation> validate_model(const SegmentalModel& model, Normalization mode) {
  std::vector<Violation> out;
  const Topology& topo = model.topology();
  const int T = topo.frames;
  for (const auto& key : model.reachable_boundary_keys()) {
    const std::string where = "boundary t_prev=" + std::to_string(key.t_prev) + " " +
                              describe_context(model.vocabulary(), model.codec(), key.ctx);
    const BoundaryRow& row = model.boundary_row(key.t_prev, key.ctx);
    if (row.unreachable) {
      if (mode == Normalization::kNative) out.push_back({where, "missing row"});
      continue;
    }
    if (has_nan(row.scores)) {
      out.push_back({where, "invalid probability"});
      continue;
    }
    if (topo.strict() && key.t_prev == T) continue;  // no frames left
    const double sum = log_sum(row.scores).prob();
    if (mode == Normalization::kNative) {
      if (row.continuation.finite())
        out.push_back({where, "native boundary row carries continuation mass"});
      if (std::abs(sum - 1.0) > kNormTolerance)
        out.push_back({where, "boundary row sums to " + fmt_sum(sum)});
    } else {
      const double total = row.total().prob();
      if (total > 1.0 + kNormTolerance)
        out.push_back({where, "boundary row sums to " + fmt_sum(total)});
    }
  }
  for (const auto& key : model.reachable_label_keys()) {
    const std::string where = "label t_prev=" + std::to_string(key.t_prev) +
                              " t=" + std::to_string(key.t) + " " +
                              describe_context(model.vocabulary(), model.codec(), key.ctx);
    const Distribution& row = model.label_row(key.t_prev, key.t, key.ctx);
    if (row.unreachable) {
      if (mode == Normalization::kNative) out.push_back({where, "missing row"});
      continue;
    }
    const bool odds = mode == Normalization::kDerived && topo.rnnt() && key.t == T;
    if (has_nan(row.scores, odds)) {
      out.push_back({where, "invalid probability"});
      continue;
    }
    if (key.t < T && row.extra().finite())
      out.push_back({where, "sentence end before T (p=" + fmt_sum(row.extra().prob()) + ")"});
    const double sum =
        mode == Normalization::kNative ? row.total().prob() : row.label_mass().prob();
    if (std::abs(sum - 1.0) > kNormTolerance)
      out.push_back({where, "label row sums to " + fmt_sum(sum)});
  }
  return out;
}

}  // namespace transeg
