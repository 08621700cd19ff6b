// src/lm.cpp

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

#include "transeg/lm.hpp"

#include <cmath>
#include <sstream>

#include "transeg/json_util.hpp"
#include "transeg/random.hpp"

namespace transeg {

using nlohmann::json;

NGramLM::NGramLM(Vocabulary vocab, int order)
    : vocab_(std::move(vocab)), order_(order), codec_(vocab_.size(), order - 1 < 0 ? 0 : order - 1) {
  if (order < 1) throw DomainError("n-gram order must be >= 1");
  rows_.assign(static_cast<std::size_t>(codec_.size()), Distribution::unreachable_row(vocab_.size()));
}

NGramLM NGramLM::uniform(Vocabulary vocab, int order) {
  NGramLM lm(std::move(vocab), order);
  const int n = lm.vocab_.size() + 1;
  Distribution row;
  row.scores.assign(static_cast<std::size_t>(n), LogScore{std::log(static_cast<double>(n))});
  for (int c : lm.contexts()) lm.set_row(c, row);
  return lm;
}

const Distribution& NGramLM::row(int ctx) const {
  if (ctx < 0 || ctx >= codec_.size()) throw DomainError("LM context index out of range");
  return rows_[static_cast<std::size_t>(ctx)];
}

void NGramLM::set_row(int ctx, Distribution row) {
  if (row.vocab_size() != vocab_.size()) throw DomainError("LM row width does not match");
  if (ctx < 0 || ctx >= codec_.size()) throw DomainError("LM context index out of range");
  rows_[static_cast<std::size_t>(ctx)] = std::move(row);
}

LogScore NGramLM::score(std::span<const Label> history, Label next) const {
  for (Label l : history)
    if (l < 0 || l >= vocab_.size())
      throw DomainError("label id " + std::to_string(l) + " outside the LM vocabulary");
  const Distribution& r = rows_[static_cast<std::size_t>(codec_.encode(history))];
  if (next == kSentenceEnd) return r.extra();
  if (next < 0 || next >= vocab_.size())
    throw DomainError("label id " + std::to_string(next) + " outside the LM vocabulary");
  return r.label(next);
}

std::vector<int> NGramLM::contexts() const {
  std::vector<int> out;
  for (int c = 0; c < codec_.size(); ++c)
    if (codec_.well_formed(c)) out.push_back(c);
  return out;
}

LogScore lm_score(const NGramLM& lm, std::span<const Label> labels) {
  LogScore total = LogScore::one();
  for (std::size_t i = 0; i < labels.size(); ++i)
    total += lm.score(labels.subspan(0, i), labels[i]);
  return total + lm.score(labels, kSentenceEnd);
}

NGramLM generate_random_lm(std::uint64_t seed, const Vocabulary& vocab, int order,
                           double smoothness) {
  NGramLM lm(vocab, order);
  Rng rng(seed);
  const double beta = (1.0 - smoothness) * 4.0;
  for (int c : lm.contexts()) {
    std::vector<double> logits(static_cast<std::size_t>(vocab.size()) + 1);
    for (double& v : logits) v = beta * rng.normal();
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double sum = 0.0;
    for (double v : logits) sum += std::exp(v - mx);
    Distribution row;
    for (double v : logits) row.scores.push_back(LogScore{mx + std::log(sum) - v});
    lm.set_row(c, std::move(row));
  }
  return lm;
}

std::vector<Violation> validate_lm(const NGramLM& lm) {
  std::vector<Violation> out;
  bool terminable = false;
  for (int c : lm.contexts()) {
    const std::string where = describe_context(lm.vocabulary(), lm.codec(), c);
    const Distribution& r = lm.row(c);
    if (r.unreachable) {
      out.push_back({where, "missing row"});
      continue;
    }
    const double sum = r.total().prob();
    if (std::abs(sum - 1.0) > kNormTolerance) {
      std::ostringstream os;
      os << "row sums to " << sum;
      out.push_back({where, os.str()});
    }
    if (r.extra().finite()) terminable = true;
  }
  if (!terminable) out.push_back({"lm", "sentence end has probability zero in every context"});
  return out;
}

// ---------------------------------------------------------------------------

std::string lm_to_json(const NGramLM& lm) {
  const Vocabulary& vocab = lm.vocabulary();
  std::string out = "{\n";
  out += "  \"format_version\": " + std::to_string(kLmFormatVersion) + ",\n";
  out += "  \"order\": " + std::to_string(lm.order()) + ",\n";
  out += "  \"vocabulary\": [";
  for (int i = 0; i < vocab.size(); ++i) {
    if (i) out += ", ";
    out += quote(vocab.labels()[static_cast<std::size_t>(i)]);
  }
  out += "],\n  \"rows\": [\n";
  const std::vector<int> ctxs = lm.contexts();
  for (std::size_t i = 0; i < ctxs.size(); ++i) {
    const LabelSeq c = lm.codec().decode(ctxs[i]);
    std::string r = "    {\"context\": [";
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (j) r += ", ";
      r += quote(vocab.name(c[j]));
    }
    r += "], \"probs\": {";
    const Distribution& d = lm.row(ctxs[i]);
    bool first = true;
    for (int a = 0; a <= vocab.size(); ++a) {
      const LogScore s = d.scores[static_cast<std::size_t>(a)];
      if (s.is_inf()) continue;
      if (!first) r += ", ";
      first = false;
      r += quote(a < vocab.size() ? vocab.name(a) : kSentenceEndName) + ": " + format_prob(s.prob());
    }
    r += "}}";
    out += r + (i + 1 < ctxs.size() ? ",\n" : "\n");
  }
  return out + "  ]\n}\n";
}

NGramLM lm_from_json(std::string_view text) {
  const json doc = parse_json_text(text);
  if (!doc.is_object()) throw ParseError("document", "expected a JSON object");
  const int version = json_field<int>(doc, "format_version", "format_version");
  if (version != kLmFormatVersion)
    throw VersionError("unsupported format_version " + std::to_string(version));
  const int order = json_field<int>(doc, "order", "order");
  if (order < 1) throw ParseError("order", "must be >= 1");
  Vocabulary vocab;
  try {
    vocab = Vocabulary(json_field<std::vector<std::string>>(doc, "vocabulary", "vocabulary"));
  } catch (const DomainError& e) {
    throw ParseError("vocabulary", e.what());
  }
  NGramLM lm(vocab, order);
  const json& rows = json_member(doc, "rows", "rows");
  if (!rows.is_array()) throw ParseError("rows", "expected an array");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = "rows[" + std::to_string(i) + "]";
    const auto names = json_field<std::vector<std::string>>(rows[i], "context", where + ".context");
    if (static_cast<int>(names.size()) != order - 1)
      throw ParseError(where + ".context", "expected " + std::to_string(order - 1) + " symbols");
    int index = 0;
    for (const std::string& n : names) {
      int digit;
      if (n == kBosName) {
        digit = 0;
      } else if (vocab.contains(n)) {
        digit = vocab.id(n) + 1;
      } else {
        throw ParseError(where + ".context", "unknown symbol '" + n + "'");
      }
      index = index * (vocab.size() + 1) + digit;
    }
    if (!lm.codec().well_formed(index))
      throw ParseError(where + ".context", "padding must precede labels");
    Distribution d;
    d.scores.assign(static_cast<std::size_t>(vocab.size()) + 1, kZeroProb);
    const json& probs = json_member(rows[i], "probs", where + ".probs");
    if (!probs.is_object()) throw ParseError(where + ".probs", "expected an object");
    for (const auto& [name, value] : probs.items()) {
      const std::string field = where + ".probs." + name;
      if (!value.is_number()) throw ParseError(field, "expected a number");
      const double p = value.get<double>();
      if (!(p >= 0.0)) throw ParseError(field, "probability must be >= 0");
      std::size_t slot;
      if (name == kSentenceEndName)
        slot = static_cast<std::size_t>(vocab.size());
      else if (vocab.contains(name))
        slot = static_cast<std::size_t>(vocab.id(name));
      else
        throw ParseError(field, "unknown symbol '" + name + "'");
      d.scores[slot] = LogScore::from_prob(p);
    }
    lm.set_row(index, std::move(d));
  }
  return lm;
}

void save_lm(const NGramLM& lm, const std::string& path) { write_text_file(path, lm_to_json(lm)); }

NGramLM load_lm(const std::string& path) { return lm_from_json(read_text_file(path)); }

}  // namespace transeg
