// src/model_io.cpp

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

// Canonical JSON layout: header fields first, then one row per line, rows in
// key order. Zero probabilities are omitted from "probs".

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "transeg/json_util.hpp"
#include "transeg/models.hpp"

namespace transeg {

using nlohmann::json;

std::string format_prob(double p) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", p);
  return buf;
}

namespace {

std::string context_json(const Vocabulary& vocab, const ContextCodec& codec, int ctx) {
  std::string out = "[";
  const LabelSeq c = codec.decode(ctx);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ", ";
    out += quote(vocab.name(c[i]));
  }
  return out + "]";
}

std::string header_json(std::string_view kind, const Vocabulary& vocab, const Topology& topo,
                        int k) {
  std::string out = "{\n";
  out += "  \"format_version\": " + std::to_string(kModelFormatVersion) + ",\n";
  out += "  \"kind\": " + quote(kind) + ",\n";
  out += "  \"topology\": {\"kind\": " + quote(to_string(topo.kind)) +
         ", \"T\": " + std::to_string(topo.frames) + "},\n";
  out += "  \"vocabulary\": [";
  for (int i = 0; i < vocab.size(); ++i) {
    if (i) out += ", ";
    out += quote(vocab.labels()[static_cast<std::size_t>(i)]);
  }
  out += "],\n";
  out += "  \"context_order\": " + std::to_string(k) + ",\n";
  return out;
}

void append_probs(std::string& out, const Vocabulary& vocab, const Distribution& row,
                  std::string_view extra_name) {
  out += "\"probs\": {";
  bool first = true;
  auto put = [&](std::string_view name, LogScore s) {
    if (s.is_inf()) return;
    if (!first) out += ", ";
    first = false;
    out += quote(name) + ": " + format_prob(s.prob());
  };
  for (Label a = 0; a < vocab.size(); ++a) put(vocab.name(a), row.label(a));
  put(extra_name, row.extra());
  out += "}";
}

std::string join_rows(const std::vector<std::string>& rows) {
  std::string out = "  \"rows\": [\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out += "    " + rows[i];
    out += i + 1 < rows.size() ? ",\n" : "\n";
  }
  return out + "  ]\n}\n";
}

}  // namespace

std::string model_to_json(const TransducerModel& model) {
  const Vocabulary& vocab = model.vocabulary();
  std::string out = header_json("transducer", vocab, model.topology(), model.context_order());
  if (model.segment_aware()) out += "  \"segment_aware\": true,\n";
  std::vector<std::string> rows;
  for (const auto& key : model.reachable_keys()) {
    const Distribution& row = model.row(key.t, key.t_prev, key.ctx);
    std::string r = "{\"t\": " + std::to_string(key.t);
    if (model.segment_aware()) r += ", \"t_prev\": " + std::to_string(key.t_prev);
    r += ", \"context\": " + context_json(vocab, model.codec(), key.ctx) + ", ";
    if (row.unreachable)
      r += "\"unreachable\": true";
    else
      append_probs(r, vocab, row, kBlankName);
    rows.push_back(r + "}");
  }
  return out + join_rows(rows);
}

std::string model_to_json(const SegmentalModel& model) {
  const Vocabulary& vocab = model.vocabulary();
  const Topology& topo = model.topology();
  std::string out = header_json("segmental", vocab, topo, model.context_order());
  std::vector<std::string> rows;
  for (const auto& key : model.reachable_boundary_keys()) {
    const std::string ctx = context_json(vocab, model.codec(), key.ctx);
    const BoundaryRow& b = model.boundary_row(key.t_prev, key.ctx);
    std::string r = "{\"t_prev\": " + std::to_string(key.t_prev) + ", \"context\": " + ctx + ", ";
    if (b.unreachable) {
      r += "\"unreachable\": true}";
    } else {
      r += "\"probs\": {";
      bool first = true;
      auto put = [&](const std::string& name, LogScore s) {
        if (s.is_inf()) return;
        if (!first) r += ", ";
        first = false;
        r += quote(name) + ": " + format_prob(s.prob());
      };
      for (int t = b.first; t <= b.last(); ++t) put(std::to_string(t), b.at(t));
      put(std::string(kBlankName), b.continuation);
      r += "}}";
    }
    rows.push_back(r);
    for (int t = topo.first_boundary(key.t_prev); t <= topo.frames; ++t) {
      const Distribution& lab = model.label_row(key.t_prev, t, key.ctx);
      std::string l = "{\"t_prev\": " + std::to_string(key.t_prev) +
                      ", \"t_cur\": " + std::to_string(t) + ", \"context\": " + ctx + ", ";
      if (lab.unreachable)
        l += "\"unreachable\": true";
      else
        append_probs(l, vocab, lab, kSentenceEndName);
      rows.push_back(l + "}");
    }
  }
  return out + join_rows(rows);
}

// ---------------------------------------------------------------------------

namespace {

struct Header {
  std::string kind;
  Vocabulary vocab;
  Topology topo;
  int order = 0;
};

Header parse_header(const json& doc) {
  if (!doc.is_object()) throw ParseError("document", "expected a JSON object");
  const int version = json_field<int>(doc, "format_version", "format_version");
  if (version != kModelFormatVersion)
    throw VersionError("unsupported format_version " + std::to_string(version) +
                       " (expected " + std::to_string(kModelFormatVersion) + ")");
  Header h;
  h.kind = json_field<std::string>(doc, "kind", "kind");
  const json& topo = json_member(doc, "topology", "topology");
  try {
    h.topo.kind = topology_kind_from_string(json_field<std::string>(topo, "kind", "topology.kind"));
  } catch (const DomainError& e) {
    throw ParseError("topology.kind", e.what());
  }
  h.topo.frames = json_field<int>(topo, "T", "topology.T");
  if (h.topo.frames < 1) throw ParseError("topology.T", "T must be >= 1");
  try {
    h.vocab = Vocabulary(json_field<std::vector<std::string>>(doc, "vocabulary", "vocabulary"));
  } catch (const DomainError& e) {
    throw ParseError("vocabulary", e.what());
  }
  h.order = json_field<int>(doc, "context_order", "context_order");
  if (h.order < 0) throw ParseError("context_order", "must be >= 0");
  return h;
}

int parse_context(const json& row, const Header& h, const ContextCodec& codec,
                  const std::string& where) {
  const auto names = json_field<std::vector<std::string>>(row, "context", where + ".context");
  if (static_cast<int>(names.size()) != h.order)
    throw ParseError(where + ".context", "expected " + std::to_string(h.order) + " symbols");
  LabelSeq padded;
  for (const std::string& n : names) {
    Label l;
    try {
      l = h.vocab.id(n);
    } catch (const DomainError&) {
      throw ParseError(where + ".context", "unknown symbol '" + n + "'");
    }
    if (l != kBos && l < 0)
      throw ParseError(where + ".context", "symbol '" + n + "' not allowed in a context");
    padded.push_back(l);
  }
  // Encode the padded context digit by digit.
  int index = 0;
  for (Label l : padded) index = index * (h.vocab.size() + 1) + (l == kBos ? 0 : l + 1);
  if (!codec.well_formed(index))
    throw ParseError(where + ".context", "padding must precede labels");
  return index;
}

Distribution parse_distribution(const json& row, const Header& h, std::string_view extra,
                                const std::string& where) {
  Distribution d;
  d.scores.assign(static_cast<std::size_t>(h.vocab.size()) + 1, kZeroProb);
  if (row.contains("unreachable") && row["unreachable"].is_boolean() &&
      row["unreachable"].get<bool>()) {
    d.unreachable = true;
    return d;
  }
  const json& probs = json_member(row, "probs", where + ".probs");
  if (!probs.is_object()) throw ParseError(where + ".probs", "expected an object");
  for (const auto& [name, value] : probs.items()) {
    const std::string field = where + ".probs." + name;
    if (!value.is_number()) throw ParseError(field, "expected a number");
    const double p = value.get<double>();
    if (!(p >= 0.0)) throw ParseError(field, "probability must be >= 0");
    std::size_t slot;
    if (name == extra) {
      slot = static_cast<std::size_t>(h.vocab.size());
    } else if (h.vocab.contains(name)) {
      slot = static_cast<std::size_t>(h.vocab.id(name));
    } else {
      throw ParseError(field, "unknown symbol '" + name + "'");
    }
    d.scores[slot] = LogScore::from_prob(p);
  }
  return d;
}

std::shared_ptr<const TransducerModel> parse_transducer(const json& doc, const Header& h) {
  bool aware = false;
  if (doc.contains("segment_aware")) aware = json_field<bool>(doc, "segment_aware", "segment_aware");
  auto model = std::make_shared<TransducerModel>(h.vocab, h.topo, h.order, aware);
  const json& rows = json_member(doc, "rows", "rows");
  if (!rows.is_array()) throw ParseError("rows", "expected an array");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = "rows[" + std::to_string(i) + "]";
    const json& row = rows[i];
    const int t = json_field<int>(row, "t", where + ".t");
    const int tp = aware ? json_field<int>(row, "t_prev", where + ".t_prev")
                         : h.topo.initial_boundary();
    const int ctx = parse_context(row, h, model->codec(), where);
    if (!model->row_reachable(t, tp, ctx))
      throw ParseError(where, "row key is not reachable on the grid");
    model->set_row(t, tp, ctx, parse_distribution(row, h, kBlankName, where));
  }
  return model;
}

std::shared_ptr<const SegmentalModel> parse_segmental(const json& doc, const Header& h) {
  auto model = std::make_shared<SegmentalModel>(h.vocab, h.topo, h.order);
  const json& rows = json_member(doc, "rows", "rows");
  if (!rows.is_array()) throw ParseError("rows", "expected an array");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = "rows[" + std::to_string(i) + "]";
    const json& row = rows[i];
    const int tp = json_field<int>(row, "t_prev", where + ".t_prev");
    const int ctx = parse_context(row, h, model->codec(), where);
    if (!segment_start_reachable(h.topo, model->codec(), ctx, tp))
      throw ParseError(where, "row key is not reachable on the grid");
    if (row.contains("t_cur")) {
      const int t = json_field<int>(row, "t_cur", where + ".t_cur");
      if (t < h.topo.first_boundary(tp) || t > h.topo.frames)
        throw ParseError(where + ".t_cur", "boundary not admissible after t_prev");
      model->set_label_row(tp, t, ctx, parse_distribution(row, h, kSentenceEndName, where));
      continue;
    }
    BoundaryRow b;
    b.first = h.topo.first_boundary(tp);
    if (row.contains("unreachable") && row["unreachable"].is_boolean() &&
        row["unreachable"].get<bool>()) {
      b.unreachable = true;
      model->set_boundary_row(tp, ctx, std::move(b));
      continue;
    }
    b.scores.assign(static_cast<std::size_t>(std::max(0, h.topo.frames - b.first + 1)), kZeroProb);
    const json& probs = json_member(row, "probs", where + ".probs");
    if (!probs.is_object()) throw ParseError(where + ".probs", "expected an object");
    for (const auto& [name, value] : probs.items()) {
      const std::string field = where + ".probs." + name;
      if (!value.is_number()) throw ParseError(field, "expected a number");
      const double p = value.get<double>();
      if (!(p >= 0.0)) throw ParseError(field, "probability must be >= 0");
      if (name == kBlankName) {
        b.continuation = LogScore::from_prob(p);
        continue;
      }
      int t = 0;
      try {
        std::size_t used = 0;
        t = std::stoi(name, &used);
        if (used != name.size()) throw std::invalid_argument(name);
      } catch (const std::exception&) {
        throw ParseError(field, "boundary key must be a frame index");
      }
      if (t < b.first || t > h.topo.frames)
        throw ParseError(field, "boundary outside the admissible support");
      b.scores[static_cast<std::size_t>(t - b.first)] = LogScore::from_prob(p);
    }
    model->set_boundary_row(tp, ctx, std::move(b));
  }
  return model;
}

}  // namespace

AnyModelPtr model_from_json(std::string_view text) {
  const json doc = parse_json_text(text);
  const Header h = parse_header(doc);
  if (h.kind == "transducer") return parse_transducer(doc, h);
  if (h.kind == "segmental") return parse_segmental(doc, h);
  throw ParseError("kind", "unknown model kind '" + h.kind + "'");
}

void save_model(const TransducerModel& model, const std::string& path) {
  write_text_file(path, model_to_json(model));
}

void save_model(const SegmentalModel& model, const std::string& path) {
  write_text_file(path, model_to_json(model));
}

AnyModelPtr load_model(const std::string& path) { return model_from_json(read_text_file(path)); }

}  // namespace transeg
