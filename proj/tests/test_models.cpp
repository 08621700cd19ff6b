// tests/test_models.cpp

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
#include <cstdio>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "transeg/models.hpp"
#include "transeg/transform.hpp"

namespace transeg {
namespace {

using testing::dist;
using testing::make_m0;
using testing::make_m1;

constexpr Label a = 0, b = 1;

double p(LogScore s) { return s.prob(); }

TEST_CASE("transducer_step on M0 ignores history") {
  auto m0 = make_m0();
  const Distribution q = m0->step(1, 1, LabelSeq{});
  CHECK(q.extra().value == doctest::Approx(-std::log(0.6)));
  CHECK(q.label(a).value == doctest::Approx(-std::log(0.4)));
  const Distribution q2 = m0->step(2, 1, LabelSeq{a});
  CHECK(q2.scores == q.scores);
  CHECK(std::abs(q.total().prob() - 1.0) <= 1e-12);
  CHECK_THROWS_AS(m0->step(3, 1, LabelSeq{}), DomainError);
  CHECK_THROWS_AS(m0->step(0, 1, LabelSeq{}), DomainError);
}

TEST_CASE("segmental boundary and label rows of t2s(M1)") {
  auto view = transducer_to_segmental(make_m1());
  const BoundaryRow row = view->boundary(0, LabelSeq{});
  CHECK(row.first == 1);
  CHECK(row.last() == 2);
  CHECK(p(row.at(1)) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(p(row.at(2)) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(p(row.continuation) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(row.at(3).is_inf());

  const Distribution lab = view->label(0, 1, LabelSeq{});
  CHECK(p(lab.label(a)) == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(p(lab.label(b)) == doctest::Approx(0.375).epsilon(1e-14));
  CHECK(lab.extra().is_inf());
}

TEST_CASE("strict single frame boundary support") {
  TransducerModel m(Vocabulary::make_default(2), Topology{TopologyKind::kStrictMonotonic, 1}, 0);
  m.set_row(1, 0, 0, dist({0.3, 0.3}, 0.4));
  SegmentalView view(std::make_shared<const TransducerModel>(m));
  const BoundaryRow row = view.boundary(0, LabelSeq{});
  CHECK(row.first == 1);
  CHECK(row.last() == 1);
  CHECK(view.boundary(1, LabelSeq{a}).empty());
}

TEST_CASE("single label vocabulary gives certain labels before T") {
  auto view = transducer_to_segmental(make_m0());
  const Distribution lab = view->label(1, 1, LabelSeq{});
  CHECK(lab.label(a).value == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(lab.extra().is_inf());
}

TEST_CASE("generator is deterministic") {
  GeneratorParams gp;
  gp.frames = 4;
  gp.vocab_size = 3;
  gp.context_order = 1;
  for (TopologyKind kind : {TopologyKind::kRnnt, TopologyKind::kStrictMonotonic}) {
    gp.topology = kind;
    CHECK(model_to_json(generate_random_transducer(7, gp)) ==
          model_to_json(generate_random_transducer(7, gp)));
    CHECK(model_to_json(generate_random_segmental(7, gp)) ==
          model_to_json(generate_random_segmental(7, gp)));
    CHECK(model_to_json(generate_random_transducer(7, gp)) !=
          model_to_json(generate_random_transducer(8, gp)));
  }
}

TEST_CASE("generated rows are normalized") {
  GeneratorParams gp;
  gp.frames = 5;
  gp.vocab_size = 3;
  gp.context_order = 1;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    gp.topology = seed % 2 ? TopologyKind::kRnnt : TopologyKind::kStrictMonotonic;
    gp.smoothness = 0.1 * static_cast<double>(seed % 10);
    CHECK(validate_model(generate_random_transducer(seed, gp)).empty());
    CHECK(validate_model(generate_random_segmental(seed, gp)).empty());
  }
}

double mean_row_max(const TransducerModel& m) {
  double total = 0.0;
  int n = 0;
  for (const auto& key : m.reachable_keys()) {
    const Distribution& row = m.row(key.t, key.t_prev, key.ctx);
    double mx = 0.0;
    for (LogScore s : row.scores) mx = std::max(mx, s.prob());
    total += mx;
    ++n;
  }
  return total / n;
}

double min_row_max(const TransducerModel& m) {
  double out = 1.0;
  for (const auto& key : m.reachable_keys()) {
    const Distribution& row = m.row(key.t, key.t_prev, key.ctx);
    double mx = 0.0;
    for (LogScore s : row.scores) mx = std::max(mx, s.prob());
    out = std::min(out, mx);
  }
  return out;
}

TEST_CASE("smoothness controls row sharpness") {
  GeneratorParams gp;
  gp.frames = 6;
  gp.vocab_size = 3;
  gp.context_order = 2;
  gp.topology = TopologyKind::kRnnt;
  gp.smoothness = 1.0;
  const TransducerModel smooth = generate_random_transducer(11, gp);
  CHECK(mean_row_max(smooth) == doctest::Approx(0.25).epsilon(1e-3));
  gp.smoothness = 0.0;
  const TransducerModel sharp = generate_random_transducer(11, gp);
  CHECK(min_row_max(sharp) > 0.99);
}

TEST_CASE("validate_model reports defects") {
  auto m0 = make_m0();
  CHECK(validate_model(*m0).empty());
  m0->set_row(1, 1, 0, dist({0.4}, 0.7));
  const auto v = validate_model(*m0);
  REQUIRE(v.size() == 1);
  CHECK(v[0].row == "t=1 context=[]");
  CHECK(v[0].defect == "row sums to 1.1");

  GeneratorParams gp;
  gp.frames = 2;
  gp.vocab_size = 2;
  SegmentalModel seg = generate_random_segmental(3, gp);
  CHECK(validate_model(seg).empty());
  seg.set_label_row(0, 1, 0, dist({0.5, 0.3}, 0.2));
  const auto sv = validate_model(seg);
  REQUIRE(sv.size() == 1);
  CHECK(sv[0].defect.rfind("sentence end before T", 0) == 0);
}

TEST_CASE("derived segmental models validate in derived mode only") {
  const SegmentalModel m = materialize(*transducer_to_segmental(make_m1()));
  CHECK(validate_model(m, Normalization::kDerived).empty());
  CHECK(!validate_model(m, Normalization::kNative).empty());
  const SegmentalModel m0 = materialize(*transducer_to_segmental(make_m0()));
  CHECK(validate_model(m0, Normalization::kDerived).empty());
}

std::string temp_path(const char* name) { return std::string("/tmp/transeg_test_") + name; }

TEST_CASE("model files round-trip") {
  auto m0 = make_m0();
  const std::string path = temp_path("m0.json");
  save_model(*m0, path);
  const AnyModelPtr loaded = load_model(path);
  REQUIRE(std::holds_alternative<std::shared_ptr<const TransducerModel>>(loaded));
  const auto& l = *std::get<std::shared_ptr<const TransducerModel>>(loaded);
  for (const auto& key : m0->reachable_keys()) {
    const auto& x = m0->row(key.t, key.t_prev, key.ctx).scores;
    const auto& y = l.row(key.t, key.t_prev, key.ctx).scores;
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(x[i].value - y[i].value) <= 1e-15);
  }
  CHECK(model_to_json(l) == model_to_json(*m0));
  std::remove(path.c_str());

  GeneratorParams gp;
  gp.frames = 3;
  gp.vocab_size = 2;
  gp.context_order = 1;
  gp.topology = TopologyKind::kRnnt;
  const SegmentalModel seg = generate_random_segmental(5, gp);
  const AnyModelPtr seg_loaded = model_from_json(model_to_json(seg));
  REQUIRE(std::holds_alternative<std::shared_ptr<const SegmentalModel>>(seg_loaded));
  CHECK(model_to_json(*std::get<std::shared_ptr<const SegmentalModel>>(seg_loaded)) ==
        model_to_json(seg));

  // Segment-aware materialization with unreachable markers.
  const TransducerModel s2t = materialize(*segmental_to_transducer(
      std::make_shared<const SegmentalModel>(seg)));
  const AnyModelPtr s2t_loaded = model_from_json(model_to_json(s2t));
  CHECK(model_to_json(*std::get<std::shared_ptr<const TransducerModel>>(s2t_loaded)) ==
        model_to_json(s2t));
}

TEST_CASE("unknown format version is rejected") {
  std::string text = model_to_json(*make_m0());
  const auto pos = text.find("\"format_version\": 1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 19, "\"format_version\": 9");
  CHECK_THROWS_AS(model_from_json(text), VersionError);
}

TEST_CASE("parse errors carry a location") {
  try {
    model_from_json("{\n  \"format_version\": 1,\n  \"kind\": }");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.where() == "line 3, column 11");
  }
  std::string text = model_to_json(*make_m0());
  text.replace(text.find("\"<blank>\""), 9, "\"zzz\"");
  try {
    model_from_json(text);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("zzz") != std::string::npos);
    CHECK(e.where().rfind("rows[0]", 0) == 0);
  }
}

TEST_CASE("unnormalized rows load and are reported by validation") {
  auto m0 = make_m0();
  m0->set_row(2, 1, 0, dist({0.3}, 0.6));
  const AnyModelPtr loaded = model_from_json(model_to_json(*m0));
  const auto v = validate_model(*std::get<std::shared_ptr<const TransducerModel>>(loaded));
  REQUIRE(v.size() == 1);
  CHECK(v[0].defect == "row sums to 0.9");
}

}  // namespace
}  // namespace transeg
