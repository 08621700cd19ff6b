// tests/test_oracle.cpp

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

#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "transeg/oracle.hpp"
#include "transeg/transform.hpp"

namespace transeg {
namespace {

using testing::dist;
using testing::make_m0;
using testing::make_m1;
using testing::nl;

constexpr Label a = 0, b = 1;
constexpr Label E = kBlank;

TEST_CASE("enumerate_paths on the fixtures") {
  auto m0 = make_m0();
  auto paths = enumerate_paths(*m0, LabelSeq{a});
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].path.symbols == LabelSeq{a, E, E});
  CHECK(paths[1].path.symbols == LabelSeq{E, a, E});
  for (const auto& sp : paths) CHECK(sp.score.value == doctest::Approx(nl(0.144)).epsilon(1e-14));

  paths = enumerate_paths(*m0, LabelSeq{});
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].path.symbols == LabelSeq{E, E});
  CHECK(paths[0].score.value == doctest::Approx(nl(0.36)).epsilon(1e-14));

  auto m1 = make_m1();
  paths = enumerate_paths(*m1, LabelSeq{a, b});
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].path.symbols == LabelSeq{a, b});
  CHECK(paths[0].score.value == doctest::Approx(nl(0.20)).epsilon(1e-14));
  CHECK(enumerate_paths(*m1, LabelSeq{a, a, a}).empty());
}

TEST_CASE("enumeration guard") {
  TransducerModel big(Vocabulary::make_default(1), Topology{TopologyKind::kRnnt, 60}, 0);
  CHECK_THROWS_AS(enumerate_paths(big, LabelSeq(6, a)), GuardExceeded);
  CHECK_THROWS_AS(full_sum_transducer(big, LabelSeq(6, a), SumMethod::kEnumerate), GuardExceeded);
}

TEST_CASE("full sums on the fixtures") {
  auto m0 = make_m0();
  auto m1 = make_m1();
  for (SumMethod method : {SumMethod::kEnumerate, SumMethod::kDynamic}) {
    CHECK(full_sum_transducer(*m0, LabelSeq{a}, method).value ==
          doctest::Approx(nl(0.288)).epsilon(1e-14));
    CHECK(full_sum_transducer(*m0, LabelSeq{a, a}, method).value ==
          doctest::Approx(nl(0.1728)).epsilon(1e-14));
    CHECK(full_sum_transducer(*m1, LabelSeq{a}, method).value ==
          doctest::Approx(nl(0.27)).epsilon(1e-14));
    CHECK(full_sum_segmental(*transducer_to_segmental(m0), LabelSeq{a}, method).value ==
          doctest::Approx(nl(0.288)).epsilon(1e-14));
    CHECK(full_sum_segmental(*transducer_to_segmental(m1), LabelSeq{}, method).value ==
          doctest::Approx(nl(0.10)).epsilon(1e-14));
  }
}

TEST_CASE("deterministic native segmental model has a single term") {
  auto m = std::make_shared<SegmentalModel>(Vocabulary::make_default(2),
                                            Topology{TopologyKind::kStrictMonotonic, 3}, 0);
  for (int tp = 0; tp < 3; ++tp) {
    BoundaryRow row;
    row.first = tp + 1;
    row.scores.assign(static_cast<std::size_t>(3 - tp), kZeroProb);
    row.scores.back() = LogScore::one();
    m->set_boundary_row(tp, 0, row);
    for (int t = tp + 1; t <= 3; ++t)
      m->set_label_row(tp, t, 0, t < 3 ? dist({1.0, 0.0}, 0.0) : dist({0.0, 0.0}, 1.0));
  }
  CHECK(full_sum_segmental(*m, LabelSeq{}).value == 0.0);
  CHECK(full_sum_segmental(*m, LabelSeq{}, SumMethod::kEnumerate).value == 0.0);
  CHECK(full_sum_segmental(*m, LabelSeq{a}).is_inf());
  const MassReport mass = total_mass(*m);
  CHECK(mass.exact);
  CHECK(mass.mass.value == 0.0);
  int contributing = 0;
  for (const auto& c : mass.contributions) contributing += c.score.finite();
  CHECK(contributing == 1);
}

TEST_CASE("exact_best on the fixtures") {
  ScoredSequence best = exact_best(*make_m1());
  CHECK(best.labels == LabelSeq{a});
  CHECK(best.score.value == doctest::Approx(nl(0.25)).epsilon(1e-14));
  REQUIRE(best.segmentation.has_value());
  CHECK(best.segmentation->boundaries == std::vector<int>{1});

  best = exact_best(*make_m0());
  CHECK(best.labels.empty());
  CHECK(best.score.value == doctest::Approx(nl(0.36)).epsilon(1e-14));

  const ScoredSequence via_view = exact_best(transducer_to_segmental(make_m1()));
  CHECK(via_view.labels == LabelSeq{a});
  CHECK(via_view.score.value == doctest::Approx(nl(0.25)).epsilon(1e-14));
}

TEST_CASE("exact_best with a zero-scaled LM equals no LM") {
  const NGramLM lm = NGramLM::uniform(Vocabulary::make_default(2), 2);
  auto m1 = make_m1();
  const ScoredSequence x = exact_best(*m1);
  const ScoredSequence y = exact_best(*m1, LmFusion{&lm, 0.0});
  CHECK(x.labels == y.labels);
  CHECK(x.score == y.score);
  const ScoredSequence z = exact_best(*m1, LmFusion{&lm, 1.0});
  // "a": 0.25 * (1/3)^2, "ab": 0.2 * (1/3)^3, empty: 0.1 * 1/3.
  CHECK(z.labels.empty());
  CHECK(z.score.value == doctest::Approx(nl(0.1 / 3)).epsilon(1e-14));
}

TEST_CASE("exact_best tie-break prefers smaller labels then earlier boundaries") {
  // Strict T = 2, V = {a, b}: a and b equally likely everywhere.
  auto m = std::make_shared<TransducerModel>(Vocabulary::make_default(2),
                                             Topology{TopologyKind::kStrictMonotonic, 2}, 0);
  m->set_row(1, 0, 0, dist({0.5, 0.5}, 0.0));
  m->set_row(2, 0, 0, dist({0.25, 0.25}, 0.5));
  const ScoredSequence best = exact_best(*m);
  CHECK(best.labels == LabelSeq{a});
  CHECK(best.segmentation->boundaries == std::vector<int>{1});

  auto r = std::make_shared<TransducerModel>(Vocabulary::make_default(1),
                                             Topology{TopologyKind::kRnnt, 2}, 0);
  r->set_row(1, 1, 0, dist({0.5}, 0.5));
  r->set_row(2, 1, 0, dist({0.5}, 0.5));
  // Empty: 0.25. "a": 0.125 at either frame.
  const ScoredSequence rb = exact_best(*r);
  CHECK(rb.labels.empty());
}

TEST_CASE("exact_best matches the minimum enumerated path") {
  GeneratorParams gp;
  gp.vocab_size = 2;
  gp.context_order = 1;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    gp.topology = seed % 2 ? TopologyKind::kRnnt : TopologyKind::kStrictMonotonic;
    gp.frames = 2 + static_cast<int>(seed % 3);
    gp.smoothness = 0.5;
    gp.blank_bias = gp.topology == TopologyKind::kRnnt ? 2.0 : 0.0;
    const TransducerModel m = generate_random_transducer(seed, gp);
    const ScoredSequence best = exact_best(m);
    CHECK(static_cast<int>(best.labels.size()) <= 5);
    LogScore min = kZeroProb;
    const int smax = gp.topology == TopologyKind::kRnnt ? 5 : gp.frames;
    for (const LabelSeq& seq : enumerate_label_sequences(2, smax))
      for (const ScoredPath& sp : enumerate_paths(m, seq)) min = std::min(min, sp.score);
    CHECK(std::abs(best.score.value - min.value) <= 1e-12);
    CHECK(std::abs(path_score(m, segmentation_to_path(*best.segmentation)).value -
                   best.score.value) <= 1e-12);
  }
}

TEST_CASE("telescoping: segmentation scores equal path scores one by one") {
  GeneratorParams gp;
  gp.vocab_size = 2;
  gp.context_order = 1;
  gp.frames = 3;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    gp.topology = seed % 2 ? TopologyKind::kRnnt : TopologyKind::kStrictMonotonic;
    auto m = std::make_shared<const TransducerModel>(generate_random_transducer(seed, gp));
    auto view = transducer_to_segmental(m);
    for (const LabelSeq& seq : enumerate_label_sequences(2, 3))
      for (const ScoredPath& sp : enumerate_paths(*m, seq)) {
        const LogScore seg = segmentation_score(*view, path_to_segmentation(sp.path));
        CHECK(std::abs(seg.value - sp.score.value) <= 1e-12);
      }
  }
}

TEST_CASE("enumeration and DP agree") {
  GeneratorParams gp;
  gp.vocab_size = 2;
  gp.context_order = 1;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    gp.topology = seed % 2 ? TopologyKind::kRnnt : TopologyKind::kStrictMonotonic;
    gp.frames = 2 + static_cast<int>(seed % 3);
    const TransducerModel m = generate_random_transducer(seed, gp);
    const SegmentalModel s = generate_random_segmental(seed, gp);
    for (const LabelSeq& seq : enumerate_label_sequences(2, 3)) {
      const LogScore x = full_sum_transducer(m, seq, SumMethod::kEnumerate);
      const LogScore y = full_sum_transducer(m, seq, SumMethod::kDynamic);
      CHECK((x.is_inf() ? y.is_inf() : std::abs(x.value - y.value) <= 1e-10));
      const LogScore u = full_sum_segmental(s, seq, SumMethod::kEnumerate);
      const LogScore v = full_sum_segmental(s, seq, SumMethod::kDynamic);
      CHECK((u.is_inf() ? v.is_inf() : std::abs(u.value - v.value) <= 1e-10));
    }
  }
}

TEST_CASE("total mass of M1 decomposes term by term") {
  const MassReport r = total_mass(*make_m1());
  CHECK(r.exact);
  CHECK(std::abs(r.mass.prob() - 1.0) <= 1e-12);
  REQUIRE(r.contributions.size() == 7);
  const double expected[] = {0.10, 0.27, 0.23, 0.05, 0.20, 0.03, 0.12};  // e a b aa ab ba bb
  for (std::size_t i = 0; i < 7; ++i)
    CHECK(r.contributions[i].score.prob() == doctest::Approx(expected[i]).epsilon(1e-13));
}

TEST_CASE("RNNT total mass is a lower bound") {
  const MassReport r = total_mass(*make_m0(), 2);
  CHECK(!r.exact);
  CHECK(r.mass.prob() == doctest::Approx(0.8208).epsilon(1e-13));
}

}  // namespace
}  // namespace transeg
