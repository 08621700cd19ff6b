// tests/test_lm.cpp

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
#include <string>

#include "doctest.h"
#include "transeg/lm.hpp"

namespace transeg {
namespace {

constexpr Label a = 0, b = 1;

TEST_CASE("uniform bigram scores") {
  const NGramLM lm = NGramLM::uniform(Vocabulary::make_default(2), 2);
  CHECK(validate_lm(lm).empty());
  CHECK(lm_score(lm, LabelSeq{a, b}).value == doctest::Approx(std::log(27.0)).epsilon(1e-14));
  CHECK(lm_score(lm, LabelSeq{}).value == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(lm_score(lm, LabelSeq{5}), DomainError);
}

TEST_CASE("zero scale contributes nothing") {
  const NGramLM lm = NGramLM::uniform(Vocabulary::make_default(2), 3);
  const LmFusion off{&lm, 0.0};
  CHECK(off.label_cost(LabelSeq{a}, b).value == 0.0);
  CHECK(off.end_cost(LabelSeq{a}).value == 0.0);
  const LmFusion none{};
  CHECK(none.label_cost(LabelSeq{}, a).value == 0.0);
}

TEST_CASE("LM score factorizes") {
  const NGramLM lm = generate_random_lm(3, Vocabulary::make_default(3), 3, 0.5);
  CHECK(validate_lm(lm).empty());
  const LabelSeq seq{0, 2, 1, 1, 0};
  LogScore sum = LogScore::one();
  for (std::size_t i = 0; i < seq.size(); ++i)
    sum += lm.score(std::span<const Label>(seq).subspan(0, i), seq[i]);
  sum += lm.score(seq, kSentenceEnd);
  CHECK(std::abs(sum.value - lm_score(lm, seq).value) <= 1e-12);
}

TEST_CASE("LM files round-trip") {
  const NGramLM lm = generate_random_lm(9, Vocabulary::make_default(2), 2, 0.3);
  const std::string path = "/tmp/transeg_test_lm.json";
  save_lm(lm, path);
  const NGramLM back = load_lm(path);
  CHECK(lm_to_json(back) == lm_to_json(lm));
  for (int c : lm.contexts())
    for (std::size_t i = 0; i < lm.row(c).scores.size(); ++i)
      CHECK(std::abs(lm.row(c).scores[i].value - back.row(c).scores[i].value) <= 1e-15);
  const NGramLM u = NGramLM::uniform(Vocabulary::make_default(2), 2);
  CHECK(lm_to_json(lm_from_json(lm_to_json(u))) == lm_to_json(u));
}

const char* kSmallLm = R"({
  "format_version": 1,
  "order": 2,
  "vocabulary": ["a"],
  "rows": [
    {"context": ["<bos>"], "probs": {"a": 0.5, "<eos>": 0.48}},
    {"context": ["a"], "probs": {"a": 0.5, "<eos>": 0.5}}
  ]
})";

TEST_CASE("unnormalized LM rows load and are reported") {
  const NGramLM lm = lm_from_json(kSmallLm);
  const auto v = validate_lm(lm);
  REQUIRE(v.size() == 1);
  CHECK(v[0].defect == "row sums to 0.98");
}

TEST_CASE("LM parse errors") {
  std::string text = kSmallLm;
  text.replace(text.find("{\"context\": [\"a\"]"), 17, "{\"context\": [\"q\"]");
  try {
    lm_from_json(text);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("'q'") != std::string::npos);
  }
  text = kSmallLm;
  text.replace(text.find("\"format_version\": 1"), 19, "\"format_version\": 2");
  CHECK_THROWS_AS(lm_from_json(text), VersionError);
}

}  // namespace
}  // namespace transeg
