// tests/fixtures.hpp

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

// Hand-built models shared by the unit tests. M0: RNNT, T = 2, V = {a},
// q(eps) = 0.6 everywhere. M1: strict monotonic, T = 2, V = {a, b},
// rows {eps 0.2, a 0.5, b 0.3} at t = 1 and {eps 0.5, a 0.1, b 0.4} at t = 2.

#ifndef TRANSEG_TESTS_FIXTURES_HPP_
#define TRANSEG_TESTS_FIXTURES_HPP_

#include <cmath>
#include <initializer_list>
#include <memory>

#include "transeg/models.hpp"

namespace transeg::testing {

/// Row with label probabilities followed by the extra symbol.
inline Distribution dist(std::initializer_list<double> label_probs, double extra) {
  Distribution d;
  for (double p : label_probs) d.scores.push_back(LogScore::from_prob(p));
  d.scores.push_back(LogScore::from_prob(extra));
  return d;
}

inline double nl(double p) { return -std::log(p); }

inline std::shared_ptr<TransducerModel> make_m0() {
  auto m = std::make_shared<TransducerModel>(Vocabulary::make_default(1),
                                             Topology{TopologyKind::kRnnt, 2}, 0);
  for (int t = 1; t <= 2; ++t) m->set_row(t, 1, 0, dist({0.4}, 0.6));
  return m;
}

inline std::shared_ptr<TransducerModel> make_m1() {
  auto m = std::make_shared<TransducerModel>(Vocabulary::make_default(2),
                                             Topology{TopologyKind::kStrictMonotonic, 2}, 0);
  m->set_row(1, 0, 0, dist({0.5, 0.3}, 0.2));
  m->set_row(2, 0, 0, dist({0.1, 0.4}, 0.5));
  return m;
}

}  // namespace transeg::testing

#endif  // TRANSEG_TESTS_FIXTURES_HPP_
