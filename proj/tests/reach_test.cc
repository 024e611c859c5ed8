// Copyright 2026 The Costtalk Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <random>

#include "doctest.h"

#include "costtalk/reach.h"

namespace costtalk {
namespace {

TEST_CASE("reach on the canonical instance") {
  const GameInstance g = ValidateGame(CanonicalDraft());
  CHECK(ReachUpper(g, 1, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ReachLower(g, 2, 0.0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(ReachUpper(g, 1, -0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(Reach(g, 2, 1.2) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(ReachClosedForm(g, 1, 0.3, ReachSide::kUpper) == doctest::Approx(1.3));
}

TEST_CASE("asking for the wrong side is an error") {
  const GameInstance g = ValidateGame(CanonicalDraft());
  try {
    ReachLower(g, 1, 0.0);
    FAIL("expected WrongBiasSide");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kWrongBiasSide);
  }
  CHECK_THROWS_AS(ReachUpper(g, 2, 0.0), Error);
  CHECK_THROWS_AS(ReachUpper(g, 7, 0.0), Error);
}

TEST_CASE("bisection agrees with the closed form for random cost shapes") {
  std::mt19937 rng(20261015);
  std::uniform_real_distribution<double> scale(0.3, 4.0), exponent(1.0, 3.5),
      alpha(0.2, 1.5), beta(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    GameDraft d = CanonicalDraft();
    d.report_grid = {-12.0, 12.0, 0.02};
    d.senders[0].payoff = {alpha(rng), beta(rng)};
    d.senders[0].cost = {scale(rng), exponent(rng)};
    d.senders[1].payoff = {-alpha(rng), beta(rng)};
    d.senders[1].cost = {scale(rng), exponent(rng)};
    const GameInstance g = ValidateGame(d);
    for (const ReachRow& row : BuildReachTable(g)) {
      const ReachSide side = row.upper ? ReachSide::kUpper : ReachSide::kLower;
      const double bis = row.upper ? *row.upper : *row.lower;
      worst = std::max(worst,
                       std::abs(bis - ReachClosedForm(g, row.sender, row.theta, side)));
      // The reach sits on the favoured side of the truth.
      if (row.upper) {
        CHECK(bis >= row.theta);
      } else {
        CHECK(bis <= row.theta);
      }
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("zero stake gives zero distance") {
  GameDraft d = CanonicalDraft();
  d.senders[0].payoff = {1.0, 1.0};  // du = 0 at theta = -1
  const GameInstance g = ValidateGame(d);
  CHECK(ReachUpper(g, 1, -1.0) == -1.0);
}

TEST_CASE("reports beyond reach are dominated by the truth") {
  const GameInstance g = ValidateGame(CanonicalDraft());
  for (Tick t = g.states().lo(); t <= g.states().hi(); t += 5) {
    const double theta = g.states().value(t);
    const double reach = ReachUpper(g, 1, theta);
    for (Tick r = g.reports().lo(); r <= g.reports().hi(); ++r) {
      if (g.reports().value(r) <= reach + 1e-9) continue;
      for (Action best : {Action::kMinus, Action::kPlus}) {
        for (Action worst : {Action::kMinus, Action::kPlus}) {
          CHECK(g.sender_utility_at_ticks(1, t, worst, t) >
                g.sender_utility_at_ticks(1, r, best, t));
        }
      }
    }
  }
}

TEST_CASE("reach table covers every sender and state") {
  const GameInstance g = ValidateGame(CanonicalDraft());
  const std::vector<ReachRow> rows = BuildReachTable(g);
  REQUIRE(rows.size() == 2 * 201);
  CHECK(rows.front().sender == 1);
  CHECK(rows.front().upper.has_value());
  CHECK_FALSE(rows.front().lower.has_value());
  CHECK(rows.back().sender == 2);
  CHECK(rows.back().lower.has_value());
}

}  // namespace
}  // namespace costtalk
