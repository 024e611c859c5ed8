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


#include <random>

#include "doctest.h"

#include "costtalk/protocol.h"

namespace costtalk {
namespace {

GameDraft Twin() {
  GameDraft d = CanonicalDraft();
  d.senders[1].payoff = {1.0, 0.0};
  return d;
}

// Small grids keep sequential tables cheap.
GameDraft Coarse(GameDraft d) {
  d.state_grid = {-2.0, 2.0, 0.1};
  d.report_grid = {-4.0, 4.0, 0.1};
  return d;
}

TEST_CASE("history indexing is a mixed-radix bijection") {
  const GameInstance g = ValidateGame(Coarse(CanonicalDraft()));
  const ProtocolSpec seq{{1, 2}, Timing::kSequential};
  const StrategyProfile p = BuildTruthfulProfile(g, seq);
  CHECK(p.history_count(0) == 1);
  CHECK(p.history_count(1) == g.reports().size());
  for (std::size_t h = 0; h < p.history_count(1); ++h) {
    const std::vector<Tick> prefix = p.history_prefix(1, h);
    REQUIRE(prefix.size() == 1);
    CHECK(p.history_index(1, prefix) == h);
  }
  const ProtocolSpec sim{{1, 2}, Timing::kSimultaneous};
  CHECK(BuildTruthfulProfile(g, sim).history_count(1) == 1);
}

TEST_CASE("tables that would be too large are refused") {
  GameDraft d = CanonicalDraft();
  d.senders.push_back({3, {1.0, 0.0}, {}});
  d.senders.push_back({4, {-1.0, 0.0}, {}});
  const GameInstance g = ValidateGame(d);
  const ProtocolSpec seq{{1, 2, 3, 4}, Timing::kSequential};
  try {
    BuildTruthfulProfile(g, seq);
    FAIL("expected TableTooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTableTooLarge);
  }
}

TEST_CASE("rosters must name distinct known senders") {
  const GameInstance g = ValidateGame(CanonicalDraft());
  CHECK_THROWS_AS(ValidateProtocol(g, {{1, 1}, Timing::kSimultaneous}), Error);
  CHECK_THROWS_AS(ValidateProtocol(g, {{1, 5}, Timing::kSimultaneous}), Error);
  CHECK_THROWS_AS(ValidateProtocol(g, {{}, Timing::kSimultaneous}), Error);
  CHECK(ProtocolSpec{{2, 1}, Timing::kSequential}.position_of(1) == 1);
}

TEST_CASE("truthful play reports the state") {
  const GameInstance g = ValidateGame(CanonicalDraft());
  const ProtocolSpec sim{{1, 2}, Timing::kSimultaneous};
  const DecisionRule agree("agreement", AgreementRule{Action::kMinus}, g.reports().step());
  const StrategyProfile p = BuildTruthfulProfile(g, sim);
  const Outcome o = Playout(g, sim, p, agree, 0.3);
  CHECK(o.reports == std::vector<Tick>{15, 15});
  CHECK(o.action == Action::kPlus);
  CHECK(o.sender_utilities[0] == 1.0);
  CHECK(o.sender_utilities[1] == -1.0);
  CHECK(o.receiver_utility == doctest::Approx(0.3));
}

TEST_CASE("decision rules") {
  const double step = 0.02;
  SUBCASE("threshold: a report equal to the threshold is a+") {
    const DecisionRule r("t", ThresholdRule{0, -0.5}, step);
    const Tick at[] = {-25}, below[] = {-26};
    CHECK(r(at) == Action::kPlus);
    CHECK(r(below) == Action::kMinus);
  }
  SUBCASE("agreement") {
    const DecisionRule r("a", AgreementRule{Action::kPlus}, step);
    const Tick same_neg[] = {-3, -3}, split[] = {-3, 4}, same_zero[] = {0, 0};
    CHECK(r(same_neg) == Action::kMinus);
    CHECK(r(split) == Action::kPlus);
    CHECK(r(same_zero) == Action::kPlus);
  }
  SUBCASE("majority") {
    const DecisionRule r("m", MajorityRule{Action::kMinus}, step);
    const Tick two_pos[] = {5, 5, -9}, two_neg[] = {-5, 1, -5}, none[] = {1, 2, 3};
    CHECK(r(two_pos) == Action::kPlus);
    CHECK(r(two_neg) == Action::kMinus);
    CHECK(r(none) == Action::kMinus);
  }
  SUBCASE("burden of proof, positive first speaker") {
    const DecisionRule r("b", BurdenOfProofRule{0, 1, -1.0, true}, step);
    const Tick convinced[] = {0, -49}, rebutted[] = {0, -50}, low[] = {-1, 100};
    CHECK(r(convinced) == Action::kPlus);
    CHECK(r(rebutted) == Action::kMinus);
    CHECK(r(low) == Action::kMinus);
  }
  SUBCASE("burden of proof, negative first speaker") {
    const DecisionRule r("b", BurdenOfProofRule{0, 1, 1.0, false}, step);
    const Tick first_plus[] = {0, -100}, reached[] = {-1, 50}, short_of[] = {-1, 49};
    CHECK(r(first_plus) == Action::kPlus);
    CHECK(r(reached) == Action::kPlus);
    CHECK(r(short_of) == Action::kMinus);
  }
  SUBCASE("overrides win over the base rule") {
    DecisionRule r("c", ConstantRule{Action::kMinus}, step);
    r.set_override({5, -5}, Action::kPlus);
    const Tick hit[] = {5, -5}, miss[] = {5, -4};
    CHECK(r(hit) == Action::kPlus);
    CHECK(r(miss) == Action::kMinus);
  }
}

TEST_CASE("receiver best response to a posterior") {
  const GameInstance g = ValidateGame(CanonicalDraft());
  std::vector<double> post(g.states().size(), 0.0);
  post[g.states().index(g.state_tick(-0.3))] = 1.0;
  CHECK(ReceiverBestAction(g, post) == Action::kMinus);
  // Symmetric mass averages to exactly zero: indifference goes to a+.
  post[g.states().index(g.state_tick(0.3))] = 1.0;
  CHECK(ReceiverBestAction(g, post) == Action::kPlus);
  post.assign(post.size(), 0.0);
  CHECK_THROWS_AS(ReceiverBestAction(g, post), Error);
  CHECK_THROWS_AS(ReceiverBestAction(g, std::vector<double>{1.0}), Error);
}

TEST_CASE("uniform-prior indifference holds for random symmetric supports") {
  const GameInstance g = ValidateGame(CanonicalDraft());
  std::mt19937 rng(11);
  std::uniform_int_distribution<Tick> tick(1, 100);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> post(g.states().size(), 0.0);
    for (int k = 0; k < 5; ++k) {
      const Tick t = tick(rng);
      post[g.states().index(t)] = 1.0 / 201;
      post[g.states().index(-t)] = 1.0 / 201;
    }
    CHECK(ReceiverBestAction(g, post) == Action::kPlus);
  }
}

TEST_CASE("public advocacy prescriptions on the canonical instance") {
  const GameInstance g = ValidateGame(CanonicalDraft());
  const ProtocolSpec seq{{1, 2}, Timing::kSequential};
  const Equilibrium eq = BuildPublicAdvocacyEquilibrium(g, seq);
  const Tick s = g.state_tick(-0.5);
  CHECK(eq.profile.report(0, {}, s) == s);
  const Tick claimed_zero[] = {0};
  const Tick claimed_low[] = {-10};
  // Rebuts a false claim of a non-negative state by reporting at most -1.
  CHECK(g.reports().value(eq.profile.report(1, claimed_zero, s)) == doctest::Approx(-1.0));
  CHECK(eq.profile.report(1, claimed_zero, g.state_tick(-1.5)) == g.state_tick(-1.5));
  CHECK(eq.profile.report(1, claimed_low, s) == s);
  const Outcome o = PlayoutAtTick(g, seq, eq.profile, eq.rule, s);
  CHECK(o.action == Action::kMinus);
  CHECK(PlayoutAtTick(g, seq, eq.profile, eq.rule, 0).action == Action::kPlus);
}

TEST_CASE("public advocacy with the negative sender speaking first") {
  const GameInstance g = ValidateGame(CanonicalDraft());
  const ProtocolSpec seq{{2, 1}, Timing::kSequential};
  const Equilibrium eq = BuildPublicAdvocacyEquilibrium(g, seq);
  const Tick s = g.state_tick(0.4);
  const Tick claimed_neg[] = {g.report_tick(-0.1)};
  CHECK(g.reports().value(eq.profile.report(1, claimed_neg, s)) == doctest::Approx(1.0));
  CHECK(PlayoutAtTick(g, seq, eq.profile, eq.rule, s).action == Action::kPlus);
  CHECK(PlayoutAtTick(g, seq, eq.profile, eq.rule, -1).action == Action::kMinus);
}

TEST_CASE("equilibrium builders check their preconditions") {
  const GameInstance l1 = ValidateGame(CanonicalDraft());
  const GameInstance twin = ValidateGame(Twin());
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIoError;
  };
  CHECK(code([&] {
          BuildPublicAdvocacyEquilibrium(l1, {{1, 2}, Timing::kSimultaneous});
        }) == ErrorCode::kWrongTiming);
  CHECK(code([&] {
          BuildPublicAdvocacyEquilibrium(twin, {{1, 2}, Timing::kSequential});
        }) == ErrorCode::kWrongBiasConfiguration);
  CHECK(code([&] {
          BuildSkepticalSimultaneousEquilibrium(l1, {{1, 2}, Timing::kSimultaneous});
        }) == ErrorCode::kWrongBiasConfiguration);
  CHECK(code([&] {
          BuildSkepticalSimultaneousEquilibrium(twin, {{1, 2}, Timing::kSequential});
        }) == ErrorCode::kWrongTiming);
}

TEST_CASE("skeptical rule punishes disagreement against the common bias") {
  const GameInstance twin = ValidateGame(Twin());
  const ProtocolSpec sim{{1, 2}, Timing::kSimultaneous};
  const Equilibrium up = BuildSkepticalSimultaneousEquilibrium(twin, sim);
  const Tick split[] = {3, -3};
  CHECK(up.rule(split) == Action::kMinus);

  GameDraft d = CanonicalDraft();
  d.senders[0].payoff = {-1.0, 0.0};
  const GameInstance down_game = ValidateGame(d);
  const Equilibrium down = BuildSkepticalSimultaneousEquilibrium(down_game, sim);
  CHECK(down.rule(split) == Action::kPlus);
}

TEST_CASE("posterior update and on-path set") {
  const GameInstance g = ValidateGame(CanonicalDraft());
  const ProtocolSpec seq{{1, 2}, Timing::kSequential};
  const Equilibrium eq = BuildPublicAdvocacyEquilibrium(g, seq);
  const auto path = OnPathSet(g, seq, eq.profile);
  CHECK(path.size() == g.states().size());  // fully revealing
  const Tick on[] = {10, 10};
  const auto post = PosteriorUpdate(g, seq, eq.profile, on);
  REQUIRE(post);
  CHECK((*post)[g.states().index(10)] == doctest::Approx(1.0));
  const Tick off[] = {10, -10};
  CHECK_FALSE(PosteriorUpdate(g, seq, eq.profile, off));
}

TEST_CASE("set_report rejects off-grid reports") {
  const GameInstance g = ValidateGame(CanonicalDraft());
  StrategyProfile p = BuildTruthfulProfile(g, {{1}, Timing::kSimultaneous});
  CHECK_THROWS_AS(p.set_report(0, 0, 0, 1000), Error);
  p.set_report(0, 0, 0, 7);
  CHECK(p.report(0, {}, 0) == 7);
}

}  // namespace
}  // namespace costtalk
