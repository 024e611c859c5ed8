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


#include <algorithm>
#include <cstdlib>
#include <random>
#include <set>
#include <tuple>

#include "doctest.h"

#include "costtalk/verifier.h"

namespace costtalk {
namespace {

GameDraft Coarse(GameDraft d) {
  d.state_grid = {-2.0, 2.0, 0.1};
  d.report_grid = {-4.0, 4.0, 0.1};
  return d;
}

GameDraft Twin() {
  GameDraft d = CanonicalDraft();
  d.senders[1].payoff = {1.0, 0.0};
  return d;
}

// Straight-line utility of `pos` reporting `r` after `prefix`, everyone else
// following the profile.
double NaiveUtility(const GameInstance& g, const ProtocolSpec& p, const StrategyProfile& prof,
                    const DecisionRule& rule, std::size_t pos,
                    const std::vector<Tick>& prefix, Tick state, Tick r) {
  std::vector<Tick> reports(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i == pos) {
      reports[i] = r;
    } else if (p.timing == Timing::kSimultaneous) {
      reports[i] = prof.report_at(i, 0, state);
    } else if (i < pos) {
      reports[i] = prefix[i];
    } else {
      reports[i] = prof.report(i, std::vector<Tick>(reports.begin(), reports.begin() + i),
                               state);
    }
  }
  return g.sender_utility_at_ticks(p.roster[pos], r, rule(reports), state);
}

using InfoSet = std::tuple<PlayerId, Tick, std::vector<Tick>>;

std::set<InfoSet> NaiveProfitable(const GameInstance& g, const ProtocolSpec& p,
                                  const StrategyProfile& prof, const DecisionRule& rule) {
  std::set<InfoSet> out;
  for (std::size_t pos = 0; pos < p.size(); ++pos) {
    for (std::size_t h = 0; h < prof.history_count(pos); ++h) {
      const std::vector<Tick> prefix = prof.history_prefix(pos, h);
      for (Tick s = g.states().lo(); s <= g.states().hi(); ++s) {
        const double base =
            NaiveUtility(g, p, prof, rule, pos, prefix, s, prof.report_at(pos, h, s));
        for (Tick r = g.reports().lo(); r <= g.reports().hi(); ++r) {
          if (NaiveUtility(g, p, prof, rule, pos, prefix, s, r) - base > 1e-9) {
            out.insert({p.roster[pos], s, prefix});
            break;
          }
        }
      }
    }
  }
  return out;
}

DecisionRule RandomRule(std::mt19937& rng, std::size_t n, const GameInstance& g) {
  const double step = g.reports().step();
  std::uniform_int_distribution<int> kind(0, 3), tick(-20, 20);
  std::uniform_int_distribution<int> coin(0, 1);
  const Action fallback = coin(rng) ? Action::kPlus : Action::kMinus;
  DecisionRule rule;
  switch (kind(rng)) {
    case 0: rule = {"t", ThresholdRule{0, tick(rng) * step}, step}; break;
    case 1: rule = {"a", AgreementRule{fallback}, step}; break;
    case 2: rule = {"m", MajorityRule{fallback}, step}; break;
    default: rule = {"c", ConstantRule{fallback}, step}; break;
  }
  for (int k = 0; k < 3; ++k) {
    std::vector<Tick> key(n);
    for (Tick& t : key) t = tick(rng);
    rule.set_override(key, coin(rng) ? Action::kPlus : Action::kMinus);
  }
  return rule;
}

TEST_CASE("individual rationality matches a brute-force oracle") {
  std::mt19937 rng(404);
  const GameInstance g = ValidateGame(Coarse(CanonicalDraft()));
  std::uniform_int_distribution<Tick> state(g.states().lo(), g.states().hi());
  std::uniform_int_distribution<Tick> report(-20, 20);
  for (const Timing timing : {Timing::kSimultaneous, Timing::kSequential}) {
    for (int trial = 0; trial < 6; ++trial) {
      const ProtocolSpec p{trial % 2 ? std::vector<PlayerId>{2, 1}
                                     : std::vector<PlayerId>{1, 2},
                           timing};
      StrategyProfile prof = BuildTruthfulProfile(g, p);
      for (int k = 0; k < 40; ++k) {
        const std::size_t pos = static_cast<std::size_t>(k % 2);
        std::uniform_int_distribution<std::size_t> hist(0, prof.history_count(pos) - 1);
        prof.set_report(pos, hist(rng), state(rng), report(rng));
      }
      const DecisionRule rule = RandomRule(rng, 2, g);
      const IndividualRationality ir = VerifyIndividualRationality(g, p, prof, rule);
      std::set<InfoSet> got;
      for (const DeviationWitness& w : ir.witnesses) {
        got.insert({w.sender, w.state, w.history});
        CHECK(w.gain > 1e-9);
        CHECK(ReplayGain(g, p, prof, rule, w) == doctest::Approx(w.gain).epsilon(1e-12));
      }
      CHECK(got == NaiveProfitable(g, p, prof, rule));
      CHECK(ir.pass == got.empty());
    }
  }
}

TEST_CASE("witnesses come out in a fixed order whatever the worker count") {
  const GameInstance g = ValidateGame(Coarse(CanonicalDraft()));
  const ProtocolSpec p{{1, 2}, Timing::kSequential};
  const StrategyProfile prof = BuildTruthfulProfile(g, p);
  const DecisionRule rule("a", AgreementRule{Action::kMinus}, g.reports().step());
  setenv("COSTTALK_WORKERS", "1", 1);
  const IndividualRationality one = VerifyIndividualRationality(g, p, prof, rule);
  setenv("COSTTALK_WORKERS", "4", 1);
  const IndividualRationality four = VerifyIndividualRationality(g, p, prof, rule);
  unsetenv("COSTTALK_WORKERS");
  REQUIRE(one.witnesses.size() == four.witnesses.size());
  for (std::size_t i = 0; i < one.witnesses.size(); ++i) {
    CHECK(one.witnesses[i].state == four.witnesses[i].state);
    CHECK(one.witnesses[i].history == four.witnesses[i].history);
    CHECK(one.witnesses[i].deviating_report == four.witnesses[i].deviating_report);
  }
}

TEST_CASE("single sender under threshold zero: pivotal lie") {
  const GameInstance g = ValidateGame(CanonicalDraft());
  const ProtocolSpec p{{1}, Timing::kSimultaneous};
  const StrategyProfile prof = BuildTruthfulProfile(g, p);
  const DecisionRule rule("t", ThresholdRule{0, 0.0}, g.reports().step());
  const Tick s = g.state_tick(-0.5);
  const BestResponse br = BestResponseSearch(g, p, prof, rule, 1, s);
  CHECK(br.report == 0);
  CHECK(br.utility == doctest::Approx(0.75).epsilon(1e-12));
  const DeviationWitness w = EvaluateDeviation(g, p, prof, rule, 1, s, {}, 0);
  CHECK(w.gain == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(w.prescribed_report == s);
  // Past the reach (theta <= -1) nothing pays.
  CHECK(BestResponseSearch(g, p, prof, rule, 1, g.state_tick(-1.2)).report ==
        g.state_tick(-1.2));
  const IndividualRationality ir = VerifyIndividualRationality(g, p, prof, rule);
  // Profitable exactly for theta in (-1, 0).
  CHECK(ir.witnesses.size() == 49);
}

TEST_CASE("ties between best reports go to the truth") {
  const GameInstance g = ValidateGame(CanonicalDraft());
  const ProtocolSpec p{{1}, Timing::kSimultaneous};
  const StrategyProfile prof = BuildTruthfulProfile(g, p);
  // At theta = -1, reporting 0 yields exactly 1 - 1 = 0 = the truthful payoff.
  const DecisionRule rule("t", ThresholdRule{0, 0.0}, g.reports().step());
  const Tick s = g.state_tick(-1.0);
  CHECK(BestResponseSearch(g, p, prof, rule, 1, s).report == s);
  // Constant rule: every report but the truth costs something.
  const DecisionRule flat("c", ConstantRule{Action::kPlus}, g.reports().step());
  CHECK(BestResponseSearch(g, p, prof, flat, 1, 7).report == 7);
}

TEST_CASE("best-response tables remove the sender's own witnesses") {
  const GameInstance g = ValidateGame(Coarse(Twin()));
  const ProtocolSpec p{{1, 2}, Timing::kSequential};
  const StrategyProfile truthful = BuildTruthfulProfile(g, p);
  const DecisionRule rule("a", AgreementRule{Action::kMinus}, g.reports().step());
  const StrategyProfile br = BestResponseProfile(g, p, truthful, rule, 2);
  for (const DeviationWitness& w : VerifyIndividualRationality(g, p, br, rule).witnesses) {
    CHECK(w.sender != 2);
  }
  // The follower echoes the leader's non-negative claim when that is cheap.
  const Tick zero[] = {0};
  CHECK(br.report(1, zero, g.state_tick(-0.5)) == 0);
}

TEST_CASE("Bayes consistency") {
  const GameInstance g = ValidateGame(CanonicalDraft());
  const ProtocolSpec p{{1}, Timing::kSimultaneous};
  const StrategyProfile prof = BuildTruthfulProfile(g, p);
  const DecisionRule right("t", ThresholdRule{0, 0.0}, g.reports().step());
  CHECK(VerifyBayesOnPath(g, p, prof, right).pass);
  const DecisionRule wrong("c", ConstantRule{Action::kPlus}, g.reports().step());
  const BayesCheck bad = VerifyBayesOnPath(g, p, prof, wrong);
  CHECK_FALSE(bad.pass);
  CHECK(bad.violations.size() == 100);  // every negative state
  // A pooling profile: all states report 0; the uniform posterior mean is 0,
  // so a+ is a best reply and a- is not.
  StrategyProfile pool = prof;
  for (Tick s = g.states().lo(); s <= g.states().hi(); ++s) pool.set_report(0, 0, s, 0);
  CHECK(VerifyBayesOnPath(g, p, pool, wrong).pass);
  const DecisionRule minus("c", ConstantRule{Action::kMinus}, g.reports().step());
  CHECK_FALSE(VerifyBayesOnPath(g, p, pool, minus).pass);
  // A prior tilted toward negative states flips it.
  std::vector<double> tilted(g.states().size());
  double total = 0.0;
  for (std::size_t i = 0; i < tilted.size(); ++i) total += tilted[i] = i < 100 ? 2.0 : 1.0;
  for (double& w : tilted) w /= total;
  CHECK(VerifyBayesOnPath(g, p, pool, minus, tilted).pass);
}

TEST_CASE("efficiency check names the first failure") {
  const GameInstance g = ValidateGame(CanonicalDraft());
  const ProtocolSpec p{{1}, Timing::kSimultaneous};
  StrategyProfile prof = BuildTruthfulProfile(g, p);
  const DecisionRule right("t", ThresholdRule{0, 0.0}, g.reports().step());
  CHECK(CheckEfficiency(g, p, prof, right).efficient);
  const DecisionRule wrong("c", ConstantRule{Action::kPlus}, g.reports().step());
  const EfficiencyCheck e = CheckEfficiency(g, p, prof, wrong);
  CHECK_FALSE(e.efficient);
  CHECK(e.cause == "wrong action");
  CHECK(*e.failing_state == g.states().lo());
  prof.set_report(0, 0, 30, 31);
  const EfficiencyCheck m = CheckEfficiency(g, p, prof, right);
  CHECK(m.cause == "misreport");
  CHECK(*m.failing_state == 30);
}

TEST_CASE("public advocacy passes the full verification") {
  const GameInstance g = ValidateGame(CanonicalDraft());
  const ProtocolSpec p{{1, 2}, Timing::kSequential};
  const Equilibrium eq = BuildPublicAdvocacyEquilibrium(g, p);
  const VerificationReport r = VerifyEquilibrium(g, p, eq.profile, eq.rule);
  CHECK(r.is_pbe());
  CHECK(r.efficiency.efficient);
  CHECK(r.individual_rationality.information_sets == 201 + 401 * 201);
}

TEST_CASE("mismatched profile and roster") {
  const GameInstance g = ValidateGame(CanonicalDraft());
  const StrategyProfile one = BuildTruthfulProfile(g, {{1}, Timing::kSimultaneous});
  const ProtocolSpec two{{1, 2}, Timing::kSimultaneous};
  const DecisionRule rule("c", ConstantRule{}, 0.02);
  CHECK_THROWS_AS(VerifyIndividualRationality(g, two, one, rule), Error);
  CHECK_THROWS_AS(VerifyBayesOnPath(g, two, one, rule), Error);
}

}  // namespace
}  // namespace costtalk
