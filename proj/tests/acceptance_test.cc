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


// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria (capped at 1 for ctest).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "costtalk/coalition.h"
#include "costtalk/reach.h"
#include "costtalk/report.h"
#include "costtalk/scenario.h"
#include "costtalk/suite.h"
#include "costtalk/verifier.h"

namespace {

using namespace costtalk;

constexpr double kTol = 1e-9;

Scenario Load(const std::string& name, ScenarioConfig* out = nullptr) {
  ScenarioConfig c =
      LoadScenario((std::filesystem::path(DefaultScenarioDir()) / (name + ".json")).string());
  if (out) *out = c;
  return Instantiate(c);
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void Criterion(int id, const std::string& title, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s criterion %2d  %-52s %8.2fs  %s\n", o.pass ? "PASS" : "FAIL", id,
              title.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string Fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Verdict PublicAdvocacy(const std::string& fixture) {
  const Scenario s = Load(fixture);
  const IndividualRationality ir =
      VerifyIndividualRationality(s.game, s.protocol, s.profile, s.rule, kTol);
  const BayesCheck bayes = VerifyBayesOnPath(s.game, s.protocol, s.profile, s.rule);
  const EfficiencyCheck eff = CheckEfficiency(s.game, s.protocol, s.profile, s.rule);
  // 201 first-mover information sets plus 401 x 201 for the second mover.
  const std::size_t expected_sets =
      s.game.states().size() * (1 + s.game.reports().size());
  return {ir.pass && ir.witnesses.empty() && ir.information_sets == expected_sets &&
              bayes.pass && eff.efficient,
          Fmt("IR witnesses=%.0f over %.0f info sets; ", ir.witnesses.size(),
              ir.information_sets) +
              (bayes.pass ? "bayes ok; " : "bayes FAILED; ") +
              (eff.efficient ? "efficient" : "inefficient")};
}

}  // namespace

int main() {
  Criterion(1, "public advocacy is an efficient PBE", [] {
    return PublicAdvocacy("l1_public_advocacy");
  });

  Criterion(2, "public advocacy is strong and coalition-proof", [] {
    const Scenario s = Load("l1_public_advocacy");
    CoalitionSearchOptions full;
    full.prune = false;
    const PlayerId pair[] = {1, 2};
    const CoalitionSearchResult r =
        FindCoalitionDeviation(s.game, s.protocol, s.profile, s.rule, pair, full);
    const CoalitionVerdict strong = CheckStrong(s.game, s.protocol, s.profile, s.rule);
    const CoalitionVerdict cp = CheckCoalitionProof(s.game, s.protocol, s.profile, s.rule);
    return Verdict{!r.witness && r.exhaustive && strong.holds && strong.exhaustive &&
                       cp.holds && cp.exhaustive,
                   Fmt("unpruned pair search: %.0f evaluations, witness=%.0f; ",
                       static_cast<double>(r.evaluations), r.witness ? 1 : 0) +
                       (strong.holds ? "strong; " : "NOT strong; ") +
                       (cp.holds ? "coalition_proof" : "NOT coalition_proof")};
  });

  Criterion(3, "single sender: every threshold rule refuted", [] {
    ScenarioConfig cfg;
    Load("l1_single_sender", &cfg);
    const GameInstance probe = ValidateGame(cfg.game);
    int refuted = 0, total = 0;
    for (Tick t = probe.reports().find(-1.0).value(); t <= 0; ++t) {
      ScenarioConfig v = cfg;
      v.rule.kind = "threshold";
      v.rule.threshold = probe.reports().value(t);
      const Scenario s = Instantiate(v);
      ++total;
      refuted += VerifyIndividualRationality(s.game, s.protocol, s.profile, s.rule, kTol)
                         .pass
                     ? 0
                     : 1;
    }
    const Scenario s = Instantiate(cfg);
    const DeviationWitness w =
        EvaluateDeviation(s.game, s.protocol, s.profile, s.rule, 1,
                          s.game.state_tick(-0.5), {}, s.game.report_tick(0.0));
    const double oracle = 1.0 - 0.5 * 0.5;
    return Verdict{refuted == total && total == 51 && std::abs(w.gain - oracle) <= kTol,
                   Fmt("%.0f/%.0f thresholds refuted; gain at -0.5 = %.12f", refuted, total,
                       w.gain)};
  });

  Criterion(4, "twin skeptical PBE is not coalition-proof", [] {
    const Scenario s = Load("twin_skeptical");
    const bool ir = VerifyIndividualRationality(s.game, s.protocol, s.profile, s.rule).pass;
    const bool eff = CheckEfficiency(s.game, s.protocol, s.profile, s.rule).efficient;
    const PlayerId pair[] = {1, 2};
    CoalitionSearchResult r = FindCoalitionDeviation(s.game, s.protocol, s.profile, s.rule, pair);
    const bool se = r.witness && IsSelfEnforcing(s.game, s.protocol, s.profile, s.rule, *r.witness);
    CoalitionSearchOptions at;
    at.state = s.game.state_tick(-0.5);
    CoalitionSearchResult local =
        FindCoalitionDeviation(s.game, s.protocol, s.profile, s.rule, pair, at);
    const Tick zero = s.game.report_tick(0.0);
    const double oracle = 1.0 - 0.5 * 0.5;
    bool at_state = local.witness && local.witness->reports == std::vector<Tick>{zero, zero};
    double g1 = 0, g2 = 0;
    if (at_state) {
      g1 = local.witness->gains[0];
      g2 = local.witness->gains[1];
      at_state = std::abs(g1 - oracle) <= kTol && std::abs(g2 - oracle) <= kTol &&
                 IsSelfEnforcing(s.game, s.protocol, s.profile, s.rule, *local.witness);
    }
    return Verdict{ir && eff && se && at_state,
                   Fmt("IR=%.0f efficient=%.0f; gains at -0.5 (0,0): %.12f", ir, eff, g1) +
                       Fmt(" %.12f; self-enforcing=%.0f", g2, se)};
  });

  Criterion(5, "sequential twin: leader deviates", [] {
    ScenarioConfig cfg;
    const Scenario base = Load("twin_sequential", &cfg);
    const Tick state = base.game.state_tick(-0.5);
    const Tick zero = base.game.report_tick(0.0);
    const Tick history[] = {zero};
    const BestResponse follow =
        BestResponseSearch(base.game, base.protocol, base.profile, base.rule, 2, state, history);
    const StrategyProfile br =
        BestResponseProfile(base.game, base.protocol, base.profile, base.rule, 2);
    const DeviationWitness w =
        EvaluateDeviation(base.game, base.protocol, br, base.rule, 1, state, {}, zero);
    const IndividualRationality ir =
        VerifyIndividualRationality(base.game, base.protocol, br, base.rule, kTol);
    bool listed = false;
    for (const auto& x : ir.witnesses) listed = listed || (x.sender == 1 && x.state == state);
    return Verdict{follow.report == zero && w.gain > kTol && listed,
                   Fmt("follower reply to 0: %.2f; leader gain at r=0: %.12f; IR witnesses %.0f",
                       base.game.reports().value(follow.report), w.gain, ir.witnesses.size())};
  });

  Criterion(6, "opposed simultaneous: misreporting in both branches", [] {
    ScenarioConfig cfg;
    Load("l1_simultaneous_opposed", &cfg);
    const double oracle = 1.0 - 0.2 * 0.2;
    double gains[2] = {0, 0};
    bool ok = true;
    for (int b = 0; b < 2; ++b) {
      ScenarioConfig v = cfg;
      const bool plus = b == 0;
      v.rule.overrides.push_back({{0.1, -0.1}, plus ? Action::kPlus : Action::kMinus});
      const Scenario s = Instantiate(v);
      const DeviationWitness w = EvaluateDeviation(
          s.game, s.protocol, s.profile, s.rule, plus ? 1 : 2,
          s.game.state_tick(plus ? -0.1 : 0.1), {}, s.game.report_tick(plus ? 0.1 : -0.1));
      gains[b] = w.gain;
      ok = ok && std::abs(w.gain - oracle) <= kTol &&
           !VerifyIndividualRationality(s.game, s.protocol, s.profile, s.rule, kTol).pass;
    }
    return Verdict{ok, Fmt("a+ branch gain %.12f, a- branch gain %.12f", gains[0], gains[1])};
  });

  Criterion(7, "triple: Z coalition deviates in both branches", [] {
    ScenarioConfig cfg;
    Load("triple_majority", &cfg);
    const struct {
      Action action;
      double eps;
    } branches[] = {{Action::kPlus, 0.1}, {Action::kMinus, 0.6}};
    std::string detail;
    bool ok = true;
    for (const auto& b : branches) {
      ScenarioConfig v = cfg;
      v.rule.overrides.push_back({{b.eps, b.eps, -b.eps}, b.action});
      const Scenario s = Instantiate(v);
      const bool ir = VerifyIndividualRationality(s.game, s.protocol, s.profile, s.rule).pass;
      const PlayerId z[] = {1, 2};
      CoalitionSearchResult r = FindCoalitionDeviation(s.game, s.protocol, s.profile, s.rule, z);
      const bool se =
          r.witness && IsSelfEnforcing(s.game, s.protocol, s.profile, s.rule, *r.witness);
      ok = ok && ir && se;
      detail += std::string("[") + (b.action == Action::kPlus ? "a+" : "a-");
      detail += Fmt(" eps=%.1f IR=%.0f ", b.eps, ir);
      detail += Fmt("self-enforcing witness=%.0f] ", se);
    }
    return Verdict{ok, detail};
  });

  Criterion(8, "reach: bisection matches closed form", [] {
    const GameInstance game = ValidateGame(CanonicalDraft());
    double max_err = 0.0;
    std::size_t checked = 0, dominance_failures = 0;
    for (const SenderSpec& s : game.senders()) {
      const ReachSide side = s.payoff.at(0.0) > 0 ? ReachSide::kUpper : ReachSide::kLower;
      for (Tick t = game.states().lo(); t <= game.states().hi(); ++t) {
        const double theta = game.states().value(t);
        const double bis = side == ReachSide::kUpper ? ReachUpper(game, s.id, theta)
                                                     : ReachLower(game, s.id, theta);
        max_err = std::max(max_err,
                           std::abs(bis - ReachClosedForm(game, s.id, theta, side)));
        const double du = game.delta_u_at_tick(s.id, t);
        for (Tick r = game.reports().lo(); r <= game.reports().hi(); ++r) {
          const double x = game.reports().value(r);
          const bool beyond = side == ReachSide::kUpper ? x > bis + kTol : x < bis - kTol;
          if (!beyond) continue;
          ++checked;
          // Truth with the worse action still beats r with the better one.
          const double worst_truth = std::min(0.0, du);
          const double best_lie = std::max(0.0, du) - game.cost_at_ticks(s.id, r, t);
          if (!(worst_truth > best_lie)) ++dominance_failures;
        }
      }
    }
    return Verdict{max_err < 1e-9 && dominance_failures == 0 && checked > 0,
                   Fmt("max |bisection - closed form| = %.3g; %.0f beyond-reach reports, "
                       "%.0f not dominated",
                       max_err, checked, dominance_failures)};
  });

  Criterion(9, "order swap: public advocacy still efficient PBE", [] {
    return PublicAdvocacy("l1_public_advocacy_swapped");
  });

  Criterion(10, "determinism and witness replay", [] {
    const ExperimentReport a = RunPropositionSuite("all", DefaultScenarioDir());
    const ExperimentReport b = RunPropositionSuite("all", DefaultScenarioDir());
    const bool same = CanonicalJson(a) == CanonicalJson(b);
    // Replay from the serialized form, as a reader of the report would.
    const ExperimentReport reloaded = ReportFromJson(nlohmann::json::parse(ToJson(a).dump()));
    const ReplaySummary replay = ReplayWitnesses(reloaded, 1e-12);
    bool reproduced = true;
    for (const std::string& p : PropositionNames()) {
      auto it = a.verdicts.find(p);
      reproduced = reproduced && it != a.verdicts.end() && it->second == "REPRODUCED";
    }
    return Verdict{same && replay.witnesses > 0 && replay.replayed == replay.witnesses &&
                       reproduced,
                   Fmt("identical=%.0f; replayed %.0f/%.0f", same, replay.replayed,
                       replay.witnesses) +
                       Fmt(" (max error %.3g); all propositions reproduced=%.0f",
                           replay.max_error, reproduced)};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
