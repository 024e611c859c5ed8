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


#include "costtalk/verifier.h"

#include <chrono>
#include <cmath>
#include <algorithm>
#include <map>
#include <mutex>

#include "costtalk/parallel.h"

namespace costtalk {

namespace {

constexpr double kTieTolerance = 1e-12;

// Reusable buffers for continuation play from an information set.
class Continuation {
 public:
  Continuation(const GameInstance& game, const StrategyProfile& profile,
               const DecisionRule& rule, PlayerId sender, std::size_t position)
      : game_(game), profile_(profile), rule_(rule), sender_(sender),
        position_(position) {}

  double Utility(Tick state, std::span<const Tick> history, Tick report) {
    prefix_.assign(history.begin(), history.end());
    prefix_.push_back(report);
    CompleteReports(profile_, state, prefix_, {}, reports_);
    const Action a = rule_(reports_);
    return game_.sender_utility_at_ticks(sender_, report, a, state);
  }

  BestResponse Best(Tick state, std::span<const Tick> history) {
    const Grid& grid = game_.reports();
    BestResponse best{grid.lo(), -INFINITY};
    bool best_truthful = false;
    for (Tick r = grid.lo(); r <= grid.hi(); ++r) {
      const double u = Utility(state, history, r);
      if (u > best.utility + kTieTolerance) {
        best = {r, u};
        best_truthful = r == state;
      } else if (std::abs(u - best.utility) <= kTieTolerance && r == state &&
                 !best_truthful) {
        best = {r, u};
        best_truthful = true;
      }
    }
    return best;
  }

  std::size_t position() const { return position_; }

 private:
  const GameInstance& game_;
  const StrategyProfile& profile_;
  const DecisionRule& rule_;
  PlayerId sender_;
  std::size_t position_;
  std::vector<Tick> prefix_;
  std::vector<Tick> reports_;
};

void CheckHistory(const StrategyProfile& profile, std::size_t position,
                  std::span<const Tick> history) {
  const std::size_t expected =
      profile.timing() == Timing::kSequential ? position : 0;
  if (history.size() != expected) {
    throw Error(ErrorCode::kIncompleteStrategy,
                "history length does not match the sender's position");
  }
}

}  // namespace

double ContinuationUtility(const GameInstance& game, const ProtocolSpec& protocol,
                           const StrategyProfile& profile, const DecisionRule& rule,
                           std::size_t position, Tick state,
                           std::span<const Tick> history, Tick report) {
  CheckHistory(profile, position, history);
  if (profile.timing() == Timing::kSimultaneous) {
    std::vector<std::optional<Tick>> fixed(protocol.size());
    fixed[position] = report;
    std::vector<Tick> reports;
    CompleteReports(profile, state, {}, fixed, reports);
    return game.sender_utility_at_ticks(protocol.roster[position], report,
                                        rule(reports), state);
  }
  Continuation c(game, profile, rule, protocol.roster[position], position);
  return c.Utility(state, history, report);
}

namespace {

// Simultaneous senders are evaluated with the others' reports in `state`.
class SimultaneousDeviation {
 public:
  SimultaneousDeviation(const GameInstance& game, const StrategyProfile& profile,
                        const DecisionRule& rule, PlayerId sender,
                        std::size_t position)
      : game_(game), profile_(profile), rule_(rule), sender_(sender),
        position_(position) {}

  void SetState(Tick state) {
    state_ = state;
    CompleteReports(profile_, state, {}, {}, reports_);
  }

  double Utility(Tick report) {
    const Tick saved = reports_[position_];
    reports_[position_] = report;
    const Action a = rule_(reports_);
    reports_[position_] = saved;
    return game_.sender_utility_at_ticks(sender_, report, a, state_);
  }

  BestResponse Best() {
    const Grid& grid = game_.reports();
    BestResponse best{grid.lo(), -INFINITY};
    bool best_truthful = false;
    for (Tick r = grid.lo(); r <= grid.hi(); ++r) {
      const double u = Utility(r);
      if (u > best.utility + kTieTolerance) {
        best = {r, u};
        best_truthful = r == state_;
      } else if (std::abs(u - best.utility) <= kTieTolerance && r == state_ &&
                 !best_truthful) {
        best = {r, u};
        best_truthful = true;
      }
    }
    return best;
  }

 private:
  const GameInstance& game_;
  const StrategyProfile& profile_;
  const DecisionRule& rule_;
  PlayerId sender_;
  std::size_t position_;
  Tick state_ = 0;
  std::vector<Tick> reports_;
};

}  // namespace

BestResponse BestResponseSearch(const GameInstance& game,
                                const ProtocolSpec& protocol,
                                const StrategyProfile& profile,
                                const DecisionRule& rule, PlayerId sender,
                                Tick state, std::span<const Tick> history) {
  const std::size_t position = protocol.position_of(sender);
  CheckHistory(profile, position, history);
  if (profile.timing() == Timing::kSimultaneous) {
    SimultaneousDeviation d(game, profile, rule, sender, position);
    d.SetState(state);
    return d.Best();
  }
  Continuation c(game, profile, rule, sender, position);
  return c.Best(state, history);
}

DeviationWitness EvaluateDeviation(const GameInstance& game,
                                   const ProtocolSpec& protocol,
                                   const StrategyProfile& profile,
                                   const DecisionRule& rule, PlayerId sender,
                                   Tick state, std::span<const Tick> history,
                                   Tick report) {
  const std::size_t position = protocol.position_of(sender);
  CheckHistory(profile, position, history);
  DeviationWitness w;
  w.sender = sender;
  w.position = position;
  w.state = state;
  w.history.assign(history.begin(), history.end());
  w.prescribed_report = profile.report(position, history, state);
  w.deviating_report = report;
  w.prescribed_utility = ContinuationUtility(game, protocol, profile, rule, position,
                                             state, history, w.prescribed_report);
  w.deviation_utility = ContinuationUtility(game, protocol, profile, rule, position,
                                            state, history, report);
  w.gain = w.deviation_utility - w.prescribed_utility;
  return w;
}

double ReplayGain(const GameInstance& game, const ProtocolSpec& protocol,
                  const StrategyProfile& profile, const DecisionRule& rule,
                  const DeviationWitness& witness) {
  return EvaluateDeviation(game, protocol, profile, rule, witness.sender,
                           witness.state, witness.history, witness.deviating_report)
      .gain;
}

StrategyProfile BestResponseProfile(const GameInstance& game,
                                    const ProtocolSpec& protocol,
                                    const StrategyProfile& profile,
                                    const DecisionRule& rule, PlayerId sender) {
  const std::size_t position = protocol.position_of(sender);
  StrategyProfile out = profile;
  const std::size_t histories = profile.history_count(position);
  const Grid& states = game.states();
  std::vector<Tick> best(histories * states.size());
  ParallelChunks(histories, [&](std::size_t begin, std::size_t end) {
    Continuation c(game, profile, rule, sender, position);
    SimultaneousDeviation d(game, profile, rule, sender, position);
    for (std::size_t h = begin; h < end; ++h) {
      const std::vector<Tick> prefix = profile.history_prefix(position, h);
      for (Tick s = states.lo(); s <= states.hi(); ++s) {
        BestResponse br;
        if (profile.timing() == Timing::kSimultaneous) {
          d.SetState(s);
          br = d.Best();
        } else {
          br = c.Best(s, prefix);
        }
        best[h * states.size() + states.index(s)] = br.report;
      }
    }
  });
  for (std::size_t h = 0; h < histories; ++h) {
    for (Tick s = states.lo(); s <= states.hi(); ++s) {
      out.set_report(position, h, s, best[h * states.size() + states.index(s)]);
    }
  }
  return out;
}

IndividualRationality VerifyIndividualRationality(
    const GameInstance& game, const ProtocolSpec& protocol,
    const StrategyProfile& profile, const DecisionRule& rule,
    double gain_tolerance) {
  ValidateProtocol(game, protocol);
  if (profile.size() != protocol.size()) {
    throw Error(ErrorCode::kIncompleteStrategy, "profile does not match roster");
  }
  IndividualRationality result;
  const Grid& states = game.states();
  for (std::size_t pos = 0; pos < protocol.size(); ++pos) {
    const PlayerId sender = protocol.roster[pos];
    const std::size_t histories = profile.history_count(pos);
    result.information_sets += histories * states.size();

    std::mutex mu;
    std::vector<std::pair<std::size_t, std::vector<DeviationWitness>>> chunks;
    ParallelChunks(histories, [&](std::size_t begin, std::size_t end) {
      std::vector<DeviationWitness> found;
      Continuation c(game, profile, rule, sender, pos);
      SimultaneousDeviation d(game, profile, rule, sender, pos);
      for (std::size_t h = begin; h < end; ++h) {
        const std::vector<Tick> prefix = profile.history_prefix(pos, h);
        for (Tick s = states.lo(); s <= states.hi(); ++s) {
          const Tick prescribed = profile.report_at(pos, h, s);
          BestResponse br;
          double prescribed_u;
          if (profile.timing() == Timing::kSimultaneous) {
            d.SetState(s);
            br = d.Best();
            prescribed_u = d.Utility(prescribed);
          } else {
            br = c.Best(s, prefix);
            prescribed_u = c.Utility(s, prefix, prescribed);
          }
          const double gain = br.utility - prescribed_u;
          if (gain > gain_tolerance) {
            found.push_back({sender, pos, s, prefix, prescribed, br.report,
                             prescribed_u, br.utility, gain});
          }
        }
      }
      std::lock_guard<std::mutex> lock(mu);
      chunks.emplace_back(begin, std::move(found));
    });
    std::sort(chunks.begin(), chunks.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [begin, found] : chunks) {
      for (auto& w : found) result.witnesses.push_back(std::move(w));
    }
  }
  result.pass = result.witnesses.empty();
  return result;
}

BayesCheck VerifyBayesOnPath(const GameInstance& game,
                             const ProtocolSpec& protocol,
                             const StrategyProfile& profile,
                             const DecisionRule& rule,
                             std::span<const double> prior) {
  if (profile.size() != protocol.size()) {
    throw Error(ErrorCode::kIncompleteStrategy, "profile does not match roster");
  }
  const Grid& states = game.states();
  const std::span<const double> weights =
      prior.empty() ? std::span<const double>(game.prior()) : prior;
  if (weights.size() != states.size()) {
    throw Error(ErrorCode::kBadPrior, "prior length does not match the state grid");
  }
  // Group states by the report profile they produce.
  std::map<std::vector<Tick>, std::vector<double>> posteriors;
  std::vector<Tick> reports;
  for (Tick s = states.lo(); s <= states.hi(); ++s) {
    CompleteReports(profile, s, {}, {}, reports);
    auto [it, inserted] = posteriors.try_emplace(reports);
    if (inserted) it->second.assign(states.size(), 0.0);
    it->second[states.index(s)] = weights[states.index(s)];
  }
  BayesCheck check;
  for (const auto& [profile_reports, posterior] : posteriors) {
    if (rule(profile_reports) != ReceiverBestAction(game, posterior)) {
      check.violations.push_back(profile_reports);
    }
  }
  check.pass = check.violations.empty();
  return check;
}

EfficiencyCheck CheckEfficiency(const GameInstance& game,
                                const ProtocolSpec& protocol,
                                const StrategyProfile& profile,
                                const DecisionRule& rule) {
  const Grid& states = game.states();
  for (Tick s = states.lo(); s <= states.hi(); ++s) {
    const Outcome o = PlayoutAtTick(game, protocol, profile, rule, s);
    for (Tick r : o.reports) {
      if (r != s) return {false, s, "misreport"};
    }
    const Action efficient = s >= 0 ? Action::kPlus : Action::kMinus;
    if (o.action != efficient) return {false, s, "wrong action"};
  }
  return {};
}

VerificationReport VerifyEquilibrium(const GameInstance& game,
                                     const ProtocolSpec& protocol,
                                     const StrategyProfile& profile,
                                     const DecisionRule& rule,
                                     double gain_tolerance) {
  const auto start = std::chrono::steady_clock::now();
  VerificationReport report;
  report.individual_rationality =
      VerifyIndividualRationality(game, protocol, profile, rule, gain_tolerance);
  report.bayes_onpath = VerifyBayesOnPath(game, protocol, profile, rule);
  report.efficiency = CheckEfficiency(game, protocol, profile, rule);
  report.state_count = game.states().size();
  report.report_count = game.reports().size();
  report.gain_tolerance = gain_tolerance;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace costtalk
