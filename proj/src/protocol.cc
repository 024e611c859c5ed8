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


#include "costtalk/protocol.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "costtalk/reach.h"

namespace costtalk {

namespace {

constexpr std::size_t kMaxTableEntries = std::size_t{1} << 26;
constexpr double kThresholdSlack = 1e-9;
// Relative tolerance for the receiver's expected payoff difference being 0.
constexpr double kIndifferenceTolerance = 1e-12;

}  // namespace

std::string ToString(Timing t) {
  return t == Timing::kSequential ? "sequential" : "simultaneous";
}

Timing TimingFromString(const std::string& s) {
  if (s == "sequential") return Timing::kSequential;
  if (s == "simultaneous") return Timing::kSimultaneous;
  throw Error(ErrorCode::kSchemaError, "unknown timing '" + s + "'");
}

std::size_t ProtocolSpec::position_of(PlayerId id) const {
  for (std::size_t i = 0; i < roster.size(); ++i) {
    if (roster[i] == id) return i;
  }
  throw Error(ErrorCode::kBadRoster, "sender " + std::to_string(id) + " not in roster");
}

void ValidateProtocol(const GameInstance& game, const ProtocolSpec& protocol) {
  if (protocol.roster.empty()) throw Error(ErrorCode::kBadRoster, "empty roster");
  std::set<PlayerId> seen;
  for (PlayerId id : protocol.roster) {
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::kBadRoster, "duplicate sender " + std::to_string(id));
    }
    if (!game.has_sender(id)) {
      throw Error(ErrorCode::kBadRoster, "unknown sender " + std::to_string(id));
    }
  }
}

StrategyProfile StrategyProfile::Tabulate(const GameInstance& game,
                                          const ProtocolSpec& protocol,
                                          const Rule& rule) {
  ValidateProtocol(game, protocol);
  StrategyProfile p;
  p.timing_ = protocol.timing;
  p.state_lo_ = game.states().lo();
  p.state_count_ = game.states().size();
  p.report_lo_ = game.reports().lo();
  p.report_hi_ = game.reports().hi();
  p.report_count_ = game.reports().size();
  for (std::size_t pos = 0; pos < protocol.size(); ++pos) {
    const std::size_t histories = p.history_count(pos);
    if (histories > kMaxTableEntries / p.state_count_) {
      throw Error(ErrorCode::kTableTooLarge,
                  "strategy table for position " + std::to_string(pos) +
                      " exceeds the size limit");
    }
    p.tables_.emplace_back(histories * p.state_count_);
  }
  for (std::size_t pos = 0; pos < protocol.size(); ++pos) {
    for (std::size_t h = 0; h < p.history_count(pos); ++h) {
      const std::vector<Tick> prefix = p.history_prefix(pos, h);
      for (Tick s = game.states().lo(); s <= game.states().hi(); ++s) {
        p.set_report(pos, h, s, rule(pos, prefix, s));
      }
    }
  }
  return p;
}

std::size_t StrategyProfile::history_count(std::size_t position) const {
  if (timing_ == Timing::kSimultaneous) return 1;
  std::size_t n = 1;
  for (std::size_t i = 0; i < position; ++i) {
    if (n > kMaxTableEntries / report_count_) {
      throw Error(ErrorCode::kTableTooLarge, "history space too large");
    }
    n *= report_count_;
  }
  return n;
}

std::size_t StrategyProfile::history_index(std::size_t position,
                                           std::span<const Tick> prefix) const {
  if (timing_ == Timing::kSimultaneous) return 0;
  std::size_t index = 0;
  std::size_t radix = 1;
  for (std::size_t i = 0; i < position; ++i) {
    if (i >= prefix.size() || prefix[i] < report_lo_ || prefix[i] > report_hi_) {
      throw Error(ErrorCode::kIncompleteStrategy, "history outside the report grid");
    }
    index += static_cast<std::size_t>(prefix[i] - report_lo_) * radix;
    radix *= report_count_;
  }
  return index;
}

std::vector<Tick> StrategyProfile::history_prefix(std::size_t position,
                                                  std::size_t history) const {
  std::vector<Tick> prefix;
  if (timing_ == Timing::kSimultaneous) return prefix;
  for (std::size_t i = 0; i < position; ++i) {
    prefix.push_back(report_lo_ + static_cast<Tick>(history % report_count_));
    history /= report_count_;
  }
  return prefix;
}

Tick StrategyProfile::report(std::size_t position, std::span<const Tick> prefix,
                             Tick state) const {
  if (position >= tables_.size() || state < state_lo_ ||
      static_cast<std::size_t>(state - state_lo_) >= state_count_) {
    throw Error(ErrorCode::kIncompleteStrategy, "no strategy entry");
  }
  return report_at(position, history_index(position, prefix), state);
}

void StrategyProfile::set_report(std::size_t position, std::size_t history,
                                 Tick state, Tick report) {
  if (report < report_lo_ || report > report_hi_) {
    throw Error(ErrorCode::kOffGridReport, "strategy report outside the report grid");
  }
  tables_[position][history * state_count_ +
                    static_cast<std::size_t>(state - state_lo_)] = report;
}

void DecisionRule::set_override(std::vector<Tick> reports, Action a) {
  for (auto& [key, action] : overrides_) {
    if (key == reports) {
      action = a;
      return;
    }
  }
  overrides_.emplace_back(std::move(reports), a);
}

Action DecisionRule::operator()(std::span<const Tick> reports) const {
  for (const auto& [key, action] : overrides_) {
    if (std::equal(key.begin(), key.end(), reports.begin(), reports.end())) {
      return action;
    }
  }
  return Evaluate(reports);
}

Action DecisionRule::Evaluate(std::span<const Tick> reports) const {
  struct Visitor {
    std::span<const Tick> r;
    double step;
    Action operator()(const ThresholdRule& t) const {
      return r[t.position] * step >= t.threshold - kThresholdSlack ? Action::kPlus
                                                                    : Action::kMinus;
    }
    Action operator()(const AgreementRule& a) const {
      for (Tick x : r) {
        if (x != r[0]) return a.disagreement;
      }
      return r[0] >= 0 ? Action::kPlus : Action::kMinus;
    }
    Action operator()(const MajorityRule& m) const {
      for (std::size_t i = 0; i < r.size(); ++i) {
        std::size_t count = 0;
        for (Tick x : r) count += x == r[i] ? 1 : 0;
        if (2 * count > r.size()) return r[i] >= 0 ? Action::kPlus : Action::kMinus;
      }
      return m.no_majority;
    }
    Action operator()(const BurdenOfProofRule& b) const {
      const bool first_plus = r[b.first] >= 0;
      const double second = r[b.second] * step;
      if (b.first_positive) {
        return first_plus && second > b.threshold + kThresholdSlack ? Action::kPlus
                                                                     : Action::kMinus;
      }
      return first_plus || second >= b.threshold - kThresholdSlack ? Action::kPlus
                                                                    : Action::kMinus;
    }
    Action operator()(const ConstantRule& c) const { return c.action; }
  };
  return std::visit(Visitor{reports, step_}, base_);
}

void CompleteReports(const StrategyProfile& profile, Tick state,
                     std::span<const Tick> prefix,
                     std::span<const std::optional<Tick>> fixed,
                     std::vector<Tick>& reports) {
  const std::size_t n = profile.size();
  reports.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < prefix.size()) {
      reports[i] = prefix[i];
    } else if (i < fixed.size() && fixed[i]) {
      reports[i] = *fixed[i];
    } else if (profile.timing() == Timing::kSimultaneous) {
      reports[i] = profile.report_at(i, 0, state);
    } else {
      reports[i] = profile.report(i, std::span<const Tick>(reports.data(), i), state);
    }
  }
}

Outcome MakeOutcome(const GameInstance& game, const ProtocolSpec& protocol,
                    Tick state, std::vector<Tick> reports, Action action) {
  Outcome o;
  o.state = state;
  o.action = action;
  o.receiver_utility = game.receiver_utility_at_tick(action, state);
  for (std::size_t i = 0; i < protocol.size(); ++i) {
    o.sender_utilities.push_back(
        game.sender_utility_at_ticks(protocol.roster[i], reports[i], action, state));
  }
  o.reports = std::move(reports);
  return o;
}

Outcome PlayoutAtTick(const GameInstance& game, const ProtocolSpec& protocol,
                      const StrategyProfile& profile, const DecisionRule& rule,
                      Tick state) {
  if (profile.size() != protocol.size()) {
    throw Error(ErrorCode::kIncompleteStrategy, "profile does not match roster");
  }
  std::vector<Tick> reports;
  CompleteReports(profile, state, {}, {}, reports);
  const Action a = rule(reports);
  return MakeOutcome(game, protocol, state, std::move(reports), a);
}

Outcome Playout(const GameInstance& game, const ProtocolSpec& protocol,
                const StrategyProfile& profile, const DecisionRule& rule,
                double theta) {
  return PlayoutAtTick(game, protocol, profile, rule, game.state_tick(theta));
}

Action ReceiverBestAction(const GameInstance& game,
                          std::span<const double> posterior) {
  const Grid& states = game.states();
  if (posterior.size() != states.size()) {
    throw Error(ErrorCode::kDegeneratePosterior, "posterior has the wrong length");
  }
  // Neumaier summation of w * du_r.
  double sum = 0.0, compensation = 0.0, mass = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    const double w = posterior[i];
    if (w < 0.0) throw Error(ErrorCode::kDegeneratePosterior, "negative weight");
    mass += w;
    const double term = w * game.receiver().at(states.value(states.tick_at(i)));
    scale += std::abs(term);
    const double t = sum + term;
    compensation += std::abs(sum) >= std::abs(term) ? (sum - t) + term
                                                    : (term - t) + sum;
    sum = t;
  }
  if (!(mass > 0.0)) throw Error(ErrorCode::kDegeneratePosterior, "zero mass");
  const double expected = sum + compensation;
  return expected >= -kIndifferenceTolerance * scale ? Action::kPlus : Action::kMinus;
}

StrategyProfile BuildTruthfulProfile(const GameInstance& game,
                                     const ProtocolSpec& protocol) {
  const Grid& s = game.states();
  const Grid& r = game.reports();
  if (s.step() != r.step() || !r.contains(s.lo()) || !r.contains(s.hi())) {
    throw Error(ErrorCode::kGridMisalignment, "states are not report-grid points");
  }
  return StrategyProfile::Tabulate(
      game, protocol,
      [](std::size_t, std::span<const Tick>, Tick state) { return state; });
}

Equilibrium BuildPublicAdvocacyEquilibrium(const GameInstance& game,
                                           const ProtocolSpec& protocol) {
  ValidateProtocol(game, protocol);
  if (protocol.timing != Timing::kSequential) {
    throw Error(ErrorCode::kWrongTiming, "public advocacy needs sequential reports");
  }
  if (protocol.size() != 2) {
    throw Error(ErrorCode::kWrongBiasConfiguration, "public advocacy needs two senders");
  }
  const PlayerId first = protocol.roster[0];
  const PlayerId second = protocol.roster[1];
  const double bias_first = game.sender(first).payoff.at(0.0);
  const double bias_second = game.sender(second).payoff.at(0.0);
  if (!(bias_first * bias_second < 0.0)) {
    throw Error(ErrorCode::kWrongBiasConfiguration, "senders are not opposed-biased");
  }
  const bool first_positive = bias_first > 0.0;
  const double step = game.reports().step();
  // Reach of the second speaker at state 0, and its nearest grid report on
  // the far side (ties within the slack count as reaching it).
  const double threshold = Reach(game, second, 0.0);
  const Tick threshold_tick =
      first_positive
          ? static_cast<Tick>(std::floor((threshold + kThresholdSlack) / step))
          : static_cast<Tick>(std::ceil((threshold - kThresholdSlack) / step));

  StrategyProfile profile = StrategyProfile::Tabulate(
      game, protocol,
      [&](std::size_t pos, std::span<const Tick> prefix, Tick state) -> Tick {
        if (pos == 0) return state;
        const Tick r1 = prefix[0];
        if (first_positive && state < 0 && r1 >= 0) {
          return std::min(threshold_tick, state);
        }
        if (!first_positive && state >= 0 && r1 < 0) {
          return std::max(threshold_tick, state);
        }
        return state;
      });
  DecisionRule rule("public_advocacy",
                    BurdenOfProofRule{0, 1, threshold, first_positive}, step);
  return {std::move(profile), std::move(rule)};
}

Equilibrium BuildSkepticalSimultaneousEquilibrium(const GameInstance& game,
                                                  const ProtocolSpec& protocol) {
  ValidateProtocol(game, protocol);
  if (protocol.timing != Timing::kSimultaneous) {
    throw Error(ErrorCode::kWrongTiming, "skeptical rule needs simultaneous reports");
  }
  if (protocol.size() < 2) {
    throw Error(ErrorCode::kWrongBiasConfiguration, "need at least two senders");
  }
  const BiasClassification bias = ClassifyBiases(game, protocol.roster);
  if (bias.kind == BiasClass::kContainsOpposedPair) {
    throw Error(ErrorCode::kWrongBiasConfiguration, "senders are not like-biased");
  }
  const Action punish = bias.kind == BiasClass::kAllLikeBiasedPositive
                            ? Action::kMinus
                            : Action::kPlus;
  return {BuildTruthfulProfile(game, protocol),
          DecisionRule("skeptical", AgreementRule{punish}, game.reports().step())};
}

std::vector<std::vector<Tick>> OnPathSet(const GameInstance& game,
                                         const ProtocolSpec& /*protocol*/,
                                         const StrategyProfile& profile) {
  std::set<std::vector<Tick>> seen;
  std::vector<Tick> reports;
  for (Tick s = game.states().lo(); s <= game.states().hi(); ++s) {
    CompleteReports(profile, s, {}, {}, reports);
    seen.insert(reports);
  }
  return {seen.begin(), seen.end()};
}

std::optional<std::vector<double>> PosteriorUpdate(
    const GameInstance& game, const ProtocolSpec& /*protocol*/,
    const StrategyProfile& profile, std::span<const Tick> target) {
  const Grid& states = game.states();
  std::vector<double> posterior(states.size(), 0.0);
  double mass = 0.0;
  std::vector<Tick> reports;
  for (Tick s = states.lo(); s <= states.hi(); ++s) {
    CompleteReports(profile, s, {}, {}, reports);
    if (std::equal(reports.begin(), reports.end(), target.begin(), target.end())) {
      posterior[states.index(s)] = game.prior()[states.index(s)];
      mass += posterior[states.index(s)];
    }
  }
  if (mass == 0.0) return std::nullopt;
  for (double& w : posterior) w /= mass;
  return posterior;
}

}  // namespace costtalk
