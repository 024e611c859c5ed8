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


#ifndef COSTTALK_PROTOCOL_H_
#define COSTTALK_PROTOCOL_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "costtalk/game.h"

namespace costtalk {

enum class Timing { kSimultaneous, kSequential };

std::string ToString(Timing t);
Timing TimingFromString(const std::string& s);

struct ProtocolSpec {
  // Speaking order when sequential.
  std::vector<PlayerId> roster;
  Timing timing = Timing::kSimultaneous;

  std::size_t size() const { return roster.size(); }
  // Roster position of a sender id; throws kBadRoster if absent.
  std::size_t position_of(PlayerId id) const;
};

// Throws kBadRoster on an empty roster, duplicates, or unknown sender ids.
void ValidateProtocol(const GameInstance& game, const ProtocolSpec& protocol);

// Pure reporting rules, one table per roster position. A simultaneous sender
// sees only the state; a sequential sender at position j sees the j earlier
// reports. Tables are total: every (history, state) cell holds a grid report.
class StrategyProfile {
 public:
  using Rule = std::function<Tick(std::size_t position,
                                  std::span<const Tick> prefix, Tick state)>;

  // Tabulates `rule` over every information set.
  static StrategyProfile Tabulate(const GameInstance& game,
                                  const ProtocolSpec& protocol, const Rule& rule);

  Timing timing() const { return timing_; }
  std::size_t size() const { return tables_.size(); }
  // Number of distinct histories seen by a position (1 when simultaneous).
  std::size_t history_count(std::size_t position) const;
  std::size_t history_index(std::size_t position,
                            std::span<const Tick> prefix) const;
  std::vector<Tick> history_prefix(std::size_t position,
                                   std::size_t history) const;

  Tick report(std::size_t position, std::span<const Tick> prefix,
              Tick state) const;
  Tick report_at(std::size_t position, std::size_t history, Tick state) const {
    return tables_[position][history * state_count_ +
                             static_cast<std::size_t>(state - state_lo_)];
  }
  void set_report(std::size_t position, std::size_t history, Tick state,
                  Tick report);

 private:
  Timing timing_ = Timing::kSimultaneous;
  Tick state_lo_ = 0;
  std::size_t state_count_ = 0;
  Tick report_lo_ = 0;
  Tick report_hi_ = -1;
  std::size_t report_count_ = 0;
  std::vector<std::vector<Tick>> tables_;
};

// a+ iff the report at `position` is >= threshold.
struct ThresholdRule {
  std::size_t position = 0;
  double threshold = 0.0;
};

// If every report equals r, a+ iff r >= 0; otherwise `disagreement`.
struct AgreementRule {
  Action disagreement = Action::kMinus;
};

// If a strict majority of reports equal r, a+ iff r >= 0; otherwise
// `no_majority`.
struct MajorityRule {
  Action no_majority = Action::kMinus;
};

// Two-sender burden-of-proof rule.
// first_positive: a+ iff r_first >= 0 and r_second > threshold.
// otherwise:      a+ iff r_first >= 0 or r_second >= threshold.
// Comparisons against the real-valued threshold treat values within 1e-9 as
// equal.
struct BurdenOfProofRule {
  std::size_t first = 0;
  std::size_t second = 1;
  double threshold = 0.0;
  bool first_positive = true;
};

struct ConstantRule {
  Action action = Action::kMinus;
};

// Total map from report profiles (roster order) to the receiver's action.
class DecisionRule {
 public:
  using Base = std::variant<ThresholdRule, AgreementRule, MajorityRule,
                            BurdenOfProofRule, ConstantRule>;

  DecisionRule() = default;
  DecisionRule(std::string name, Base base, double step)
      : name_(std::move(name)), base_(base), step_(step) {}

  const std::string& name() const { return name_; }
  const Base& base() const { return base_; }
  double step() const { return step_; }

  // Pins the action at one report profile, replacing any earlier pin.
  void set_override(std::vector<Tick> reports, Action a);
  const std::vector<std::pair<std::vector<Tick>, Action>>& overrides() const {
    return overrides_;
  }

  Action operator()(std::span<const Tick> reports) const;

 private:
  Action Evaluate(std::span<const Tick> reports) const;

  std::string name_;
  Base base_ = ConstantRule{};
  double step_ = 1.0;
  std::vector<std::pair<std::vector<Tick>, Action>> overrides_;
};

struct Outcome {
  Tick state = 0;
  std::vector<Tick> reports;  // roster order
  Action action = Action::kMinus;
  double receiver_utility = 0.0;
  std::vector<double> sender_utilities;  // roster order
};

// Fills `reports` (resized to the roster) for a play in `state`. Positions
// with a value in `fixed` report it regardless of history; the others follow
// the profile, seeing the realised prefix. The first `prefix.size()`
// positions are taken from `prefix`.
void CompleteReports(const StrategyProfile& profile, Tick state,
                     std::span<const Tick> prefix,
                     std::span<const std::optional<Tick>> fixed,
                     std::vector<Tick>& reports);

Outcome MakeOutcome(const GameInstance& game, const ProtocolSpec& protocol,
                    Tick state, std::vector<Tick> reports, Action action);

Outcome PlayoutAtTick(const GameInstance& game, const ProtocolSpec& protocol,
                      const StrategyProfile& profile, const DecisionRule& rule,
                      Tick state);
Outcome Playout(const GameInstance& game, const ProtocolSpec& protocol,
                const StrategyProfile& profile, const DecisionRule& rule,
                double theta);

// Posterior weights are indexed like the state grid.
Action ReceiverBestAction(const GameInstance& game,
                          std::span<const double> posterior);

StrategyProfile BuildTruthfulProfile(const GameInstance& game,
                                     const ProtocolSpec& protocol);

struct Equilibrium {
  StrategyProfile profile;
  DecisionRule rule;
};

// Two opposed-biased senders speaking sequentially. The first speaker is
// truthful; the second tells the truth unless the first has argued for the
// second's disfavoured action against the state, in which case it reports
// just far enough (its reach at 0) to carry the burden of proof.
Equilibrium BuildPublicAdvocacyEquilibrium(const GameInstance& game,
                                           const ProtocolSpec& protocol);

// Like-biased senders reporting simultaneously: truthful, and any
// disagreement triggers the action all senders dislike.
Equilibrium BuildSkepticalSimultaneousEquilibrium(const GameInstance& game,
                                                  const ProtocolSpec& protocol);

// Sorted, deduplicated report profiles produced along the path of play.
std::vector<std::vector<Tick>> OnPathSet(const GameInstance& game,
                                         const ProtocolSpec& protocol,
                                         const StrategyProfile& profile);

// Prior restricted to the states whose play produces `reports`, renormalised;
// nullopt when no state does (off path).
std::optional<std::vector<double>> PosteriorUpdate(
    const GameInstance& game, const ProtocolSpec& protocol,
    const StrategyProfile& profile, std::span<const Tick> reports);

}  // namespace costtalk

#endif  // COSTTALK_PROTOCOL_H_
