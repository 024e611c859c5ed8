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


#ifndef COSTTALK_VERIFIER_H_
#define COSTTALK_VERIFIER_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "costtalk/game.h"
#include "costtalk/protocol.h"

namespace costtalk {

// A deviation whose gain exceeds this is profitable.
inline constexpr double kDefaultGainTolerance = 1e-9;

// One sender, at one information set, strictly gaining by a different report.
struct DeviationWitness {
  PlayerId sender = 0;
  std::size_t position = 0;
  Tick state = 0;
  std::vector<Tick> history;  // empty when simultaneous
  Tick prescribed_report = 0;
  Tick deviating_report = 0;
  double prescribed_utility = 0.0;
  double deviation_utility = 0.0;
  double gain = 0.0;
};

struct BestResponse {
  Tick report = 0;
  double utility = 0.0;
};

// Sender utility when the sender at `position` reports `report` after
// `history` in `state` and every later sender follows the profile.
double ContinuationUtility(const GameInstance& game, const ProtocolSpec& protocol,
                           const StrategyProfile& profile, const DecisionRule& rule,
                           std::size_t position, Tick state,
                           std::span<const Tick> history, Tick report);

// Argmax over the report grid of the continuation utility. Ties (within
// 1e-12) go to the truthful report, then to the smaller report.
BestResponse BestResponseSearch(const GameInstance& game,
                                const ProtocolSpec& protocol,
                                const StrategyProfile& profile,
                                const DecisionRule& rule, PlayerId sender,
                                Tick state, std::span<const Tick> history = {});

// Evaluates one specific deviation; the gain may be non-positive.
DeviationWitness EvaluateDeviation(const GameInstance& game,
                                   const ProtocolSpec& protocol,
                                   const StrategyProfile& profile,
                                   const DecisionRule& rule, PlayerId sender,
                                   Tick state, std::span<const Tick> history,
                                   Tick report);

// Recomputes a witness' gain from scratch.
double ReplayGain(const GameInstance& game, const ProtocolSpec& protocol,
                  const StrategyProfile& profile, const DecisionRule& rule,
                  const DeviationWitness& witness);

// Copy of `profile` with `sender`'s table replaced by best responses at every
// information set (later senders' tables held fixed).
StrategyProfile BestResponseProfile(const GameInstance& game,
                                    const ProtocolSpec& protocol,
                                    const StrategyProfile& profile,
                                    const DecisionRule& rule, PlayerId sender);

struct IndividualRationality {
  bool pass = true;
  // One per failing information set, ordered by (position, history, state).
  std::vector<DeviationWitness> witnesses;
  std::size_t information_sets = 0;
};

// Every sender at every information set (all histories when sequential)
// against every report on the grid.
IndividualRationality VerifyIndividualRationality(
    const GameInstance& game, const ProtocolSpec& protocol,
    const StrategyProfile& profile, const DecisionRule& rule,
    double gain_tolerance = kDefaultGainTolerance);

struct BayesCheck {
  bool pass = true;
  std::vector<std::vector<Tick>> violations;
};

// On every on-path profile the rule must pick the receiver's best action under
// the Bayes posterior. An empty `prior` means the game's prior.
BayesCheck VerifyBayesOnPath(const GameInstance& game,
                             const ProtocolSpec& protocol,
                             const StrategyProfile& profile,
                             const DecisionRule& rule,
                             std::span<const double> prior = {});

struct EfficiencyCheck {
  bool efficient = true;
  std::optional<Tick> failing_state;
  std::string cause;  // "misreport" or "wrong action"
};

EfficiencyCheck CheckEfficiency(const GameInstance& game,
                                const ProtocolSpec& protocol,
                                const StrategyProfile& profile,
                                const DecisionRule& rule);

struct VerificationReport {
  IndividualRationality individual_rationality;
  BayesCheck bayes_onpath;
  EfficiencyCheck efficiency;
  std::size_t state_count = 0;
  std::size_t report_count = 0;
  double gain_tolerance = kDefaultGainTolerance;
  double wall_seconds = 0.0;

  bool is_pbe() const { return individual_rationality.pass && bayes_onpath.pass; }
};

VerificationReport VerifyEquilibrium(const GameInstance& game,
                                     const ProtocolSpec& protocol,
                                     const StrategyProfile& profile,
                                     const DecisionRule& rule,
                                     double gain_tolerance = kDefaultGainTolerance);

}  // namespace costtalk

#endif  // COSTTALK_VERIFIER_H_
