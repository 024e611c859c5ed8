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


#ifndef COSTTALK_COALITION_H_
#define COSTTALK_COALITION_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "costtalk/game.h"
#include "costtalk/protocol.h"
#include "costtalk/verifier.h"

namespace costtalk {

inline constexpr std::size_t kMaxCoalitionSize = 3;

// One step of a self-enforcement audit: a sub-coalition that tried to
// re-deviate from a joint deviation, holding everyone else at it.
struct AuditEntry {
  std::vector<PlayerId> sub_coalition;
  int depth = 1;
  std::size_t improving = 0;  // mutually improving re-deviations found
  // A re-deviation that is itself self-enforcing, if any.
  std::optional<std::vector<Tick>> blocking_reports;
};

struct CoalitionWitness {
  std::vector<PlayerId> coalition;  // ascending roster position
  Tick state = 0;
  std::vector<Tick> reports;  // members' deviating reports, coalition order
  std::vector<Tick> profile;  // full resulting report profile, roster order
  Action action = Action::kMinus;
  std::vector<double> baseline_utilities;
  std::vector<double> deviation_utilities;
  std::vector<double> gains;
  bool self_enforcing = false;
  std::vector<AuditEntry> audit;

  double min_gain() const;
};

struct CoalitionSearchOptions {
  double gain_tolerance = kDefaultGainTolerance;
  // Restrict the search to one state.
  std::optional<Tick> state;
  // Skip reports whose cost already exceeds the member's largest possible
  // gain. Exact: such reports can never be part of a strict improvement.
  bool prune = true;
  // Beyond this many joint evaluations the search falls back to a coarse
  // sub-grid (plus threshold-adjacent reports) and stops being exhaustive.
  std::uint64_t max_evaluations = 2'000'000'000ULL;
  int coarse_stride = 10;
};

struct CoalitionSearchResult {
  std::optional<CoalitionWitness> witness;
  bool exhaustive = true;
  int stride = 1;
  std::uint64_t evaluations = 0;
};

// Searches every state and every joint report assignment of the members
// (non-members follow the profile) for a deviation that strictly benefits
// every member; returns the one maximising the smallest member gain, ties to
// the earliest state then the smallest reports. Singletons delegate to the
// individual best-response search on the path of play.
CoalitionSearchResult FindCoalitionDeviation(
    const GameInstance& game, const ProtocolSpec& protocol,
    const StrategyProfile& profile, const DecisionRule& rule,
    std::span<const PlayerId> coalition, const CoalitionSearchOptions& options = {});

// Bernheim-style test: no proper sub-coalition, holding the rest of the
// deviation fixed, has a mutually improving re-deviation that is itself
// self-enforcing. Fills witness.audit and witness.self_enforcing.
bool IsSelfEnforcing(const GameInstance& game, const ProtocolSpec& protocol,
                     const StrategyProfile& profile, const DecisionRule& rule,
                     CoalitionWitness& witness,
                     const CoalitionSearchOptions& options = {});

// Per-member gains recomputed from the witness' state and reports.
std::vector<double> ReplayCoalitionGains(const GameInstance& game,
                                         const ProtocolSpec& protocol,
                                         const StrategyProfile& profile,
                                         const DecisionRule& rule,
                                         const CoalitionWitness& witness);

struct CoalitionVerdict {
  bool holds = true;  // strong / coalition-proof
  std::optional<CoalitionWitness> refutation;
  bool exhaustive = true;
  std::vector<std::string> audit;
};

CoalitionVerdict CheckStrong(const GameInstance& game, const ProtocolSpec& protocol,
                             const StrategyProfile& profile, const DecisionRule& rule,
                             const CoalitionSearchOptions& options = {});

CoalitionVerdict CheckCoalitionProof(const GameInstance& game,
                                     const ProtocolSpec& protocol,
                                     const StrategyProfile& profile,
                                     const DecisionRule& rule,
                                     const CoalitionSearchOptions& options = {});

}  // namespace costtalk

#endif  // COSTTALK_COALITION_H_
