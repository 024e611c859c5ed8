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


#ifndef COSTTALK_SCENARIO_H_
#define COSTTALK_SCENARIO_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "costtalk/coalition.h"
#include "costtalk/game.h"
#include "costtalk/protocol.h"

namespace costtalk {

inline constexpr int kScenarioSchemaVersion = 1;

struct ProfileEntry {
  PlayerId sender = 1;
  double state = 0.0;
  std::vector<double> history;
  double report = 0.0;
};

struct ProfileSelector {
  // truthful | public_advocacy | skeptical | table
  std::string kind = "truthful";
  // For "table": cells overriding a truthful base.
  std::vector<ProfileEntry> entries;
  // Senders whose tables are then replaced by best responses, in order.
  std::vector<PlayerId> best_response;
};

struct RuleOverride {
  std::vector<double> reports;
  Action action = Action::kMinus;
};

struct RuleSelector {
  // public_advocacy | skeptical | agreement | majority | threshold | constant
  // | table
  std::string kind = "agreement";
  PlayerId sender = 1;                     // threshold
  double threshold = 0.0;                  // threshold
  Action fallback = Action::kMinus;        // agreement/majority/constant/table
  std::vector<RuleOverride> overrides;
};

struct ScenarioConfig {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  std::string description;
  GameDraft game;
  ProtocolSpec protocol;
  ProfileSelector profile;
  RuleSelector rule;
  // individual_rationality | bayes_onpath | efficiency | strong |
  // coalition_proof
  std::vector<std::string> checks;
  // Expected verdict per check, e.g. {"efficiency": "efficient"}.
  std::map<std::string, std::string> expect;
  double gain_tolerance = 1e-9;
  std::uint64_t max_evaluations = 2'000'000'000ULL;
  int coarse_stride = 10;
  std::string output_path;
  std::string output_format = "json";
};

// Parses and schema-checks a scenario; throws Error(kParseError) on malformed
// JSON and Error(kSchemaError) naming the offending field path.
ScenarioConfig ParseScenario(const nlohmann::json& j);
ScenarioConfig ParseScenarioText(const std::string& text);
// Parses, then validates the game (ValidationError on failure).
ScenarioConfig LoadScenario(const std::string& path);
nlohmann::json ToJson(const ScenarioConfig& config);

// Runtime objects built from a config.
struct Scenario {
  GameInstance game;
  ProtocolSpec protocol;
  StrategyProfile profile;
  DecisionRule rule;
};

Scenario Instantiate(const ScenarioConfig& config);

CoalitionSearchOptions SearchOptions(const ScenarioConfig& config);

// Applies --grid-step: both grids keep their bounds.
void OverrideGridStep(ScenarioConfig& config, double step);

// Directory holding the bundled fixtures: $COSTTALK_SCENARIO_DIR, else the
// source tree's scenarios/.
std::string DefaultScenarioDir();

}  // namespace costtalk

#endif  // COSTTALK_SCENARIO_H_
