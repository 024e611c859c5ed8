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


#ifndef COSTTALK_SUITE_H_
#define COSTTALK_SUITE_H_

#include <optional>
#include <string>
#include <vector>

#include "costtalk/report.h"
#include "costtalk/scenario.h"

namespace costtalk {

struct RunOptions {
  std::optional<double> grid_step;
  std::optional<double> gain_tolerance;
};

// prop1 prop2 prop3 prop4 corollary1 result1 result2, in suite order.
const std::vector<std::string>& PropositionNames();

// Runs the canned checks for one proposition (or "all") on the bundled
// fixtures in `scenario_dir`. Throws Error(kFixtureMissing) when a fixture
// file is absent and Error(kSchemaError) for an unknown name.
ExperimentReport RunPropositionSuite(const std::string& which,
                                     const std::string& scenario_dir,
                                     const RunOptions& options = {});

// Runs `checks` (or the config's own list when empty) on one scenario.
ExperimentReport RunScenario(const ScenarioConfig& config,
                             const std::vector<std::string>& checks = {});

// Fills report.timestamp with the current UTC time.
void StampReport(ExperimentReport& report);

}  // namespace costtalk

#endif  // COSTTALK_SUITE_H_
