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


#ifndef COSTTALK_REPORT_H_
#define COSTTALK_REPORT_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "costtalk/coalition.h"
#include "costtalk/game.h"
#include "costtalk/verifier.h"

namespace costtalk {

inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;
// Embedded witnesses per check; the full count is kept in witness_count.
inline constexpr std::size_t kMaxEmbeddedWitnesses = 20;

// Witnesses in reports carry real values so they read without the grid.
struct WitnessRecord {
  std::string scenario;
  PlayerId sender = 0;
  double theta = 0.0;
  std::vector<double> history;
  double prescribed_report = 0.0;
  double deviating_report = 0.0;
  double prescribed_utility = 0.0;
  double deviation_utility = 0.0;
  double gain = 0.0;
};

struct AuditRecord {
  std::vector<PlayerId> sub_coalition;
  int depth = 1;
  std::size_t improving = 0;
  std::optional<std::vector<double>> blocking_reports;
};

struct CoalitionRecord {
  std::string scenario;
  std::vector<PlayerId> coalition;
  double theta = 0.0;
  std::vector<double> reports;
  std::string action;
  std::vector<double> gains;
  bool self_enforcing = false;
  std::vector<AuditRecord> audit;
};

struct CheckResult {
  std::string name;
  std::string scenario;
  std::string verdict;
  bool ok = true;  // verdict matches what the run expected
  std::string detail;
  std::size_t witness_count = 0;
  std::vector<WitnessRecord> witnesses;
  std::vector<CoalitionRecord> coalitions;
  std::vector<std::string> audit;
};

struct ExperimentReport {
  std::string kind;    // "suite" or "run"
  std::string target;  // proposition or scenario name
  std::string timestamp;
  std::map<std::string, double> timing;  // seconds per check
  std::map<std::string, nlohmann::json> scenarios;
  std::vector<CheckResult> checks;
  // Proposition -> REPRODUCED | NOT_REPRODUCED (suite runs only).
  std::map<std::string, std::string> verdicts;
  std::vector<std::string> limitations;

  bool all_ok() const;
};

WitnessRecord ToRecord(const GameInstance& game, const std::string& scenario,
                       const DeviationWitness& w);
CoalitionRecord ToRecord(const GameInstance& game, const std::string& scenario,
                         const CoalitionWitness& w);

nlohmann::json ToJson(const ExperimentReport& report);
ExperimentReport ReportFromJson(const nlohmann::json& j);
// The report without its timestamp and timing fields, serialised.
std::string CanonicalJson(const ExperimentReport& report);

// Writes JSON (the full report) or CSV (one row per verdict, witness, and
// coalition member). Throws Error(kIoError).
void EmitReport(const ExperimentReport& report, const std::string& format,
                const std::string& path);
std::string ReportCsv(const ExperimentReport& report);
std::string ReachCsv(const GameInstance& game);

struct ReplaySummary {
  std::size_t witnesses = 0;
  std::size_t replayed = 0;  // within tolerance
  double max_error = 0.0;
};

// Replays every embedded witness against its echoed scenario.
ReplaySummary ReplayWitnesses(const ExperimentReport& report,
                              double tolerance = 1e-12);

}  // namespace costtalk

#endif  // COSTTALK_REPORT_H_
