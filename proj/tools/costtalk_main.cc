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


// costtalk: command-line front end.
//   costtalk run --scenario FILE [--checks ...] [--out PATH] [--format json|csv]
//   costtalk suite --prop NAME|all [--out PATH] [--format json|csv]
//   costtalk reach --scenario FILE [--out PATH]
// Exit status: 0 ok, 1 a check or proposition came out unexpectedly,
// 2 bad configuration.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "costtalk/reach.h"
#include "costtalk/report.h"
#include "costtalk/scenario.h"
#include "costtalk/suite.h"

namespace {

using namespace costtalk;

void Write(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error(ErrorCode::kIoError, "cannot write " + path);
}

void Emit(const ExperimentReport& report, const std::string& format,
          const std::string& path) {
  if (path.empty() || path == "-") {
    Write(format == "csv" ? ReportCsv(report) : ToJson(report).dump(2) + "\n", "");
  } else {
    EmitReport(report, format, path);
  }
}

void Summarize(const ExperimentReport& report) {
  for (const CheckResult& c : report.checks) {
    std::cerr << (c.ok ? "  ok    " : "  FAIL  ") << c.name << ": " << c.verdict;
    if (!c.detail.empty()) std::cerr << " (" << c.detail << ")";
    std::cerr << "\n";
  }
  for (const auto& [prop, verdict] : report.verdicts) {
    std::cerr << prop << ": " << verdict << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Costly-talk equilibrium checker"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, format = "json", prop = "all";
  std::string scenario_dir = DefaultScenarioDir();
  std::vector<std::string> checks;
  std::optional<double> grid_step, tolerance;

  CLI::App* run = app.add_subcommand("run", "Run checks on one scenario file");
  run->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  run->add_option("--checks", checks, "Checks to run (default: the scenario's list)");
  run->add_option("--out", out_path, "Output path (default: stdout)");
  run->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--grid-step", grid_step, "Override both grid steps");
  run->add_option("--tolerance", tolerance, "Gain tolerance");

  CLI::App* suite = app.add_subcommand("suite", "Reproduce the bundled propositions");
  std::vector<std::string> props = PropositionNames();
  props.push_back("all");
  suite->add_option("--prop", prop, "Proposition name or 'all'")
      ->check(CLI::IsMember(props));
  suite->add_option("--out", out_path, "Output path (default: stdout)");
  suite->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  suite->add_option("--scenario-dir", scenario_dir, "Fixture directory");
  suite->add_option("--grid-step", grid_step, "Override both grid steps");
  suite->add_option("--tolerance", tolerance, "Gain tolerance");

  CLI::App* reach = app.add_subcommand("reach", "Tabulate sender reach as CSV");
  reach->add_option("--scenario", scenario_path, "Scenario JSON")->required();
  reach->add_option("--out", out_path, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      ScenarioConfig config = LoadScenario(scenario_path);
      if (grid_step) OverrideGridStep(config, *grid_step);
      if (tolerance) config.gain_tolerance = *tolerance;
      if (out_path.empty() && !config.output_path.empty()) {
        out_path = config.output_path;
        format = config.output_format;
      }
      const ExperimentReport report = RunScenario(config, checks);
      Emit(report, format, out_path);
      Summarize(report);
      return report.all_ok() ? 0 : 1;
    }
    if (*suite) {
      const ExperimentReport report =
          RunPropositionSuite(prop, scenario_dir, {grid_step, tolerance});
      Emit(report, format, out_path);
      Summarize(report);
      return report.all_ok() ? 0 : 1;
    }
    if (*reach) {
      const ScenarioConfig config = LoadScenario(scenario_path);
      Write(ReachCsv(ValidateGame(config.game)), out_path);
      return 0;
    }
  } catch (const ValidationError& e) {
    for (const Violation& v : e.violations()) {
      std::cerr << "error: " << ToString(v.code) << ": " << v.message << "\n";
    }
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
