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


#include "costtalk/report.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "costtalk/reach.h"
#include "costtalk/scenario.h"

namespace costtalk {

namespace {

using nlohmann::json;

std::vector<double> Values(const Grid& grid, const std::vector<Tick>& ticks) {
  std::vector<double> out;
  for (Tick t : ticks) out.push_back(grid.value(t));
  return out;
}

json ToJson(const WitnessRecord& w) {
  return {{"scenario", w.scenario},
          {"sender", w.sender},
          {"theta", w.theta},
          {"history", w.history},
          {"prescribed_report", w.prescribed_report},
          {"deviating_report", w.deviating_report},
          {"prescribed_utility", w.prescribed_utility},
          {"deviation_utility", w.deviation_utility},
          {"gain", w.gain}};
}

WitnessRecord WitnessFromJson(const json& j) {
  WitnessRecord w;
  w.scenario = j.at("scenario").get<std::string>();
  w.sender = j.at("sender").get<PlayerId>();
  w.theta = j.at("theta").get<double>();
  w.history = j.at("history").get<std::vector<double>>();
  w.prescribed_report = j.at("prescribed_report").get<double>();
  w.deviating_report = j.at("deviating_report").get<double>();
  w.prescribed_utility = j.at("prescribed_utility").get<double>();
  w.deviation_utility = j.at("deviation_utility").get<double>();
  w.gain = j.at("gain").get<double>();
  return w;
}

json ToJson(const CoalitionRecord& c) {
  json audit = json::array();
  for (const auto& a : c.audit) {
    audit.push_back({{"sub_coalition", a.sub_coalition},
                     {"depth", a.depth},
                     {"improving", a.improving},
                     {"blocking_reports",
                      a.blocking_reports ? json(*a.blocking_reports) : json(nullptr)}});
  }
  return {{"scenario", c.scenario},     {"coalition", c.coalition},
          {"theta", c.theta},           {"reports", c.reports},
          {"action", c.action},         {"gains", c.gains},
          {"self_enforcing", c.self_enforcing}, {"audit", audit}};
}

CoalitionRecord CoalitionFromJson(const json& j) {
  CoalitionRecord c;
  c.scenario = j.at("scenario").get<std::string>();
  c.coalition = j.at("coalition").get<std::vector<PlayerId>>();
  c.theta = j.at("theta").get<double>();
  c.reports = j.at("reports").get<std::vector<double>>();
  c.action = j.at("action").get<std::string>();
  c.gains = j.at("gains").get<std::vector<double>>();
  c.self_enforcing = j.at("self_enforcing").get<bool>();
  for (const auto& a : j.at("audit")) {
    AuditRecord r;
    r.sub_coalition = a.at("sub_coalition").get<std::vector<PlayerId>>();
    r.depth = a.at("depth").get<int>();
    r.improving = a.at("improving").get<std::size_t>();
    if (!a.at("blocking_reports").is_null()) {
      r.blocking_reports = a.at("blocking_reports").get<std::vector<double>>();
    }
    c.audit.push_back(r);
  }
  return c;
}

// Shortest text that parses back to the same double.
std::string CsvNumber(double x) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

}  // namespace

bool ExperimentReport::all_ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.ok; });
}

WitnessRecord ToRecord(const GameInstance& game, const std::string& scenario,
                       const DeviationWitness& w) {
  const Grid& r = game.reports();
  return {scenario,
          w.sender,
          game.states().value(w.state),
          Values(r, w.history),
          r.value(w.prescribed_report),
          r.value(w.deviating_report),
          w.prescribed_utility,
          w.deviation_utility,
          w.gain};
}

CoalitionRecord ToRecord(const GameInstance& game, const std::string& scenario,
                         const CoalitionWitness& w) {
  CoalitionRecord c;
  c.scenario = scenario;
  c.coalition = w.coalition;
  c.theta = game.states().value(w.state);
  c.reports = Values(game.reports(), w.reports);
  c.action = ToString(w.action);
  c.gains = w.gains;
  c.self_enforcing = w.self_enforcing;
  for (const auto& a : w.audit) {
    AuditRecord r{a.sub_coalition, a.depth, a.improving, std::nullopt};
    if (a.blocking_reports) r.blocking_reports = Values(game.reports(), *a.blocking_reports);
    c.audit.push_back(r);
  }
  return c;
}

json ToJson(const ExperimentReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    json witnesses = json::array();
    for (const auto& w : c.witnesses) witnesses.push_back(ToJson(w));
    json coalitions = json::array();
    for (const auto& w : c.coalitions) coalitions.push_back(ToJson(w));
    checks.push_back({{"name", c.name},
                      {"scenario", c.scenario},
                      {"verdict", c.verdict},
                      {"ok", c.ok},
                      {"detail", c.detail},
                      {"witness_count", c.witness_count},
                      {"witnesses", witnesses},
                      {"coalitions", coalitions},
                      {"audit", c.audit}});
  }
  json scenarios = json::object();
  for (const auto& [name, s] : report.scenarios) scenarios[name] = s;
  return {{"artifact_version", kArtifactVersion},
          {"schema_version", kReportSchemaVersion},
          {"kind", report.kind},
          {"target", report.target},
          {"timestamp", report.timestamp},
          {"timing", report.timing},
          {"scenarios", scenarios},
          {"checks", checks},
          {"verdicts", report.verdicts},
          {"limitations", report.limitations}};
}

ExperimentReport ReportFromJson(const json& j) {
  ExperimentReport r;
  r.kind = j.at("kind").get<std::string>();
  r.target = j.at("target").get<std::string>();
  r.timestamp = j.at("timestamp").get<std::string>();
  r.timing = j.at("timing").get<std::map<std::string, double>>();
  for (const auto& [name, s] : j.at("scenarios").items()) r.scenarios[name] = s;
  for (const auto& c : j.at("checks")) {
    CheckResult cr;
    cr.name = c.at("name").get<std::string>();
    cr.scenario = c.at("scenario").get<std::string>();
    cr.verdict = c.at("verdict").get<std::string>();
    cr.ok = c.at("ok").get<bool>();
    cr.detail = c.at("detail").get<std::string>();
    cr.witness_count = c.at("witness_count").get<std::size_t>();
    for (const auto& w : c.at("witnesses")) cr.witnesses.push_back(WitnessFromJson(w));
    for (const auto& w : c.at("coalitions")) cr.coalitions.push_back(CoalitionFromJson(w));
    cr.audit = c.at("audit").get<std::vector<std::string>>();
    r.checks.push_back(std::move(cr));
  }
  r.verdicts = j.at("verdicts").get<std::map<std::string, std::string>>();
  r.limitations = j.at("limitations").get<std::vector<std::string>>();
  return r;
}

std::string CanonicalJson(const ExperimentReport& report) {
  json j = ToJson(report);
  j.erase("timestamp");
  j.erase("timing");
  return j.dump();
}

std::string ReportCsv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "record,check,scenario,verdict,sender,theta,deviating_report,gain\n";
  for (const auto& c : report.checks) {
    os << "verdict," << c.name << "," << c.scenario << "," << c.verdict << ",,,,\n";
  }
  for (const auto& c : report.checks) {
    for (const auto& w : c.witnesses) {
      os << "witness," << c.name << "," << w.scenario << ",," << w.sender << ","
         << CsvNumber(w.theta) << "," << CsvNumber(w.deviating_report) << ","
         << CsvNumber(w.gain) << "\n";
    }
    for (const auto& w : c.coalitions) {
      for (std::size_t m = 0; m < w.coalition.size(); ++m) {
        os << "coalition," << c.name << "," << w.scenario << ","
           << (w.self_enforcing ? "self_enforcing" : "not_self_enforcing") << ","
           << w.coalition[m] << "," << CsvNumber(w.theta) << ","
           << CsvNumber(w.reports[m]) << "," << CsvNumber(w.gains[m]) << "\n";
      }
    }
  }
  return os.str();
}

std::string ReachCsv(const GameInstance& game) {
  std::ostringstream os;
  os << "sender,theta,reach_upper,reach_lower\n";
  for (const auto& row : BuildReachTable(game)) {
    os << row.sender << "," << CsvNumber(row.theta) << ","
       << (row.upper ? CsvNumber(*row.upper) : "") << ","
       << (row.lower ? CsvNumber(*row.lower) : "") << "\n";
  }
  return os.str();
}

void EmitReport(const ExperimentReport& report, const std::string& format,
                const std::string& path) {
  std::string text;
  if (format == "json") {
    text = ToJson(report).dump(2) + "\n";
  } else if (format == "csv") {
    text = ReportCsv(report);
  } else {
    throw Error(ErrorCode::kSchemaError, "unknown report format '" + format + "'");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path);
}

ReplaySummary ReplayWitnesses(const ExperimentReport& report, double tolerance) {
  ReplaySummary summary;
  std::map<std::string, Scenario> cache;
  auto scenario = [&](const std::string& name) -> const Scenario& {
    auto it = cache.find(name);
    if (it == cache.end()) {
      auto echo = report.scenarios.find(name);
      if (echo == report.scenarios.end()) {
        throw Error(ErrorCode::kFixtureMissing, "no scenario echo for " + name);
      }
      it = cache.emplace(name, Instantiate(ParseScenario(echo->second))).first;
    }
    return it->second;
  };
  auto record = [&](double claimed, double replayed) {
    ++summary.witnesses;
    const double err = std::abs(claimed - replayed);
    summary.max_error = std::max(summary.max_error, err);
    if (err <= tolerance) ++summary.replayed;
  };
  for (const auto& c : report.checks) {
    for (const auto& w : c.witnesses) {
      const Scenario& s = scenario(w.scenario);
      std::vector<Tick> history;
      for (double h : w.history) history.push_back(s.game.report_tick(h));
      const DeviationWitness replay = EvaluateDeviation(
          s.game, s.protocol, s.profile, s.rule, w.sender, s.game.state_tick(w.theta),
          history, s.game.report_tick(w.deviating_report));
      record(w.gain, replay.gain);
    }
    for (const auto& w : c.coalitions) {
      const Scenario& s = scenario(w.scenario);
      CoalitionWitness cw;
      cw.coalition = w.coalition;
      cw.state = s.game.state_tick(w.theta);
      for (double r : w.reports) cw.reports.push_back(s.game.report_tick(r));
      const std::vector<double> gains =
          ReplayCoalitionGains(s.game, s.protocol, s.profile, s.rule, cw);
      double err = 0.0;
      for (std::size_t m = 0; m < gains.size(); ++m) {
        err = std::max(err, std::abs(gains[m] - w.gains.at(m)));
      }
      record(0.0, err);
    }
  }
  return summary;
}

}  // namespace costtalk
