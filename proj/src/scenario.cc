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


#include "costtalk/scenario.h"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "costtalk/verifier.h"

namespace costtalk {

namespace {

using nlohmann::json;

[[noreturn]] void SchemaFail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::kSchemaError, path + ": " + what);
}

// Rejects keys outside `allowed` and a non-object value.
void ExpectObject(const json& j, const std::string& path,
                  std::initializer_list<const char*> allowed) {
  if (!j.is_object()) SchemaFail(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) SchemaFail(path + "/" + key, "unknown field");
  }
}

const json& Required(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) SchemaFail(path + "/" + key, "missing required field");
  return j.at(key);
}

double Number(const json& j, const std::string& path) {
  if (!j.is_number()) SchemaFail(path, "expected a number");
  return j.get<double>();
}

int Integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) SchemaFail(path, "expected an integer");
  return j.get<int>();
}

std::string String(const json& j, const std::string& path) {
  if (!j.is_string()) SchemaFail(path, "expected a string");
  return j.get<std::string>();
}

const json& Array(const json& j, const std::string& path) {
  if (!j.is_array()) SchemaFail(path, "expected an array");
  return j;
}

Action ParseAction(const json& j, const std::string& path) {
  const std::string s = String(j, path);
  if (s != "a+" && s != "a-") SchemaFail(path, "action must be \"a+\" or \"a-\"");
  return ActionFromString(s);
}

GridSpec ParseGrid(const json& j, const std::string& path) {
  ExpectObject(j, path, {"min", "max", "step"});
  return {Number(Required(j, path, "min"), path + "/min"),
          Number(Required(j, path, "max"), path + "/max"),
          Number(Required(j, path, "step"), path + "/step")};
}

GameDraft ParseGame(const json& j, const std::string& path) {
  ExpectObject(j, path,
               {"state_grid", "report_grid", "prior", "receiver", "senders"});
  GameDraft d;
  if (j.contains("state_grid")) d.state_grid = ParseGrid(j["state_grid"], path + "/state_grid");
  if (j.contains("report_grid")) {
    d.report_grid = ParseGrid(j["report_grid"], path + "/report_grid");
  }
  if (j.contains("prior")) {
    const json& p = j["prior"];
    if (p.is_string()) {
      if (p.get<std::string>() != "uniform") {
        SchemaFail(path + "/prior", "expected \"uniform\" or a weight list");
      }
    } else {
      for (std::size_t i = 0; i < Array(p, path + "/prior").size(); ++i) {
        d.prior.push_back(Number(p[i], path + "/prior/" + std::to_string(i)));
      }
    }
  }
  const json& r = Required(j, path, "receiver");
  ExpectObject(r, path + "/receiver", {"du_alpha", "du_beta"});
  d.receiver.alpha = Number(Required(r, path + "/receiver", "du_alpha"),
                            path + "/receiver/du_alpha");
  d.receiver.beta = Number(Required(r, path + "/receiver", "du_beta"),
                           path + "/receiver/du_beta");
  const json& senders = Array(Required(j, path, "senders"), path + "/senders");
  std::set<PlayerId> ids;
  for (std::size_t i = 0; i < senders.size(); ++i) {
    const std::string sp = path + "/senders/" + std::to_string(i);
    const json& s = senders[i];
    ExpectObject(s, sp, {"id", "du_alpha", "du_beta", "cost_scale", "cost_exponent"});
    SenderSpec spec;
    spec.id = Integer(Required(s, sp, "id"), sp + "/id");
    if (!ids.insert(spec.id).second) SchemaFail(sp + "/id", "duplicate sender id");
    spec.payoff.alpha = Number(Required(s, sp, "du_alpha"), sp + "/du_alpha");
    spec.payoff.beta = Number(Required(s, sp, "du_beta"), sp + "/du_beta");
    if (s.contains("cost_scale")) spec.cost.scale = Number(s["cost_scale"], sp + "/cost_scale");
    if (s.contains("cost_exponent")) {
      spec.cost.exponent = Number(s["cost_exponent"], sp + "/cost_exponent");
    }
    d.senders.push_back(spec);
  }
  return d;
}

ProtocolSpec ParseProtocol(const json& j, const std::string& path) {
  ExpectObject(j, path, {"roster", "timing"});
  ProtocolSpec p;
  const json& roster = Array(Required(j, path, "roster"), path + "/roster");
  std::set<PlayerId> seen;
  for (std::size_t i = 0; i < roster.size(); ++i) {
    const PlayerId id = Integer(roster[i], path + "/roster/" + std::to_string(i));
    if (!seen.insert(id).second) {
      SchemaFail(path + "/roster/" + std::to_string(i), "duplicate sender id");
    }
    p.roster.push_back(id);
  }
  const std::string timing = String(Required(j, path, "timing"), path + "/timing");
  if (timing != "sequential" && timing != "simultaneous") {
    SchemaFail(path + "/timing", "expected \"sequential\" or \"simultaneous\"");
  }
  p.timing = TimingFromString(timing);
  return p;
}

std::vector<double> Numbers(const json& j, const std::string& path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < Array(j, path).size(); ++i) {
    out.push_back(Number(j[i], path + "/" + std::to_string(i)));
  }
  return out;
}

ProfileSelector ParseProfile(const json& j, const std::string& path) {
  ExpectObject(j, path, {"kind", "entries", "best_response"});
  ProfileSelector p;
  p.kind = String(Required(j, path, "kind"), path + "/kind");
  if (p.kind != "truthful" && p.kind != "public_advocacy" && p.kind != "skeptical" &&
      p.kind != "table") {
    SchemaFail(path + "/kind", "unknown profile kind '" + p.kind + "'");
  }
  if (j.contains("entries")) {
    const json& entries = Array(j["entries"], path + "/entries");
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const std::string ep = path + "/entries/" + std::to_string(i);
      ExpectObject(entries[i], ep, {"sender", "state", "history", "report"});
      ProfileEntry e;
      e.sender = Integer(Required(entries[i], ep, "sender"), ep + "/sender");
      e.state = Number(Required(entries[i], ep, "state"), ep + "/state");
      if (entries[i].contains("history")) {
        e.history = Numbers(entries[i]["history"], ep + "/history");
      }
      e.report = Number(Required(entries[i], ep, "report"), ep + "/report");
      p.entries.push_back(e);
    }
  }
  if (j.contains("best_response")) {
    const json& br = Array(j["best_response"], path + "/best_response");
    for (std::size_t i = 0; i < br.size(); ++i) {
      p.best_response.push_back(
          Integer(br[i], path + "/best_response/" + std::to_string(i)));
    }
  }
  return p;
}

RuleSelector ParseRule(const json& j, const std::string& path) {
  ExpectObject(j, path, {"kind", "sender", "threshold", "fallback", "overrides"});
  RuleSelector r;
  r.kind = String(Required(j, path, "kind"), path + "/kind");
  static const std::set<std::string> kinds = {
      "public_advocacy", "skeptical", "agreement", "majority",
      "threshold",       "constant",  "table"};
  if (!kinds.count(r.kind)) SchemaFail(path + "/kind", "unknown rule kind '" + r.kind + "'");
  if (j.contains("sender")) r.sender = Integer(j["sender"], path + "/sender");
  if (j.contains("threshold")) r.threshold = Number(j["threshold"], path + "/threshold");
  if (j.contains("fallback")) r.fallback = ParseAction(j["fallback"], path + "/fallback");
  if (j.contains("overrides")) {
    const json& o = Array(j["overrides"], path + "/overrides");
    for (std::size_t i = 0; i < o.size(); ++i) {
      const std::string op = path + "/overrides/" + std::to_string(i);
      ExpectObject(o[i], op, {"reports", "action"});
      r.overrides.push_back({Numbers(Required(o[i], op, "reports"), op + "/reports"),
                             ParseAction(Required(o[i], op, "action"), op + "/action")});
    }
  }
  return r;
}

json GridJson(const GridSpec& g) {
  return {{"min", g.min}, {"max", g.max}, {"step", g.step}};
}

}  // namespace

ScenarioConfig ParseScenario(const json& j) {
  ExpectObject(j, "", {"schema_version", "name", "description", "game", "protocol",
                       "profile", "rule", "checks", "expect", "tolerances", "search",
                       "output"});
  ScenarioConfig c;
  c.schema_version = Integer(Required(j, "", "schema_version"), "/schema_version");
  if (c.schema_version != kScenarioSchemaVersion) {
    SchemaFail("/schema_version",
               "unsupported version " + std::to_string(c.schema_version));
  }
  c.name = String(Required(j, "", "name"), "/name");
  if (j.contains("description")) c.description = String(j["description"], "/description");
  c.game = ParseGame(Required(j, "", "game"), "/game");
  c.protocol = ParseProtocol(Required(j, "", "protocol"), "/protocol");
  c.profile = ParseProfile(Required(j, "", "profile"), "/profile");
  c.rule = ParseRule(Required(j, "", "rule"), "/rule");
  if (j.contains("checks")) {
    static const std::set<std::string> known = {"individual_rationality", "bayes_onpath",
                                                "efficiency", "strong",
                                                "coalition_proof"};
    const json& checks = Array(j["checks"], "/checks");
    for (std::size_t i = 0; i < checks.size(); ++i) {
      const std::string name = String(checks[i], "/checks/" + std::to_string(i));
      if (!known.count(name)) {
        SchemaFail("/checks/" + std::to_string(i), "unknown check '" + name + "'");
      }
      c.checks.push_back(name);
    }
  }
  if (j.contains("expect")) {
    if (!j["expect"].is_object()) SchemaFail("/expect", "expected an object");
    for (const auto& [key, value] : j["expect"].items()) {
      c.expect[key] = String(value, "/expect/" + key);
    }
  }
  if (j.contains("tolerances")) {
    ExpectObject(j["tolerances"], "/tolerances", {"gain"});
    if (j["tolerances"].contains("gain")) {
      c.gain_tolerance = Number(j["tolerances"]["gain"], "/tolerances/gain");
    }
  }
  if (j.contains("search")) {
    ExpectObject(j["search"], "/search", {"max_evaluations", "coarse_stride"});
    if (j["search"].contains("max_evaluations")) {
      const json& m = j["search"]["max_evaluations"];
      if (!m.is_number_unsigned()) SchemaFail("/search/max_evaluations", "expected a count");
      c.max_evaluations = m.get<std::uint64_t>();
    }
    if (j["search"].contains("coarse_stride")) {
      c.coarse_stride = Integer(j["search"]["coarse_stride"], "/search/coarse_stride");
      if (c.coarse_stride < 1) SchemaFail("/search/coarse_stride", "must be >= 1");
    }
  }
  if (j.contains("output")) {
    ExpectObject(j["output"], "/output", {"path", "format"});
    if (j["output"].contains("path")) c.output_path = String(j["output"]["path"], "/output/path");
    if (j["output"].contains("format")) {
      c.output_format = String(j["output"]["format"], "/output/format");
      if (c.output_format != "json" && c.output_format != "csv") {
        SchemaFail("/output/format", "expected \"json\" or \"csv\"");
      }
    }
  }
  return c;
}

ScenarioConfig ParseScenarioText(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  return ParseScenario(j);
}

ScenarioConfig LoadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  ScenarioConfig c = ParseScenarioText(buffer.str());
  ValidateGame(c.game);
  return c;
}

json ToJson(const ScenarioConfig& c) {
  json senders = json::array();
  for (const auto& s : c.game.senders) {
    senders.push_back({{"id", s.id},
                       {"du_alpha", s.payoff.alpha},
                       {"du_beta", s.payoff.beta},
                       {"cost_scale", s.cost.scale},
                       {"cost_exponent", s.cost.exponent}});
  }
  json game = {{"state_grid", GridJson(c.game.state_grid)},
               {"report_grid", GridJson(c.game.report_grid)},
               {"receiver", {{"du_alpha", c.game.receiver.alpha},
                             {"du_beta", c.game.receiver.beta}}},
               {"senders", senders}};
  game["prior"] = c.game.prior.empty() ? json("uniform") : json(c.game.prior);

  json profile = {{"kind", c.profile.kind}};
  if (!c.profile.entries.empty()) {
    json entries = json::array();
    for (const auto& e : c.profile.entries) {
      entries.push_back({{"sender", e.sender},
                         {"state", e.state},
                         {"history", e.history},
                         {"report", e.report}});
    }
    profile["entries"] = entries;
  }
  if (!c.profile.best_response.empty()) profile["best_response"] = c.profile.best_response;

  json rule = {{"kind", c.rule.kind}};
  if (c.rule.kind == "threshold") {
    rule["sender"] = c.rule.sender;
    rule["threshold"] = c.rule.threshold;
  }
  if (c.rule.kind == "agreement" || c.rule.kind == "majority" ||
      c.rule.kind == "constant" || c.rule.kind == "table") {
    rule["fallback"] = ToString(c.rule.fallback);
  }
  if (!c.rule.overrides.empty()) {
    json overrides = json::array();
    for (const auto& o : c.rule.overrides) {
      overrides.push_back({{"reports", o.reports}, {"action", ToString(o.action)}});
    }
    rule["overrides"] = overrides;
  }

  json j = {{"schema_version", c.schema_version},
            {"name", c.name},
            {"game", game},
            {"protocol", {{"roster", c.protocol.roster},
                          {"timing", ToString(c.protocol.timing)}}},
            {"profile", profile},
            {"rule", rule},
            {"tolerances", {{"gain", c.gain_tolerance}}},
            {"search", {{"max_evaluations", c.max_evaluations},
                        {"coarse_stride", c.coarse_stride}}}};
  if (!c.description.empty()) j["description"] = c.description;
  if (!c.checks.empty()) j["checks"] = c.checks;
  if (!c.expect.empty()) j["expect"] = c.expect;
  if (!c.output_path.empty()) {
    j["output"] = {{"path", c.output_path}, {"format", c.output_format}};
  }
  return j;
}

Scenario Instantiate(const ScenarioConfig& c) {
  GameInstance game = ValidateGame(c.game);
  ValidateProtocol(game, c.protocol);
  const ProtocolSpec& protocol = c.protocol;

  StrategyProfile profile = [&] {
    if (c.profile.kind == "public_advocacy") {
      return BuildPublicAdvocacyEquilibrium(game, protocol).profile;
    }
    if (c.profile.kind == "skeptical") {
      return BuildSkepticalSimultaneousEquilibrium(game, protocol).profile;
    }
    return BuildTruthfulProfile(game, protocol);
  }();
  for (const auto& e : c.profile.entries) {
    const std::size_t pos = protocol.position_of(e.sender);
    std::vector<Tick> prefix;
    for (double h : e.history) prefix.push_back(game.report_tick(h));
    if (protocol.timing == Timing::kSequential && prefix.size() != pos) {
      throw Error(ErrorCode::kSchemaError,
                  "/profile/entries: history length must equal the sender's position");
    }
    profile.set_report(pos, profile.history_index(pos, prefix), game.state_tick(e.state),
                       game.report_tick(e.report));
  }

  const double step = game.reports().step();
  DecisionRule rule = [&]() -> DecisionRule {
    const std::string& k = c.rule.kind;
    if (k == "public_advocacy") return BuildPublicAdvocacyEquilibrium(game, protocol).rule;
    if (k == "skeptical") return BuildSkepticalSimultaneousEquilibrium(game, protocol).rule;
    if (k == "agreement") return {"agreement", AgreementRule{c.rule.fallback}, step};
    if (k == "majority") return {"majority", MajorityRule{c.rule.fallback}, step};
    if (k == "threshold") {
      return {"threshold", ThresholdRule{protocol.position_of(c.rule.sender), c.rule.threshold},
              step};
    }
    return {k, ConstantRule{c.rule.fallback}, step};
  }();
  for (const auto& o : c.rule.overrides) {
    if (o.reports.size() != protocol.size()) {
      throw Error(ErrorCode::kSchemaError,
                  "/rule/overrides: report profile length must equal the roster size");
    }
    std::vector<Tick> ticks;
    for (double r : o.reports) ticks.push_back(game.report_tick(r));
    rule.set_override(std::move(ticks), o.action);
  }

  for (PlayerId id : c.profile.best_response) {
    profile = BestResponseProfile(game, protocol, profile, rule, id);
  }
  return {std::move(game), protocol, std::move(profile), std::move(rule)};
}

CoalitionSearchOptions SearchOptions(const ScenarioConfig& c) {
  CoalitionSearchOptions o;
  o.gain_tolerance = c.gain_tolerance;
  o.max_evaluations = c.max_evaluations;
  o.coarse_stride = c.coarse_stride;
  return o;
}

void OverrideGridStep(ScenarioConfig& c, double step) {
  c.game.state_grid.step = step;
  c.game.report_grid.step = step;
}

std::string DefaultScenarioDir() {
  if (const char* env = std::getenv("COSTTALK_SCENARIO_DIR")) return env;
#ifdef COSTTALK_SCENARIO_DIR
  return COSTTALK_SCENARIO_DIR;
#else
  return "scenarios";
#endif
}

}  // namespace costtalk
