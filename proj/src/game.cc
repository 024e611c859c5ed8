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

#include "costtalk/game.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace costtalk {

namespace {

constexpr double kOnGridSlack = 1e-9;
constexpr double kPriorSumTolerance = 1e-12;

std::string Fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

// Integer multiple of `step` closest to x, if within slack.
std::optional<Tick> StepMultiple(double x, double step) {
  const double q = x / step;
  const double r = std::round(q);
  if (std::abs(q - r) > kOnGridSlack) return std::nullopt;
  return static_cast<Tick>(r);
}

void CheckGridSpec(const GridSpec& g, const std::string& name,
                   std::vector<Violation>& out) {
  if (!(g.step > 0.0) || !std::isfinite(g.step)) {
    out.push_back({ErrorCode::kBadGrid, name + ": step must be positive"});
    return;
  }
  if (!(g.min < g.max)) {
    out.push_back({ErrorCode::kBadGrid, name + ": min must be below max"});
    return;
  }
  if (!StepMultiple(g.min, g.step) || !StepMultiple(g.max, g.step)) {
    out.push_back({ErrorCode::kBadGrid,
                   name + ": bounds must be integer multiples of the step"});
  }
}

}  // namespace

std::string ToString(Action a) { return a == Action::kPlus ? "a+" : "a-"; }

Action ActionFromString(const std::string& s) {
  if (s == "a+" || s == "plus") return Action::kPlus;
  if (s == "a-" || s == "minus") return Action::kMinus;
  throw Error(ErrorCode::kSchemaError, "unknown action '" + s + "'");
}

std::string ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonMonotonePayoff: return "NonMonotonePayoff";
    case ErrorCode::kBadReceiverNormalization: return "BadReceiverNormalization";
    case ErrorCode::kZeroBiasSender: return "ZeroBiasSender";
    case ErrorCode::kNoConflictSender: return "NoConflictSender";
    case ErrorCode::kBadGrid: return "BadGrid";
    case ErrorCode::kBadPrior: return "BadPrior";
    case ErrorCode::kBadCost: return "BadCost";
    case ErrorCode::kOffGridState: return "OffGridState";
    case ErrorCode::kOffGridReport: return "OffGridReport";
    case ErrorCode::kUnknownPlayer: return "UnknownPlayer";
    case ErrorCode::kWrongBiasSide: return "WrongBiasSide";
    case ErrorCode::kUnsupportedCostFamily: return "UnsupportedCostFamily";
    case ErrorCode::kBracketFailure: return "BracketFailure";
    case ErrorCode::kIncompleteStrategy: return "IncompleteStrategy";
    case ErrorCode::kDegeneratePosterior: return "DegeneratePosterior";
    case ErrorCode::kGridMisalignment: return "GridMisalignment";
    case ErrorCode::kWrongBiasConfiguration: return "WrongBiasConfiguration";
    case ErrorCode::kWrongTiming: return "WrongTiming";
    case ErrorCode::kBadRoster: return "BadRoster";
    case ErrorCode::kCoalitionTooLarge: return "CoalitionTooLarge";
    case ErrorCode::kTableTooLarge: return "TableTooLarge";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kFixtureMissing: return "FixtureMissing";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

std::string ToString(BiasClass c) {
  switch (c) {
    case BiasClass::kAllLikeBiasedPositive: return "AllLikeBiasedPositive";
    case BiasClass::kAllLikeBiasedNegative: return "AllLikeBiasedNegative";
    case BiasClass::kContainsOpposedPair: return "ContainsOpposedPair";
  }
  return "Unknown";
}

namespace {

std::string JoinViolations(const std::vector<Violation>& v) {
  std::string s;
  for (const auto& x : v) {
    if (!s.empty()) s += "; ";
    s += ToString(x.code) + " (" + x.message + ")";
  }
  return s;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(violations.empty() ? ErrorCode::kBadGrid : violations.front().code,
            JoinViolations(violations)),
      violations_(std::move(violations)) {}

bool ValidationError::Has(ErrorCode code) const {
  return std::any_of(violations_.begin(), violations_.end(),
                     [code](const Violation& v) { return v.code == code; });
}

Grid::Grid(double step, Tick lo, Tick hi) : step_(step), lo_(lo), hi_(hi) {}

std::optional<Tick> Grid::find(double x) const {
  auto t = StepMultiple(x, step_);
  if (!t || !contains(*t)) return std::nullopt;
  return t;
}

std::vector<double> Grid::points() const {
  std::vector<double> out;
  out.reserve(size());
  for (Tick t = lo_; t <= hi_; ++t) out.push_back(value(t));
  return out;
}

double PowerCost::at(double distance) const {
  return scale * std::pow(std::abs(distance), exponent);
}

double PowerCost::inverse(double budget) const {
  if (budget <= 0.0) return 0.0;
  return std::pow(budget / scale, 1.0 / exponent);
}

std::vector<Violation> CheckGame(const GameDraft& d) {
  std::vector<Violation> out;
  CheckGridSpec(d.state_grid, "state_grid", out);
  CheckGridSpec(d.report_grid, "report_grid", out);
  if (!out.empty()) return out;

  const double step = d.state_grid.step;
  if (std::abs(d.report_grid.step - step) > kOnGridSlack * step) {
    out.push_back({ErrorCode::kBadGrid,
                   "report_grid step must equal state_grid step"});
    return out;
  }
  const Tick s_lo = *StepMultiple(d.state_grid.min, step);
  const Tick s_hi = *StepMultiple(d.state_grid.max, step);
  const Tick r_lo = *StepMultiple(d.report_grid.min, step);
  const Tick r_hi = *StepMultiple(d.report_grid.max, step);
  if (s_lo != -s_hi) {
    out.push_back({ErrorCode::kBadGrid, "state grid must be symmetric about 0"});
  }
  if (r_lo > s_lo || r_hi < s_hi) {
    out.push_back({ErrorCode::kBadGrid,
                   "report grid must cover the state grid range"});
  }
  if (!out.empty()) return out;
  const Grid states(step, s_lo, s_hi);

  if (!d.prior.empty()) {
    if (d.prior.size() != states.size()) {
      out.push_back({ErrorCode::kBadPrior,
                     "prior has " + std::to_string(d.prior.size()) +
                         " weights for " + std::to_string(states.size()) +
                         " states"});
    } else {
      double sum = 0.0;
      bool positive = true;
      for (double w : d.prior) {
        sum += w;
        if (!(w > 0.0)) positive = false;
      }
      if (!positive) {
        out.push_back({ErrorCode::kBadPrior, "prior weights must be positive"});
      }
      if (std::abs(sum - 1.0) > kPriorSumTolerance) {
        out.push_back({ErrorCode::kBadPrior,
                       "prior weights sum to " + Fmt(sum) + ", not 1"});
      }
    }
  }

  // Receiver.
  if (d.receiver.beta < 0.0) {
    out.push_back({ErrorCode::kNonMonotonePayoff,
                   "receiver du_beta must be >= 0"});
  }
  {
    bool ok = d.receiver.at(0.0) >= 0.0;
    for (Tick t = s_lo; t <= s_hi && ok; ++t) {
      const double v = d.receiver.at(states.value(t));
      if (t > 0 && !(v > 0.0)) ok = false;
      if (t < 0 && !(v < 0.0)) ok = false;
    }
    if (!ok) {
      out.push_back({ErrorCode::kBadReceiverNormalization,
                     "receiver du must be <0 below 0, >0 above 0, >=0 at 0"});
    }
  }

  std::set<PlayerId> seen;
  if (d.senders.empty()) {
    out.push_back({ErrorCode::kUnknownPlayer, "at least one sender required"});
  }
  for (const auto& s : d.senders) {
    const std::string who = "sender " + std::to_string(s.id);
    if (s.id < 1) {
      out.push_back({ErrorCode::kUnknownPlayer, who + ": ids start at 1"});
    }
    if (!seen.insert(s.id).second) {
      out.push_back({ErrorCode::kUnknownPlayer, who + ": duplicate id"});
    }
    if (s.payoff.beta < 0.0) {
      out.push_back({ErrorCode::kNonMonotonePayoff, who + ": du_beta must be >= 0"});
    }
    if (s.payoff.at(0.0) == 0.0) {
      out.push_back({ErrorCode::kZeroBiasSender, who + ": du(0) must be nonzero"});
    }
    bool conflict = false;
    for (Tick t = s_lo; t <= s_hi && !conflict; ++t) {
      const double v = s.payoff.at(states.value(t));
      if ((t < 0 && v > 0.0) || (t > 0 && v < 0.0)) conflict = true;
    }
    if (!conflict) {
      out.push_back({ErrorCode::kNoConflictSender,
                     who + ": preferences never conflict with the receiver"});
    }
    if (!(s.cost.scale > 0.0) || !(s.cost.exponent >= 1.0)) {
      out.push_back({ErrorCode::kBadCost, who + ": need scale > 0, exponent >= 1"});
      continue;
    }
    // Every reach value must lie inside the report grid.
    const double r_min = r_lo * step, r_max = r_hi * step;
    for (Tick t = s_lo; t <= s_hi; ++t) {
      const double theta = states.value(t);
      const double reach = s.cost.inverse(std::abs(s.payoff.at(theta)));
      const double far = s.payoff.at(0.0) > 0.0 ? theta + reach : theta - reach;
      if (far > r_max + kOnGridSlack || far < r_min - kOnGridSlack) {
        out.push_back({ErrorCode::kBadGrid,
                       who + ": reach " + Fmt(far) + " at state " + Fmt(theta) +
                           " falls outside the report grid"});
        break;
      }
    }
  }
  return out;
}

GameInstance ValidateGame(const GameDraft& d) {
  auto violations = CheckGame(d);
  if (!violations.empty()) throw ValidationError(std::move(violations));

  GameInstance g;
  g.draft_ = d;
  const double step = d.state_grid.step;
  g.states_ = Grid(step, *StepMultiple(d.state_grid.min, step),
                   *StepMultiple(d.state_grid.max, step));
  g.reports_ = Grid(step, *StepMultiple(d.report_grid.min, step),
                    *StepMultiple(d.report_grid.max, step));
  if (d.prior.empty()) {
    g.prior_.assign(g.states_.size(), 1.0 / static_cast<double>(g.states_.size()));
  } else {
    g.prior_ = d.prior;
  }
  g.receiver_ = d.receiver;
  g.senders_ = d.senders;
  const Tick max_distance = (g.reports_.hi() - g.states_.lo()) >
                                    (g.states_.hi() - g.reports_.lo())
                                ? g.reports_.hi() - g.states_.lo()
                                : g.states_.hi() - g.reports_.lo();
  for (const auto& s : g.senders_) {
    std::vector<double> table(static_cast<std::size_t>(max_distance) + 1);
    for (Tick k = 0; k <= max_distance; ++k) {
      table[static_cast<std::size_t>(k)] = s.cost.at(k * step);
    }
    g.cost_by_distance_.push_back(std::move(table));
  }
  return g;
}

bool GameInstance::has_sender(PlayerId id) const {
  return std::any_of(senders_.begin(), senders_.end(),
                     [id](const SenderSpec& s) { return s.id == id; });
}

const SenderSpec& GameInstance::sender(PlayerId id) const {
  for (const auto& s : senders_) {
    if (s.id == id) return s;
  }
  throw Error(ErrorCode::kUnknownPlayer, "no sender with id " + std::to_string(id));
}

double GameInstance::delta_u_at_tick(PlayerId player, Tick state) const {
  const double theta = states_.value(state);
  if (player == kReceiver) return receiver_.at(theta);
  return sender(player).payoff.at(theta);
}

double GameInstance::cost_at_ticks(PlayerId id, Tick report, Tick state) const {
  for (std::size_t i = 0; i < senders_.size(); ++i) {
    if (senders_[i].id == id) {
      const Tick d = report > state ? report - state : state - report;
      return cost_by_distance_[i][static_cast<std::size_t>(d)];
    }
  }
  throw Error(ErrorCode::kUnknownPlayer, "no sender with id " + std::to_string(id));
}

double GameInstance::sender_utility_at_ticks(PlayerId id, Tick report, Action a,
                                             Tick state) const {
  const double u = a == Action::kPlus ? delta_u_at_tick(id, state) : 0.0;
  return u - cost_at_ticks(id, report, state);
}

double GameInstance::receiver_utility_at_tick(Action a, Tick state) const {
  return a == Action::kPlus ? receiver_.at(states_.value(state)) : 0.0;
}

Tick GameInstance::state_tick(double theta) const {
  auto t = states_.find(theta);
  if (!t) throw Error(ErrorCode::kOffGridState, "state " + Fmt(theta) + " is off the grid");
  return *t;
}

Tick GameInstance::report_tick(double report) const {
  auto t = reports_.find(report);
  if (!t) {
    throw Error(ErrorCode::kOffGridReport, "report " + Fmt(report) + " is off the grid");
  }
  return *t;
}

double DeltaU(const GameInstance& game, PlayerId player, double theta) {
  const Tick t = game.state_tick(theta);
  if (player != kReceiver && !game.has_sender(player)) {
    throw Error(ErrorCode::kUnknownPlayer, "no player " + std::to_string(player));
  }
  return game.delta_u_at_tick(player, t);
}

double SenderTotalUtility(const GameInstance& game, PlayerId sender,
                          double report, Action a, double theta) {
  const Tick s = game.state_tick(theta);
  const Tick r = game.report_tick(report);
  return game.sender_utility_at_ticks(sender, r, a, s);
}

BiasClassification ClassifyBiases(const GameInstance& game,
                                  std::span<const PlayerId> roster) {
  if (roster.empty()) throw Error(ErrorCode::kBadRoster, "empty roster");
  BiasClassification out{BiasClass::kContainsOpposedPair, {}, {}};
  for (PlayerId id : roster) {
    if (game.sender(id).payoff.at(0.0) > 0.0) {
      out.positive.push_back(id);
    } else {
      out.negative.push_back(id);
    }
  }
  if (out.negative.empty()) out.kind = BiasClass::kAllLikeBiasedPositive;
  if (out.positive.empty()) out.kind = BiasClass::kAllLikeBiasedNegative;
  return out;
}

GameDraft CanonicalDraft() {
  GameDraft d;
  d.receiver = {0.0, 1.0};
  d.senders = {{1, {1.0, 0.0}, {1.0, 2.0}}, {2, {-1.0, 0.0}, {1.0, 2.0}}};
  return d;
}

}  // namespace costtalk
