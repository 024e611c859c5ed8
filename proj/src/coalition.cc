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


#include "costtalk/coalition.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <mutex>
#include <set>

#include "costtalk/parallel.h"
#include "costtalk/reach.h"

namespace costtalk {

namespace {

constexpr double kSelectionTolerance = 1e-12;

struct Context {
  const GameInstance& game;
  const ProtocolSpec& protocol;
  const StrategyProfile& profile;
  const DecisionRule& rule;
  const CoalitionSearchOptions& options;
};

using Fixed = std::vector<std::optional<Tick>>;

// Reports worth trying in `state` for a member whose current utility is
// `baseline`; empty when no report can strictly improve on it. Without
// pruning every grid report is tried.
std::vector<Tick> MemberCandidates(const Context& ctx, std::size_t position,
                                   Tick state, double baseline, int stride,
                                   const std::set<Tick>& special) {
  const PlayerId id = ctx.protocol.roster[position];
  const double best_payoff = std::max(0.0, ctx.game.delta_u_at_tick(id, state));
  const double budget = best_payoff - baseline;
  std::vector<Tick> out;
  if (ctx.options.prune && !(budget > ctx.options.gain_tolerance)) return out;
  const Grid& grid = ctx.game.reports();
  for (Tick r = grid.lo(); r <= grid.hi(); ++r) {
    if (ctx.options.prune && !(ctx.game.cost_at_ticks(id, r, state) < budget)) {
      continue;
    }
    if (stride > 1 && (r - grid.lo()) % stride != 0 && !special.count(r)) continue;
    out.push_back(r);
  }
  return out;
}

// Grid reports next to the values where rules and reach switch behaviour.
std::set<Tick> SpecialReports(const Context& ctx, Tick state) {
  std::set<Tick> out;
  const double step = ctx.game.reports().step();
  auto add_near = [&](double x) {
    const Tick t = static_cast<Tick>(std::floor(x / step));
    for (Tick d = -1; d <= 2; ++d) out.insert(t + d);
  };
  add_near(0.0);
  add_near(ctx.game.states().value(state));
  for (PlayerId id : ctx.protocol.roster) {
    add_near(Reach(ctx.game, id, 0.0));
    add_near(Reach(ctx.game, id, ctx.game.states().value(state)));
  }
  if (const auto* t = std::get_if<ThresholdRule>(&ctx.rule.base())) add_near(t->threshold);
  if (const auto* b = std::get_if<BurdenOfProofRule>(&ctx.rule.base())) {
    add_near(b->threshold);
  }
  for (const auto& [key, action] : ctx.rule.overrides()) {
    for (Tick t : key) out.insert(t);
  }
  return out;
}

struct Evaluation {
  std::vector<Tick> profile;
  Action action;
  std::vector<double> utilities;  // per member
};

void Evaluate(const Context& ctx, Tick state, std::span<const std::size_t> members,
              const Fixed& fixed, Evaluation& e) {
  CompleteReports(ctx.profile, state, {}, fixed, e.profile);
  e.action = ctx.rule(e.profile);
  e.utilities.resize(members.size());
  for (std::size_t m = 0; m < members.size(); ++m) {
    const std::size_t pos = members[m];
    e.utilities[m] = ctx.game.sender_utility_at_ticks(
        ctx.protocol.roster[pos], e.profile[pos], e.action, state);
  }
}

using ImprovingCallback =
    std::function<bool(std::span<const Tick> reports, const Evaluation& e)>;

// Enumerates joint reports of `members` (others as in `fixed`, or the
// profile) that strictly improve every member on `baseline`. Returns false if
// the callback stopped the enumeration.
bool ForEachImproving(const Context& ctx, Tick state,
                      std::span<const std::size_t> members, Fixed fixed,
                      std::span<const double> baseline,
                      const std::vector<std::vector<Tick>>& candidates,
                      const ImprovingCallback& callback,
                      std::uint64_t& evaluations) {
  for (const auto& c : candidates) {
    if (c.empty()) return true;
  }
  std::vector<std::size_t> odometer(members.size(), 0);
  std::vector<Tick> reports(members.size());
  Evaluation e;
  while (true) {
    for (std::size_t m = 0; m < members.size(); ++m) {
      reports[m] = candidates[m][odometer[m]];
      fixed[members[m]] = reports[m];
    }
    Evaluate(ctx, state, members, fixed, e);
    ++evaluations;
    bool all = true;
    for (std::size_t m = 0; m < members.size() && all; ++m) {
      all = e.utilities[m] - baseline[m] > ctx.options.gain_tolerance;
    }
    if (all && !callback(reports, e)) return false;
    // Last member varies fastest so enumeration is lexicographic.
    std::size_t m = members.size();
    while (m > 0) {
      --m;
      if (++odometer[m] < candidates[m].size()) break;
      odometer[m] = 0;
      if (m == 0) return true;
    }
  }
}

std::vector<std::size_t> Positions(const ProtocolSpec& protocol,
                                   std::span<const PlayerId> coalition) {
  if (coalition.empty()) throw Error(ErrorCode::kBadRoster, "empty coalition");
  if (coalition.size() > kMaxCoalitionSize) {
    throw Error(ErrorCode::kCoalitionTooLarge,
                "coalitions are limited to " + std::to_string(kMaxCoalitionSize) +
                    " members");
  }
  std::vector<std::size_t> out;
  for (PlayerId id : coalition) out.push_back(protocol.position_of(id));
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw Error(ErrorCode::kBadRoster, "duplicate coalition member");
  }
  return out;
}

std::vector<Tick> StatesToSearch(const Context& ctx) {
  std::vector<Tick> out;
  const Grid& states = ctx.game.states();
  if (ctx.options.state) {
    if (!states.contains(*ctx.options.state)) {
      throw Error(ErrorCode::kOffGridState, "search state is off the grid");
    }
    out.push_back(*ctx.options.state);
    return out;
  }
  for (Tick s = states.lo(); s <= states.hi(); ++s) out.push_back(s);
  return out;
}

CoalitionWitness MakeWitness(const Context& ctx, std::span<const std::size_t> members,
                             Tick state, std::span<const Tick> reports,
                             const Evaluation& e, std::span<const double> baseline) {
  CoalitionWitness w;
  for (std::size_t pos : members) w.coalition.push_back(ctx.protocol.roster[pos]);
  w.state = state;
  w.reports.assign(reports.begin(), reports.end());
  w.profile = e.profile;
  w.action = e.action;
  w.baseline_utilities.assign(baseline.begin(), baseline.end());
  w.deviation_utilities = e.utilities;
  for (std::size_t m = 0; m < members.size(); ++m) {
    w.gains.push_back(e.utilities[m] - baseline[m]);
  }
  return w;
}

struct StatePlan {
  Tick state;
  std::vector<double> baseline;
  std::vector<std::vector<Tick>> candidates;
};

// Baselines and candidate lists for every searched state; switches to the
// coarse sub-grid when the exhaustive space is over budget.
std::vector<StatePlan> PlanSearch(const Context& ctx,
                                  std::span<const std::size_t> members,
                                  CoalitionSearchResult& result) {
  std::vector<StatePlan> plans;
  std::uint64_t total = 0;
  Evaluation e;
  for (Tick s : StatesToSearch(ctx)) {
    StatePlan plan{s, {}, {}};
    Evaluate(ctx, s, members, Fixed(ctx.protocol.size()), e);
    plan.baseline = e.utilities;
    std::uint64_t product = 1;
    for (std::size_t m = 0; m < members.size(); ++m) {
      plan.candidates.push_back(
          MemberCandidates(ctx, members[m], s, plan.baseline[m], 1, {}));
      product *= plan.candidates.back().size();
    }
    total += product;
    plans.push_back(std::move(plan));
  }
  result.exhaustive = true;
  result.stride = 1;
  if (total > ctx.options.max_evaluations) {
    result.exhaustive = false;
    result.stride = ctx.options.coarse_stride;
    for (auto& plan : plans) {
      const std::set<Tick> special = SpecialReports(ctx, plan.state);
      for (std::size_t m = 0; m < members.size(); ++m) {
        plan.candidates[m] = MemberCandidates(ctx, members[m], plan.state,
                                              plan.baseline[m], result.stride, special);
      }
    }
  }
  return plans;
}

bool SelfEnforcingAt(const Context& ctx, Tick state,
                     std::span<const std::size_t> members, const Fixed& fixed,
                     int depth, std::vector<AuditEntry>& audit) {
  Evaluation current;
  Evaluate(ctx, state, members, fixed, current);
  const std::size_t n = members.size();
  // Proper non-empty subsets, smaller first, then by bitmask.
  std::vector<unsigned> masks;
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) masks.push_back(mask);
  std::stable_sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) {
    return std::popcount(a) < std::popcount(b);
  });
  for (unsigned mask : masks) {
    std::vector<std::size_t> sub;
    std::vector<double> baseline;
    for (std::size_t m = 0; m < n; ++m) {
      if (mask & (1u << m)) {
        sub.push_back(members[m]);
        baseline.push_back(current.utilities[m]);
      }
    }
    AuditEntry entry;
    for (std::size_t pos : sub) entry.sub_coalition.push_back(ctx.protocol.roster[pos]);
    entry.depth = depth;

    std::vector<std::vector<Tick>> candidates;
    std::uint64_t product = 1;
    for (std::size_t m = 0; m < sub.size(); ++m) {
      candidates.push_back(MemberCandidates(ctx, sub[m], state, baseline[m], 1, {}));
      product *= candidates.back().size();
    }
    if (product > ctx.options.max_evaluations) {
      const std::set<Tick> special = SpecialReports(ctx, state);
      for (std::size_t m = 0; m < sub.size(); ++m) {
        candidates[m] = MemberCandidates(ctx, sub[m], state, baseline[m],
                                         ctx.options.coarse_stride, special);
      }
    }
    std::uint64_t evaluations = 0;
    std::vector<AuditEntry> nested;
    ForEachImproving(
        ctx, state, sub, fixed, baseline, candidates,
        [&](std::span<const Tick> reports, const Evaluation&) {
          ++entry.improving;
          if (sub.size() == 1) {
            entry.blocking_reports = std::vector<Tick>(reports.begin(), reports.end());
            return false;
          }
          Fixed next = fixed;
          for (std::size_t m = 0; m < sub.size(); ++m) next[sub[m]] = reports[m];
          if (SelfEnforcingAt(ctx, state, sub, next, depth + 1, nested)) {
            entry.blocking_reports = std::vector<Tick>(reports.begin(), reports.end());
            return false;
          }
          return true;
        },
        evaluations);
    const bool blocked = entry.blocking_reports.has_value();
    audit.push_back(std::move(entry));
    for (auto& e : nested) audit.push_back(std::move(e));
    if (blocked) return false;
  }
  return true;
}

std::vector<std::vector<PlayerId>> CoalitionsOfSize(const ProtocolSpec& protocol,
                                                    std::size_t size) {
  std::vector<std::vector<PlayerId>> out;
  const std::size_t n = protocol.size();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != size) continue;
    std::vector<PlayerId> c;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) c.push_back(protocol.roster[i]);
    }
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
    std::vector<std::size_t> pa, pb;
    for (PlayerId id : a) pa.push_back(protocol.position_of(id));
    for (PlayerId id : b) pb.push_back(protocol.position_of(id));
    return pa < pb;
  });
  return out;
}

std::string Describe(std::span<const PlayerId> coalition) {
  std::string s = "{";
  for (std::size_t i = 0; i < coalition.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(coalition[i]);
  }
  return s + "}";
}

std::string ReceiverNote(const Context& ctx) {
  return CheckEfficiency(ctx.game, ctx.protocol, ctx.profile, ctx.rule).efficient
             ? "receiver coalitions vacuous: the equilibrium is efficient, so the "
               "receiver already attains its maximum"
             : "receiver-inclusive coalitions not examined: the equilibrium is not "
               "efficient";
}

CoalitionSearchResult FindSingleton(const Context& ctx, std::size_t position) {
  CoalitionSearchResult result;
  const PlayerId id = ctx.protocol.roster[position];
  std::optional<CoalitionWitness> best;
  std::vector<Tick> reports;
  for (Tick s : StatesToSearch(ctx)) {
    CompleteReports(ctx.profile, s, {}, {}, reports);
    const std::span<const Tick> history =
        ctx.profile.timing() == Timing::kSequential
            ? std::span<const Tick>(reports.data(), position)
            : std::span<const Tick>();
    const BestResponse br = BestResponseSearch(ctx.game, ctx.protocol, ctx.profile,
                                               ctx.rule, id, s, history);
    result.evaluations += ctx.game.reports().size();
    const double baseline = ctx.game.sender_utility_at_ticks(
        id, reports[position], ctx.rule(reports), s);
    const double gain = br.utility - baseline;
    if (!(gain > ctx.options.gain_tolerance)) continue;
    if (best && !(gain > best->min_gain() + kSelectionTolerance)) continue;
    Fixed fixed(ctx.protocol.size());
    fixed[position] = br.report;
    Evaluation e;
    const std::size_t members[] = {position};
    Evaluate(ctx, s, members, fixed, e);
    const Tick dev[] = {br.report};
    const double base[] = {baseline};
    best = MakeWitness(ctx, members, s, dev, e, base);
  }
  result.witness = std::move(best);
  return result;
}

}  // namespace

double CoalitionWitness::min_gain() const {
  return gains.empty() ? 0.0 : *std::min_element(gains.begin(), gains.end());
}

CoalitionSearchResult FindCoalitionDeviation(
    const GameInstance& game, const ProtocolSpec& protocol,
    const StrategyProfile& profile, const DecisionRule& rule,
    std::span<const PlayerId> coalition, const CoalitionSearchOptions& options) {
  ValidateProtocol(game, protocol);
  const Context ctx{game, protocol, profile, rule, options};
  const std::vector<std::size_t> members = Positions(protocol, coalition);
  if (members.size() == 1) return FindSingleton(ctx, members[0]);

  CoalitionSearchResult result;
  const std::vector<StatePlan> plans = PlanSearch(ctx, members, result);

  std::vector<std::optional<CoalitionWitness>> per_state(plans.size());
  std::vector<std::uint64_t> counts(plans.size(), 0);
  ParallelChunks(plans.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const StatePlan& plan = plans[i];
      std::optional<CoalitionWitness>& best = per_state[i];
      ForEachImproving(
          ctx, plan.state, members, Fixed(protocol.size()), plan.baseline,
          plan.candidates,
          [&](std::span<const Tick> reports, const Evaluation& e) {
            double min_gain = INFINITY;
            for (std::size_t m = 0; m < members.size(); ++m) {
              min_gain = std::min(min_gain, e.utilities[m] - plan.baseline[m]);
            }
            if (!best || min_gain > best->min_gain() + kSelectionTolerance) {
              best = MakeWitness(ctx, members, plan.state, reports, e, plan.baseline);
            }
            return true;
          },
          counts[i]);
    }
  });
  for (std::size_t i = 0; i < plans.size(); ++i) {
    result.evaluations += counts[i];
    if (!per_state[i]) continue;
    if (!result.witness ||
        per_state[i]->min_gain() > result.witness->min_gain() + kSelectionTolerance) {
      result.witness = std::move(per_state[i]);
    }
  }
  return result;
}

bool IsSelfEnforcing(const GameInstance& game, const ProtocolSpec& protocol,
                     const StrategyProfile& profile, const DecisionRule& rule,
                     CoalitionWitness& witness,
                     const CoalitionSearchOptions& options) {
  const Context ctx{game, protocol, profile, rule, options};
  const std::vector<std::size_t> members = Positions(protocol, witness.coalition);
  Fixed fixed(protocol.size());
  for (std::size_t m = 0; m < members.size(); ++m) {
    // witness.coalition is in roster order, matching `members`.
    fixed[members[m]] = witness.reports.at(m);
  }
  witness.audit.clear();
  witness.self_enforcing =
      SelfEnforcingAt(ctx, witness.state, members, fixed, 1, witness.audit);
  return witness.self_enforcing;
}

std::vector<double> ReplayCoalitionGains(const GameInstance& game,
                                         const ProtocolSpec& protocol,
                                         const StrategyProfile& profile,
                                         const DecisionRule& rule,
                                         const CoalitionWitness& witness) {
  const CoalitionSearchOptions options;
  const Context ctx{game, protocol, profile, rule, options};
  const std::vector<std::size_t> members = Positions(protocol, witness.coalition);
  Evaluation base, dev;
  Evaluate(ctx, witness.state, members, Fixed(protocol.size()), base);
  Fixed fixed(protocol.size());
  for (std::size_t m = 0; m < members.size(); ++m) fixed[members[m]] = witness.reports.at(m);
  Evaluate(ctx, witness.state, members, fixed, dev);
  std::vector<double> gains;
  for (std::size_t m = 0; m < members.size(); ++m) {
    gains.push_back(dev.utilities[m] - base.utilities[m]);
  }
  return gains;
}

CoalitionVerdict CheckStrong(const GameInstance& game, const ProtocolSpec& protocol,
                             const StrategyProfile& profile, const DecisionRule& rule,
                             const CoalitionSearchOptions& options) {
  ValidateProtocol(game, protocol);
  if (protocol.size() > kMaxCoalitionSize) {
    throw Error(ErrorCode::kCoalitionTooLarge, "roster too large for coalition search");
  }
  const Context ctx{game, protocol, profile, rule, options};
  CoalitionVerdict verdict;
  verdict.audit.push_back(ReceiverNote(ctx));
  for (std::size_t size = 1; size <= protocol.size(); ++size) {
    for (const auto& coalition : CoalitionsOfSize(protocol, size)) {
      CoalitionSearchResult r =
          FindCoalitionDeviation(game, protocol, profile, rule, coalition, options);
      verdict.exhaustive = verdict.exhaustive && r.exhaustive;
      if (r.witness) {
        verdict.audit.push_back("coalition " + Describe(coalition) +
                                ": mutually improving deviation found");
        verdict.holds = false;
        verdict.refutation = std::move(r.witness);
        return verdict;
      }
      verdict.audit.push_back(
          "coalition " + Describe(coalition) + ": none found" +
          (r.exhaustive ? " (exhaustive)"
                        : " at stride " + std::to_string(r.stride)));
    }
  }
  return verdict;
}

CoalitionVerdict CheckCoalitionProof(const GameInstance& game,
                                     const ProtocolSpec& protocol,
                                     const StrategyProfile& profile,
                                     const DecisionRule& rule,
                                     const CoalitionSearchOptions& options) {
  ValidateProtocol(game, protocol);
  if (protocol.size() > kMaxCoalitionSize) {
    throw Error(ErrorCode::kCoalitionTooLarge, "roster too large for coalition search");
  }
  const Context ctx{game, protocol, profile, rule, options};
  CoalitionVerdict verdict;
  verdict.audit.push_back(ReceiverNote(ctx));
  for (std::size_t size = 1; size <= protocol.size(); ++size) {
    for (const auto& coalition : CoalitionsOfSize(protocol, size)) {
      CoalitionSearchResult r =
          FindCoalitionDeviation(game, protocol, profile, rule, coalition, options);
      verdict.exhaustive = verdict.exhaustive && r.exhaustive;
      if (!r.witness) {
        verdict.audit.push_back(
            "coalition " + Describe(coalition) + ": no improving deviation" +
            (r.exhaustive ? " (exhaustive)"
                          : " at stride " + std::to_string(r.stride)));
        continue;
      }
      if (IsSelfEnforcing(game, protocol, profile, rule, *r.witness, options)) {
        verdict.audit.push_back("coalition " + Describe(coalition) +
                                ": self-enforcing deviation found");
        verdict.holds = false;
        verdict.refutation = std::move(r.witness);
        return verdict;
      }
      // The best deviation is not self-enforcing; try every other one.
      const std::vector<std::size_t> members = Positions(protocol, coalition);
      CoalitionSearchResult plan_info;
      const std::vector<StatePlan> plans = PlanSearch(ctx, members, plan_info);
      std::optional<CoalitionWitness> found;
      std::uint64_t evaluations = 0;
      for (const StatePlan& plan : plans) {
        const bool finished = ForEachImproving(
            ctx, plan.state, members, Fixed(protocol.size()), plan.baseline,
            plan.candidates,
            [&](std::span<const Tick> reports, const Evaluation& e) {
              CoalitionWitness w =
                  MakeWitness(ctx, members, plan.state, reports, e, plan.baseline);
              if (IsSelfEnforcing(game, protocol, profile, rule, w, options)) {
                found = std::move(w);
                return false;
              }
              return true;
            },
            evaluations);
        if (!finished) break;
      }
      if (found) {
        verdict.audit.push_back("coalition " + Describe(coalition) +
                                ": self-enforcing deviation found");
        verdict.holds = false;
        verdict.refutation = std::move(found);
        return verdict;
      }
      verdict.audit.push_back("coalition " + Describe(coalition) +
                              ": improving deviations exist, none self-enforcing");
    }
  }
  return verdict;
}

}  // namespace costtalk
