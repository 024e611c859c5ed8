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


#include "costtalk/reach.h"

#include <cmath>
#include <string>

namespace costtalk {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kBisectionTolerance = 1e-12;

// Distance d >= 0 with cost(d) = budget, by bracketing then bisection.
double SolveDistance(const PowerCost& cost, double budget) {
  if (budget <= 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  int iterations = 0;
  while (cost.at(hi) < budget) {
    lo = hi;
    hi *= 2.0;
    if (++iterations > kMaxIterations) {
      throw Error(ErrorCode::kBracketFailure, "no bracket for reach equation");
    }
  }
  while (hi - lo > kBisectionTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (cost.at(mid) < budget) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (++iterations > kMaxIterations) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double ReachUpper(const GameInstance& game, PlayerId id, double theta) {
  const SenderSpec& s = game.sender(id);
  if (!(s.payoff.at(0.0) > 0.0)) {
    throw Error(ErrorCode::kWrongBiasSide,
                "upper reach requested for negatively biased sender " +
                    std::to_string(id));
  }
  return theta + SolveDistance(s.cost, std::abs(s.payoff.at(theta)));
}

double ReachLower(const GameInstance& game, PlayerId id, double theta) {
  const SenderSpec& s = game.sender(id);
  if (!(s.payoff.at(0.0) < 0.0)) {
    throw Error(ErrorCode::kWrongBiasSide,
                "lower reach requested for positively biased sender " +
                    std::to_string(id));
  }
  return theta - SolveDistance(s.cost, std::abs(s.payoff.at(theta)));
}

double ReachClosedForm(const GameInstance& game, PlayerId id, double theta,
                       ReachSide side) {
  const SenderSpec& s = game.sender(id);
  if (!(s.cost.scale > 0.0) || !(s.cost.exponent >= 1.0)) {
    throw Error(ErrorCode::kUnsupportedCostFamily, "cost is not k|r-theta|^p");
  }
  const double d = s.cost.inverse(std::abs(s.payoff.at(theta)));
  return side == ReachSide::kUpper ? theta + d : theta - d;
}

double Reach(const GameInstance& game, PlayerId id, double theta) {
  return game.sender(id).payoff.at(0.0) > 0.0 ? ReachUpper(game, id, theta)
                                              : ReachLower(game, id, theta);
}

std::vector<ReachRow> BuildReachTable(const GameInstance& game) {
  std::vector<ReachRow> rows;
  const Grid& states = game.states();
  for (const auto& s : game.senders()) {
    for (Tick t = states.lo(); t <= states.hi(); ++t) {
      const double theta = states.value(t);
      ReachRow row{s.id, theta, std::nullopt, std::nullopt};
      if (s.payoff.at(0.0) > 0.0) {
        row.upper = ReachUpper(game, s.id, theta);
      } else {
        row.lower = ReachLower(game, s.id, theta);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace costtalk
