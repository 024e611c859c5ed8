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

#ifndef COSTTALK_REACH_H_
#define COSTTALK_REACH_H_

#include <optional>
#include <vector>

#include "costtalk/game.h"

namespace costtalk {

enum class ReachSide { kUpper, kLower };

// Reach of a sender: the report on the sender's favoured side whose cost
// exactly uses up the sender's stake |du_j(theta)|. Reports past it are
// strictly dominated by the truth whatever the receiver does.
//
// Solved by bracket expansion from [theta, theta + 1] (width doubling) and
// bisection to an absolute bracket width of 1e-12.
double ReachUpper(const GameInstance& game, PlayerId sender, double theta);
double ReachLower(const GameInstance& game, PlayerId sender, double theta);

// theta +/- (|du_j(theta)| / k_j)^(1 / p_j).
double ReachClosedForm(const GameInstance& game, PlayerId sender, double theta,
                       ReachSide side);

// Same as ReachUpper/ReachLower but picks the side from the sign of du_j(0).
double Reach(const GameInstance& game, PlayerId sender, double theta);

struct ReachRow {
  PlayerId sender;
  double theta;
  std::optional<double> upper;
  std::optional<double> lower;
};

// One row per (sender, grid state), senders in game order.
std::vector<ReachRow> BuildReachTable(const GameInstance& game);

}  // namespace costtalk

#endif  // COSTTALK_REACH_H_
