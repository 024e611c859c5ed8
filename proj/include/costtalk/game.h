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

#ifndef COSTTALK_GAME_H_
#define COSTTALK_GAME_H_

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace costtalk {

// Grid coordinates are integer multiples of the common step ("ticks"), so the
// value of tick k is exactly k * step and 0 is always representable.
using Tick = int;

// Player id 0 is the receiver; senders carry ids >= 1.
using PlayerId = int;
inline constexpr PlayerId kReceiver = 0;

enum class Action { kMinus, kPlus };

std::string ToString(Action a);
Action ActionFromString(const std::string& s);

enum class ErrorCode {
  kNonMonotonePayoff,
  kBadReceiverNormalization,
  kZeroBiasSender,
  kNoConflictSender,
  kBadGrid,
  kBadPrior,
  kBadCost,
  kOffGridState,
  kOffGridReport,
  kUnknownPlayer,
  kWrongBiasSide,
  kUnsupportedCostFamily,
  kBracketFailure,
  kIncompleteStrategy,
  kDegeneratePosterior,
  kGridMisalignment,
  kWrongBiasConfiguration,
  kWrongTiming,
  kBadRoster,
  kCoalitionTooLarge,
  kTableTooLarge,
  kParseError,
  kSchemaError,
  kFixtureMissing,
  kIoError,
};

std::string ToString(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(ToString(code) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct Violation {
  ErrorCode code;
  std::string message;
};

// Thrown by ValidateGame with every violated invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }
  bool Has(ErrorCode code) const;

 private:
  std::vector<Violation> violations_;
};

struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  double step = 0.0;
};

// Uniform grid {lo*step, ..., hi*step}.
class Grid {
 public:
  Grid() = default;
  Grid(double step, Tick lo, Tick hi);

  double step() const { return step_; }
  Tick lo() const { return lo_; }
  Tick hi() const { return hi_; }
  std::size_t size() const { return static_cast<std::size_t>(hi_ - lo_ + 1); }
  double value(Tick t) const { return t * step_; }
  double min() const { return value(lo_); }
  double max() const { return value(hi_); }
  bool contains(Tick t) const { return t >= lo_ && t <= hi_; }
  std::size_t index(Tick t) const { return static_cast<std::size_t>(t - lo_); }
  Tick tick_at(std::size_t index) const { return lo_ + static_cast<Tick>(index); }
  // Tick of a real value lying on the grid (within 1e-9 of a step multiple).
  std::optional<Tick> find(double x) const;
  std::vector<double> points() const;

 private:
  double step_ = 1.0;
  Tick lo_ = 0;
  Tick hi_ = -1;
};

// Payoff difference du(theta) = alpha + beta * theta, with u(a-, theta) = 0.
struct AffinePayoff {
  double alpha = 0.0;
  double beta = 0.0;
  double at(double theta) const { return alpha + beta * theta; }
};

// C(r, theta) = scale * |r - theta|^exponent.
struct PowerCost {
  double scale = 1.0;
  double exponent = 2.0;
  double at(double distance) const;
  // Distance whose cost equals `budget` (budget >= 0).
  double inverse(double budget) const;
};

struct SenderSpec {
  PlayerId id = 1;
  AffinePayoff payoff;
  PowerCost cost;
};

// Unvalidated game description as produced by a config loader or a test.
struct GameDraft {
  GridSpec state_grid{-2.0, 2.0, 0.02};
  GridSpec report_grid{-4.0, 4.0, 0.02};
  // Empty means uniform.
  std::vector<double> prior;
  AffinePayoff receiver{0.0, 1.0};
  std::vector<SenderSpec> senders;
};

enum class BiasClass {
  kAllLikeBiasedPositive,
  kAllLikeBiasedNegative,
  kContainsOpposedPair,
};

std::string ToString(BiasClass c);

struct BiasClassification {
  BiasClass kind;
  std::vector<PlayerId> positive;  // Z
  std::vector<PlayerId> negative;  // Y
};

// A validated, immutable game environment.
class GameInstance {
 public:
  const Grid& states() const { return states_; }
  const Grid& reports() const { return reports_; }
  const std::vector<double>& prior() const { return prior_; }
  const AffinePayoff& receiver() const { return receiver_; }
  const std::vector<SenderSpec>& senders() const { return senders_; }
  const SenderSpec& sender(PlayerId id) const;
  bool has_sender(PlayerId id) const;
  const GameDraft& draft() const { return draft_; }

  double delta_u_at_tick(PlayerId player, Tick state) const;
  double cost_at_ticks(PlayerId sender, Tick report, Tick state) const;
  // w_j under the baseline u_j(a-, .) = 0.
  double sender_utility_at_ticks(PlayerId sender, Tick report, Action a,
                                 Tick state) const;
  double receiver_utility_at_tick(Action a, Tick state) const;

  Tick state_tick(double theta) const;    // throws kOffGridState
  Tick report_tick(double report) const;  // throws kOffGridReport

 private:
  friend GameInstance ValidateGame(const GameDraft& draft);

  GameDraft draft_;
  Grid states_;
  Grid reports_;
  std::vector<double> prior_;
  AffinePayoff receiver_;
  std::vector<SenderSpec> senders_;
  // Per sender (same order as senders_), cost indexed by |report - state| in
  // ticks.
  std::vector<std::vector<double>> cost_by_distance_;
};

// Every violated invariant of a draft; empty iff the draft is valid.
std::vector<Violation> CheckGame(const GameDraft& draft);
GameInstance ValidateGame(const GameDraft& draft);

double DeltaU(const GameInstance& game, PlayerId player, double theta);
double SenderTotalUtility(const GameInstance& game, PlayerId sender,
                          double report, Action a, double theta);
BiasClassification ClassifyBiases(const GameInstance& game,
                                  std::span<const PlayerId> roster);

// The canonical instance: du_r = theta, du_1 = 1, du_2 = -1, unit quadratic
// costs, states [-2, 2], reports [-4, 4], step 0.02, uniform prior.
GameDraft CanonicalDraft();

}  // namespace costtalk

#endif  // COSTTALK_GAME_H_
