#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "sps/config.hpp"
#include "sps/matching.hpp"
#include "sps/population.hpp"
#include "sps/rng.hpp"

namespace sps {

// One step of an agent's (or cell's) reward signal.
struct RewardSample {
  double welfare = 0.0;    // W(t)
  double fertility = 0.0;  // F(t), births attributed at t
  double stability = 0.0;  // S(t), 1 - unpartnered adult male fraction
};

// sum_t gamma^t (alpha W(t) + beta F(t) + delta S(t)), t from 0.
double discounted_reward(std::span<const RewardSample> trace, const RewardSpec& spec) noexcept;

struct MaintenanceReport {
  int companion_dissolutions = 0;
  int divorces = 0;
};

// Relationship maintenance: a companion tie ends when either side's current
// utility for the other falls below its cell's dissolution threshold; a
// spousal tie ends with the institution's divorce hazard.
MaintenanceReport maintenance_phase(Population& pop, const MarketView& view,
                                    const InstitutionRules& rules, const ScenarioConfig& config,
                                    const StrategyParams& strategy);

using CellRewards = std::array<double, kCellCount>;
using CellRewardFn = std::function<CellRewards(const StrategyParams&)>;

enum class StrategyParam : int {
  reservation = 0,
  proposal_budget = 1,
  kind_preference = 2,
  fertility_desire = 3,
  dissolution_threshold = 4,
};
constexpr int kStrategyParamCount = 5;

struct AdaptAuditEntry {
  int iteration = 0;
  int cell = 0;
  StrategyParam parameter = StrategyParam::reservation;
  double before = 0.0;
  double after = 0.0;
  double reward_before = 0.0;
  double reward_after = 0.0;
  bool accepted = false;
};

struct AdaptationState {
  StrategyParams params;
  CellRewards reward{};  // reward of the currently accepted parameters, per cell
  double step = 0.05;
  double anneal = 0.98;
  int iteration = 0;
  int accepted_moves = 0;
  std::vector<AdaptAuditEntry> log;
};

// Evaluates the starting parameters once.
AdaptationState start_adaptation(const StrategyParams& params, const CellRewardFn& evaluate,
                                 double step = 0.05, double anneal = 0.98);

// One hill-climbing iteration: every cell perturbs one randomly chosen
// parameter by +-step, the perturbed set is evaluated once, and each cell
// keeps its move only if its own reward strictly improved. The step size is
// multiplied by the anneal factor afterwards.
StrategyParams adapt_strategies(AdaptationState& state, const CellRewardFn& evaluate, Rng& rng);

}  // namespace sps
