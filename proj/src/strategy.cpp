#include "sps/strategy.hpp"

#include <algorithm>
#include <random>

#include "sps/rules.hpp"

namespace sps {

double discounted_reward(std::span<const RewardSample> trace, const RewardSpec& spec) noexcept {
  double total = 0.0;
  double discount = 1.0;
  for (const RewardSample& s : trace) {
    total += discount * (spec.alpha * s.welfare + spec.beta * s.fertility + spec.delta * s.stability);
    discount *= spec.gamma;
  }
  return total;
}

MaintenanceReport maintenance_phase(Population& pop, const MarketView& view,
                                    const InstitutionRules& rules, const ScenarioConfig& config,
                                    const StrategyParams& strategy) {
  MaintenanceReport report;
  Rng rng = make_stream(pop.seed, Stream::maintenance, static_cast<std::uint64_t>(pop.step));
  const std::size_t n = pop.relationships.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Relationship& r = pop.relationships[i];
    if (!r.active) continue;
    if (r.kind == RelKind::spouse) {
      if (uniform01(rng) < rules.divorce_hazard) {
        dissolve(pop, r.id);
        ++report.divorces;
      }
      continue;
    }
    bool leave = false;
    for (AgentId self : {r.partner_a, r.partner_b}) {
      const Agent& a = pop.agents[self];
      const double u = utility(pop, view, config, self, r.other(self));
      if (u < strategy.cell(a.tier, a.gender()).dissolution_threshold) leave = true;
    }
    if (leave) {
      dissolve(pop, r.id);
      ++report.companion_dissolutions;
    }
  }
  return report;
}

namespace {

double get(const StrategyCell& c, StrategyParam p) {
  switch (p) {
    case StrategyParam::reservation: return c.reservation;
    case StrategyParam::proposal_budget: return c.proposal_budget;
    case StrategyParam::kind_preference: return c.kind_preference;
    case StrategyParam::fertility_desire: return c.fertility_desire;
    case StrategyParam::dissolution_threshold: return c.dissolution_threshold;
  }
  return 0.0;
}

void set(StrategyCell& c, StrategyParam p, double v) {
  switch (p) {
    case StrategyParam::reservation: c.reservation = v; break;
    case StrategyParam::proposal_budget: c.proposal_budget = static_cast<int>(v); break;
    case StrategyParam::kind_preference: c.kind_preference = v; break;
    case StrategyParam::fertility_desire: c.fertility_desire = v; break;
    case StrategyParam::dissolution_threshold: c.dissolution_threshold = v; break;
  }
}

constexpr int kMaxProposalBudget = 12;

double perturbed(StrategyParam p, double value, double step, int sign) {
  if (step <= 0.0) return value;
  if (p == StrategyParam::proposal_budget) {
    return std::clamp(value + sign, 0.0, static_cast<double>(kMaxProposalBudget));
  }
  return std::clamp(value + sign * step, 0.0, 1.0);
}

}  // namespace

AdaptationState start_adaptation(const StrategyParams& params, const CellRewardFn& evaluate,
                                 double step, double anneal) {
  AdaptationState s;
  s.params = params;
  s.reward = evaluate(params);
  s.step = step;
  s.anneal = anneal;
  return s;
}

StrategyParams adapt_strategies(AdaptationState& state, const CellRewardFn& evaluate, Rng& rng) {
  std::uniform_int_distribution<int> pick_param(0, kStrategyParamCount - 1);
  StrategyParams candidate = state.params;
  std::array<StrategyParam, kCellCount> chosen{};
  std::array<bool, kCellCount> moved{};
  for (int c = 0; c < kCellCount; ++c) {
    chosen[c] = static_cast<StrategyParam>(pick_param(rng));
    const int sign = uniform01(rng) < 0.5 ? -1 : 1;
    const double before = get(candidate.cells[c], chosen[c]);
    const double after = perturbed(chosen[c], before, state.step, sign);
    set(candidate.cells[c], chosen[c], after);
    moved[c] = after != before;
  }

  bool any = false;
  for (bool m : moved) any = any || m;
  CellRewards trial = state.reward;
  if (any) trial = evaluate(candidate);

  for (int c = 0; c < kCellCount; ++c) {
    if (!moved[c]) continue;
    AdaptAuditEntry e;
    e.iteration = state.iteration;
    e.cell = c;
    e.parameter = chosen[c];
    e.before = get(state.params.cells[c], chosen[c]);
    e.after = get(candidate.cells[c], chosen[c]);
    e.reward_before = state.reward[c];
    e.reward_after = trial[c];
    e.accepted = trial[c] > state.reward[c];
    if (e.accepted) {
      state.params.cells[c] = candidate.cells[c];
      state.reward[c] = trial[c];
      ++state.accepted_moves;
    }
    state.log.push_back(e);
  }
  state.step *= state.anneal;
  ++state.iteration;
  return state.params;
}

}  // namespace sps
