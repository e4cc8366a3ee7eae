#pragma once

#include <utility>
#include <vector>

#include "sps/config.hpp"
#include "sps/population.hpp"

namespace sps {

// Multiplier applied to the innate fertility trait. Females decline linearly
// from 30 to zero at female_fertility_end; males from 55 to male_fertility_end.
double fertility_factor(int age, Gender g, const LifecycleParams& p) noexcept;

// Annual conception probability by maternal age before trait and desire
// scaling: 0 below 18, onset value at 18-19, peak at 20-29, then linear to 0.
double base_fecundity(int mother_age, const LifecycleParams& p) noexcept;

bool male_fertile(int age, const LifecycleParams& p) noexcept;

// Institutional deterrent on fertility desire: the motherhood penalty and the
// unsubsidized share of child costs both reduce willingness to have children.
double desire_multiplier(const InstitutionRules& rules, const LifecycleParams& p) noexcept;

struct BirthEvent {
  AgentId mother = 0;
  AgentId father = 0;
  AgentId child = 0;
  int step = 0;
  RelKind via = RelKind::spouse;

  bool operator==(const BirthEvent&) const = default;
};

// Birth probability for one male-female edge at the current step (0 when the
// pair is outside the fecundability window).
double birth_probability(const Population& pop, const Relationship& rel,
                         const InstitutionRules& rules, const ScenarioConfig& config,
                         const StrategyParams& strategy);

// One conception draw per fecund woman per step, in id order, through her most
// fertile male tie.
std::vector<BirthEvent> reproduce_phase(Population& pop, const InstitutionRules& rules,
                                        const ScenarioConfig& config,
                                        const StrategyParams& strategy);

enum class EstateRoute { children, spouse, pool, unclaimed };

struct EstateSettlement {
  AgentId decedent = 0;
  std::vector<std::pair<AgentId, double>> heirs;  // (heir, share of total)
  std::vector<double> amounts;                    // parallel to heirs, sums to total exactly
  double total = 0.0;
  EstateRoute route = EstateRoute::unclaimed;
};

// Equal split among living biological children; otherwise living spouses;
// otherwise every living adult. Transfers are applied and the decedent's
// wealth is zeroed. Uses the decedent's current spouse list.
EstateSettlement settle_estate(Population& pop, AgentId decedent, const InstitutionRules& rules);
EstateSettlement settle_estate(Population& pop, AgentId decedent, const InstitutionRules& rules,
                               const std::vector<AgentId>& spouses_at_death);

struct UpdateReport {
  std::vector<AgentId> deaths;
  std::vector<EstateSettlement> settlements;
  double income = 0.0;
  double consumption = 0.0;
  double child_costs = 0.0;
};

// Aging, income, consumption, child costs, attribute drift, life stage and
// deaths (dissolve all edges, then settle the estate).
UpdateReport update_phase(Population& pop, const InstitutionRules& rules,
                          const ScenarioConfig& config);

// Death of one agent outside the annual schedule.
EstateSettlement kill(Population& pop, AgentId id, const InstitutionRules& rules);

}  // namespace sps
