#pragma once

#include <initializer_list>
#include <vector>

#include "sps/population.hpp"
#include "sps/rules.hpp"

namespace sps::testing {

inline Agent make_adult(Gender g, int age = 30, double v = 0.5, double r = 1.0, double f = 0.5,
                        double s = 0.5) {
  Agent a;
  a.age = age;
  a.attrs.gender = g;
  a.attrs.mate_value = v;
  a.attrs.resources = r;
  a.attrs.fertility = f;
  a.fertility_trait = f;
  a.attrs.social_capital = s;
  a.attrs.stage = life_stage_for_age(age);
  return a;
}

inline Population make_population(std::initializer_list<Agent> agents, std::uint64_t seed = 1) {
  Population pop;
  pop.seed = seed;
  for (const Agent& a : agents) pop.add_agent(a);
  pop.ledger.initial = pop.total_wealth();
  return pop;
}

inline RelId tie(Population& pop, AgentId a, AgentId b, RelKind kind = RelKind::spouse,
                 double ua = 0.8, double ub = 0.8) {
  return form_relationship(pop, kind, a, b, ua, ub, 0.0, 0.0);
}

inline ScenarioConfig small_config(int n = 300, int horizon = 20) {
  ScenarioConfig c;
  c.population_size = n;
  c.horizon = horizon;
  return c;
}

}  // namespace sps::testing
