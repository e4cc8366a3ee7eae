#include "sps/lifecycle.hpp"

#include <algorithm>
#include <random>

#include "sps/errors.hpp"
#include "sps/rng.hpp"
#include "sps/rules.hpp"

namespace sps {

namespace {

constexpr int kFemaleDeclineOnset = 30;
constexpr int kMaleDeclineOnset = 55;

double linear_decline(int age, int onset, int end) noexcept {
  if (age < onset) return 1.0;
  if (age >= end) return 0.0;
  return static_cast<double>(end - age) / static_cast<double>(end - onset);
}

int living_children(const Population& pop, const Agent& a) {
  return static_cast<int>(std::count_if(a.children.begin(), a.children.end(),
                                        [&](AgentId c) { return pop.agents[c].alive; }));
}

}  // namespace

double fertility_factor(int age, Gender g, const LifecycleParams& p) noexcept {
  return g == Gender::female ? linear_decline(age, kFemaleDeclineOnset, p.female_fertility_end)
                             : linear_decline(age, kMaleDeclineOnset, p.male_fertility_end);
}

double base_fecundity(int mother_age, const LifecycleParams& p) noexcept {
  if (mother_age < kAdultAge) return 0.0;
  if (mother_age < 20) return p.fecundity_onset;
  if (mother_age < kFemaleDeclineOnset) return p.fecundity_peak;
  return p.fecundity_peak * linear_decline(mother_age, kFemaleDeclineOnset, p.female_fertility_end);
}

bool male_fertile(int age, const LifecycleParams& p) noexcept {
  return age >= kAdultAge && age < p.male_fertility_end;
}

double desire_multiplier(const InstitutionRules& rules, const LifecycleParams& p) noexcept {
  const double unsubsidized = 1.0 - rules.rearing_subsidy;
  const double m = 1.0 - p.penalty_aversion * rules.motherhood_penalty_rate * unsubsidized -
                   p.cost_aversion * unsubsidized;
  return std::clamp(m, 0.0, 1.0);
}

double birth_probability(const Population& pop, const Relationship& rel,
                         const InstitutionRules& rules, const ScenarioConfig& config,
                         const StrategyParams& strategy) {
  const Agent& a = pop.agents[rel.partner_a];
  const Agent& b = pop.agents[rel.partner_b];
  if (!rel.active || !a.alive || !b.alive || a.gender() == b.gender()) return 0.0;
  const Agent& mother = a.gender() == Gender::female ? a : b;
  const Agent& father = a.gender() == Gender::female ? b : a;
  const auto& lp = config.lifecycle;
  if (!male_fertile(father.age, lp)) return 0.0;
  const double base = base_fecundity(mother.age, lp);
  if (base <= 0.0) return 0.0;
  const double desire = 0.5 * (strategy.cell(mother.tier, Gender::female).fertility_desire +
                               strategy.cell(father.tier, Gender::male).fertility_desire) *
                        desire_multiplier(rules, lp);
  const double crowding =
      std::min(1.0, static_cast<double>(living_children(pop, mother)) / lp.max_children);
  return base * mother.attrs.fertility * desire * (1.0 - crowding);
}

std::vector<BirthEvent> reproduce_phase(Population& pop, const InstitutionRules& rules,
                                        const ScenarioConfig& config,
                                        const StrategyParams& strategy) {
  std::vector<BirthEvent> births;
  Rng rng = make_stream(pop.seed, Stream::reproduction, static_cast<std::uint64_t>(pop.step));
  std::normal_distribution<double> noise(0.0, config.lifecycle.child_noise);
  const double keep = 1.0 - rules.motherhood_penalty_rate * (1.0 - rules.rearing_subsidy);

  const std::size_t agent_count = pop.agents.size();
  for (AgentId mother_id = 0; mother_id < agent_count; ++mother_id) {
    const Agent& candidate = pop.agents[mother_id];
    if (!candidate.alive || candidate.gender() != Gender::female ||
        base_fecundity(candidate.age, config.lifecycle) <= 0.0) {
      continue;
    }
    // One draw per woman; the tie with the highest conception probability
    // (lowest relationship id on ties) decides the father.
    const Relationship* best = nullptr;
    double p = 0.0;
    for (const auto* list : {&candidate.spouses, &candidate.companions}) {
      for (RelId id : *list) {
        const Relationship& rel = pop.relationships[id];
        const double q = birth_probability(pop, rel, rules, config, strategy);
        if (q > p || (q == p && q > 0.0 && best != nullptr && rel.id < best->id)) {
          p = q;
          best = &rel;
        }
      }
    }
    const double u = uniform01(rng);
    if (best == nullptr || !(u < p)) continue;
    const Relationship rel = *best;
    const AgentId father_id = rel.other(mother_id);

    const Agent& mother = pop.agents[mother_id];
    const Agent& father = pop.agents[father_id];
    Agent child;
    child.age = 0;
    child.attrs.gender = uniform01(rng) < 0.5 ? Gender::male : Gender::female;
    child.attrs.mate_value =
        0.5 * (mother.attrs.mate_value + father.attrs.mate_value) + noise(rng);
    child.fertility_trait = 0.5 * (mother.fertility_trait + father.fertility_trait) + noise(rng);
    child.attrs.social_capital =
        0.5 * (mother.attrs.social_capital + father.attrs.social_capital) + noise(rng);
    child.fertility_trait = std::clamp(child.fertility_trait, 0.0, 1.0);
    child.attrs.fertility = child.fertility_trait;
    child.attrs.resources = 0.0;
    child.attrs.stage = LifeStage::youth;
    child.same_gender_open = uniform01(rng) < config.matching.same_gender_openness;
    child.tier = Tier::C;
    child.mother = mother_id;
    child.father = father_id;
    child.parents_link = rel.kind;
    child.attrs.clamp();
    const AgentId child_id = pop.add_agent(std::move(child));
    pop.agents[mother_id].children.push_back(child_id);
    pop.agents[father_id].children.push_back(child_id);

    double& r = pop.agents[mother_id].attrs.resources;
    const double lost = r * (1.0 - keep);
    r -= lost;
    pop.ledger.income -= lost;

    births.push_back({mother_id, father_id, child_id, pop.step, rel.kind});
  }
  return births;
}

EstateSettlement settle_estate(Population& pop, AgentId decedent, const InstitutionRules& rules) {
  std::vector<AgentId> spouses;
  for (RelId r : pop.at(decedent).spouses) spouses.push_back(pop.relationships[r].other(decedent));
  return settle_estate(pop, decedent, rules, spouses);
}

EstateSettlement settle_estate(Population& pop, AgentId decedent, const InstitutionRules& /*rules*/,
                               const std::vector<AgentId>& spouses_at_death) {
  Agent& dead = pop.at(decedent);
  EstateSettlement s;
  s.decedent = decedent;
  s.total = dead.attrs.resources;

  std::vector<AgentId> heirs;
  for (AgentId c : dead.children) {
    if (pop.agents[c].alive) heirs.push_back(c);
  }
  s.route = EstateRoute::children;
  if (heirs.empty()) {
    for (AgentId sp : spouses_at_death) {
      if (sp != decedent && pop.agents[sp].alive) heirs.push_back(sp);
    }
    s.route = EstateRoute::spouse;
  }
  if (heirs.empty()) {
    for (const Agent& a : pop.agents) {
      if (a.is_adult() && a.id != decedent) heirs.push_back(a.id);
    }
    s.route = EstateRoute::pool;
  }
  dead.attrs.resources = 0.0;
  if (heirs.empty()) {
    s.route = EstateRoute::unclaimed;
    pop.ledger.unclaimed += s.total;
    return s;
  }
  const double n = static_cast<double>(heirs.size());
  const double each = s.total / n;
  double given = 0.0;
  for (std::size_t i = 0; i < heirs.size(); ++i) {
    const double amount = i + 1 == heirs.size() ? s.total - given : each;
    given += amount;
    pop.agents[heirs[i]].attrs.resources += amount;
    s.heirs.emplace_back(heirs[i], 1.0 / n);
    s.amounts.push_back(amount);
  }
  return s;
}

EstateSettlement kill(Population& pop, AgentId id, const InstitutionRules& rules) {
  Agent& a = pop.at(id);
  if (!a.alive) throw IntegrityError("agent " + std::to_string(id) + " is already dead");
  std::vector<AgentId> spouses;
  for (RelId r : a.spouses) spouses.push_back(pop.relationships[r].other(id));
  std::vector<RelId> edges = a.spouses;
  edges.insert(edges.end(), a.companions.begin(), a.companions.end());
  std::sort(edges.begin(), edges.end());
  for (RelId r : edges) dissolve(pop, r);
  pop.agents[id].alive = false;
  return settle_estate(pop, id, rules, spouses);
}

UpdateReport update_phase(Population& pop, const InstitutionRules& rules,
                          const ScenarioConfig& config) {
  UpdateReport report;
  const auto& lp = config.lifecycle;
  const std::size_t n = pop.agents.size();

  for (std::size_t i = 0; i < n; ++i) {
    Agent& a = pop.agents[i];
    if (!a.alive) continue;
    a.age += 1;
    if (a.age < kAdultAge) continue;
    double& r = a.attrs.resources;
    const int t = static_cast<int>(a.tier);
    double income = r * (lp.growth[t] - 1.0);
    if (a.age < lp.retirement_age) income += lp.wage[t];
    r += income;
    report.income += income;
    const double spent = std::min(lp.consumption, r);
    r -= spent;
    report.consumption += spent;
  }

  // Dependent children are charged to their living parents.
  const double child_cost = (1.0 - rules.rearing_subsidy) * lp.child_unit_cost;
  if (child_cost > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      const Agent& c = pop.agents[i];
      if (!c.alive || c.age >= kAdultAge) continue;
      std::vector<AgentId> payers;
      if (c.mother && pop.agents[*c.mother].alive) payers.push_back(*c.mother);
      if (c.father && pop.agents[*c.father].alive) payers.push_back(*c.father);
      if (payers.empty()) continue;
      std::vector<double> shares(payers.size(), 1.0);
      if (payers.size() == 2) {
        if (c.parents_link == RelKind::spouse) {
          const bool first_richer =
              pop.agents[payers[0]].attrs.resources >= pop.agents[payers[1]].attrs.resources;
          shares = first_richer ? std::vector<double>{0.6, 0.4} : std::vector<double>{0.4, 0.6};
        } else {
          shares = {0.5, 0.5};
        }
      }
      for (std::size_t k = 0; k < payers.size(); ++k) {
        double& r = pop.agents[payers[k]].attrs.resources;
        const double paid = std::min(child_cost * shares[k], r);
        r -= paid;
        report.child_costs += paid;
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    Agent& a = pop.agents[i];
    if (!a.alive) continue;
    a.attrs.fertility = a.fertility_trait * fertility_factor(a.age, a.gender(), lp);
    if (a.age > lp.mate_value_drift_onset) a.attrs.mate_value -= lp.mate_value_drift;
    a.attrs.stage = life_stage_for_age(a.age);
    a.attrs.clamp();
  }

  pop.ledger.income += report.income;
  pop.ledger.consumption += report.consumption;
  pop.ledger.child_costs += report.child_costs;

  Rng rng = make_stream(pop.seed, Stream::mortality, static_cast<std::uint64_t>(pop.step));
  for (std::size_t i = 0; i < n; ++i) {
    const Agent& a = pop.agents[i];
    if (!a.alive) continue;
    bool dies = a.age >= lp.max_age;
    if (!dies && a.age > lp.hazard_onset_age) dies = uniform01(rng) < lp.hazard;
    if (!dies) continue;
    report.deaths.push_back(a.id);
    report.settlements.push_back(kill(pop, a.id, rules));
  }
  return report;
}

}  // namespace sps
