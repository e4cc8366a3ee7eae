#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sps/config.hpp"
#include "sps/params.hpp"

namespace sps {

constexpr int kAdultAge = 18;

// Life stage is a pure function of age: youth <18, adult 18-39,
// mature 40-64, elder >=65.
LifeStage life_stage_for_age(int age) noexcept;

struct AttributeVector {
  double mate_value = 0.0;      // v in [0,1]
  double resources = 0.0;       // r >= 0, the agent's wealth
  double fertility = 0.0;       // f in [0,1]
  double social_capital = 0.0;  // s in [0,1]
  Gender gender = Gender::male;
  LifeStage stage = LifeStage::youth;

  void clamp() noexcept;
  bool operator==(const AttributeVector&) const = default;
};

struct Relationship {
  RelId id = 0;
  RelKind kind = RelKind::spouse;
  AgentId partner_a = 0;
  AgentId partner_b = 0;
  int start_step = 0;
  double utility_a = 0.0;  // a's utility for b at formation
  double utility_b = 0.0;
  double reservation_a = 0.0;  // a's reservation at formation
  double reservation_b = 0.0;
  bool active = true;
  int end_step = -1;

  AgentId other(AgentId self) const noexcept { return self == partner_a ? partner_b : partner_a; }
  double utility_of(AgentId self) const noexcept { return self == partner_a ? utility_a : utility_b; }
  bool operator==(const Relationship&) const = default;
};

struct Agent {
  AgentId id = 0;
  int age = 0;
  AttributeVector attrs;
  double fertility_trait = 0.0;  // innate fecundity; attrs.fertility decays from it
  bool same_gender_open = false;
  Tier tier = Tier::B;
  bool alive = true;

  std::vector<RelId> spouses;
  std::vector<RelId> companions;
  std::vector<AgentId> children;
  std::vector<AgentId> former_partners;
  std::optional<AgentId> mother;
  std::optional<AgentId> father;
  RelKind parents_link = RelKind::spouse;
  std::vector<double> welfare_history;

  int partner_count() const noexcept {
    return static_cast<int>(spouses.size() + companions.size());
  }
  bool is_adult() const noexcept { return alive && age >= kAdultAge; }
  double wealth() const noexcept { return attrs.resources; }
  Gender gender() const noexcept { return attrs.gender; }

  bool operator==(const Agent&) const = default;
};

// Running account of every flow that creates or destroys wealth. Estate
// settlements are transfers and never appear here.
struct WealthLedger {
  double initial = 0.0;
  double income = 0.0;  // net of wages forgone to the motherhood penalty
  double consumption = 0.0;
  double child_costs = 0.0;
  double unclaimed = 0.0;  // estates with no living recipient

  double expected_total() const noexcept {
    return initial + income - consumption - child_costs - unclaimed;
  }
  bool operator==(const WealthLedger&) const = default;
};

// Id-ordered agent store. agents[i].id == i and relationships[j].id == j;
// ids are never reused, dead agents stay in place with alive == false.
struct Population {
  std::vector<Agent> agents;
  std::vector<Relationship> relationships;
  int step = 0;
  std::uint64_t seed = 0;
  WealthLedger ledger;
  int dissolutions = 0;  // cumulative

  Agent& at(AgentId id);
  const Agent& at(AgentId id) const;
  const Relationship& relationship(RelId id) const;

  AgentId add_agent(Agent a);
  bool related(AgentId a, AgentId b) const;
  std::vector<AgentId> partners_of(AgentId id) const;

  std::size_t alive_count() const noexcept;
  std::vector<AgentId> living() const;
  std::vector<AgentId> living_adults() const;
  double total_wealth() const noexcept;  // living agents only

  bool operator==(const Population&) const = default;
};

Population init_population(const ScenarioConfig& config, std::uint64_t seed);

// Fractional rank in [0,1]; ties share their mean rank. Single values map to 0.
std::vector<double> rank_normalize(std::span<const double> values);

// Weighted sum over (v, rank r, f, s); resource_rank comes from rank_normalize.
double composite_score(const AttributeVector& attrs, double resource_rank,
                       const CompositeWeights& w) noexcept;

// Tier counts for n agents: A and C take floors, B absorbs the remainder.
std::array<int, 3> tier_counts(int n, const std::array<int, 3>& shares) noexcept;

// Recomputes tiers of all living agents from current composite scores.
void reassign_tiers(Population& pop, const CompositeWeights& w, const std::array<int, 3>& shares);

// Full scans. Each returned string names a violated invariant.
std::vector<std::string> scan_violations(const Population& pop, const InstitutionRules& rules);
void check_invariants(const Population& pop, const InstitutionRules& rules);  // throws InvariantError

}  // namespace sps
