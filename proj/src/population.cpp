#include "sps/population.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sps/errors.hpp"
#include "sps/lifecycle.hpp"
#include "sps/rng.hpp"

namespace sps {

LifeStage life_stage_for_age(int age) noexcept {
  if (age < 18) return LifeStage::youth;
  if (age < 40) return LifeStage::adult;
  if (age < 65) return LifeStage::mature;
  return LifeStage::elder;
}

void AttributeVector::clamp() noexcept {
  mate_value = std::clamp(mate_value, 0.0, 1.0);
  fertility = std::clamp(fertility, 0.0, 1.0);
  social_capital = std::clamp(social_capital, 0.0, 1.0);
  if (!(resources > 0.0)) resources = 0.0;
}

Agent& Population::at(AgentId id) {
  if (id >= agents.size()) throw IntegrityError("unknown agent " + std::to_string(id));
  return agents[id];
}

const Agent& Population::at(AgentId id) const {
  if (id >= agents.size()) throw IntegrityError("unknown agent " + std::to_string(id));
  return agents[id];
}

const Relationship& Population::relationship(RelId id) const {
  if (id >= relationships.size()) {
    throw IntegrityError("unknown relationship " + std::to_string(id));
  }
  return relationships[id];
}

AgentId Population::add_agent(Agent a) {
  a.id = static_cast<AgentId>(agents.size());
  agents.push_back(std::move(a));
  return agents.back().id;
}

bool Population::related(AgentId a, AgentId b) const {
  const Agent& x = agents[a];
  for (RelId r : x.spouses) {
    if (relationships[r].other(a) == b) return true;
  }
  for (RelId r : x.companions) {
    if (relationships[r].other(a) == b) return true;
  }
  return false;
}

std::vector<AgentId> Population::partners_of(AgentId id) const {
  const Agent& x = agents[id];
  std::vector<AgentId> out;
  out.reserve(x.spouses.size() + x.companions.size());
  for (RelId r : x.spouses) out.push_back(relationships[r].other(id));
  for (RelId r : x.companions) out.push_back(relationships[r].other(id));
  return out;
}

std::size_t Population::alive_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(agents.begin(), agents.end(), [](const Agent& a) { return a.alive; }));
}

std::vector<AgentId> Population::living() const {
  std::vector<AgentId> out;
  for (const Agent& a : agents) {
    if (a.alive) out.push_back(a.id);
  }
  return out;
}

std::vector<AgentId> Population::living_adults() const {
  std::vector<AgentId> out;
  for (const Agent& a : agents) {
    if (a.is_adult()) out.push_back(a.id);
  }
  return out;
}

double Population::total_wealth() const noexcept {
  double total = 0.0;
  for (const Agent& a : agents) {
    if (a.alive) total += a.attrs.resources;
  }
  return total;
}

std::vector<double> rank_normalize(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const double denom = static_cast<double>(n - 1);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) out[order[k]] = mean_rank / denom;
    i = j + 1;
  }
  return out;
}

double composite_score(const AttributeVector& attrs, double resource_rank,
                       const CompositeWeights& w) noexcept {
  return w.mate_value * attrs.mate_value + w.resources * resource_rank +
         w.fertility * attrs.fertility + w.social_capital * attrs.social_capital;
}

std::array<int, 3> tier_counts(int n, const std::array<int, 3>& shares) noexcept {
  const long long a = static_cast<long long>(n) * shares[0] / 100;
  const long long c = static_cast<long long>(n) * shares[2] / 100;
  return {static_cast<int>(a), static_cast<int>(n - a - c), static_cast<int>(c)};
}

namespace {

void assign_ranked(Population& pop, const std::vector<AgentId>& ids, const CompositeWeights& w,
                  const std::array<int, 3>& shares) {
  const int n = static_cast<int>(ids.size());
  if (n == 0) return;
  std::vector<double> r(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) r[i] = pop.agents[ids[i]].attrs.resources;
  const std::vector<double> rank = rank_normalize(r);

  // Agents are placed by their composite percentile within their own gender,
  // so each side of the market fills the bands in the same proportions.
  std::array<std::vector<std::size_t>, 2> members;
  std::array<std::vector<double>, 2> scores;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const int g = static_cast<int>(pop.agents[ids[i]].gender());
    members[g].push_back(i);
    scores[g].push_back(composite_score(pop.agents[ids[i]].attrs, rank[i], w));
  }
  struct Key {
    double within = 0.0;
    double score = 0.0;
    AgentId id = 0;
  };
  std::vector<Key> scored;
  scored.reserve(ids.size());
  for (int g = 0; g < 2; ++g) {
    const std::vector<double> pct = members[g].size() == 1 ? std::vector<double>{0.5}
                                                           : rank_normalize(scores[g]);
    for (std::size_t k = 0; k < members[g].size(); ++k) {
      scored.push_back({pct[k], scores[g][k], ids[members[g][k]]});
    }
  }
  std::sort(scored.begin(), scored.end(), [](const Key& x, const Key& y) {
    if (x.within != y.within) return x.within > y.within;
    if (x.score != y.score) return x.score > y.score;
    return x.id < y.id;
  });
  const auto counts = tier_counts(n, shares);
  for (int i = 0; i < n; ++i) {
    Tier t = Tier::B;
    if (i < counts[0]) {
      t = Tier::A;
    } else if (i >= n - counts[2]) {
      t = Tier::C;
    }
    pop.agents[scored[i].id].tier = t;
  }
}

}  // namespace

void reassign_tiers(Population& pop, const CompositeWeights& w, const std::array<int, 3>& shares) {
  assign_ranked(pop, pop.living(), w, shares);
}

Population init_population(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  Population pop;
  pop.seed = seed;
  Rng rng = make_stream(seed, Stream::init);

  const int n = config.population_size;
  const int males = static_cast<int>(static_cast<long long>(n) * config.gender_ratio[0] /
                                     (config.gender_ratio[0] + config.gender_ratio[1]));
  std::vector<Gender> genders(n, Gender::female);
  std::fill_n(genders.begin(), males, Gender::male);
  std::shuffle(genders.begin(), genders.end(), rng);

  const auto& ap = config.attributes;
  std::uniform_int_distribution<int> age_dist(ap.initial_age_min, ap.initial_age_max);
  std::lognormal_distribution<double> wealth_dist(ap.wealth_mu, ap.wealth_sigma);

  pop.agents.reserve(static_cast<std::size_t>(n) * 2);
  for (int i = 0; i < n; ++i) {
    Agent a;
    a.age = age_dist(rng);
    a.attrs.gender = genders[i];
    a.attrs.mate_value = sample_beta(rng, ap.beta_a, ap.beta_b);
    a.fertility_trait = sample_beta(rng, ap.beta_a, ap.beta_b);
    a.attrs.social_capital = sample_beta(rng, ap.beta_a, ap.beta_b);
    const double wealth = wealth_dist(rng);
    a.same_gender_open = uniform01(rng) < config.matching.same_gender_openness;
    a.attrs.resources = a.age >= kAdultAge ? wealth : 0.0;
    a.attrs.fertility = a.fertility_trait * fertility_factor(a.age, a.attrs.gender, config.lifecycle);
    a.attrs.stage = life_stage_for_age(a.age);
    a.attrs.clamp();
    pop.add_agent(std::move(a));
  }
  reassign_tiers(pop, config.composite, config.tier_shares);
  pop.ledger.initial = pop.total_wealth();
  return pop;
}

std::vector<std::string> scan_violations(const Population& pop, const InstitutionRules& rules) {
  std::vector<std::string> out;
  auto fail = [&](const std::string& name, const std::string& detail) {
    out.push_back(name + ": " + detail);
  };
  for (const Agent& a : pop.agents) {
    const std::string who = "agent " + std::to_string(a.id);
    if (!a.alive) {
      if (a.partner_count() != 0) fail("symmetry", who + " is dead but holds relationships");
      continue;
    }
    if (static_cast<int>(a.spouses.size()) > rules.spouse_cap) fail("capacity.spouse", who);
    if (static_cast<int>(a.companions.size()) > rules.companion_cap) fail("capacity.companion", who);
    if (a.partner_count() > rules.total_cap) fail("capacity.total", who);
    if (!(a.attrs.resources >= 0.0)) fail("wealth.nonnegative", who);
    const auto& v = a.attrs;
    if (!(v.mate_value >= 0 && v.mate_value <= 1 && v.fertility >= 0 && v.fertility <= 1 &&
          v.social_capital >= 0 && v.social_capital <= 1)) {
      fail("attributes.range", who);
    }
    auto check_list = [&](const std::vector<RelId>& list, RelKind kind) {
      for (RelId rid : list) {
        if (rid >= pop.relationships.size()) {
          fail("symmetry", who + " lists unknown relationship");
          continue;
        }
        const Relationship& r = pop.relationships[rid];
        if (!r.active || r.kind != kind || (r.partner_a != a.id && r.partner_b != a.id)) {
          fail("symmetry", who + " lists relationship " + std::to_string(rid) + " inconsistently");
        }
      }
    };
    check_list(a.spouses, RelKind::spouse);
    check_list(a.companions, RelKind::companion);
  }
  for (const Relationship& r : pop.relationships) {
    if (!r.active) continue;
    const std::string what = "relationship " + std::to_string(r.id);
    if (r.partner_a == r.partner_b) {
      fail("symmetry", what + " is a self-loop");
      continue;
    }
    for (AgentId end : {r.partner_a, r.partner_b}) {
      if (end >= pop.agents.size() || !pop.agents[end].alive) {
        fail("symmetry", what + " has a dead or unknown endpoint");
        continue;
      }
      const auto& list =
          r.kind == RelKind::spouse ? pop.agents[end].spouses : pop.agents[end].companions;
      if (std::count(list.begin(), list.end(), r.id) != 1) {
        fail("symmetry", what + " not listed exactly once by agent " + std::to_string(end));
      }
    }
  }
  return out;
}

void check_invariants(const Population& pop, const InstitutionRules& rules) {
  const auto violations = scan_violations(pop, rules);
  if (!violations.empty()) {
    const auto& first = violations.front();
    throw InvariantError(first.substr(0, first.find(':')), first);
  }
}

}  // namespace sps
