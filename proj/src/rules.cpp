#include "sps/rules.hpp"

#include <algorithm>
#include <string>

#include "sps/errors.hpp"

namespace sps {

namespace {

bool kin(const Agent& x, const Agent& y) noexcept {
  return x.mother == y.id || x.father == y.id || y.mother == x.id || y.father == x.id;
}

void erase_id(std::vector<RelId>& list, RelId id) {
  list.erase(std::remove(list.begin(), list.end(), id), list.end());
}

}  // namespace

bool has_free_slot(const Agent& agent, RelKind kind, const InstitutionRules& rules) noexcept {
  if (agent.partner_count() >= rules.total_cap) return false;
  if (kind == RelKind::spouse) return static_cast<int>(agent.spouses.size()) < rules.spouse_cap;
  return static_cast<int>(agent.companions.size()) < rules.companion_cap;
}

bool has_any_free_slot(const Agent& agent, const InstitutionRules& rules) noexcept {
  return has_free_slot(agent, RelKind::spouse, rules) ||
         has_free_slot(agent, RelKind::companion, rules);
}

bool may_form(const Population& pop, AgentId a, AgentId b, RelKind kind,
              const InstitutionRules& rules) {
  if (a == b || a >= pop.agents.size() || b >= pop.agents.size()) return false;
  const Agent& x = pop.agents[a];
  const Agent& y = pop.agents[b];
  if (!x.is_adult() || !y.is_adult()) return false;
  if (x.gender() == y.gender() && !(x.same_gender_open && y.same_gender_open)) return false;
  if (!has_free_slot(x, kind, rules) || !has_free_slot(y, kind, rules)) return false;
  if (kin(x, y)) return false;
  return !pop.related(a, b);
}

RelId form_relationship(Population& pop, RelKind kind, AgentId a, AgentId b, double utility_a,
                        double utility_b, double reservation_a, double reservation_b) {
  Relationship r;
  r.id = static_cast<RelId>(pop.relationships.size());
  r.kind = kind;
  r.partner_a = a;
  r.partner_b = b;
  r.start_step = pop.step;
  r.utility_a = utility_a;
  r.utility_b = utility_b;
  r.reservation_a = reservation_a;
  r.reservation_b = reservation_b;
  pop.relationships.push_back(r);
  auto& la = kind == RelKind::spouse ? pop.agents[a].spouses : pop.agents[a].companions;
  auto& lb = kind == RelKind::spouse ? pop.agents[b].spouses : pop.agents[b].companions;
  la.push_back(r.id);
  lb.push_back(r.id);
  return r.id;
}

void dissolve(Population& pop, RelId rel) {
  if (rel >= pop.relationships.size()) {
    throw IntegrityError("unknown relationship " + std::to_string(rel));
  }
  Relationship& r = pop.relationships[rel];
  if (!r.active) throw IntegrityError("relationship " + std::to_string(rel) + " already dissolved");
  for (AgentId end : {r.partner_a, r.partner_b}) {
    Agent& agent = pop.agents[end];
    erase_id(r.kind == RelKind::spouse ? agent.spouses : agent.companions, rel);
    const AgentId other = r.other(end);
    if (std::find(agent.former_partners.begin(), agent.former_partners.end(), other) ==
        agent.former_partners.end()) {
      agent.former_partners.push_back(other);
    }
  }
  r.active = false;
  r.end_step = pop.step;
  ++pop.dissolutions;
}

}  // namespace sps
