#pragma once

#include "sps/population.hpp"

namespace sps {

// True iff a `kind` edge between a and b would be legal right now: both are
// living adults, not already tied to each other or parent and child, the pair
// is opposite-gender (or both are open to same-gender ties), and neither
// endpoint would exceed its spouse, companion or total capacity.
bool may_form(const Population& pop, AgentId a, AgentId b, RelKind kind,
              const InstitutionRules& rules);

bool has_free_slot(const Agent& agent, RelKind kind, const InstitutionRules& rules) noexcept;
bool has_any_free_slot(const Agent& agent, const InstitutionRules& rules) noexcept;

// Adds an edge without checking legality. Utilities and reservations are the
// values each side held at formation.
RelId form_relationship(Population& pop, RelKind kind, AgentId a, AgentId b, double utility_a,
                        double utility_b, double reservation_a, double reservation_b);

// Removes the edge from both endpoints. Throws IntegrityError for unknown or
// already-dissolved relationships.
void dissolve(Population& pop, RelId rel);

}  // namespace sps
