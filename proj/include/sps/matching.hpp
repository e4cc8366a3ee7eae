#pragma once

#include <vector>

#include "sps/config.hpp"
#include "sps/parallel.hpp"
#include "sps/population.hpp"
#include "sps/rng.hpp"

namespace sps {

// Per-step read-only view of the market.
struct MarketView {
  std::vector<double> resource_rank;  // indexed by agent id; rank among the living
  std::vector<AgentId> adults;        // living adults, ascending id
};

MarketView make_market_view(const Population& pop);

// Linear score in [0,1]. The novelty bonus scales the candidate's mate value
// and applies only to candidates the observer has never been partnered with.
double utility(const Agent& candidate, const PreferenceWeights& w, double candidate_resource_rank,
               bool novel) noexcept;

// Observer-specific utility: weights by observer gender, novelty from history.
double utility(const Population& pop, const MarketView& view, const ScenarioConfig& config,
               AgentId observer, AgentId candidate);

// Whether `candidate` is a legitimate search result for `agent`.
bool searchable(const Population& pop, AgentId agent, AgentId candidate);

// Up to k distinct candidates sampled without replacement with weight
// exp(-|s_agent - s_candidate| / bandwidth). Excludes self, current partners,
// parents and children, and gender-incompatible agents.
std::vector<AgentId> candidate_set(const Population& pop, const MarketView& view, AgentId agent,
                                   int k, Rng& rng, const MatchingParams& params);

struct Proposal {
  AgentId proposer = 0;
  AgentId target = 0;
  RelKind kind = RelKind::spouse;
  double utility_to_proposer = 0.0;
  double proposer_reservation = 0.0;

  bool operator==(const Proposal&) const = default;
};

// Search + propose for every living adult with a free slot. Output sorted by
// (proposer, target). Candidate sets come from per-agent streams keyed by
// (seed, step, id), so the parallel path is bit-identical to the serial one.
std::vector<Proposal> propose_phase(const Population& pop, const MarketView& view,
                                    const InstitutionRules& rules, const ScenarioConfig& config,
                                    const StrategyParams& strategy,
                                    Execution exec = Execution::serial);

struct ScoredProposal {
  Proposal proposal;
  double utility_to_target = 0.0;
  double target_reservation = 0.0;
  double mutual = 0.0;
};

// Target-side utilities and reservations, sorted into acceptance order:
// descending mutual utility, ties by (proposer, target).
std::vector<ScoredProposal> score_proposals(const std::vector<Proposal>& proposals,
                                            const Population& pop, const MarketView& view,
                                            const ScenarioConfig& config,
                                            const StrategyParams& strategy);

// Greedy acceptance rounds until a full pass accepts nothing. Returns the ids
// of relationships formed.
std::vector<RelId> match_phase(const std::vector<Proposal>& proposals, Population& pop,
                               const MarketView& view, const InstitutionRules& rules,
                               const ScenarioConfig& config, const StrategyParams& strategy);

}  // namespace sps
