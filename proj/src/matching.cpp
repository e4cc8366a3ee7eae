#include "sps/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sps/rules.hpp"

namespace sps {

MarketView make_market_view(const Population& pop) {
  MarketView view;
  view.resource_rank.assign(pop.agents.size(), 0.0);
  const std::vector<AgentId> living = pop.living();
  std::vector<double> r(living.size());
  for (std::size_t i = 0; i < living.size(); ++i) r[i] = pop.agents[living[i]].attrs.resources;
  const std::vector<double> rank = rank_normalize(r);
  for (std::size_t i = 0; i < living.size(); ++i) view.resource_rank[living[i]] = rank[i];
  view.adults = pop.living_adults();
  return view;
}

double utility(const Agent& candidate, const PreferenceWeights& w, double candidate_resource_rank,
               bool novel) noexcept {
  const auto& a = candidate.attrs;
  double u = w.mate_value * a.mate_value + w.resources * candidate_resource_rank +
             w.fertility * a.fertility + w.social_capital * a.social_capital;
  if (novel) u += w.novelty * a.mate_value;
  return std::clamp(u, 0.0, 1.0);
}

double utility(const Population& pop, const MarketView& view, const ScenarioConfig& config,
               AgentId observer, AgentId candidate) {
  const Agent& obs = pop.agents[observer];
  const Agent& cand = pop.agents[candidate];
  const bool novel = !pop.related(observer, candidate) &&
                     std::find(obs.former_partners.begin(), obs.former_partners.end(), candidate) ==
                         obs.former_partners.end();
  return utility(cand, config.preferences(obs.gender()), view.resource_rank[candidate], novel);
}

bool searchable(const Population& pop, AgentId agent, AgentId candidate) {
  if (agent == candidate) return false;
  const Agent& x = pop.agents[agent];
  const Agent& y = pop.agents[candidate];
  if (!y.is_adult()) return false;
  if (x.gender() == y.gender() && !(x.same_gender_open && y.same_gender_open)) return false;
  if (x.mother == y.id || x.father == y.id || y.mother == x.id || y.father == x.id) return false;
  return !pop.related(agent, candidate);
}

std::vector<AgentId> candidate_set(const Population& pop, const MarketView& view, AgentId agent,
                                   int k, Rng& rng, const MatchingParams& params) {
  std::vector<AgentId> out;
  if (k <= 0) return out;
  const double s0 = pop.agents[agent].attrs.social_capital;
  auto weight = [&](AgentId c) {
    return std::exp(-std::abs(pop.agents[c].attrs.social_capital - s0) / params.locality_bandwidth);
  };
  const auto& pool = view.adults;

  if (static_cast<int>(pool.size()) <= params.exact_sampling_limit) {
    // Exponential keys: the top-k of log(u)/w is a weighted sample without
    // replacement (successive sampling law).
    std::vector<std::pair<double, AgentId>> keyed;
    keyed.reserve(pool.size());
    for (AgentId c : pool) {
      const double u = uniform01(rng);
      if (!searchable(pop, agent, c)) continue;
      const double key = std::log(std::max(u, std::numeric_limits<double>::min())) / weight(c);
      keyed.emplace_back(key, c);
    }
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), keyed.size());
    std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(take), keyed.end(),
                      [](const auto& x, const auto& y) {
                        if (x.first != y.first) return x.first > y.first;
                        return x.second < y.second;
                      });
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back(keyed[i].second);
    return out;
  }

  // Large pools: uniform proposal with acceptance probability w (w <= 1),
  // retrying on duplicates. Same law as the exact path.
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  const int max_attempts = 200 * k;
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(out.size()) < k; ++attempt) {
    const AgentId c = pool[pick(rng)];
    const double u = uniform01(rng);
    if (u >= weight(c)) continue;
    if (!searchable(pop, agent, c)) continue;
    if (std::find(out.begin(), out.end(), c) != out.end()) continue;
    out.push_back(c);
  }
  return out;
}

namespace {

std::vector<Proposal> proposals_for(const Population& pop, const MarketView& view,
                                    const InstitutionRules& rules, const ScenarioConfig& config,
                                    const StrategyParams& strategy, AgentId id) {
  std::vector<Proposal> out;
  const Agent& self = pop.agents[id];
  if (!self.is_adult() || !has_any_free_slot(self, rules)) return out;
  const StrategyCell& cell = strategy.cell(self.tier, self.gender());
  if (cell.proposal_budget <= 0) return out;

  Rng rng = make_stream(pop.seed, Stream::search, static_cast<std::uint64_t>(pop.step), id);
  const auto candidates = candidate_set(pop, view, id, config.matching.candidates, rng, config.matching);
  const double spouse_res = cell.reservation;
  const double companion_res = cell.companion_reservation();
  for (AgentId c : candidates) {
    const double u = utility(pop, view, config, id, c);
    if (u >= spouse_res && may_form(pop, id, c, RelKind::spouse, rules)) {
      out.push_back({id, c, RelKind::spouse, u, spouse_res});
    } else if (u >= companion_res && may_form(pop, id, c, RelKind::companion, rules)) {
      out.push_back({id, c, RelKind::companion, u, companion_res});
    }
  }
  std::sort(out.begin(), out.end(), [](const Proposal& x, const Proposal& y) {
    if (x.utility_to_proposer != y.utility_to_proposer) {
      return x.utility_to_proposer > y.utility_to_proposer;
    }
    return x.target < y.target;
  });
  if (static_cast<int>(out.size()) > cell.proposal_budget) out.resize(cell.proposal_budget);
  std::sort(out.begin(), out.end(),
            [](const Proposal& x, const Proposal& y) { return x.target < y.target; });
  return out;
}

}  // namespace

std::vector<Proposal> propose_phase(const Population& pop, const MarketView& view,
                                    const InstitutionRules& rules, const ScenarioConfig& config,
                                    const StrategyParams& strategy, Execution exec) {
  const auto& adults = view.adults;
  std::vector<std::vector<Proposal>> per_agent(adults.size());
  for_each_index(adults.size(), exec, [&](std::size_t i) {
    per_agent[i] = proposals_for(pop, view, rules, config, strategy, adults[i]);
  });
  std::vector<Proposal> out;
  for (auto& list : per_agent) out.insert(out.end(), list.begin(), list.end());
  return out;
}

std::vector<ScoredProposal> score_proposals(const std::vector<Proposal>& proposals,
                                            const Population& pop, const MarketView& view,
                                            const ScenarioConfig& config,
                                            const StrategyParams& strategy) {
  std::vector<ScoredProposal> scored;
  scored.reserve(proposals.size());
  for (const Proposal& p : proposals) {
    ScoredProposal s;
    s.proposal = p;
    s.utility_to_target = utility(pop, view, config, p.target, p.proposer);
    const Agent& target = pop.agents[p.target];
    s.target_reservation = strategy.cell(target.tier, target.gender()).reservation_for(p.kind);
    s.mutual = std::min(p.utility_to_proposer, s.utility_to_target);
    scored.push_back(s);
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredProposal& x, const ScoredProposal& y) {
    if (x.mutual != y.mutual) return x.mutual > y.mutual;
    if (x.proposal.proposer != y.proposal.proposer) return x.proposal.proposer < y.proposal.proposer;
    return x.proposal.target < y.proposal.target;
  });
  return scored;
}

std::vector<RelId> match_phase(const std::vector<Proposal>& proposals, Population& pop,
                               const MarketView& view, const InstitutionRules& rules,
                               const ScenarioConfig& config, const StrategyParams& strategy) {
  const auto scored = score_proposals(proposals, pop, view, config, strategy);
  std::vector<bool> done(scored.size(), false);
  std::vector<RelId> formed;
  bool accepted = true;
  while (accepted) {
    accepted = false;
    for (std::size_t i = 0; i < scored.size(); ++i) {
      if (done[i]) continue;
      const ScoredProposal& s = scored[i];
      const Proposal& p = s.proposal;
      if (s.utility_to_target < s.target_reservation) continue;
      if (!may_form(pop, p.proposer, p.target, p.kind, rules)) continue;
      formed.push_back(form_relationship(pop, p.kind, p.proposer, p.target, p.utility_to_proposer,
                                         s.utility_to_target, p.proposer_reservation,
                                         s.target_reservation));
      done[i] = true;
      accepted = true;
    }
  }
  return formed;
}

}  // namespace sps
