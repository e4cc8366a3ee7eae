#include "sps/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>

#include "sps/errors.hpp"
#include "sps/io.hpp"
#include "sps/lifecycle.hpp"
#include "sps/matching.hpp"
#include "sps/rng.hpp"

namespace sps {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void hash_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

template <class T>
void hash_value(std::uint64_t& h, const T& v) {
  hash_bytes(h, &v, sizeof(T));
}

double ledger_gap(const Population& pop) {
  return std::abs(pop.total_wealth() - pop.ledger.expected_total());
}

}  // namespace

std::uint64_t population_hash(const Population& pop) {
  std::uint64_t h = kFnvOffset;
  for (const Agent& a : pop.agents) {
    hash_value(h, a.id);
    hash_value(h, a.age);
    hash_value(h, a.attrs.mate_value);
    hash_value(h, a.attrs.resources);
    hash_value(h, a.attrs.fertility);
    hash_value(h, a.attrs.social_capital);
    hash_value(h, a.attrs.gender);
    hash_value(h, a.fertility_trait);
    hash_value(h, a.same_gender_open);
    hash_value(h, a.alive);
  }
  return h;
}

GraphSummary summarize_graph(const MatingGraph& g, std::uint64_t seed, int sigma_samples,
                             Execution exec) {
  GraphSummary s;
  s.nodes = g.size();
  s.edges = g.edges().size();
  for (std::size_t v = 0; v < g.size(); ++v) s.max_degree = std::max(s.max_degree, g.degree(v));
  s.clustering = clustering_coefficient(g, exec);
  s.path = avg_path_length(g, exec);
  if (sigma_samples > 0) s.sigma = small_world_sigma(g, seed, sigma_samples, exec);
  s.cross_tier = cross_tier_stats(g);
  return s;
}

AuditInput RunRecord::audit_input() const {
  AuditInput in;
  in.seed = seed;
  in.initial_state_hash = initial_state_hash;
  in.frames = frames;
  in.ir_violations = ir_violations;
  in.envy_count = envy_count;
  in.final_welfare_male = final_welfare_male;
  in.final_welfare_female = final_welfare_female;
  return in;
}

Simulation::Simulation(const ScenarioConfig& config, std::uint64_t seed, RunOptions options)
    : Simulation(config, seed, config.strategy, options) {}

Simulation::Simulation(const ScenarioConfig& config, std::uint64_t seed,
                       const StrategyParams& strategy, RunOptions options)
    : config_(config), strategy_(strategy), options_(options) {
  config_.validate();
  if (!strategy_.in_range()) throw ConfigError("strategy", "parameters out of range");
  pop_ = init_population(config_, seed);
  initial_hash_ = population_hash(pop_);
}

const MetricsFrame& Simulation::step() {
  const InstitutionRules& rules = config_.rules;
  pop_.step += 1;
  reassign_tiers(pop_, config_.composite, config_.tier_shares);
  const MarketView view = make_market_view(pop_);
  maintenance_phase(pop_, view, rules, config_, strategy_);
  const auto proposals = propose_phase(pop_, view, rules, config_, strategy_, options_.exec);
  match_phase(proposals, pop_, view, rules, config_, strategy_);

  fertility_.record_population(pop_);
  const auto births = reproduce_phase(pop_, rules, config_, strategy_);
  for (const BirthEvent& b : births) fertility_.record_birth(pop_.step, pop_.agents[b.mother].age);

  const UpdateReport update = update_phase(pop_, rules, config_);
  for (const EstateSettlement& s : update.settlements) {
    ++settlements_;
    ++estate_routes_[static_cast<int>(s.route)];
    if (pop_.agents[s.decedent].tier == Tier::A) {
      ++a_tier_estates_;
      a_tier_heirs_ += static_cast<long long>(s.heirs.size());
    }
    if (s.route == EstateRoute::unclaimed) continue;
    double paid = 0.0;
    for (double x : s.amounts) paid += x;
    max_settlement_error_ = std::max(max_settlement_error_, std::abs(paid - s.total));
  }

  frames_.push_back(compute_frame(pop_, fertility_, births,
                                  static_cast<int>(update.deaths.size()), config_));
  for (const auto& [id, w] : adult_welfare(pop_)) pop_.agents[id].welfare_history.push_back(w);

  check_invariants(pop_, rules);
  const double gap = ledger_gap(pop_);
  max_ledger_gap_ = std::max(max_ledger_gap_, gap);
  if (gap > 1e-6 * std::max(1.0, std::abs(pop_.ledger.expected_total()))) {
    throw InvariantError("wealth.conservation", "ledger differs from holdings by " + std::to_string(gap));
  }
  return frames_.back();
}

void Simulation::run_to(int step) {
  while (pop_.step < step) this->step();
}

RunRecord Simulation::record() const {
  RunRecord r;
  r.config_hash = config_hash(config_);
  r.seed = pop_.seed;
  r.institution = std::string(to_string(config_.preset));
  r.initial_state_hash = initial_hash_;
  r.frames = frames_;
  r.ir_violations = individual_rationality_violations(pop_.relationships);
  r.envy_count = envy_count(pop_, config_, config_.metrics.envy_margin);
  for (const auto& [id, w] : adult_welfare(pop_)) {
    if (pop_.agents[id].gender() == Gender::male) {
      r.final_welfare_male.push_back(w);
    } else {
      r.final_welfare_female.push_back(w);
    }
  }
  const MatingGraph g = snapshot(pop_);
  r.graph = summarize_graph(g, pop_.seed, options_.sigma_samples, options_.exec);
  r.edge_list = edge_list(g);
  r.ledger = pop_.ledger;
  r.final_total_wealth = pop_.total_wealth();
  r.max_ledger_gap = max_ledger_gap_;
  r.max_settlement_error = max_settlement_error_;
  r.settlements = settlements_;
  r.estate_routes = estate_routes_;
  r.a_tier_estates = a_tier_estates_;
  r.a_tier_heirs_mean =
      a_tier_estates_ > 0 ? static_cast<double>(a_tier_heirs_) / a_tier_estates_ : 0.0;
  r.strategy = strategy_;
  return r;
}

RunRecord run(const ScenarioConfig& config, std::uint64_t seed, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  StrategyParams strategy = config.strategy;
  AdaptationResult adaptation;
  if (config.adapt_iterations > 0) {
    adaptation = train_strategies(config, seed, config.adapt_iterations, 1,
                                  std::min(config.horizon, 30), options.exec);
    strategy = adaptation.params;
  }
  Simulation sim(config, seed, strategy, options);
  sim.run_to(config.horizon);
  RunRecord r = sim.record();
  r.adaptation_log = std::move(adaptation.log);
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

CellRewards simulate_cell_rewards(const ScenarioConfig& config, const StrategyParams& strategy,
                                  std::uint64_t seed, int steps) {
  Simulation sim(config, seed, strategy, RunOptions{Execution::serial, 0});
  std::array<std::vector<RewardSample>, kCellCount> traces;
  for (int t = 0; t < steps; ++t) {
    const MetricsFrame& f = sim.step();
    for (int c = 0; c < kCellCount; ++c) {
      RewardSample s;
      s.welfare = f.welfare[c];
      s.fertility = f.adults[c] > 0 ? static_cast<double>(f.cell_births[c]) / f.adults[c] : 0.0;
      s.stability = 1.0 - f.unpartnered_male_frac;
      traces[c].push_back(s);
    }
  }
  CellRewards out{};
  for (int c = 0; c < kCellCount; ++c) out[c] = discounted_reward(traces[c], config.reward);
  return out;
}

AdaptationResult train_strategies(const ScenarioConfig& config, std::uint64_t seed, int iterations,
                                  int episodes, int steps, Execution exec) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  // Fixed evaluation seeds: every candidate is scored on the same episodes.
  std::vector<std::uint64_t> episode_seeds;
  for (int e = 0; e < episodes; ++e) {
    episode_seeds.push_back(mix_seed(seed, static_cast<std::uint64_t>(Stream::strategy),
                                     static_cast<std::uint64_t>(e)));
  }
  const CellRewardFn evaluate = [&](const StrategyParams& params) {
    std::vector<CellRewards> results(episode_seeds.size());
    for_each_index(episode_seeds.size(), exec, [&](std::size_t i) {
      results[i] = simulate_cell_rewards(config, params, episode_seeds[i], steps);
    });
    CellRewards mean{};
    for (const CellRewards& r : results) {
      for (int c = 0; c < kCellCount; ++c) mean[c] += r[c] / static_cast<double>(results.size());
    }
    return mean;
  };
  AdaptationState state = start_adaptation(config.strategy, evaluate);
  Rng rng = make_stream(seed, Stream::strategy, 1);
  for (int i = 0; i < iterations; ++i) adapt_strategies(state, evaluate, rng);
  return {state.params, state.log, state.accepted_moves};
}

int SeedComparison::largest_relative_gain_cell() const {
  return static_cast<int>(std::max_element(relative_gain.begin(), relative_gain.end()) -
                          relative_gain.begin());
}

SeedComparison compare_runs(const RunRecord& a, const RunRecord& b, const MetricsParams& metrics) {
  if (a.frames.empty() || b.frames.empty()) throw ComparabilityError("run has no frames");
  SeedComparison out;
  out.seed = a.seed;
  out.fairness = fairness_audit(a.audit_input(), b.audit_input(), metrics.summary_window);
  const MetricsFrame ma = window_mean(a.frames, metrics.summary_window);
  const MetricsFrame mb = window_mean(b.frames, metrics.summary_window);
  for (int c = 0; c < kCellCount; ++c) {
    out.welfare_sps[c] = ma.welfare[c];
    out.welfare_monogamy[c] = mb.welfare[c];
    out.welfare_delta[c] = ma.welfare[c] - mb.welfare[c];
    out.relative_gain[c] = out.welfare_delta[c] / std::max(std::abs(mb.welfare[c]), 1e-9);
  }
  out.mean_welfare_sps = ma.mean_welfare;
  out.mean_welfare_monogamy = mb.mean_welfare;
  out.mean_welfare_delta = ma.mean_welfare - mb.mean_welfare;
  out.tfr_sps = a.frames.back().tfr;
  out.tfr_monogamy = b.frames.back().tfr;
  out.tfr_delta = out.tfr_sps - out.tfr_monogamy;
  out.unpartnered_sps = ma.unpartnered_male_frac;
  out.unpartnered_monogamy = mb.unpartnered_male_frac;
  out.stability_flag_sps = ma.stability_flag;
  out.stability_flag_monogamy = mb.stability_flag;
  const std::size_t n = std::min(a.frames.size(), b.frames.size());
  for (std::size_t s = static_cast<std::size_t>(metrics.generation_length); s <= n;
       s += static_cast<std::size_t>(metrics.generation_length)) {
    out.gini_marks.push_back({static_cast<int>(s), a.frames[s - 1].gini_wealth,
                              b.frames[s - 1].gini_wealth});
  }
  return out;
}

ComparisonReport compare(const ScenarioConfig& config, const std::vector<std::uint64_t>& seeds,
                         Execution exec) {
  if (seeds.size() < 2) throw ConfigError("seeds", "compare needs at least 2 seeds");
  const ScenarioConfig sps_config = config.with_preset(Preset::sps);
  const ScenarioConfig mono_config = config.with_preset(Preset::monogamy);
  ComparisonReport report;
  report.sps_runs.resize(seeds.size());
  report.monogamy_runs.resize(seeds.size());
  for_each_index(seeds.size() * 2, exec, [&](std::size_t job) {
    const std::size_t i = job / 2;
    if (job % 2 == 0) {
      report.sps_runs[i] = run(sps_config, seeds[i]);
    } else {
      report.monogamy_runs[i] = run(mono_config, seeds[i]);
    }
  });
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    report.seeds.push_back(compare_runs(report.sps_runs[i], report.monogamy_runs[i], config.metrics));
  }
  return report;
}

std::vector<RunRecord> run_batch(const ScenarioConfig& config,
                                 const std::vector<std::uint64_t>& seeds, Execution exec) {
  std::vector<RunRecord> out(seeds.size());
  for_each_index(seeds.size(), exec, [&](std::size_t i) { out[i] = run(config, seeds[i]); });
  return out;
}

}  // namespace sps
