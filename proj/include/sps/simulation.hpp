#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sps/config.hpp"
#include "sps/metrics.hpp"
#include "sps/network.hpp"
#include "sps/parallel.hpp"
#include "sps/population.hpp"
#include "sps/strategy.hpp"

namespace sps {

struct RunOptions {
  Execution exec = Execution::serial;  // inner kernels (search, graph metrics)
  int sigma_samples = 10;              // null graphs for the final small-world sigma; 0 skips it
};

struct GraphSummary {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t max_degree = 0;
  double clustering = 0.0;
  PathLengthResult path;
  SigmaResult sigma;
  CrossTierStats cross_tier;
};

GraphSummary summarize_graph(const MatingGraph& g, std::uint64_t seed, int sigma_samples,
                             Execution exec = Execution::serial);

struct RunRecord {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string institution;
  std::uint64_t initial_state_hash = 0;
  std::vector<MetricsFrame> frames;

  int ir_violations = 0;
  int envy_count = 0;
  std::vector<double> final_welfare_male;
  std::vector<double> final_welfare_female;
  GraphSummary graph;
  std::string edge_list;

  WealthLedger ledger;
  double final_total_wealth = 0.0;
  double max_ledger_gap = 0.0;          // worst |total - ledger| seen after any step
  double max_settlement_error = 0.0;    // worst |sum(amounts) - total| over estates
  int settlements = 0;
  std::array<int, 4> estate_routes{};  // children, spouse, pool, unclaimed
  int a_tier_estates = 0;
  double a_tier_heirs_mean = 0.0;  // heirs per settled A-tier estate
  StrategyParams strategy;              // parameters in force during the run
  std::vector<AdaptAuditEntry> adaptation_log;

  double wall_seconds = 0.0;  // in memory only; never serialized

  AuditInput audit_input() const;
};

// Order-sensitive hash of the agents' initial attributes.
std::uint64_t population_hash(const Population& pop);

// Stepwise driver. Each step runs: tier reassignment, maintenance, search and
// proposals, matching, reproduction, the annual update, metrics and a full
// invariant scan (InvariantError on breach).
class Simulation {
 public:
  Simulation(const ScenarioConfig& config, std::uint64_t seed, RunOptions options = {});
  Simulation(const ScenarioConfig& config, std::uint64_t seed, const StrategyParams& strategy,
             RunOptions options = {});

  const MetricsFrame& step();
  void run_to(int step);

  const Population& population() const noexcept { return pop_; }
  const std::vector<MetricsFrame>& frames() const noexcept { return frames_; }
  const FertilityLedger& fertility() const noexcept { return fertility_; }
  const ScenarioConfig& config() const noexcept { return config_; }
  const StrategyParams& strategy() const noexcept { return strategy_; }
  std::uint64_t initial_state_hash() const noexcept { return initial_hash_; }

  // Final audit values and graph summary.
  RunRecord record() const;

 private:
  ScenarioConfig config_;
  StrategyParams strategy_;
  RunOptions options_;
  Population pop_;
  FertilityLedger fertility_;
  std::vector<MetricsFrame> frames_;
  std::uint64_t initial_hash_ = 0;
  double max_ledger_gap_ = 0.0;
  double max_settlement_error_ = 0.0;
  int settlements_ = 0;
  std::array<int, 4> estate_routes_{};
  int a_tier_estates_ = 0;
  long long a_tier_heirs_ = 0;
};

// Runs config.horizon steps. When config.adapt_iterations > 0 the strategy
// parameters are first trained on episodes with seeds derived from `seed`.
RunRecord run(const ScenarioConfig& config, std::uint64_t seed, const RunOptions& options = {});

// Per-cell discounted rewards of one episode under `strategy`. W is the cell mean
// welfare, F the cell's births per adult, S one minus the unpartnered male
// fraction (shared by all cells).
CellRewards simulate_cell_rewards(const ScenarioConfig& config, const StrategyParams& strategy,
                                  std::uint64_t seed, int steps);

struct AdaptationResult {
  StrategyParams params;
  std::vector<AdaptAuditEntry> log;
  int accepted_moves = 0;
};

// Hill-climbing on the cell strategies. Each iteration averages rewards over
// `episodes` evaluation runs of `steps` steps.
AdaptationResult train_strategies(const ScenarioConfig& config, std::uint64_t seed, int iterations,
                                  int episodes, int steps, Execution exec = Execution::serial);

struct GenerationMark {
  int step = 0;
  double gini_sps = 0.0;
  double gini_monogamy = 0.0;
};

struct SeedComparison {
  std::uint64_t seed = 0;
  std::array<double, kCellCount> welfare_sps{};
  std::array<double, kCellCount> welfare_monogamy{};
  std::array<double, kCellCount> welfare_delta{};
  std::array<double, kCellCount> relative_gain{};
  double mean_welfare_sps = 0.0;
  double mean_welfare_monogamy = 0.0;
  double mean_welfare_delta = 0.0;
  double tfr_sps = 0.0;
  double tfr_monogamy = 0.0;
  double tfr_delta = 0.0;
  double unpartnered_sps = 0.0;
  double unpartnered_monogamy = 0.0;
  bool stability_flag_sps = false;
  bool stability_flag_monogamy = false;
  std::vector<GenerationMark> gini_marks;
  FairnessReport fairness;

  int largest_relative_gain_cell() const;
};

// Deltas of run `a` (the SPS side) against run `b` over trailing windows.
SeedComparison compare_runs(const RunRecord& a, const RunRecord& b, const MetricsParams& metrics);

struct ComparisonReport {
  std::vector<SeedComparison> seeds;
  std::vector<RunRecord> sps_runs;
  std::vector<RunRecord> monogamy_runs;
};

// Paired SPS and monogamy runs per seed from identical initial populations.
// Runs execute concurrently under Execution::parallel.
ComparisonReport compare(const ScenarioConfig& config, const std::vector<std::uint64_t>& seeds,
                         Execution exec = Execution::serial);

// Independent runs, one per seed; the serial path is the reference.
std::vector<RunRecord> run_batch(const ScenarioConfig& config,
                                 const std::vector<std::uint64_t>& seeds, Execution exec);

}  // namespace sps
