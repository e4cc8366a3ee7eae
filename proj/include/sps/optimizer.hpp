#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sps/config.hpp"
#include "sps/metrics.hpp"
#include "sps/parallel.hpp"

namespace sps {

// Institution parameters searched by the GA.
struct PolicyGenome {
  int spouse_cap = 1;
  int companion_cap = 2;
  double rearing_subsidy = 0.8;
  double motherhood_penalty_rate = 0.02;
  double divorce_hazard = 0.02;
  std::optional<double> fitness;

  static constexpr int kSpouseMax = 2;
  static constexpr int kCompanionMax = 4;
  static constexpr double kSubsidyMax = 1.0;
  static constexpr double kPenaltyMax = 0.2;
  static constexpr double kDivorceMax = 0.1;
  static constexpr int kGeneCount = 5;

  static PolicyGenome from_rules(const InstitutionRules& rules);
  // Copies the genes onto `base`; total_cap becomes spouse_cap + companion_cap.
  InstitutionRules apply(InstitutionRules base) const;
  bool in_bounds() const noexcept;

  // Gene i as a real and its range width, in declaration order.
  double gene(int i) const noexcept;
  static double gene_range(int i) noexcept;

  bool same_genes(const PolicyGenome& o) const noexcept;
};

struct FitnessWeights {
  double w1 = 1.0;  // TFR
  double w2 = 1.0;  // mean welfare / 10
  double w3 = 1.0;  // 1 - unpartnered male fraction
  double w4 = 1.0;  // wealth Gini (subtracted)

  void validate() const;
};

struct GaParams {
  int pop_size = 24;
  int generations = 40;
  int tournament_k = 3;
  double crossover_rate = 0.9;
  double mutation_rate = 0.2;

  void validate() const;
};

// Weighted policy fitness over the trailing `window` frames of one run:
// w1 TFR + w2 welfare/10 + w3 (1 - unpartnered male share) - w4 Gini.
double fitness_from_frames(std::span<const MetricsFrame> frames, const FitnessWeights& w,
                           int window = 10);

// Mean fitness over seeds with the genome applied to `config`. Failures are
// rethrown as EvaluationError carrying the seed.
double evaluate(const PolicyGenome& genome, const FitnessWeights& weights,
                const std::vector<std::uint64_t>& seeds, const ScenarioConfig& config,
                Execution exec = Execution::serial);

PolicyGenome random_genome(Rng& rng);

// Next generation: the best genome (lowest index on ties) is copied first
// with its fitness; every other child i uses the stream (seed, generation, i)
// for tournament selection, uniform crossover and mutation. Requires all
// genomes evaluated.
std::vector<PolicyGenome> ga_step(const std::vector<PolicyGenome>& population,
                                  const GaParams& params, std::uint64_t seed, int generation);

struct GaLogRow {
  int generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  PolicyGenome best;
};

struct GaResult {
  PolicyGenome best;
  std::vector<GaLogRow> log;
  int evaluations = 0;
};

using GenomeFitness = std::function<double(const PolicyGenome&)>;

// Evaluates unscored genomes (concurrently under Execution::parallel; a
// genome identical to one already scored reuses that score) and evolves for
// params.generations steps.
GaResult run_ga(const GenomeFitness& fitness, const GaParams& params, std::uint64_t seed,
                Execution exec = Execution::serial,
                std::vector<PolicyGenome> initial = {});

// GA against the simulator. Each genome is scored on `seeds_per_eval` seeds
// derived from `seed`; the same seeds serve every genome.
GaResult optimize(const ScenarioConfig& config, const FitnessWeights& weights,
                  const GaParams& params, std::uint64_t seed, int seeds_per_eval = 3,
                  Execution exec = Execution::serial);

std::vector<std::uint64_t> evaluation_seeds(std::uint64_t seed, int count);

std::string optimizer_log_csv(const std::vector<GaLogRow>& log);

}  // namespace sps
