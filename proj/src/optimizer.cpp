#include "sps/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "sps/errors.hpp"
#include "sps/rng.hpp"
#include "sps/simulation.hpp"

namespace sps {

PolicyGenome PolicyGenome::from_rules(const InstitutionRules& rules) {
  PolicyGenome g;
  g.spouse_cap = rules.spouse_cap;
  g.companion_cap = rules.companion_cap;
  g.rearing_subsidy = rules.rearing_subsidy;
  g.motherhood_penalty_rate = rules.motherhood_penalty_rate;
  g.divorce_hazard = rules.divorce_hazard;
  return g;
}

InstitutionRules PolicyGenome::apply(InstitutionRules base) const {
  base.spouse_cap = spouse_cap;
  base.companion_cap = companion_cap;
  base.total_cap = spouse_cap + companion_cap;
  base.rearing_subsidy = rearing_subsidy;
  base.motherhood_penalty_rate = motherhood_penalty_rate;
  base.divorce_hazard = divorce_hazard;
  return base;
}

bool PolicyGenome::in_bounds() const noexcept {
  return spouse_cap >= 0 && spouse_cap <= kSpouseMax && companion_cap >= 0 &&
         companion_cap <= kCompanionMax && rearing_subsidy >= 0.0 &&
         rearing_subsidy <= kSubsidyMax && motherhood_penalty_rate >= 0.0 &&
         motherhood_penalty_rate <= kPenaltyMax && divorce_hazard >= 0.0 &&
         divorce_hazard <= kDivorceMax;
}

double PolicyGenome::gene(int i) const noexcept {
  switch (i) {
    case 0: return spouse_cap;
    case 1: return companion_cap;
    case 2: return rearing_subsidy;
    case 3: return motherhood_penalty_rate;
    default: return divorce_hazard;
  }
}

double PolicyGenome::gene_range(int i) noexcept {
  switch (i) {
    case 0: return kSpouseMax;
    case 1: return kCompanionMax;
    case 2: return kSubsidyMax;
    case 3: return kPenaltyMax;
    default: return kDivorceMax;
  }
}

bool PolicyGenome::same_genes(const PolicyGenome& o) const noexcept {
  for (int i = 0; i < kGeneCount; ++i) {
    if (gene(i) != o.gene(i)) return false;
  }
  return true;
}

void FitnessWeights::validate() const {
  for (double w : {w1, w2, w3, w4}) {
    if (!std::isfinite(w) || w < 0.0) throw ConfigError("fitness", "weights must be finite and >= 0");
  }
  if (w1 == 0.0 && w2 == 0.0 && w3 == 0.0 && w4 == 0.0) {
    throw ConfigError("fitness", "weights must not all be zero");
  }
}

void GaParams::validate() const {
  if (pop_size < 2) throw ConfigError("ga.pop_size", "must be >= 2");
  if (generations < 0) throw ConfigError("ga.generations", "must be >= 0");
  if (tournament_k < 1) throw ConfigError("ga.tournament_k", "must be >= 1");
  if (crossover_rate < 0.0 || crossover_rate > 1.0) throw ConfigError("ga.crossover_rate", "must lie in [0,1]");
  if (mutation_rate < 0.0 || mutation_rate > 1.0) throw ConfigError("ga.mutation_rate", "must lie in [0,1]");
}

double fitness_from_frames(std::span<const MetricsFrame> frames, const FitnessWeights& w,
                           int window) {
  const MetricsFrame m = window_mean(frames, window);
  return w.w1 * m.tfr + w.w2 * m.mean_welfare / 10.0 + w.w3 * (1.0 - m.unpartnered_male_frac) -
         w.w4 * m.gini_wealth;
}

double evaluate(const PolicyGenome& genome, const FitnessWeights& weights,
                const std::vector<std::uint64_t>& seeds, const ScenarioConfig& config,
                Execution exec) {
  if (seeds.empty()) throw std::invalid_argument("evaluate needs at least one seed");
  ScenarioConfig c = config;
  c.rules = genome.apply(config.rules);
  c.preset = Preset::custom;
  std::vector<double> scores(seeds.size(), 0.0);
  for_each_index(seeds.size(), exec, [&](std::size_t i) {
    try {
      Simulation sim(c, seeds[i], RunOptions{Execution::serial, 0});
      sim.run_to(c.horizon);
      scores[i] = fitness_from_frames(sim.frames(), weights);
    } catch (const std::exception& e) {
      throw EvaluationError(seeds[i], e.what());
    }
  });
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(seeds.size());
}

PolicyGenome random_genome(Rng& rng) {
  PolicyGenome g;
  g.spouse_cap = std::uniform_int_distribution<int>(0, PolicyGenome::kSpouseMax)(rng);
  g.companion_cap = std::uniform_int_distribution<int>(0, PolicyGenome::kCompanionMax)(rng);
  g.rearing_subsidy = uniform01(rng) * PolicyGenome::kSubsidyMax;
  g.motherhood_penalty_rate = uniform01(rng) * PolicyGenome::kPenaltyMax;
  g.divorce_hazard = uniform01(rng) * PolicyGenome::kDivorceMax;
  return g;
}

namespace {

std::size_t best_index(const std::vector<PolicyGenome>& pop) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pop.size(); ++i) {
    if (*pop[i].fitness > *pop[best].fitness) best = i;
  }
  return best;
}

const PolicyGenome& tournament(const std::vector<PolicyGenome>& pop, int k, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
  std::size_t winner = pick(rng);
  for (int i = 1; i < k; ++i) {
    const std::size_t c = pick(rng);
    const double fc = *pop[c].fitness;
    const double fw = *pop[winner].fitness;
    if (fc > fw || (fc == fw && c < winner)) winner = c;
  }
  return pop[winner];
}

int mutate_int(int v, int hi, Rng& rng) {
  return std::clamp(v + (uniform01(rng) < 0.5 ? -1 : 1), 0, hi);
}

double mutate_real(double v, double hi, Rng& rng) {
  std::normal_distribution<double> step(0.0, 0.1 * hi);
  return std::clamp(v + step(rng), 0.0, hi);
}

}  // namespace

std::vector<PolicyGenome> ga_step(const std::vector<PolicyGenome>& population,
                                  const GaParams& params, std::uint64_t seed, int generation) {
  params.validate();
  if (population.size() < 2) throw std::invalid_argument("GA population needs >= 2 genomes");
  for (const PolicyGenome& g : population) {
    if (!g.fitness) throw std::invalid_argument("GA population contains unevaluated genomes");
  }
  std::vector<PolicyGenome> next;
  next.reserve(static_cast<std::size_t>(params.pop_size));
  next.push_back(population[best_index(population)]);
  for (int i = 1; i < params.pop_size; ++i) {
    Rng rng = make_stream(seed, Stream::optimizer, static_cast<std::uint64_t>(generation),
                          static_cast<std::uint64_t>(i));
    const PolicyGenome& p1 = tournament(population, params.tournament_k, rng);
    const PolicyGenome& p2 = tournament(population, params.tournament_k, rng);
    PolicyGenome child = p1;
    if (uniform01(rng) < params.crossover_rate) {
      if (uniform01(rng) < 0.5) child.spouse_cap = p2.spouse_cap;
      if (uniform01(rng) < 0.5) child.companion_cap = p2.companion_cap;
      if (uniform01(rng) < 0.5) child.rearing_subsidy = p2.rearing_subsidy;
      if (uniform01(rng) < 0.5) child.motherhood_penalty_rate = p2.motherhood_penalty_rate;
      if (uniform01(rng) < 0.5) child.divorce_hazard = p2.divorce_hazard;
    }
    if (uniform01(rng) < params.mutation_rate) {
      child.spouse_cap = mutate_int(child.spouse_cap, PolicyGenome::kSpouseMax, rng);
    }
    if (uniform01(rng) < params.mutation_rate) {
      child.companion_cap = mutate_int(child.companion_cap, PolicyGenome::kCompanionMax, rng);
    }
    if (uniform01(rng) < params.mutation_rate) {
      child.rearing_subsidy = mutate_real(child.rearing_subsidy, PolicyGenome::kSubsidyMax, rng);
    }
    if (uniform01(rng) < params.mutation_rate) {
      child.motherhood_penalty_rate =
          mutate_real(child.motherhood_penalty_rate, PolicyGenome::kPenaltyMax, rng);
    }
    if (uniform01(rng) < params.mutation_rate) {
      child.divorce_hazard = mutate_real(child.divorce_hazard, PolicyGenome::kDivorceMax, rng);
    }
    if (!child.same_genes(p1)) child.fitness.reset();
    next.push_back(child);
  }
  return next;
}

namespace {

using GeneKey = std::tuple<int, int, double, double, double>;

GeneKey key_of(const PolicyGenome& g) {
  return {g.spouse_cap, g.companion_cap, g.rearing_subsidy, g.motherhood_penalty_rate,
          g.divorce_hazard};
}

void score(std::vector<PolicyGenome>& pop, const GenomeFitness& fitness, Execution exec,
           std::map<GeneKey, double>& cache, int& evaluations) {
  std::vector<std::size_t> todo;
  std::map<GeneKey, std::size_t> first;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (pop[i].fitness) continue;
    const auto it = cache.find(key_of(pop[i]));
    if (it != cache.end()) {
      pop[i].fitness = it->second;
    } else if (first.emplace(key_of(pop[i]), i).second) {
      todo.push_back(i);
    }
  }
  std::vector<double> values(todo.size(), 0.0);
  for_each_index(todo.size(), exec, [&](std::size_t j) { values[j] = fitness(pop[todo[j]]); });
  for (std::size_t j = 0; j < todo.size(); ++j) cache[key_of(pop[todo[j]])] = values[j];
  evaluations += static_cast<int>(todo.size());
  for (PolicyGenome& g : pop) {
    if (!g.fitness) g.fitness = cache.at(key_of(g));
  }
}

GaLogRow log_row(int generation, const std::vector<PolicyGenome>& pop) {
  GaLogRow row;
  row.generation = generation;
  const PolicyGenome& best = pop[best_index(pop)];
  row.best = best;
  row.best_fitness = *best.fitness;
  double sum = 0.0;
  for (const PolicyGenome& g : pop) sum += *g.fitness;
  row.mean_fitness = sum / static_cast<double>(pop.size());
  return row;
}

}  // namespace

GaResult run_ga(const GenomeFitness& fitness, const GaParams& params, std::uint64_t seed,
                Execution exec, std::vector<PolicyGenome> initial) {
  params.validate();
  std::vector<PolicyGenome> pop = std::move(initial);
  Rng init = make_stream(seed, Stream::optimizer, 0xffffffffULL);
  while (static_cast<int>(pop.size()) < params.pop_size) pop.push_back(random_genome(init));
  pop.resize(static_cast<std::size_t>(params.pop_size));
  for (const PolicyGenome& g : pop) {
    if (!g.in_bounds()) throw std::invalid_argument("initial genome out of bounds");
  }

  GaResult result;
  std::map<GeneKey, double> cache;
  score(pop, fitness, exec, cache, result.evaluations);
  result.log.push_back(log_row(0, pop));
  for (int gen = 1; gen <= params.generations; ++gen) {
    pop = ga_step(pop, params, seed, gen);
    score(pop, fitness, exec, cache, result.evaluations);
    result.log.push_back(log_row(gen, pop));
  }
  result.best = result.log.back().best;
  return result;
}

std::vector<std::uint64_t> evaluation_seeds(std::uint64_t seed, int count) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(mix_seed(seed, static_cast<std::uint64_t>(Stream::optimizer), 0xe1ULL,
                           static_cast<std::uint64_t>(i)));
  }
  return out;
}

GaResult optimize(const ScenarioConfig& config, const FitnessWeights& weights,
                  const GaParams& params, std::uint64_t seed, int seeds_per_eval, Execution exec) {
  weights.validate();
  config.validate();
  if (seeds_per_eval < 1) throw ConfigError("seeds_per_eval", "must be >= 1");
  const auto seeds = evaluation_seeds(seed, seeds_per_eval);
  const GenomeFitness fitness = [&](const PolicyGenome& g) {
    return evaluate(g, weights, seeds, config, Execution::serial);
  };
  return run_ga(fitness, params, seed, exec);
}

std::string optimizer_log_csv(const std::vector<GaLogRow>& log) {
  std::string out =
      "generation,best_fitness,mean_fitness,spouse_cap,companion_cap,rearing_subsidy,"
      "motherhood_penalty_rate,divorce_hazard\n";
  for (const GaLogRow& r : log) {
    out += fmt::format("{},{:.12g},{:.12g},{},{},{:.12g},{:.12g},{:.12g}\n", r.generation,
                       r.best_fitness, r.mean_fitness, r.best.spouse_cap, r.best.companion_cap,
                       r.best.rearing_subsidy, r.best.motherhood_penalty_rate,
                       r.best.divorce_hazard);
  }
  return out;
}

}  // namespace sps
