#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "sps/errors.hpp"
#include "sps/optimizer.hpp"
#include "sps/simulation.hpp"
#include "support.hpp"

namespace sps {
namespace {

PolicyGenome target_genome() {
  PolicyGenome g;
  g.spouse_cap = 1;
  g.companion_cap = 3;
  g.rearing_subsidy = 0.62;
  g.motherhood_penalty_rate = 0.05;
  g.divorce_hazard = 0.03;
  return g;
}

double quadratic(const PolicyGenome& g) {
  const PolicyGenome t = target_genome();
  double s = 0.0;
  for (int i = 0; i < PolicyGenome::kGeneCount; ++i) {
    const double d = (g.gene(i) - t.gene(i)) / PolicyGenome::gene_range(i);
    s += d * d;
  }
  return -s;
}

TEST(Ga, QuadraticOptimumFoundInEverySeed) {
  const PolicyGenome t = target_genome();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const GaResult r = run_ga(quadratic, GaParams{}, seed);
    ASSERT_EQ(r.log.size(), 41u);
    for (int i = 0; i < PolicyGenome::kGeneCount; ++i) {
      EXPECT_LE(std::abs(r.best.gene(i) - t.gene(i)), 0.05 * PolicyGenome::gene_range(i))
          << "seed " << seed << " gene " << i;
    }
  }
}

TEST(Ga, BestSoFarNeverDecreases) {
  for (std::uint64_t seed : {4u, 5u, 6u}) {
    const GaResult r = run_ga(quadratic, GaParams{}, seed);
    for (std::size_t i = 1; i < r.log.size(); ++i) {
      EXPECT_GE(r.log[i].best_fitness, r.log[i - 1].best_fitness);
    }
  }
}

std::vector<PolicyGenome> scored_population(std::uint64_t seed, int n) {
  Rng rng(seed);
  std::vector<PolicyGenome> pop;
  for (int i = 0; i < n; ++i) {
    PolicyGenome g = random_genome(rng);
    g.fitness = quadratic(g);
    pop.push_back(g);
  }
  return pop;
}

TEST(GaStep, OperatorsOffGiveParentsOnly) {
  const auto pop = scored_population(7, 24);
  GaParams p;
  p.crossover_rate = 0.0;
  p.mutation_rate = 0.0;
  const auto next = ga_step(pop, p, 7, 1);
  ASSERT_EQ(next.size(), 24u);
  for (const PolicyGenome& child : next) {
    EXPECT_TRUE(std::any_of(pop.begin(), pop.end(),
                            [&](const PolicyGenome& g) { return g.same_genes(child); }));
    EXPECT_TRUE(child.fitness.has_value());
  }
}

TEST(GaStep, DominantGenomeSurvives) {
  auto pop = scored_population(8, 24);
  pop[13].fitness = 1e9;
  GaParams p;
  p.mutation_rate = 1.0;
  const auto next = ga_step(pop, p, 8, 1);
  EXPECT_TRUE(next.front().same_genes(pop[13]));
  EXPECT_EQ(next.front().fitness, 1e9);
}

TEST(GaStep, BoundsHoldUnderHeavyMutation) {
  auto pop = scored_population(9, 24);
  GaParams p;
  p.mutation_rate = 1.0;
  for (int gen = 1; gen <= 50; ++gen) {
    pop = ga_step(pop, p, 9, gen);
    for (PolicyGenome& g : pop) {
      ASSERT_TRUE(g.in_bounds());
      if (!g.fitness) g.fitness = quadratic(g);
    }
  }
}

TEST(GaStep, RequiresEvaluatedGenomes) {
  auto pop = scored_population(10, 4);
  pop[2].fitness.reset();
  EXPECT_THROW(ga_step(pop, GaParams{}, 1, 1), std::invalid_argument);
}

TEST(GaStep, SameStreamsSameGeneration) {
  const auto pop = scored_population(11, 24);
  const auto a = ga_step(pop, GaParams{}, 11, 3);
  const auto b = ga_step(pop, GaParams{}, 11, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a[i].same_genes(b[i]));
}

TEST(Ga, ParallelScoringMatchesSerial) {
  GaParams p;
  p.generations = 10;
  const auto a = run_ga(quadratic, p, 12, Execution::serial);
  const auto b = run_ga(quadratic, p, 12, Execution::parallel);
  EXPECT_TRUE(a.best.same_genes(b.best));
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(Genome, ApplySetsTotalCap) {
  PolicyGenome g = target_genome();
  const InstitutionRules r = g.apply(InstitutionRules::sps());
  EXPECT_EQ(r.total_cap, 4);
  EXPECT_EQ(PolicyGenome::from_rules(InstitutionRules::monogamy()).companion_cap, 0);
  g.divorce_hazard = 0.2;
  EXPECT_FALSE(g.in_bounds());
}

TEST(Fitness, GiniOnlyWeights) {
  std::vector<MetricsFrame> frames(12);
  for (int i = 0; i < 12; ++i) {
    frames[i].gini_wealth = 0.3 + 0.01 * i;
    frames[i].tfr = 2.0;
    frames[i].mean_welfare = 5.0;
  }
  const FitnessWeights w{0.0, 0.0, 0.0, 1.0};
  double mean = 0.0;
  for (int i = 2; i < 12; ++i) mean += frames[i].gini_wealth;
  EXPECT_NEAR(fitness_from_frames(frames, w), -mean / 10.0, 1e-15);
}

TEST(Fitness, DefaultWeightsSumTerms) {
  MetricsFrame f;
  f.tfr = 1.8;
  f.mean_welfare = 4.0;
  f.unpartnered_male_frac = 0.1;
  f.gini_wealth = 0.4;
  const std::vector<MetricsFrame> frames{f};
  EXPECT_NEAR(fitness_from_frames(frames, FitnessWeights{}), 1.8 + 0.4 + 0.9 - 0.4, 1e-15);
}

TEST(Fitness, AllZeroWeightsRejected) {
  EXPECT_THROW((FitnessWeights{0, 0, 0, 0}.validate()), ConfigError);
  EXPECT_THROW((FitnessWeights{-1, 1, 1, 1}.validate()), ConfigError);
}

TEST(Evaluate, DeterministicAndWrapsFailures) {
  ScenarioConfig c = testing::small_config(200, 12);
  const auto g = PolicyGenome::from_rules(InstitutionRules::sps());
  EXPECT_EQ(evaluate(g, FitnessWeights{}, {1, 2}, c), evaluate(g, FitnessWeights{}, {1, 2}, c));
  EXPECT_EQ(evaluate(g, FitnessWeights{}, {1, 2}, c),
            evaluate(g, FitnessWeights{}, {1, 2}, c, Execution::parallel));
  c.population_size = 1;
  try {
    evaluate(g, FitnessWeights{}, {77}, c);
    FAIL();
  } catch (const EvaluationError& e) {
    EXPECT_EQ(e.seed(), 77u);
  }
}

TEST(Evaluate, SpsGenomeBeatsMonogamyGenome) {
  const ScenarioConfig c = testing::small_config(300, 30);
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 10; ++s) seeds.push_back(s);
  const double sps =
      evaluate(PolicyGenome::from_rules(InstitutionRules::sps()), FitnessWeights{}, seeds, c);
  const double mono =
      evaluate(PolicyGenome::from_rules(InstitutionRules::monogamy()), FitnessWeights{}, seeds, c);
  EXPECT_GT(sps, mono);
}

TEST(OptimizerLog, HeaderAndRows) {
  GaParams p;
  p.generations = 2;
  const auto r = run_ga(quadratic, p, 1);
  const std::string csv = optimizer_log_csv(r.log);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "generation,best_fitness,mean_fitness,spouse_cap,companion_cap,rearing_subsidy,"
            "motherhood_penalty_rate,divorce_hazard");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

}  // namespace
}  // namespace sps
