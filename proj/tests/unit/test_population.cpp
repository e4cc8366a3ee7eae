#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "sps/errors.hpp"
#include "sps/population.hpp"
#include "support.hpp"

namespace sps {
namespace {

using testing::make_adult;
using testing::make_population;

std::array<int, 3> count_tiers(const Population& pop) {
  std::array<int, 3> out{};
  for (const Agent& a : pop.agents) {
    if (a.alive) out[static_cast<int>(a.tier)] += 1;
  }
  return out;
}

TEST(InitPopulation, GenderSplitFollowsRatio) {
  ScenarioConfig c;
  c.population_size = 10000;
  const Population pop = init_population(c, 3);
  const auto males = std::count_if(pop.agents.begin(), pop.agents.end(),
                                   [](const Agent& a) { return a.gender() == Gender::male; });
  EXPECT_EQ(males, 5000);
  EXPECT_EQ(pop.agents.size(), 10000u);
}

TEST(InitPopulation, HundredAgentsSplitIntoTierShares) {
  ScenarioConfig c;
  c.population_size = 100;
  const auto tiers = count_tiers(init_population(c, 11));
  EXPECT_EQ(tiers, (std::array<int, 3>{15, 60, 25}));
}

TEST(InitPopulation, TwoAgentsGetOneOfEach) {
  ScenarioConfig c;
  c.population_size = 2;
  const Population pop = init_population(c, 5);
  ASSERT_EQ(pop.agents.size(), 2u);
  EXPECT_NE(pop.agents[0].gender(), pop.agents[1].gender());
}

TEST(InitPopulation, AttributesInRange) {
  ScenarioConfig c;
  c.population_size = 2000;
  const Population pop = init_population(c, 8);
  for (const Agent& a : pop.agents) {
    EXPECT_GE(a.attrs.mate_value, 0.0);
    EXPECT_LE(a.attrs.mate_value, 1.0);
    EXPECT_GE(a.attrs.fertility, 0.0);
    EXPECT_LE(a.attrs.fertility, 1.0);
    EXPECT_GE(a.attrs.social_capital, 0.0);
    EXPECT_LE(a.attrs.social_capital, 1.0);
    EXPECT_GE(a.attrs.resources, 0.0);
    if (a.age < kAdultAge) EXPECT_EQ(a.attrs.resources, 0.0);
    EXPECT_EQ(a.attrs.stage, life_stage_for_age(a.age));
  }
  EXPECT_TRUE(scan_violations(pop, InstitutionRules::sps()).empty());
  EXPECT_DOUBLE_EQ(pop.ledger.initial, pop.total_wealth());
}

TEST(InitPopulation, SameSeedSamePopulation) {
  ScenarioConfig c;
  c.population_size = 500;
  EXPECT_EQ(init_population(c, 42), init_population(c, 42));
  EXPECT_FALSE(init_population(c, 42) == init_population(c, 43));
}

TEST(InitPopulation, RejectsInvalidConfig) {
  ScenarioConfig c;
  c.population_size = 1;
  EXPECT_THROW(init_population(c, 1), ConfigError);
}

TEST(LifeStage, Thresholds) {
  EXPECT_EQ(life_stage_for_age(0), LifeStage::youth);
  EXPECT_EQ(life_stage_for_age(17), LifeStage::youth);
  EXPECT_EQ(life_stage_for_age(18), LifeStage::adult);
  EXPECT_EQ(life_stage_for_age(39), LifeStage::adult);
  EXPECT_EQ(life_stage_for_age(40), LifeStage::mature);
  EXPECT_EQ(life_stage_for_age(64), LifeStage::mature);
  EXPECT_EQ(life_stage_for_age(65), LifeStage::elder);
}

TEST(RankNormalize, TiesShareMeanRank) {
  const std::vector<double> v{3.0, 1.0, 3.0, 2.0};
  const auto r = rank_normalize(v);
  EXPECT_DOUBLE_EQ(r[1], 0.0);
  EXPECT_DOUBLE_EQ(r[3], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r[0], 2.5 / 3.0);
  EXPECT_DOUBLE_EQ(r[2], 2.5 / 3.0);
  EXPECT_EQ(rank_normalize(std::vector<double>{7.0}), std::vector<double>{0.0});
}

TEST(CompositeScore, MaximalAgentScoresHighest) {
  CompositeWeights w;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> scores;
  for (int i = 0; i < 50; ++i) {
    AttributeVector a;
    a.mate_value = u(rng);
    a.fertility = u(rng);
    a.social_capital = u(rng);
    scores.push_back(composite_score(a, u(rng), w));
  }
  AttributeVector top;
  top.mate_value = 1.0;
  top.fertility = 1.0;
  top.social_capital = 1.0;
  const double best = composite_score(top, 1.0, w);
  for (double s : scores) EXPECT_LE(s, best);
}

TEST(CompositeScore, IdenticalAttributesIdenticalScores) {
  AttributeVector a;
  a.mate_value = 0.3;
  a.fertility = 0.6;
  a.social_capital = 0.9;
  const AttributeVector b = a;
  EXPECT_EQ(composite_score(a, 0.4, CompositeWeights{}), composite_score(b, 0.4, CompositeWeights{}));
}

TEST(CompositeScore, RanksMatchBruteForce) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::lognormal_distribution<double> wealth(0.0, 0.8);
  std::vector<AttributeVector> attrs(50);
  std::vector<double> r(50);
  for (int i = 0; i < 50; ++i) {
    attrs[i].mate_value = u(rng);
    attrs[i].fertility = u(rng);
    attrs[i].social_capital = u(rng);
    r[i] = wealth(rng);
  }
  const auto rank = rank_normalize(r);
  const CompositeWeights w;
  for (int i = 0; i < 50; ++i) {
    // Continuous draws have no ties: rank(r_i) = #{j : r_j < r_i} / (n - 1).
    const double below = static_cast<double>(std::count_if(r.begin(), r.end(), [&](double x) { return x < r[i]; }));
    const double brute = 0.35 * attrs[i].mate_value + 0.25 * below / 49.0 +
                         0.20 * attrs[i].fertility + 0.20 * attrs[i].social_capital;
    EXPECT_NEAR(composite_score(attrs[i], rank[i], w), brute, 1e-12);
  }
}

TEST(TierCounts, FloorsForAAndC) {
  EXPECT_EQ(tier_counts(1000, {15, 60, 25}), (std::array<int, 3>{150, 600, 250}));
  EXPECT_EQ(tier_counts(7, {15, 60, 25}), (std::array<int, 3>{1, 5, 1}));
  EXPECT_EQ(tier_counts(2, {15, 60, 25}), (std::array<int, 3>{0, 2, 0}));
}

TEST(ReassignTiers, ExactSharesOnThousandAgents) {
  ScenarioConfig c;
  c.population_size = 1000;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Population pop = init_population(c, seed);
    reassign_tiers(pop, c.composite, c.tier_shares);
    EXPECT_EQ(count_tiers(pop), (std::array<int, 3>{150, 600, 250}));
  }
}

TEST(ReassignTiers, ExactSharesWithUnevenGenders) {
  ScenarioConfig c;
  c.population_size = 1001;
  c.gender_ratio = {70, 30};
  Population pop = init_population(c, 4);
  EXPECT_EQ(count_tiers(pop), tier_counts(1001, c.tier_shares));
}

TEST(ReassignTiers, EachGenderFillsTheBandsEqually) {
  ScenarioConfig c;
  c.population_size = 1000;
  const Population pop = init_population(c, 21);
  std::array<int, 2> a_count{};
  for (const Agent& a : pop.agents) {
    if (a.tier == Tier::A) a_count[static_cast<int>(a.gender())] += 1;
  }
  EXPECT_EQ(a_count[0], 75);
  EXPECT_EQ(a_count[1], 75);
}

TEST(ReassignTiers, Idempotent) {
  ScenarioConfig c;
  c.population_size = 400;
  Population pop = init_population(c, 6);
  const Population before = pop;
  reassign_tiers(pop, c.composite, c.tier_shares);
  EXPECT_EQ(pop, before);
}

TEST(ReassignTiers, CollapsedAgentDoesNotRise) {
  ScenarioConfig c;
  c.population_size = 100;
  c.attributes.initial_age_min = 20;
  Population pop = init_population(c, 2);
  const auto it = std::find_if(pop.agents.begin(), pop.agents.end(),
                               [](const Agent& a) { return a.tier == Tier::A; });
  ASSERT_NE(it, pop.agents.end());
  const AgentId id = it->id;
  pop.agents[id].attrs.resources = 0.0;
  pop.agents[id].attrs.social_capital = 0.0;
  reassign_tiers(pop, c.composite, c.tier_shares);
  EXPECT_GE(static_cast<int>(pop.agents[id].tier), static_cast<int>(Tier::A));
  EXPECT_EQ(count_tiers(pop), (std::array<int, 3>{15, 60, 25}));
}

TEST(ReassignTiers, WealthCollapseCanDropFromA) {
  Population pop;
  for (int i = 0; i < 20; ++i) {
    pop.add_agent(make_adult(i % 2 ? Gender::female : Gender::male, 30, 0.5, 1.0 + i, 0.5, 0.5));
  }
  CompositeWeights w;
  w.mate_value = 0.0;
  w.fertility = 0.0;
  w.social_capital = 0.0;
  w.resources = 1.0;
  reassign_tiers(pop, w, {15, 60, 25});
  EXPECT_EQ(pop.agents[19].tier, Tier::A);
  pop.agents[19].attrs.resources = 0.0;
  reassign_tiers(pop, w, {15, 60, 25});
  EXPECT_EQ(pop.agents[19].tier, Tier::C);
}

TEST(Invariants, DetectsCapacityBreach) {
  Population pop = make_population({make_adult(Gender::male), make_adult(Gender::female),
                                    make_adult(Gender::female)});
  testing::tie(pop, 0, 1);
  testing::tie(pop, 0, 2);
  EXPECT_TRUE(scan_violations(pop, InstitutionRules::sps()).size() == 1);
  EXPECT_THROW(check_invariants(pop, InstitutionRules::sps()), InvariantError);
  try {
    check_invariants(pop, InstitutionRules::sps());
  } catch (const InvariantError& e) {
    EXPECT_EQ(e.invariant(), "capacity.spouse");
  }
}

TEST(Invariants, DetectsAsymmetricReference) {
  Population pop = make_population({make_adult(Gender::male), make_adult(Gender::female)});
  testing::tie(pop, 0, 1, RelKind::companion);
  pop.agents[1].companions.clear();
  const auto v = scan_violations(pop, InstitutionRules::sps());
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v.front().rfind("symmetry", 0), 0u);
}

}  // namespace
}  // namespace sps
