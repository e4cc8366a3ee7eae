#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "sps/params.hpp"

namespace sps {

// Full description of one scenario. Defaults follow the reference parameter
// table (N=10,000, 100 steps, 15:60:25 tiers, 50:50 genders, gamma 0.95).
struct ScenarioConfig {
  int population_size = 10000;
  std::array<int, 2> gender_ratio{50, 50};  // male : female
  std::array<int, 3> tier_shares{15, 60, 25};
  int horizon = 100;

  Preset preset = Preset::sps;
  InstitutionRules rules = InstitutionRules::sps();

  AttributeParams attributes;
  CompositeWeights composite;
  MatchingParams matching;
  PreferenceWeights male_preferences{0.30, 0.05, 0.40, 0.20, 0.05};
  PreferenceWeights female_preferences{0.25, 0.35, 0.05, 0.30, 0.05};
  StrategyParams strategy = StrategyParams::defaults();
  int adapt_iterations = 0;
  RewardSpec reward;
  LifecycleParams lifecycle;
  MetricsParams metrics;

  std::optional<std::uint64_t> seed;
  std::string output_dir = "out";

  // Throws ConfigError naming the first invalid field.
  void validate() const;

  const PreferenceWeights& preferences(Gender g) const {
    return g == Gender::male ? male_preferences : female_preferences;
  }

  // Copy with the institution replaced by a named preset.
  ScenarioConfig with_preset(Preset p) const;

  bool operator==(const ScenarioConfig&) const = default;
};

}  // namespace sps
