#include "sps/config.hpp"

#include <cmath>
#include <string>

#include "sps/errors.hpp"
#include "sps/population.hpp"

namespace sps {

namespace {

void require(bool ok, std::string_view prefix, std::string_view field, const std::string& what) {
  if (!ok) {
    std::string name(prefix);
    if (!field.empty()) {
      if (!name.empty()) name += '.';
      name += field;
    }
    throw ConfigError(name, what);
  }
}

bool in_unit(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

}  // namespace

std::string_view to_string(Gender g) noexcept { return g == Gender::male ? "male" : "female"; }

std::string_view to_string(Tier t) noexcept {
  switch (t) {
    case Tier::A: return "A";
    case Tier::B: return "B";
    case Tier::C: return "C";
  }
  return "?";
}

std::string_view to_string(RelKind k) noexcept {
  return k == RelKind::spouse ? "spouse" : "companion";
}

std::string_view to_string(LifeStage s) noexcept {
  switch (s) {
    case LifeStage::youth: return "youth";
    case LifeStage::adult: return "adult";
    case LifeStage::mature: return "mature";
    case LifeStage::elder: return "elder";
  }
  return "?";
}

std::string_view to_string(Preset p) noexcept {
  switch (p) {
    case Preset::sps: return "sps";
    case Preset::monogamy: return "monogamy";
    case Preset::custom: return "custom";
  }
  return "?";
}

std::string_view cell_name(int cell) noexcept {
  static constexpr std::string_view names[kCellCount] = {"AM", "AF", "BM", "BF", "CM", "CF"};
  return (cell >= 0 && cell < kCellCount) ? names[cell] : "??";
}

InstitutionRules InstitutionRules::sps() { return InstitutionRules{}; }

InstitutionRules InstitutionRules::monogamy() {
  InstitutionRules r;
  r.spouse_cap = 1;
  r.companion_cap = 0;
  r.total_cap = 1;
  r.motherhood_penalty_rate = 0.07;
  r.rearing_subsidy = 0.2;
  return r;
}

void InstitutionRules::validate(std::string_view prefix) const {
  require(spouse_cap >= 0, prefix, "spouse_cap", "must be >= 0");
  require(companion_cap >= 0, prefix, "companion_cap", "must be >= 0");
  // A rule set with no slots at all is allowed (it forms no ties); otherwise
  // at least one partner must be admissible.
  require(total_cap >= (spouse_cap + companion_cap > 0 ? 1 : 0), prefix, "total_cap",
          "must be >= 1");
  require(total_cap <= spouse_cap + companion_cap, prefix, "total_cap",
          "must not exceed spouse_cap + companion_cap");
  require(gender_symmetric, prefix, "gender_symmetric", "asymmetric rules are not supported");
  require(in_unit(motherhood_penalty_rate), prefix, "motherhood_penalty_rate", "must lie in [0,1]");
  require(in_unit(rearing_subsidy), prefix, "rearing_subsidy", "must lie in [0,1]");
  require(!companion_inheritance, prefix, "companion_inheritance",
          "companions never inherit under this model");
  require(in_unit(divorce_hazard), prefix, "divorce_hazard", "must lie in [0,1]");
}

void PreferenceWeights::validate(std::string_view prefix) const {
  const double w[] = {mate_value, resources, fertility, social_capital, novelty};
  double sum = 0.0;
  for (double x : w) {
    require(std::isfinite(x) && x >= 0.0, prefix, "", "weights must be nonnegative");
    sum += x;
  }
  require(std::abs(sum - 1.0) < 1e-9, prefix, "", "weights must sum to 1");
}

double StrategyCell::companion_reservation() const noexcept {
  const double k = kind_preference < 0.05 ? 0.05 : kind_preference;
  return std::pow(reservation, 1.0 / k);
}

StrategyParams StrategyParams::defaults() {
  StrategyParams p;
  // Tier defaults, with women holding out slightly longer than men.
  constexpr double reservation[kTierCount] = {0.55, 0.40, 0.25};
  constexpr double gender_offset[2] = {-0.05, 0.05};
  for (int t = 0; t < kTierCount; ++t) {
    for (int g = 0; g < 2; ++g) {
      p.cells[t * 2 + g].reservation = reservation[t] + gender_offset[g];
    }
  }
  return p;
}

bool StrategyParams::in_range() const noexcept {
  for (const auto& c : cells) {
    if (!in_unit(c.reservation) || !in_unit(c.kind_preference) || !in_unit(c.fertility_desire) ||
        !in_unit(c.dissolution_threshold) || c.proposal_budget < 0) {
      return false;
    }
  }
  return true;
}

void RewardSpec::validate(std::string_view prefix) const {
  require(std::isfinite(alpha) && alpha >= 0.0, prefix, "alpha", "must be finite and >= 0");
  require(std::isfinite(beta) && beta >= 0.0, prefix, "beta", "must be finite and >= 0");
  require(std::isfinite(delta) && delta >= 0.0, prefix, "delta", "must be finite and >= 0");
  require(std::isfinite(gamma) && gamma >= 0.0 && gamma < 1.0, prefix, "gamma",
          "must lie in [0,1)");
}

void ScenarioConfig::validate() const {
  require(population_size >= 2, "population", "size", "population size must be at least 2");
  require(gender_ratio[0] >= 0 && gender_ratio[1] >= 0 && gender_ratio[0] + gender_ratio[1] > 0,
          "population", "gender_ratio", "gender ratio must be nonnegative and not all zero");
  require(tier_shares[0] >= 0 && tier_shares[1] >= 0 && tier_shares[2] >= 0 &&
              tier_shares[0] + tier_shares[1] + tier_shares[2] == 100,
          "population", "tier_shares", "tier shares must be nonnegative and sum to 100");
  require(horizon >= 1, "", "horizon", "horizon must be at least 1");
  rules.validate("institution");

  require(attributes.beta_a > 0 && attributes.beta_b > 0, "attributes", "beta",
          "beta shape parameters must be positive");
  require(std::isfinite(attributes.wealth_mu), "attributes", "wealth_mu", "must be finite");
  require(attributes.wealth_sigma >= 0, "attributes", "wealth_sigma", "must be >= 0");
  require(attributes.initial_age_min >= 0 &&
              attributes.initial_age_min <= attributes.initial_age_max &&
              attributes.initial_age_max < lifecycle.max_age,
          "attributes", "initial_age", "initial age range must lie in [0, max_age)");

  const double cw[] = {composite.mate_value, composite.resources, composite.fertility,
                       composite.social_capital};
  for (double x : cw) require(std::isfinite(x) && x >= 0.0, "composite", "", "weights must be >= 0");

  require(matching.candidates >= 1, "matching", "candidates", "must be >= 1");
  require(matching.locality_bandwidth > 0, "matching", "locality_bandwidth", "must be > 0");
  require(in_unit(matching.same_gender_openness), "matching", "same_gender_openness",
          "must lie in [0,1]");
  require(matching.exact_sampling_limit >= 1, "matching", "exact_sampling_limit", "must be >= 1");
  male_preferences.validate("preferences.male");
  female_preferences.validate("preferences.female");

  require(strategy.in_range(), "strategy", "", "strategy parameters out of range");
  require(adapt_iterations >= 0, "strategy", "adapt_iterations", "must be >= 0");
  reward.validate("reward");

  const auto& l = lifecycle;
  require(l.max_age > kAdultAge, "lifecycle", "max_age", "must exceed the adult age");
  require(in_unit(l.hazard), "lifecycle", "hazard", "must lie in [0,1]");
  require(in_unit(l.fecundity_peak) && in_unit(l.fecundity_onset), "lifecycle", "fecundity",
          "must lie in [0,1]");
  require(l.female_fertility_end > 20 && l.male_fertility_end > kAdultAge, "lifecycle",
          "fertility_end", "fertility window too short");
  require(l.child_noise >= 0, "lifecycle", "child_noise", "must be >= 0");
  require(l.max_children >= 1, "lifecycle", "max_children", "must be >= 1");
  for (int t = 0; t < kTierCount; ++t) {
    require(l.wage[t] >= 0, "lifecycle", "wage", "must be >= 0");
    require(l.growth[t] >= 1.0, "lifecycle", "growth", "growth multipliers must be >= 1");
  }
  require(l.consumption >= 0, "lifecycle", "consumption", "must be >= 0");
  require(l.child_unit_cost >= 0, "lifecycle", "child_unit_cost", "must be >= 0");
  require(l.mate_value_drift >= 0, "lifecycle", "mate_value_drift", "must be >= 0");
  require(l.penalty_aversion >= 0 && l.cost_aversion >= 0, "lifecycle", "aversion",
          "must be >= 0");

  require(metrics.tfr_window >= 1, "metrics", "tfr_window", "must be >= 1");
  require(metrics.summary_window >= 1, "metrics", "summary_window", "must be >= 1");
  require(metrics.generation_length >= 1, "metrics", "generation_length", "must be >= 1");
  require(metrics.envy_margin >= 0, "metrics", "envy_margin", "must be >= 0");
}

ScenarioConfig ScenarioConfig::with_preset(Preset p) const {
  ScenarioConfig c = *this;
  c.preset = p;
  if (p == Preset::sps) c.rules = InstitutionRules::sps();
  if (p == Preset::monogamy) c.rules = InstitutionRules::monogamy();
  return c;
}

}  // namespace sps
