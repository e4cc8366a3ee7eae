#pragma once

// Plain parameter structs shared across modules. Defaults reproduce the
// reference scenario; every field is reachable from the scenario config file.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace sps {

using AgentId = std::uint32_t;
using RelId = std::uint32_t;

enum class Gender : std::uint8_t { male = 0, female = 1 };
enum class LifeStage : std::uint8_t { youth, adult, mature, elder };
enum class Tier : std::uint8_t { A = 0, B = 1, C = 2 };
enum class RelKind : std::uint8_t { spouse = 0, companion = 1 };

constexpr int kTierCount = 3;
constexpr int kCellCount = 6;  // tier x gender, ordered AM, AF, BM, BF, CM, CF

constexpr int cell_index(Tier t, Gender g) noexcept {
  return static_cast<int>(t) * 2 + static_cast<int>(g);
}

std::string_view to_string(Gender g) noexcept;
std::string_view to_string(Tier t) noexcept;
std::string_view to_string(RelKind k) noexcept;
std::string_view to_string(LifeStage s) noexcept;
std::string_view cell_name(int cell) noexcept;  // "AM", "AF", ...

constexpr Gender opposite(Gender g) noexcept {
  return g == Gender::male ? Gender::female : Gender::male;
}

// Environment constraint set distinguishing institutions.
struct InstitutionRules {
  int spouse_cap = 1;
  int companion_cap = 2;
  int total_cap = 3;
  bool gender_symmetric = true;
  double motherhood_penalty_rate = 0.02;
  double rearing_subsidy = 0.8;
  bool companion_inheritance = false;
  double divorce_hazard = 0.02;

  static InstitutionRules sps();
  static InstitutionRules monogamy();

  // Throws ConfigError naming the field under `prefix`.
  void validate(std::string_view prefix = "institution") const;

  bool operator==(const InstitutionRules&) const = default;
};

enum class Preset : std::uint8_t { sps, monogamy, custom };
std::string_view to_string(Preset p) noexcept;

// Weights over a candidate's (v, rank r, f, s) plus the novelty bonus.
struct PreferenceWeights {
  double mate_value = 0.35;
  double resources = 0.25;
  double fertility = 0.15;
  double social_capital = 0.20;
  double novelty = 0.05;

  void validate(std::string_view prefix) const;
  bool operator==(const PreferenceWeights&) const = default;
};

struct CompositeWeights {
  double mate_value = 0.35;
  double resources = 0.25;
  double fertility = 0.20;
  double social_capital = 0.20;

  bool operator==(const CompositeWeights&) const = default;
};

// Threshold policy for one tier x gender cell.
struct StrategyCell {
  double reservation = 0.40;
  int proposal_budget = 3;
  double kind_preference = 0.6;
  double fertility_desire = 0.8;
  double dissolution_threshold = 0.15;

  // Reservation for companion ties. kind_preference = 1 holds companions to
  // the spouse standard; lower values relax it toward zero.
  double companion_reservation() const noexcept;
  double reservation_for(RelKind k) const noexcept {
    return k == RelKind::spouse ? reservation : companion_reservation();
  }

  bool operator==(const StrategyCell&) const = default;
};

struct StrategyParams {
  std::array<StrategyCell, kCellCount> cells{};

  static StrategyParams defaults();
  StrategyCell& cell(Tier t, Gender g) { return cells[cell_index(t, g)]; }
  const StrategyCell& cell(Tier t, Gender g) const { return cells[cell_index(t, g)]; }

  bool in_range() const noexcept;
  bool operator==(const StrategyParams&) const = default;
};

struct RewardSpec {
  double alpha = 1.0;
  double beta = 0.5;
  double delta = 0.25;
  double gamma = 0.95;

  void validate(std::string_view prefix = "reward") const;
  bool operator==(const RewardSpec&) const = default;
};

struct AttributeParams {
  double beta_a = 2.0;
  double beta_b = 2.0;
  double wealth_mu = 0.0;
  double wealth_sigma = 0.8;
  int initial_age_min = 0;
  int initial_age_max = 79;

  bool operator==(const AttributeParams&) const = default;
};

struct LifecycleParams {
  int max_age = 80;
  int hazard_onset_age = 60;
  double hazard = 0.005;
  double fecundity_peak = 0.35;     // ages 20-29
  double fecundity_onset = 0.25;    // ages 18-19
  int female_fertility_end = 45;
  int male_fertility_end = 65;
  double child_noise = 0.08;
  int max_children = 6;
  std::array<double, kTierCount> wage{0.25, 0.15, 0.08};
  std::array<double, kTierCount> growth{1.06, 1.03, 1.01};
  int retirement_age = 65;
  double consumption = 0.08;
  double child_unit_cost = 0.10;
  int mate_value_drift_onset = 30;
  double mate_value_drift = 0.005;
  double penalty_aversion = 3.0;
  double cost_aversion = 0.4;

  bool operator==(const LifecycleParams&) const = default;
};

struct MetricsParams {
  int tfr_window = 10;
  int summary_window = 10;
  int generation_length = 25;
  double envy_margin = 0.15;

  bool operator==(const MetricsParams&) const = default;
};

struct MatchingParams {
  int candidates = 12;
  double locality_bandwidth = 0.10;
  double same_gender_openness = 0.40;
  // Pools larger than this use rejection sampling instead of exact keys.
  int exact_sampling_limit = 2048;

  bool operator==(const MatchingParams&) const = default;
};

}  // namespace sps
