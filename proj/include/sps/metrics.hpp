#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "sps/config.hpp"
#include "sps/lifecycle.hpp"
#include "sps/matching.hpp"
#include "sps/population.hpp"

namespace sps {

constexpr double kStabilityThreshold = 0.20;

// 10 * (0.4 partnership + 0.3 economic security + 0.3 belonging).
double welfare_index(double partnership_satisfaction, double economic_security, bool has_partner,
                     int children) noexcept;

// Weighted mean of the agent's formation utilities over its current ties
// (spouse weight 1, companion 0.5); 0 when unpartnered.
double partnership_satisfaction(const Population& pop, const Agent& agent);

int living_children(const Population& pop, const Agent& agent);

// Welfare of every living adult, in ascending id order. Economic security is
// the wealth percentile among living adults.
std::vector<std::pair<AgentId, double>> adult_welfare(const Population& pop);

// Welfare of a single living adult.
double welfare(const Population& pop, AgentId id);

// Mean-absolute-difference Gini via the sorted-rank identity. Throws
// std::invalid_argument on empty input; returns 0 when the total is 0.
double gini(std::span<const double> values);

// Births and woman-years per five-year maternal age bin (15-19 .. 45-49).
class FertilityLedger {
 public:
  static constexpr int kFirstAge = 15;
  static constexpr int kBins = 7;
  static constexpr int kBinWidth = 5;
  using Bins = std::array<double, kBins>;

  static int bin_for_age(int age) noexcept;  // -1 outside 15-49

  void record_exposure(int step, int age, double years = 1.0);
  void record_birth(int step, int mother_age);
  // Records one woman-year for every living female of reproductive age.
  void record_population(const Population& pop);

  Bins births_in(int first_step, int last_step) const;
  Bins exposure_in(int first_step, int last_step) const;
  int last_step() const noexcept { return static_cast<int>(births_.size()) - 1; }

 private:
  void ensure(int step);
  std::vector<Bins> births_;
  std::vector<Bins> exposure_;
};

struct TfrResult {
  double value = 0.0;
  bool zero_exposure = false;  // some bin had no woman-years and contributed 0
};

// Period TFR over steps (end_step - window, end_step]: sum of age-specific
// rates times bin width.
TfrResult tfr(const FertilityLedger& ledger, int end_step, int window);

struct StabilityProxy {
  double unpartnered_male_fraction = 0.0;
  bool flag = false;  // fraction > 0.20, no slack
};

StabilityProxy stability_proxy(const Population& pop);
StabilityProxy stability_from_fraction(double fraction) noexcept;

struct MetricsFrame {
  int step = 0;
  std::array<double, kCellCount> welfare{};  // AM, AF, BM, BF, CM, CF on 0-10
  double tfr = 0.0;
  double gini_wealth = 0.0;
  double gini_welfare = 0.0;
  double unpartnered_male_frac = 0.0;
  int births = 0;
  int deaths = 0;

  // In-memory extras; not part of the CSV row.
  std::array<int, kCellCount> adults{};
  std::array<int, kCellCount> cell_births{};  // births attributed to parents by cell
  double mean_welfare = 0.0;
  double mean_welfare_male = 0.0;
  double mean_welfare_female = 0.0;
  bool stability_flag = false;
  bool tfr_zero_exposure = false;
  int population = 0;
  double total_wealth = 0.0;
  int active_relationships = 0;
};

MetricsFrame compute_frame(const Population& pop, const FertilityLedger& ledger,
                           const std::vector<BirthEvent>& births, int deaths,
                           const ScenarioConfig& config);

// Count-weighted mean welfare per tier (both genders pooled).
std::array<double, kTierCount> tier_means(const MetricsFrame& f);

// Agents whose own partner configuration is valued below some same-gender
// agent's configuration by more than `margin`. Configurations are valued from
// the observer's gender-specific preferences without the novelty bonus.
int envy_count(const Population& pop, const ScenarioConfig& config, double margin);

// Formed edges whose utility fell below the owner's reservation at formation.
int individual_rationality_violations(const std::vector<Relationship>& relationships);

double welch_t(std::span<const double> a, std::span<const double> b);

// Everything the fairness audit needs from one run.
struct AuditInput {
  std::uint64_t seed = 0;
  std::uint64_t initial_state_hash = 0;
  std::vector<MetricsFrame> frames;
  int ir_violations = 0;
  int envy_count = 0;
  std::vector<double> final_welfare_male;
  std::vector<double> final_welfare_female;
};

struct FairnessReport {
  int individual_rationality_violations = 0;
  int envy_count = 0;
  double tier_gini_sps = 0.0;
  double tier_gini_monogamy = 0.0;
  double tier_gini_delta = 0.0;  // sps - monogamy
  double gender_welfare_gap = 0.0;
  double gender_t_statistic = 0.0;
  int dominated_cells = 0;  // cells whose mean welfare is lower under SPS
};

// Compares the trailing `window` frames of paired runs. Throws
// ComparabilityError when seeds or initial populations differ.
FairnessReport fairness_audit(const AuditInput& sps, const AuditInput& monogamy, int window);

// Mean of each frame field over the trailing window.
MetricsFrame window_mean(std::span<const MetricsFrame> frames, int window);

}  // namespace sps
