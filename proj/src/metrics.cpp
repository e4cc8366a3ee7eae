#include "sps/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sps/errors.hpp"

namespace sps {

double welfare_index(double partnership_satisfaction, double economic_security, bool has_partner,
                     int children) noexcept {
  const double belonging =
      0.5 * (has_partner ? 1.0 : 0.0) + 0.5 * std::min(children, 2) / 2.0;
  return 10.0 * (0.4 * partnership_satisfaction + 0.3 * economic_security + 0.3 * belonging);
}

double partnership_satisfaction(const Population& pop, const Agent& agent) {
  double num = 0.0;
  double den = 0.0;
  for (RelId r : agent.spouses) {
    num += pop.relationships[r].utility_of(agent.id);
    den += 1.0;
  }
  for (RelId r : agent.companions) {
    num += 0.5 * pop.relationships[r].utility_of(agent.id);
    den += 0.5;
  }
  return den > 0.0 ? num / den : 0.0;
}

int living_children(const Population& pop, const Agent& agent) {
  return static_cast<int>(std::count_if(agent.children.begin(), agent.children.end(),
                                        [&](AgentId c) { return pop.agents[c].alive; }));
}

std::vector<std::pair<AgentId, double>> adult_welfare(const Population& pop) {
  const std::vector<AgentId> adults = pop.living_adults();
  std::vector<double> wealth(adults.size());
  for (std::size_t i = 0; i < adults.size(); ++i) wealth[i] = pop.agents[adults[i]].wealth();
  const std::vector<double> pct = rank_normalize(wealth);
  std::vector<std::pair<AgentId, double>> out(adults.size());
  for (std::size_t i = 0; i < adults.size(); ++i) {
    const Agent& a = pop.agents[adults[i]];
    out[i] = {a.id, welfare_index(partnership_satisfaction(pop, a), pct[i], a.partner_count() > 0,
                                  living_children(pop, a))};
  }
  return out;
}

double welfare(const Population& pop, AgentId id) {
  for (const auto& [agent, w] : adult_welfare(pop)) {
    if (agent == id) return w;
  }
  throw IntegrityError("agent " + std::to_string(id) + " is not a living adult");
}

double gini(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("gini of an empty sequence");
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += x[i];
    weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * x[i];
  }
  if (total <= 0.0) return 0.0;
  return weighted / (n * total);
}

int FertilityLedger::bin_for_age(int age) noexcept {
  if (age < kFirstAge || age >= kFirstAge + kBins * kBinWidth) return -1;
  return (age - kFirstAge) / kBinWidth;
}

void FertilityLedger::ensure(int step) {
  if (step < 0) throw std::invalid_argument("negative step");
  const auto need = static_cast<std::size_t>(step) + 1;
  if (births_.size() < need) {
    births_.resize(need, Bins{});
    exposure_.resize(need, Bins{});
  }
}

void FertilityLedger::record_exposure(int step, int age, double years) {
  const int bin = bin_for_age(age);
  if (bin < 0) return;
  ensure(step);
  exposure_[static_cast<std::size_t>(step)][static_cast<std::size_t>(bin)] += years;
}

void FertilityLedger::record_birth(int step, int mother_age) {
  const int bin = bin_for_age(mother_age);
  if (bin < 0) return;
  ensure(step);
  births_[static_cast<std::size_t>(step)][static_cast<std::size_t>(bin)] += 1.0;
}

void FertilityLedger::record_population(const Population& pop) {
  ensure(pop.step);
  for (const Agent& a : pop.agents) {
    if (a.alive && a.gender() == Gender::female) record_exposure(pop.step, a.age);
  }
}

FertilityLedger::Bins FertilityLedger::births_in(int first_step, int last_step) const {
  Bins out{};
  for (int s = std::max(first_step, 0); s <= last_step && s < static_cast<int>(births_.size()); ++s) {
    for (int b = 0; b < kBins; ++b) out[b] += births_[s][b];
  }
  return out;
}

FertilityLedger::Bins FertilityLedger::exposure_in(int first_step, int last_step) const {
  Bins out{};
  for (int s = std::max(first_step, 0); s <= last_step && s < static_cast<int>(exposure_.size());
       ++s) {
    for (int b = 0; b < kBins; ++b) out[b] += exposure_[s][b];
  }
  return out;
}

TfrResult tfr(const FertilityLedger& ledger, int end_step, int window) {
  if (window < 1) throw std::invalid_argument("tfr window must be >= 1");
  const auto births = ledger.births_in(end_step - window + 1, end_step);
  const auto exposure = ledger.exposure_in(end_step - window + 1, end_step);
  TfrResult out;
  for (int b = 0; b < FertilityLedger::kBins; ++b) {
    if (exposure[b] <= 0.0) {
      out.zero_exposure = true;
      continue;
    }
    out.value += births[b] / exposure[b] * FertilityLedger::kBinWidth;
  }
  return out;
}

StabilityProxy stability_from_fraction(double fraction) noexcept {
  return {fraction, fraction > kStabilityThreshold};
}

StabilityProxy stability_proxy(const Population& pop) {
  int males = 0;
  int unpartnered = 0;
  for (const Agent& a : pop.agents) {
    if (!a.is_adult() || a.gender() != Gender::male) continue;
    ++males;
    if (a.partner_count() == 0) ++unpartnered;
  }
  return stability_from_fraction(males > 0 ? static_cast<double>(unpartnered) / males : 0.0);
}

MetricsFrame compute_frame(const Population& pop, const FertilityLedger& ledger,
                           const std::vector<BirthEvent>& births, int deaths,
                           const ScenarioConfig& config) {
  MetricsFrame f;
  f.step = pop.step;
  const auto welfare_list = adult_welfare(pop);
  std::array<double, kCellCount> sums{};
  std::vector<double> welfare_values;
  std::vector<double> wealth_values;
  welfare_values.reserve(welfare_list.size());
  wealth_values.reserve(welfare_list.size());
  double male_sum = 0.0;
  double female_sum = 0.0;
  int males = 0;
  int females = 0;
  for (const auto& [id, w] : welfare_list) {
    const Agent& a = pop.agents[id];
    const int c = cell_index(a.tier, a.gender());
    sums[c] += w;
    f.adults[c] += 1;
    welfare_values.push_back(w);
    wealth_values.push_back(a.wealth());
    if (a.gender() == Gender::male) {
      male_sum += w;
      ++males;
    } else {
      female_sum += w;
      ++females;
    }
  }
  for (int c = 0; c < kCellCount; ++c) {
    f.welfare[c] = f.adults[c] > 0 ? sums[c] / f.adults[c] : 0.0;
  }
  const auto fertility = tfr(ledger, pop.step, config.metrics.tfr_window);
  f.tfr = fertility.value;
  f.tfr_zero_exposure = fertility.zero_exposure;
  if (!welfare_values.empty()) {
    f.gini_wealth = gini(wealth_values);
    f.gini_welfare = gini(welfare_values);
    f.mean_welfare =
        std::accumulate(welfare_values.begin(), welfare_values.end(), 0.0) / welfare_values.size();
  }
  f.mean_welfare_male = males > 0 ? male_sum / males : 0.0;
  f.mean_welfare_female = females > 0 ? female_sum / females : 0.0;
  const auto stability = stability_proxy(pop);
  f.unpartnered_male_frac = stability.unpartnered_male_fraction;
  f.stability_flag = stability.flag;
  f.births = static_cast<int>(births.size());
  f.deaths = deaths;
  for (const BirthEvent& b : births) {
    for (AgentId parent : {b.mother, b.father}) {
      const Agent& p = pop.agents[parent];
      f.cell_births[cell_index(p.tier, p.gender())] += 1;
    }
  }
  f.population = static_cast<int>(pop.alive_count());
  f.total_wealth = pop.total_wealth();
  f.active_relationships = static_cast<int>(std::count_if(
      pop.relationships.begin(), pop.relationships.end(),
      [](const Relationship& r) { return r.active; }));
  return f;
}

std::array<double, kTierCount> tier_means(const MetricsFrame& f) {
  std::array<double, kTierCount> out{};
  for (int t = 0; t < kTierCount; ++t) {
    const int m = cell_index(static_cast<Tier>(t), Gender::male);
    const int w = cell_index(static_cast<Tier>(t), Gender::female);
    const int n = f.adults[m] + f.adults[w];
    out[t] = n > 0 ? (f.welfare[m] * f.adults[m] + f.welfare[w] * f.adults[w]) / n
                   : 0.5 * (f.welfare[m] + f.welfare[w]);
  }
  return out;
}

int envy_count(const Population& pop, const ScenarioConfig& config, double margin) {
  const MarketView view = make_market_view(pop);
  const auto& adults = view.adults;
  auto configuration_value = [&](Gender observer, const Agent& owner) {
    const PreferenceWeights& w = config.preferences(observer);
    double num = 0.0;
    double den = 0.0;
    for (RelId r : owner.spouses) {
      const AgentId p = pop.relationships[r].other(owner.id);
      num += utility(pop.agents[p], w, view.resource_rank[p], false);
      den += 1.0;
    }
    for (RelId r : owner.companions) {
      const AgentId p = pop.relationships[r].other(owner.id);
      num += 0.5 * utility(pop.agents[p], w, view.resource_rank[p], false);
      den += 0.5;
    }
    return den > 0.0 ? num / den : 0.0;
  };

  int count = 0;
  for (int g = 0; g < 2; ++g) {
    const Gender gender = static_cast<Gender>(g);
    std::vector<std::pair<double, AgentId>> values;
    for (AgentId id : adults) {
      const Agent& a = pop.agents[id];
      if (a.gender() == gender) values.emplace_back(configuration_value(gender, a), id);
    }
    std::sort(values.begin(), values.end(), [](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return x.second < y.second;
    });
    for (const auto& [own, id] : values) {
      for (const auto& [other, j] : values) {
        if (other - own <= margin) break;
        if (j == id || pop.related(id, j)) continue;
        ++count;
        break;
      }
    }
  }
  return count;
}

int individual_rationality_violations(const std::vector<Relationship>& relationships) {
  int violations = 0;
  for (const Relationship& r : relationships) {
    if (r.utility_a < r.reservation_a || r.utility_b < r.reservation_b) ++violations;
  }
  return violations;
}

double welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) return 0.0;
  auto moments = [](std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::pair{mean, ss / (n - 1.0)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  const double se = std::sqrt(va / a.size() + vb / b.size());
  return se > 0.0 ? (ma - mb) / se : 0.0;
}

MetricsFrame window_mean(std::span<const MetricsFrame> frames, int window) {
  MetricsFrame out;
  if (frames.empty()) return out;
  const std::size_t take = std::min<std::size_t>(frames.size(), static_cast<std::size_t>(window));
  const auto tail = frames.subspan(frames.size() - take);
  std::array<double, kCellCount> weighted{};
  std::array<double, kCellCount> counts{};
  double births = 0.0;
  double deaths = 0.0;
  for (const MetricsFrame& f : tail) {
    for (int c = 0; c < kCellCount; ++c) {
      weighted[c] += f.welfare[c] * f.adults[c];
      counts[c] += f.adults[c];
      out.welfare[c] += f.welfare[c];
      out.cell_births[c] += f.cell_births[c];
    }
    out.tfr += f.tfr;
    out.gini_wealth += f.gini_wealth;
    out.gini_welfare += f.gini_welfare;
    out.unpartnered_male_frac += f.unpartnered_male_frac;
    out.mean_welfare += f.mean_welfare;
    out.mean_welfare_male += f.mean_welfare_male;
    out.mean_welfare_female += f.mean_welfare_female;
    out.total_wealth += f.total_wealth;
    births += f.births;
    deaths += f.deaths;
  }
  const double n = static_cast<double>(take);
  for (int c = 0; c < kCellCount; ++c) {
    out.welfare[c] = counts[c] > 0 ? weighted[c] / counts[c] : out.welfare[c] / n;
    out.adults[c] = static_cast<int>(std::lround(counts[c] / n));
  }
  out.step = tail.back().step;
  out.tfr /= n;
  out.gini_wealth /= n;
  out.gini_welfare /= n;
  out.unpartnered_male_frac /= n;
  out.mean_welfare /= n;
  out.mean_welfare_male /= n;
  out.mean_welfare_female /= n;
  out.total_wealth /= n;
  out.births = static_cast<int>(std::lround(births / n));
  out.deaths = static_cast<int>(std::lround(deaths / n));
  out.stability_flag = out.unpartnered_male_frac > kStabilityThreshold;
  out.population = tail.back().population;
  return out;
}

FairnessReport fairness_audit(const AuditInput& sps, const AuditInput& monogamy, int window) {
  if (sps.seed != monogamy.seed) {
    throw ComparabilityError("paired runs use different seeds (" + std::to_string(sps.seed) +
                             " vs " + std::to_string(monogamy.seed) + ")");
  }
  if (sps.initial_state_hash != monogamy.initial_state_hash) {
    throw ComparabilityError("paired runs start from different populations");
  }
  FairnessReport report;
  report.individual_rationality_violations = sps.ir_violations;
  report.envy_count = sps.envy_count;
  const MetricsFrame a = window_mean(sps.frames, window);
  const MetricsFrame b = window_mean(monogamy.frames, window);
  const auto ta = tier_means(a);
  const auto tb = tier_means(b);
  report.tier_gini_sps = gini(ta);
  report.tier_gini_monogamy = gini(tb);
  report.tier_gini_delta = report.tier_gini_sps - report.tier_gini_monogamy;
  for (int c = 0; c < kCellCount; ++c) {
    if (a.welfare[c] < b.welfare[c]) ++report.dominated_cells;
  }
  auto mean = [](const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  };
  report.gender_welfare_gap = std::abs(mean(sps.final_welfare_male) - mean(sps.final_welfare_female));
  report.gender_t_statistic = welch_t(sps.final_welfare_male, sps.final_welfare_female);
  return report;
}

}  // namespace sps
