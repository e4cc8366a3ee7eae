#include "sps/io.hpp"

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "sps/errors.hpp"
#include "sps/simulation.hpp"

namespace sps {

namespace {

// Walks every config field in a fixed order. The loader and the saver share
// this table, which is what keeps save -> load an identity.
template <class V>
void visit_fields(V& v, ScenarioConfig& c) {
  v.field("horizon", c.horizon);
  v.section("population", [&] {
    v.field("size", c.population_size);
    v.field("gender_ratio", c.gender_ratio);
    v.field("tier_shares", c.tier_shares);
  });
  v.section("attributes", [&] {
    auto& a = c.attributes;
    v.field("beta_a", a.beta_a);
    v.field("beta_b", a.beta_b);
    v.field("wealth_mu", a.wealth_mu);
    v.field("wealth_sigma", a.wealth_sigma);
    v.field("initial_age_min", a.initial_age_min);
    v.field("initial_age_max", a.initial_age_max);
  });
  v.section("composite", [&] {
    auto& w = c.composite;
    v.field("mate_value", w.mate_value);
    v.field("resources", w.resources);
    v.field("fertility", w.fertility);
    v.field("social_capital", w.social_capital);
  });
  v.section("matching", [&] {
    auto& m = c.matching;
    v.field("candidates", m.candidates);
    v.field("locality_bandwidth", m.locality_bandwidth);
    v.field("same_gender_openness", m.same_gender_openness);
    v.field("exact_sampling_limit", m.exact_sampling_limit);
  });
  v.section("preferences", [&] {
    for (auto* p : {&c.male_preferences, &c.female_preferences}) {
      v.section(p == &c.male_preferences ? "male" : "female", [&] {
        v.field("mate_value", p->mate_value);
        v.field("resources", p->resources);
        v.field("fertility", p->fertility);
        v.field("social_capital", p->social_capital);
        v.field("novelty", p->novelty);
      });
    }
  });
  v.section("strategy", [&] {
    v.field("adapt_iterations", c.adapt_iterations);
    v.section("cells", [&] {
      for (int i = 0; i < kCellCount; ++i) {
        auto& cell = c.strategy.cells[i];
        v.section(std::string(cell_name(i)).c_str(), [&] {
          v.field("reservation", cell.reservation);
          v.field("proposal_budget", cell.proposal_budget);
          v.field("kind_preference", cell.kind_preference);
          v.field("fertility_desire", cell.fertility_desire);
          v.field("dissolution_threshold", cell.dissolution_threshold);
        });
      }
    });
  });
  v.section("reward", [&] {
    v.field("alpha", c.reward.alpha);
    v.field("beta", c.reward.beta);
    v.field("delta", c.reward.delta);
    v.field("gamma", c.reward.gamma);
  });
  v.section("lifecycle", [&] {
    auto& l = c.lifecycle;
    v.field("max_age", l.max_age);
    v.field("hazard_onset_age", l.hazard_onset_age);
    v.field("hazard", l.hazard);
    v.field("fecundity_peak", l.fecundity_peak);
    v.field("fecundity_onset", l.fecundity_onset);
    v.field("female_fertility_end", l.female_fertility_end);
    v.field("male_fertility_end", l.male_fertility_end);
    v.field("child_noise", l.child_noise);
    v.field("max_children", l.max_children);
    v.field("wage", l.wage);
    v.field("growth", l.growth);
    v.field("retirement_age", l.retirement_age);
    v.field("consumption", l.consumption);
    v.field("child_unit_cost", l.child_unit_cost);
    v.field("mate_value_drift_onset", l.mate_value_drift_onset);
    v.field("mate_value_drift", l.mate_value_drift);
    v.field("penalty_aversion", l.penalty_aversion);
    v.field("cost_aversion", l.cost_aversion);
  });
  v.section("metrics", [&] {
    auto& m = c.metrics;
    v.field("tfr_window", m.tfr_window);
    v.field("summary_window", m.summary_window);
    v.field("generation_length", m.generation_length);
    v.field("envy_margin", m.envy_margin);
  });
}

template <class F>
void visit_rules(F&& field, InstitutionRules& r) {
  field("spouse_cap", r.spouse_cap);
  field("companion_cap", r.companion_cap);
  field("total_cap", r.total_cap);
  field("gender_symmetric", r.gender_symmetric);
  field("motherhood_penalty_rate", r.motherhood_penalty_rate);
  field("rearing_subsidy", r.rearing_subsidy);
  field("companion_inheritance", r.companion_inheritance);
  field("divorce_hazard", r.divorce_hazard);
}

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

template <class T>
constexpr const char* type_name() {
  if constexpr (std::is_same_v<T, bool>) return "a boolean";
  if constexpr (std::is_integral_v<T>) return "an integer";
  if constexpr (std::is_floating_point_v<T>) return "a number";
  return "a string";
}

class Loader {
 public:
  explicit Loader(const YAML::Node& root) { push(root, ""); }

  template <class T>
  void field(const char* key, T& out) {
    const auto n = lookup(key);
    if (!n) return;
    read(*n, path_of(key), out);
  }

  template <class Fn>
  void section(const char* key, Fn&& body) {
    push(lookup(key).value_or(YAML::Node(YAML::NodeType::Null)), path_of(key));
    body();
    pop();
  }

  void finish() { pop(); }

  std::optional<YAML::Node> lookup(const char* key) {
    Frame& f = stack_.back();
    f.seen.insert(key);
    if (!f.node.IsMap()) return std::nullopt;
    const YAML::Node& parent = f.node;
    YAML::Node n = parent[key];
    if (!n.IsDefined() || n.IsNull()) return std::nullopt;
    return n;
  }

 private:
  struct Frame {
    YAML::Node node;
    std::string path;
    std::set<std::string> seen;
  };

  void push(const YAML::Node& n, std::string path) {
    if (n.IsDefined() && !n.IsNull() && !n.IsMap()) {
      throw ParseError(line_of(n), (path.empty() ? std::string("document") : path) +
                                       " must be a mapping");
    }
    stack_.push_back({n, std::move(path), {}});
  }

  void pop() {
    const Frame& f = stack_.back();
    if (f.node.IsMap()) {
      for (const auto& kv : f.node) {
        const auto key = kv.first.as<std::string>();
        if (!f.seen.count(key)) {
          throw ConfigError(f.path.empty() ? key : f.path + "." + key,
                            fmt::format("unknown key (line {})", line_of(kv.first)));
        }
      }
    }
    stack_.pop_back();
  }

  std::string path_of(const char* key) const {
    const std::string& p = stack_.back().path;
    return p.empty() ? std::string(key) : p + "." + key;
  }

  template <class T>
  static void read(const YAML::Node& n, const std::string& path, T& out) {
    if (!n.IsScalar()) throw ParseError(line_of(n), path + " must be " + type_name<T>());
    try {
      out = n.as<T>();
    } catch (const YAML::Exception&) {
      throw ParseError(line_of(n), path + " must be " + type_name<T>());
    }
  }

  template <class T, std::size_t N>
  static void read(const YAML::Node& n, const std::string& path, std::array<T, N>& out) {
    if (!n.IsSequence() || n.size() != N) {
      throw ParseError(line_of(n), fmt::format("{} must be a list of {} values", path, N));
    }
    for (std::size_t i = 0; i < N; ++i) read(n[i], path, out[i]);
  }

  static void read(const YAML::Node& n, const std::string& path, std::optional<std::uint64_t>& out) {
    std::uint64_t v = 0;
    read(n, path, v);
    out = v;
  }

  std::vector<Frame> stack_;
};

std::string format_scalar(int v) { return std::to_string(v); }
std::string format_scalar(bool v) { return v ? "true" : "false"; }
std::string format_scalar(double v) { return fmt::format("{}", v); }
std::string format_scalar(std::uint64_t v) { return std::to_string(v); }
std::string format_scalar(const std::string& v) {
  std::string out = "\"";
  for (char ch : v) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}
template <class T, std::size_t N>
std::string format_scalar(const std::array<T, N>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < N; ++i) {
    if (i) out += ", ";
    out += format_scalar(v[i]);
  }
  return out + "]";
}

class Saver {
 public:
  template <class T>
  void field(const char* key, const T& v) {
    out_ += indent() + key + ": " + format_scalar(v) + "\n";
  }

  template <class Fn>
  void section(const char* key, Fn&& body) {
    out_ += indent() + key + ":\n";
    ++depth_;
    body();
    --depth_;
  }

  std::string take() { return std::move(out_); }

 private:
  std::string indent() const { return std::string(static_cast<std::size_t>(depth_) * 2, ' '); }
  std::string out_;
  int depth_ = 0;
};

Preset parse_preset(const YAML::Node& n) {
  std::string s;
  try {
    s = n.as<std::string>();
  } catch (const YAML::Exception&) {
    throw ParseError(line_of(n), "institution.preset must be a string");
  }
  if (s == "sps") return Preset::sps;
  if (s == "monogamy") return Preset::monogamy;
  if (s == "custom") return Preset::custom;
  throw ConfigError("institution.preset", "unknown preset '" + s + "' (expected sps, monogamy or custom)");
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.mark.line + 1, e.msg);
  }
  ScenarioConfig c;
  if (root.IsMap()) {
    for (const char* key : {"marl_algorithm", "llm_agent_fraction"}) {
      if (root[key]) {
        throw ConfigError(key, "unsupported: this option has no simulated counterpart");
      }
    }
  }
  Loader loader(root);
  loader.field("seed", c.seed);
  loader.field("output_dir", c.output_dir);
  visit_fields(loader, c);

  loader.section("institution", [&] {
    Loader& l = loader;
    if (const auto preset = l.lookup("preset")) c = c.with_preset(parse_preset(*preset));
    const InstitutionRules before = c.rules;
    visit_rules([&](const char* key, auto& v) { l.field(key, v); }, c.rules);
    if (c.preset != Preset::custom && c.rules != before) c.preset = Preset::custom;
  });
  loader.finish();
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string save_config(const ScenarioConfig& config) {
  ScenarioConfig c = config;
  Saver s;
  if (c.seed) s.field("seed", *c.seed);
  s.field("output_dir", c.output_dir);
  visit_fields(s, c);
  s.section("institution", [&] {
    s.field("preset", std::string(to_string(c.preset)));
    visit_rules([&](const char* key, const auto& v) { s.field(key, v); }, c.rules);
  });
  return s.take();
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(const ScenarioConfig& config) {
  ScenarioConfig c = config;
  c.seed.reset();
  c.output_dir.clear();
  return fnv1a(save_config(c));
}

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

std::string frames_csv(const std::vector<MetricsFrame>& frames, std::string_view institution,
                       std::uint64_t seed) {
  std::string out(kFramesHeader);
  out += '\n';
  for (const MetricsFrame& f : frames) {
    out += fmt::format("{},{},{}", f.step, institution, seed);
    for (double w : f.welfare) out += fmt::format(",{:.12g}", w);
    out += fmt::format(",{:.12g},{:.12g},{:.12g},{:.12g},{},{}\n", f.tfr, f.gini_wealth,
                       f.gini_welfare, f.unpartnered_male_frac, f.births, f.deaths);
  }
  return out;
}

namespace {

using json = nlohmann::ordered_json;

json cells_json(const std::array<double, kCellCount>& v) {
  json j = json::object();
  for (int c = 0; c < kCellCount; ++c) j[std::string(cell_name(c))] = v[c];
  return j;
}

json fairness_json(const FairnessReport& f) {
  return {{"individual_rationality_violations", f.individual_rationality_violations},
          {"envy_count", f.envy_count},
          {"tier_gini_sps", f.tier_gini_sps},
          {"tier_gini_monogamy", f.tier_gini_monogamy},
          {"tier_gini_delta", f.tier_gini_delta},
          {"gender_welfare_gap", f.gender_welfare_gap},
          {"gender_t_statistic", f.gender_t_statistic},
          {"dominated_cells", f.dominated_cells}};
}

json graph_json(const GraphSummary& g) {
  json cross = json::object();
  for (int lo = 0; lo < kTierCount; ++lo) {
    for (int hi = lo; hi < kTierCount; ++hi) {
      const std::string pair = std::string(to_string(static_cast<Tier>(lo))) +
                               std::string(to_string(static_cast<Tier>(hi)));
      cross[pair] = {{"spouse", g.cross_tier.counts[lo][hi][0]},
                     {"companion", g.cross_tier.counts[lo][hi][1]}};
    }
  }
  return {{"nodes", g.nodes},
          {"edges", g.edges},
          {"max_degree", g.max_degree},
          {"clustering", g.clustering},
          {"avg_path_length", g.path.value},
          {"largest_component", g.path.component_size},
          {"path_singleton", g.path.singleton},
          {"sigma", g.sigma.sigma},
          {"sigma_degenerate", g.sigma.degenerate},
          {"random_clustering", g.sigma.random_clustering},
          {"random_path_length", g.sigma.random_path_length},
          {"cross_tier", cross},
          {"ac_paths", g.cross_tier.ac_paths},
          {"ac_paths_via_b", g.cross_tier.ac_paths_via_b},
          {"b_bridging_share", g.cross_tier.b_bridging_share}};
}

}  // namespace

std::string record_json(const RunRecord& r) {
  json j;
  j["config_hash"] = hex64(r.config_hash);
  j["seed"] = r.seed;
  j["institution"] = r.institution;
  j["initial_state_hash"] = hex64(r.initial_state_hash);
  j["steps"] = r.frames.size();
  if (!r.frames.empty()) {
    const MetricsFrame& f = r.frames.back();
    j["final"] = {{"step", f.step},
                  {"welfare", cells_json(f.welfare)},
                  {"mean_welfare", f.mean_welfare},
                  {"tfr", f.tfr},
                  {"gini_wealth", f.gini_wealth},
                  {"gini_welfare", f.gini_welfare},
                  {"unpartnered_male_frac", f.unpartnered_male_frac},
                  {"stability_flag", f.stability_flag},
                  {"population", f.population}};
  }
  j["audit"] = {{"individual_rationality_violations", r.ir_violations},
                {"envy_count", r.envy_count}};
  j["graph"] = graph_json(r.graph);
  j["wealth"] = {{"initial", r.ledger.initial},
                 {"income", r.ledger.income},
                 {"consumption", r.ledger.consumption},
                 {"child_costs", r.ledger.child_costs},
                 {"unclaimed", r.ledger.unclaimed},
                 {"final_total", r.final_total_wealth},
                 {"max_ledger_gap", r.max_ledger_gap},
                 {"settlements", r.settlements},
                 {"estate_routes", {{"children", r.estate_routes[0]},
                                    {"spouse", r.estate_routes[1]},
                                    {"pool", r.estate_routes[2]},
                                    {"unclaimed", r.estate_routes[3]}}},
                 {"a_tier_heirs_mean", r.a_tier_heirs_mean},
                 {"max_settlement_error", r.max_settlement_error}};
  if (!r.adaptation_log.empty()) {
    int accepted = 0;
    for (const auto& e : r.adaptation_log) accepted += e.accepted ? 1 : 0;
    j["adaptation"] = {{"moves", r.adaptation_log.size()}, {"accepted", accepted}};
  }
  return j.dump(2) + "\n";
}

std::string comparison_csv(const ComparisonReport& report) {
  std::string out = "seed";
  for (int c = 0; c < kCellCount; ++c) out += fmt::format(",delta_{}", cell_name(c));
  out +=
      ",mean_welfare_sps,mean_welfare_monogamy,mean_welfare_delta,tfr_sps,tfr_monogamy,"
      "unpartnered_sps,unpartnered_monogamy,tier_gini_delta,gender_gap,ir_violations\n";
  for (const SeedComparison& s : report.seeds) {
    out += std::to_string(s.seed);
    for (double d : s.welfare_delta) out += fmt::format(",{:.12g}", d);
    out += fmt::format(",{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{}\n",
                       s.mean_welfare_sps, s.mean_welfare_monogamy, s.mean_welfare_delta,
                       s.tfr_sps, s.tfr_monogamy, s.unpartnered_sps, s.unpartnered_monogamy,
                       s.fairness.tier_gini_delta, s.fairness.gender_welfare_gap,
                       s.fairness.individual_rationality_violations);
  }
  return out;
}

std::string comparison_json(const ComparisonReport& report) {
  json seeds = json::array();
  for (const SeedComparison& s : report.seeds) {
    json marks = json::array();
    for (const GenerationMark& m : s.gini_marks) {
      marks.push_back({{"step", m.step}, {"gini_sps", m.gini_sps}, {"gini_monogamy", m.gini_monogamy}});
    }
    seeds.push_back({{"seed", s.seed},
                     {"welfare_sps", cells_json(s.welfare_sps)},
                     {"welfare_monogamy", cells_json(s.welfare_monogamy)},
                     {"welfare_delta", cells_json(s.welfare_delta)},
                     {"relative_gain", cells_json(s.relative_gain)},
                     {"largest_gain_cell", std::string(cell_name(s.largest_relative_gain_cell()))},
                     {"mean_welfare_delta", s.mean_welfare_delta},
                     {"tfr_sps", s.tfr_sps},
                     {"tfr_monogamy", s.tfr_monogamy},
                     {"tfr_delta", s.tfr_delta},
                     {"unpartnered_sps", s.unpartnered_sps},
                     {"unpartnered_monogamy", s.unpartnered_monogamy},
                     {"stability_flag_sps", s.stability_flag_sps},
                     {"stability_flag_monogamy", s.stability_flag_monogamy},
                     {"gini_marks", marks},
                     {"fairness", fairness_json(s.fairness)}});
  }
  json j;
  j["seeds"] = seeds;
  return j.dump(2) + "\n";
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_run(const RunRecord& record, const std::filesystem::path& dir) {
  write_atomic(dir / "frames.csv", frames_csv(record.frames, record.institution, record.seed));
  write_atomic(dir / "record.json", record_json(record));
  write_atomic(dir / "graph.csv", record.edge_list);
}

}  // namespace sps
