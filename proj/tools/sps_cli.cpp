// sps: command-line driver for the institution simulator.
//
//   sps run      --config scenario.yaml --seed 7 --out out/
//   sps compare  --config scenario.yaml --seeds 1..10 --out out/
//   sps optimize --config scenario.yaml --seed 3 --out out/
//   sps graph    --config scenario.yaml --seed 7 --preset sps --out out/
//
// Exit codes: 0 ok, 1 invalid input, 2 invariant breach during a run.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sps/errors.hpp"
#include "sps/io.hpp"
#include "sps/optimizer.hpp"
#include "sps/simulation.hpp"

namespace fs = std::filesystem;
using namespace sps;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitInvariant = 2;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::string out;
  std::string preset;
  bool parallel = false;
};

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  try {
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
      const std::uint64_t lo = std::stoull(text.substr(0, dots));
      const std::uint64_t hi = std::stoull(text.substr(dots + 2));
      if (hi < lo) throw ConfigError("seeds", "range end precedes start");
      for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
      return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
  } catch (const std::logic_error&) {
    throw ConfigError("seeds", "expected N..M or a comma-separated list, got '" + text + "'");
  }
  return out;
}

ScenarioConfig load(const Common& c) {
  ScenarioConfig config = c.config_path.empty() ? ScenarioConfig{} : load_config(c.config_path);
  if (c.seed) config.seed = *c.seed;
  if (!c.out.empty()) config.output_dir = c.out;
  if (c.preset == "sps") config = config.with_preset(Preset::sps);
  if (c.preset == "monogamy") config = config.with_preset(Preset::monogamy);
  config.validate();
  return config;
}

std::uint64_t require_seed(const ScenarioConfig& config) {
  if (!config.seed) throw ConfigError("seed", "a seed is required (--seed or 'seed:' in the config)");
  return *config.seed;
}

Execution exec_of(const Common& c) { return c.parallel ? Execution::parallel : Execution::serial; }

void print_frame_summary(const RunRecord& r) {
  const MetricsFrame& f = r.frames.back();
  fmt::print("{} seed {} step {}: tfr {:.3f}  gini_wealth {:.3f}  unpartnered_m {:.3f}\n",
             r.institution, r.seed, f.step, f.tfr, f.gini_wealth, f.unpartnered_male_frac);
  fmt::print("  welfare");
  for (int c = 0; c < kCellCount; ++c) fmt::print("  {} {:.2f}", cell_name(c), f.welfare[c]);
  fmt::print("\n  graph: {} edges, clustering {:.4f}, B-bridging {:.3f}\n", r.graph.edges,
             r.graph.clustering, r.graph.cross_tier.b_bridging_share);
}

int cmd_run(const Common& c) {
  const ScenarioConfig config = load(c);
  const RunRecord r = run(config, require_seed(config), RunOptions{exec_of(c), 10});
  write_run(r, config.output_dir);
  print_frame_summary(r);
  fmt::print("wrote {}/frames.csv ({:.1f}s)\n", config.output_dir, r.wall_seconds);
  return kExitOk;
}

int cmd_compare(const Common& c) {
  const ScenarioConfig config = load(c);
  std::vector<std::uint64_t> seeds;
  if (!c.seeds.empty()) {
    seeds = parse_seeds(c.seeds);
  } else {
    const std::uint64_t base = require_seed(config);
    for (std::uint64_t s = base; s < base + 10; ++s) seeds.push_back(s);
  }
  const ComparisonReport report = compare(config, seeds, exec_of(c));
  const fs::path dir = config.output_dir;
  write_atomic(dir / "compare.csv", comparison_csv(report));
  write_atomic(dir / "compare.json", comparison_json(report));
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const fs::path sub = dir / fmt::format("seed_{}", seeds[i]);
    write_run(report.sps_runs[i], sub / "sps");
    write_run(report.monogamy_runs[i], sub / "monogamy");
  }
  fmt::print("{:>6} {:>9} {:>9} {:>7} {:>7} {:>8} {:>8} {:>5}\n", "seed", "dW", "dW_rel",
             "tfr_s", "tfr_m", "unp_s", "unp_m", "top");
  for (const SeedComparison& s : report.seeds) {
    fmt::print("{:>6} {:>9.3f} {:>8.1f}% {:>7.2f} {:>7.2f} {:>8.3f} {:>8.3f} {:>5}\n", s.seed,
               s.mean_welfare_delta, 100.0 * s.mean_welfare_delta / s.mean_welfare_monogamy,
               s.tfr_sps, s.tfr_monogamy, s.unpartnered_sps, s.unpartnered_monogamy,
               cell_name(s.largest_relative_gain_cell()));
  }
  return kExitOk;
}

int cmd_optimize(const Common& c, const GaParams& ga, int eval_seeds) {
  const ScenarioConfig config = load(c);
  const std::uint64_t seed = require_seed(config);
  const GaResult result = optimize(config, FitnessWeights{}, ga, seed, eval_seeds, exec_of(c));
  const fs::path dir = config.output_dir;
  write_atomic(dir / "optimizer_log.csv", optimizer_log_csv(result.log));
  const PolicyGenome& b = result.best;
  fmt::print("best fitness {:.6f} after {} evaluations\n", *b.fitness, result.evaluations);
  fmt::print("  spouse_cap {}  companion_cap {}  subsidy {:.3f}  penalty {:.4f}  divorce {:.4f}\n",
             b.spouse_cap, b.companion_cap, b.rearing_subsidy, b.motherhood_penalty_rate,
             b.divorce_hazard);
  return kExitOk;
}

int cmd_graph(const Common& c) {
  const ScenarioConfig config = load(c);
  const RunRecord r = run(config, require_seed(config), RunOptions{exec_of(c), 10});
  const fs::path dir = config.output_dir;
  write_atomic(dir / "graph.csv", r.edge_list);
  write_atomic(dir / "record.json", record_json(r));
  const GraphSummary& g = r.graph;
  fmt::print("nodes {}  edges {}  max degree {}\n", g.nodes, g.edges, g.max_degree);
  fmt::print("clustering {:.4f}  path length {:.3f} (component {})\n", g.clustering, g.path.value,
             g.path.component_size);
  fmt::print("sigma {:.3f}{}  B-bridging share {:.3f} of {} A-C paths\n", g.sigma.sigma,
             g.sigma.degenerate ? " (degenerate)" : "", g.cross_tier.b_bridging_share,
             g.cross_tier.ac_paths);
  return kExitOk;
}

void add_common(CLI::App* app, Common& c, bool seeds) {
  app->add_option("--config", c.config_path, "scenario YAML file")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "random seed");
  if (seeds) app->add_option("--seeds", c.seeds, "seed range N..M or list a,b,c");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--preset", c.preset, "institution preset")
      ->check(CLI::IsMember({"sps", "monogamy"}));
  app->add_flag("--parallel", c.parallel, "use OpenMP across runs and kernels");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Institution simulator: SPS vs monogamy"};
  app.require_subcommand(1);
  Common common;
  GaParams ga;
  int eval_seeds = 3;

  auto* run_cmd = app.add_subcommand("run", "run one scenario");
  add_common(run_cmd, common, false);
  auto* compare_cmd = app.add_subcommand("compare", "paired SPS vs monogamy runs");
  add_common(compare_cmd, common, true);
  auto* opt_cmd = app.add_subcommand("optimize", "genetic search over institution parameters");
  add_common(opt_cmd, common, false);
  opt_cmd->add_option("--generations", ga.generations);
  opt_cmd->add_option("--pop-size", ga.pop_size);
  opt_cmd->add_option("--eval-seeds", eval_seeds);
  auto* graph_cmd = app.add_subcommand("graph", "run and export the final mating graph");
  add_common(graph_cmd, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*run_cmd) return cmd_run(common);
    if (*compare_cmd) return cmd_compare(common);
    if (*opt_cmd) return cmd_optimize(common, ga, eval_seeds);
    if (*graph_cmd) return cmd_graph(common);
  } catch (const InvariantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const EvaluationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return std::string(e.what()).find("invariant breached") != std::string::npos ? kExitInvariant
                                                                                  : kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitOk;
}
