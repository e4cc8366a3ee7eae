#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sps/parallel.hpp"
#include "sps/population.hpp"
#include "sps/rng.hpp"

namespace sps {

struct GraphNode {
  AgentId id = 0;
  Tier tier = Tier::B;
  Gender gender = Gender::male;
};

// Endpoints are node indices with a < b.
struct GraphEdge {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  RelKind kind = RelKind::spouse;

  bool operator==(const GraphEdge&) const = default;
};

// Typed simple graph G = (V, E, tier, kind). Nodes are sorted by agent id and
// edges by (a, b); adjacency lists are sorted.
class MatingGraph {
 public:
  MatingGraph() = default;
  // Throws std::invalid_argument on self-loops, multi-edges or bad indices.
  MatingGraph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges, int step = 0);

  const std::vector<GraphNode>& nodes() const noexcept { return nodes_; }
  const std::vector<GraphEdge>& edges() const noexcept { return edges_; }
  const std::vector<std::uint32_t>& neighbors(std::size_t v) const { return adjacency_[v]; }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t degree(std::size_t v) const { return adjacency_[v].size(); }
  bool has_edge(std::uint32_t u, std::uint32_t v) const;
  int step() const noexcept { return step_; }

 private:
  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<std::uint32_t>> adjacency_;
  int step_ = 0;
};

// Living agents as nodes, active relationships as edges.
MatingGraph snapshot(const Population& pop);

// Local clustering per node; nodes of degree < 2 get 0.
std::vector<double> local_clustering(const MatingGraph& g, Execution exec = Execution::serial);

// Mean local clustering over all nodes (degree < 2 nodes count as 0).
double clustering_coefficient(const MatingGraph& g, Execution exec = Execution::serial);

struct PathLengthResult {
  double value = 0.0;
  std::size_t component_size = 0;
  bool singleton = false;  // largest component has one node; value is 0
};

// Mean BFS distance over ordered pairs of the largest connected component
// (ties broken by the lowest node index).
PathLengthResult avg_path_length(const MatingGraph& g, Execution exec = Execution::serial);

// Degree-preserving double-edge swaps; attempts = swaps_per_edge * |E|.
MatingGraph rewire(const MatingGraph& g, Rng& rng, int swaps_per_edge = 20);

struct SigmaResult {
  double sigma = 0.0;
  double clustering = 0.0;
  double path_length = 0.0;
  double random_clustering = 0.0;
  double random_path_length = 0.0;
  bool degenerate = false;  // a zero clustering or path length made sigma undefined
};

// (C / C_rand) / (L / L_rand) against n_random rewired null graphs. Null
// sample i draws from the stream (seed, null_model, i).
SigmaResult small_world_sigma(const MatingGraph& g, std::uint64_t seed, int n_random,
                              Execution exec = Execution::serial);

struct CrossTierStats {
  // counts[lo][hi][kind] for tier indices lo <= hi.
  std::array<std::array<std::array<long long, 2>, kTierCount>, kTierCount> counts{};
  long long ac_paths = 0;        // A-x-C paths of length 2
  long long ac_paths_via_b = 0;  // ... whose midpoint is in tier B
  double b_bridging_share = 0.0;

  long long count(Tier x, Tier y, RelKind k) const;
};

CrossTierStats cross_tier_stats(const MatingGraph& g);

// "a,b,kind,tier_a,tier_b" per edge with agent ids, a < b, sorted, newline-terminated.
std::string edge_list(const MatingGraph& g);

}  // namespace sps
