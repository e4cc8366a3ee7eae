#include "sps/network.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include <fmt/format.h>

namespace sps {

MatingGraph::MatingGraph(std::vector<GraphNode> nodes, std::vector<GraphEdge> edges, int step)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), step_(step) {
  const auto n = static_cast<std::uint32_t>(nodes_.size());
  for (GraphEdge& e : edges_) {
    if (e.a == e.b) throw std::invalid_argument("self-loop in mating graph");
    if (e.a >= n || e.b >= n) throw std::invalid_argument("edge endpoint out of range");
    if (e.a > e.b) std::swap(e.a, e.b);
  }
  std::sort(edges_.begin(), edges_.end(), [](const GraphEdge& x, const GraphEdge& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].a == edges_[i - 1].a && edges_[i].b == edges_[i - 1].b) {
      throw std::invalid_argument("multi-edge in mating graph");
    }
  }
  adjacency_.assign(nodes_.size(), {});
  for (const GraphEdge& e : edges_) {
    adjacency_[e.a].push_back(e.b);
    adjacency_[e.b].push_back(e.a);
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
}

bool MatingGraph::has_edge(std::uint32_t u, std::uint32_t v) const {
  const auto& list = adjacency_[u];
  return std::binary_search(list.begin(), list.end(), v);
}

MatingGraph snapshot(const Population& pop) {
  std::vector<GraphNode> nodes;
  std::vector<std::uint32_t> index(pop.agents.size(), 0);
  for (const Agent& a : pop.agents) {
    if (!a.alive) continue;
    index[a.id] = static_cast<std::uint32_t>(nodes.size());
    nodes.push_back({a.id, a.tier, a.gender()});
  }
  std::vector<GraphEdge> edges;
  for (const Relationship& r : pop.relationships) {
    if (r.active) edges.push_back({index[r.partner_a], index[r.partner_b], r.kind});
  }
  return MatingGraph(std::move(nodes), std::move(edges), pop.step);
}

std::vector<double> local_clustering(const MatingGraph& g, Execution exec) {
  std::vector<double> out(g.size(), 0.0);
  for_each_index(g.size(), exec, [&](std::size_t v) {
    const auto& nb = g.neighbors(v);
    const std::size_t k = nb.size();
    if (k < 2) return;
    std::size_t links = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const auto& other = g.neighbors(nb[i]);
      // Count neighbors of nb[i] that are also neighbors of v and come after it.
      auto it = nb.begin() + static_cast<std::ptrdiff_t>(i) + 1;
      auto jt = std::upper_bound(other.begin(), other.end(), nb[i]);
      while (it != nb.end() && jt != other.end()) {
        if (*it < *jt) {
          ++it;
        } else if (*jt < *it) {
          ++jt;
        } else {
          ++links;
          ++it;
          ++jt;
        }
      }
    }
    out[v] = 2.0 * static_cast<double>(links) / (static_cast<double>(k) * static_cast<double>(k - 1));
  });
  return out;
}

double clustering_coefficient(const MatingGraph& g, Execution exec) {
  if (g.size() == 0) return 0.0;
  const auto local = local_clustering(g, exec);
  return std::accumulate(local.begin(), local.end(), 0.0) / static_cast<double>(g.size());
}

namespace {

std::vector<std::uint32_t> largest_component(const MatingGraph& g) {
  std::vector<int> label(g.size(), -1);
  std::vector<std::uint32_t> best;
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (label[s] >= 0) continue;
    std::vector<std::uint32_t> members{static_cast<std::uint32_t>(s)};
    label[s] = static_cast<int>(s);
    for (std::size_t head = 0; head < members.size(); ++head) {
      for (std::uint32_t w : g.neighbors(members[head])) {
        if (label[w] < 0) {
          label[w] = static_cast<int>(s);
          members.push_back(w);
        }
      }
    }
    if (members.size() > best.size()) best = std::move(members);
  }
  std::sort(best.begin(), best.end());
  return best;
}

std::uint64_t bfs_distance_sum(const MatingGraph& g, std::uint32_t source) {
  std::vector<int> dist(g.size(), -1);
  std::queue<std::uint32_t> q;
  dist[source] = 0;
  q.push(source);
  std::uint64_t total = 0;
  while (!q.empty()) {
    const std::uint32_t u = q.front();
    q.pop();
    total += static_cast<std::uint64_t>(dist[u]);
    for (std::uint32_t w : g.neighbors(u)) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        q.push(w);
      }
    }
  }
  return total;
}

}  // namespace

PathLengthResult avg_path_length(const MatingGraph& g, Execution exec) {
  PathLengthResult out;
  const auto component = largest_component(g);
  out.component_size = component.size();
  if (component.size() < 2) {
    out.singleton = true;
    return out;
  }
  std::vector<std::uint64_t> sums(component.size(), 0);
  for_each_index(component.size(), exec,
                 [&](std::size_t i) { sums[i] = bfs_distance_sum(g, component[i]); });
  const std::uint64_t total = std::accumulate(sums.begin(), sums.end(), std::uint64_t{0});
  const double n = static_cast<double>(component.size());
  out.value = static_cast<double>(total) / (n * (n - 1.0));
  return out;
}

MatingGraph rewire(const MatingGraph& g, Rng& rng, int swaps_per_edge) {
  std::vector<GraphEdge> edges = g.edges();
  if (edges.size() < 2) return g;
  auto key = [](std::uint32_t u, std::uint32_t v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | v;
  };
  std::unordered_set<std::uint64_t> present;
  present.reserve(edges.size() * 2);
  for (const GraphEdge& e : edges) present.insert(key(e.a, e.b));

  std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
  const long long attempts = static_cast<long long>(swaps_per_edge) * static_cast<long long>(edges.size());
  for (long long t = 0; t < attempts; ++t) {
    const std::size_t i = pick(rng);
    const std::size_t j = pick(rng);
    const bool cross = uniform01(rng) < 0.5;
    if (i == j) continue;
    const std::uint32_t a = edges[i].a, b = edges[i].b, c = edges[j].a, d = edges[j].b;
    std::uint32_t p1 = a, q1 = d, p2 = c, q2 = b;
    if (cross) {
      q1 = c;
      p2 = b;
      q2 = d;
    }
    if (p1 == q1 || p2 == q2) continue;
    const auto k1 = key(p1, q1);
    const auto k2 = key(p2, q2);
    if (k1 == k2 || present.count(k1) || present.count(k2)) continue;
    present.erase(key(a, b));
    present.erase(key(c, d));
    present.insert(k1);
    present.insert(k2);
    edges[i] = {std::min(p1, q1), std::max(p1, q1), edges[i].kind};
    edges[j] = {std::min(p2, q2), std::max(p2, q2), edges[j].kind};
  }
  return MatingGraph(g.nodes(), std::move(edges), g.step());
}

SigmaResult small_world_sigma(const MatingGraph& g, std::uint64_t seed, int n_random,
                              Execution exec) {
  if (n_random < 1) throw std::invalid_argument("n_random must be >= 1");
  SigmaResult out;
  out.clustering = clustering_coefficient(g);
  out.path_length = avg_path_length(g).value;
  std::vector<double> c_rand(static_cast<std::size_t>(n_random), 0.0);
  std::vector<double> l_rand(static_cast<std::size_t>(n_random), 0.0);
  for_each_index(static_cast<std::size_t>(n_random), exec, [&](std::size_t i) {
    Rng rng = make_stream(seed, Stream::null_model, i);
    const MatingGraph null_graph = rewire(g, rng);
    c_rand[i] = clustering_coefficient(null_graph);
    l_rand[i] = avg_path_length(null_graph).value;
  });
  out.random_clustering = std::accumulate(c_rand.begin(), c_rand.end(), 0.0) / n_random;
  out.random_path_length = std::accumulate(l_rand.begin(), l_rand.end(), 0.0) / n_random;
  if (out.clustering <= 0.0 || out.random_clustering <= 0.0 || out.path_length <= 0.0 ||
      out.random_path_length <= 0.0) {
    out.degenerate = true;
    out.sigma = 0.0;
    return out;
  }
  out.sigma = (out.clustering / out.random_clustering) / (out.path_length / out.random_path_length);
  return out;
}

long long CrossTierStats::count(Tier x, Tier y, RelKind k) const {
  int lo = static_cast<int>(x);
  int hi = static_cast<int>(y);
  if (lo > hi) std::swap(lo, hi);
  return counts[lo][hi][static_cast<int>(k)];
}

CrossTierStats cross_tier_stats(const MatingGraph& g) {
  CrossTierStats s;
  const auto& nodes = g.nodes();
  for (const GraphEdge& e : g.edges()) {
    int lo = static_cast<int>(nodes[e.a].tier);
    int hi = static_cast<int>(nodes[e.b].tier);
    if (lo > hi) std::swap(lo, hi);
    s.counts[lo][hi][static_cast<int>(e.kind)] += 1;
  }
  for (std::size_t m = 0; m < g.size(); ++m) {
    long long a = 0;
    long long c = 0;
    for (std::uint32_t w : g.neighbors(m)) {
      if (nodes[w].tier == Tier::A) ++a;
      if (nodes[w].tier == Tier::C) ++c;
    }
    s.ac_paths += a * c;
    if (nodes[m].tier == Tier::B) s.ac_paths_via_b += a * c;
  }
  s.b_bridging_share =
      s.ac_paths > 0 ? static_cast<double>(s.ac_paths_via_b) / static_cast<double>(s.ac_paths) : 0.0;
  return s;
}

std::string edge_list(const MatingGraph& g) {
  std::string out;
  const auto& nodes = g.nodes();
  for (const GraphEdge& e : g.edges()) {
    out += fmt::format("{},{},{},{},{}\n", nodes[e.a].id, nodes[e.b].id, to_string(e.kind),
                       to_string(nodes[e.a].tier), to_string(nodes[e.b].tier));
  }
  return out;
}

}  // namespace sps
