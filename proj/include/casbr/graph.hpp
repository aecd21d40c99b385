#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "casbr/rng.hpp"

namespace casbr {

using NodeId = std::uint32_t;

// Immutable undirected simple graph over dense node ids [0, n).
// Adjacency lists are sorted, deduplicated, and symmetric; safe to share
// across concurrent readers.
class Graph {
 public:
  Graph() = default;

  static Graph from_edges(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
    Graph g;
    g.adj_.assign(n, {});
    for (auto [u, v] : edges) {
      if (u >= n || v >= n)
        throw std::invalid_argument("Graph::from_edges: node id out of range");
      if (u == v) continue;
      g.adj_[u].push_back(v);
      g.adj_[v].push_back(u);
    }
    for (auto& nbrs : g.adj_) {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
      g.edge_count_ += nbrs.size();
    }
    g.edge_count_ /= 2;
    return g;
  }

  std::size_t node_count() const noexcept { return adj_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  std::size_t degree(NodeId v) const { return adj_[v].size(); }
  const std::vector<NodeId>& neighbors(NodeId v) const { return adj_[v]; }

  // Canonical edge list: pairs with u < v, lexicographically ordered.
  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edge_count_);
    for (NodeId u = 0; u < adj_.size(); ++u)
      for (NodeId v : adj_[u])
        if (u < v) out.emplace_back(u, v);
    return out;
  }

 private:
  std::vector<std::vector<NodeId>> adj_;
  std::size_t edge_count_ = 0;
};

struct LoadStats {
  std::size_t self_loops_dropped = 0;
  std::size_t duplicate_edges_collapsed = 0;
};

struct LoadedGraph {
  Graph graph;
  LoadStats stats;
};

// Parses line-oriented edge data: two nonnegative integer ids per line,
// whitespace- or comma-separated; '#' lines and blank lines are skipped.
// With dense_ids, original ids are remapped (order-preserving) to 0..m-1;
// otherwise the graph spans 0..max_id.
inline LoadedGraph load_edge_list(std::istream& in, bool dense_ids = true) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  LoadStats stats;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string cleaned = line;
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::istringstream ls(cleaned);
    std::string first;
    if (!(ls >> first)) continue;
    if (first[0] == '#') continue;

    auto parse_id = [&](const std::string& tok) -> std::uint64_t {
      std::uint64_t value = 0;
      std::size_t pos = 0;
      try {
        value = std::stoull(tok, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != tok.size() || tok[0] == '-')
        throw std::runtime_error("edge list parse error at line " + std::to_string(line_no) +
                                 ": bad node id '" + tok + "'");
      return value;
    };

    std::string second, extra;
    if (!(ls >> second) || (ls >> extra))
      throw std::runtime_error("edge list parse error at line " + std::to_string(line_no) +
                               ": expected exactly two node ids");
    std::uint64_t a = parse_id(first);
    std::uint64_t b = parse_id(second);
    if (a == b) {
      ++stats.self_loops_dropped;
      continue;
    }
    raw.emplace_back(std::min(a, b), std::max(a, b));
  }

  if (raw.empty()) return {Graph{}, stats};

  std::sort(raw.begin(), raw.end());
  std::size_t before = raw.size();
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
  stats.duplicate_edges_collapsed = before - raw.size();

  std::size_t n = 0;
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(raw.size());
  if (dense_ids) {
    std::map<std::uint64_t, NodeId> remap;
    for (auto [a, b] : raw) {
      remap.emplace(a, 0);
      remap.emplace(b, 0);
    }
    NodeId next = 0;
    for (auto& [orig, id] : remap) id = next++;
    n = remap.size();
    for (auto [a, b] : raw) edges.emplace_back(remap[a], remap[b]);
  } else {
    std::uint64_t max_id = 0;
    for (auto [a, b] : raw) max_id = std::max(max_id, b);
    n = static_cast<std::size_t>(max_id) + 1;
    for (auto [a, b] : raw)
      edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
  }
  return {Graph::from_edges(n, edges), stats};
}

inline LoadedGraph load_edge_list_file(const std::filesystem::path& path, bool dense_ids = true) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list file: " + path.string());
  return load_edge_list(in, dense_ids);
}

inline void write_edge_list(const Graph& g, std::ostream& out) {
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

// Preferential attachment starting from a clique on the first m nodes
// (the clique core is a convention choice; the model only fixes m).
inline Graph generate_barabasi_albert(std::size_t n, std::size_t m, RngSeed seed) {
  if (m < 1 || n <= m)
    throw std::invalid_argument("generate_barabasi_albert: require n > m >= 1");
  Rng rng(seed);
  std::vector<std::pair<NodeId, NodeId>> edges;
  // One entry per edge endpoint, so uniform picks are degree-proportional.
  std::vector<NodeId> endpoint_pool;
  for (NodeId u = 0; u < m; ++u)
    for (NodeId v = u + 1; v < m; ++v) {
      edges.emplace_back(u, v);
      endpoint_pool.push_back(u);
      endpoint_pool.push_back(v);
    }
  std::vector<NodeId> targets;
  for (NodeId v = static_cast<NodeId>(m); v < n; ++v) {
    targets.clear();
    while (targets.size() < m) {
      NodeId t = endpoint_pool.empty()
                     ? static_cast<NodeId>(rng.below(v))
                     : endpoint_pool[rng.below(endpoint_pool.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end())
        targets.push_back(t);
    }
    for (NodeId t : targets) {
      edges.emplace_back(v, t);
      endpoint_pool.push_back(v);
      endpoint_pool.push_back(t);
    }
  }
  return Graph::from_edges(n, edges);
}

// Forest-fire growth: each new node links to a uniform ambassador, then the
// fire spreads: every burned node links the newcomer to a geometric number
// of its unburned neighbors and burns them recursively. Forward fans use
// continue-probability p_f (mean p_f/(1-p_f)); backward fans use p_f*p_b,
// the cited generator's convention for in-links. Recorded edges are
// undirected; direction is only tracked to tell out-links from in-links.
inline Graph generate_forest_fire(std::size_t n, double p_f, double p_b, RngSeed seed) {
  if (n < 1) throw std::invalid_argument("generate_forest_fire: require n >= 1");
  if (p_f < 0.0 || p_f > 1.0 || p_b < 0.0 || p_b > 1.0)
    throw std::invalid_argument("generate_forest_fire: probabilities must be in [0,1]");
  Rng rng(seed);
  std::vector<std::vector<NodeId>> out_links(n), in_links(n);
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<std::uint32_t> burned(n, 0);
  std::uint32_t epoch = 0;
  std::vector<NodeId> frontier, candidates;

  auto link = [&](NodeId v, NodeId u) {
    out_links[v].push_back(u);
    in_links[u].push_back(v);
    edges.emplace_back(v, u);
  };

  for (NodeId v = 1; v < n; ++v) {
    ++epoch;
    NodeId ambassador = static_cast<NodeId>(rng.below(v));
    link(v, ambassador);
    burned[ambassador] = epoch;
    burned[v] = epoch;
    frontier.assign(1, ambassador);
    while (!frontier.empty()) {
      NodeId b = frontier.back();
      frontier.pop_back();
      auto burn_from = [&](const std::vector<NodeId>& nbrs, double p) {
        candidates.clear();
        for (NodeId u : nbrs)
          if (burned[u] != epoch) candidates.push_back(u);
        std::size_t fan = rng.geometric_capped(p, candidates.size());
        for (std::size_t i = 0; i < fan; ++i) {
          std::size_t j = i + static_cast<std::size_t>(rng.below(candidates.size() - i));
          std::swap(candidates[i], candidates[j]);
          NodeId u = candidates[i];
          link(v, u);
          burned[u] = epoch;
          frontier.push_back(u);
        }
      };
      burn_from(out_links[b], p_f);
      burn_from(in_links[b], p_f * p_b);
    }
  }
  return Graph::from_edges(n, edges);
}

// Maximum eccentricity taken per connected component (BFS from every node),
// the "maximal shortest path" reading for disconnected graphs.
inline std::size_t diameter(const Graph& g) {
  std::size_t n = g.node_count();
  if (n == 0) return 0;
  std::size_t best = 0;
  std::vector<std::uint32_t> dist(n);
  std::deque<NodeId> queue;
  constexpr std::uint32_t kUnseen = ~std::uint32_t{0};
  for (NodeId s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), kUnseen);
    dist[s] = 0;
    queue.assign(1, s);
    while (!queue.empty()) {
      NodeId v = queue.front();
      queue.pop_front();
      best = std::max<std::size_t>(best, dist[v]);
      for (NodeId u : g.neighbors(v)) {
        if (dist[u] == kUnseen) {
          dist[u] = dist[v] + 1;
          queue.push_back(u);
        }
      }
    }
  }
  return best;
}

}  // namespace casbr
