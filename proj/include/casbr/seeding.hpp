#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "casbr/graph.hpp"
#include "casbr/rng.hpp"

namespace casbr {

// Cascade seed node set: distinct valid ids, kept in a stable order.
class SeedSet {
 public:
  SeedSet() = default;
  explicit SeedSet(std::vector<NodeId> nodes) : nodes_(std::move(nodes)) {
    auto sorted = nodes_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("SeedSet: duplicate node ids");
  }

  const std::vector<NodeId>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  std::vector<NodeId> sorted() const {
    auto out = nodes_;
    std::sort(out.begin(), out.end());
    return out;
  }

  void validate_for(const Graph& g) const {
    for (NodeId v : nodes_)
      if (v >= g.node_count())
        throw std::invalid_argument("SeedSet: node id " + std::to_string(v) +
                                    " out of range");
  }

 private:
  std::vector<NodeId> nodes_;
};

inline void write_seed_set(const SeedSet& seeds, std::ostream& out) {
  for (NodeId v : seeds.nodes()) out << v << '\n';
}

inline void write_seed_set_file(const SeedSet& seeds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write seed file: " + path.string());
  write_seed_set(seeds, out);
}

inline SeedSet read_seed_set(std::istream& in) {
  std::vector<NodeId> nodes;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    nodes.push_back(static_cast<NodeId>(std::stoull(line)));
  }
  return SeedSet(std::move(nodes));
}

inline SeedSet read_seed_set_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open seed file: " + path.string());
  return read_seed_set(in);
}

// Uniform sample without replacement of round(fraction * n) nodes.
inline SeedSet random_seeds(const Graph& g, double fraction, RngSeed seed) {
  std::size_t n = g.node_count();
  if (n < 1) throw std::invalid_argument("random_seeds: empty graph");
  if (fraction <= 0.0 || fraction > 1.0)
    throw std::invalid_argument("random_seeds: fraction must be in (0,1]");
  auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (k < 1) throw std::invalid_argument("random_seeds: fraction yields zero seeds");
  k = std::min(k, n);

  Rng rng(seed);
  std::vector<NodeId> ids(n);
  std::iota(ids.begin(), ids.end(), NodeId{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(k);
  std::sort(ids.begin(), ids.end());
  return SeedSet(std::move(ids));
}

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), NodeId{0});
  }
  NodeId find(NodeId v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }
  void unite(NodeId a, NodeId b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }
  std::uint32_t component_size(NodeId v) { return size_[find(v)]; }

 private:
  std::vector<NodeId> parent_;
  std::vector<std::uint32_t> size_;
};

}  // namespace detail

// Greedy influence maximization, NewGreedyIC scheme: every round samples r
// live-edge graphs (edges kept independently with probability p) and adds
// the candidate with the largest mean marginal spread. On an undirected
// live-edge graph the marginal gain of v is its component size when no
// current seed touches that component, else zero. Ties break to the lowest
// node id. Per-sample streams derive from the sample's global index, so
// samples can be evaluated concurrently without changing the result.
inline SeedSet new_greedy_ic(const Graph& g, std::size_t k, double p, std::size_t r,
                             RngSeed seed) {
  std::size_t n = g.node_count();
  if (k > n) throw std::invalid_argument("new_greedy_ic: k exceeds node count");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("new_greedy_ic: p must be in [0,1]");
  if (r < 1) throw std::invalid_argument("new_greedy_ic: need at least one simulation round");

  std::vector<NodeId> chosen;
  std::vector<char> in_seed(n, 0);
  std::vector<double> gain(n);
  auto edges = g.edges();

  for (std::size_t round = 0; round < k; ++round) {
    std::fill(gain.begin(), gain.end(), 0.0);
    for (std::size_t s = 0; s < r; ++s) {
      Rng rng(seed.derive(round * r + s));
      detail::UnionFind uf(n);
      for (auto [u, v] : edges)
        if (rng.bernoulli(p)) uf.unite(u, v);
      std::vector<char> hit(n, 0);
      for (NodeId sd : chosen) hit[uf.find(sd)] = 1;
      for (NodeId v = 0; v < n; ++v) {
        if (in_seed[v]) continue;
        NodeId root = uf.find(v);
        if (!hit[root]) gain[v] += uf.component_size(root);
      }
    }
    NodeId best = 0;
    double best_gain = -1.0;
    for (NodeId v = 0; v < n; ++v) {
      if (in_seed[v]) continue;
      if (gain[v] > best_gain) {
        best_gain = gain[v];
        best = v;
      }
    }
    chosen.push_back(best);
    in_seed[best] = 1;
  }
  return SeedSet(std::move(chosen));
}

}  // namespace casbr
