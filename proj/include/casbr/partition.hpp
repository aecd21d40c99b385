#pragma once

#include <algorithm>
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

using ClusterId = std::uint32_t;

// Balanced partition: every node labeled, each cluster at most ceil(n/k).
struct Partition {
  std::vector<ClusterId> labels;
  ClusterId k = 0;

  std::size_t capacity() const {
    return (labels.size() + k - 1) / k;
  }

  void validate_for(const Graph& g) const {
    if (labels.size() != g.node_count())
      throw std::invalid_argument("Partition: label count does not match graph");
    for (ClusterId c : labels)
      if (c >= k) throw std::invalid_argument("Partition: cluster id out of range");
  }
};

// Restreaming linear deterministic greedy. Nodes stream in one seeded random
// order, fixed across passes; each node joins the cluster holding the most of
// its neighbors among clusters still below capacity (ties: smaller current
// cluster, then lower cluster id). From the second pass on, neighbors not yet
// restreamed count under their previous-pass label.
inline Partition reldg_partition(const Graph& g, ClusterId k, std::size_t passes,
                                 RngSeed seed) {
  std::size_t n = g.node_count();
  if (k < 1 || k > n)
    throw std::invalid_argument("reldg_partition: require 1 <= k <= n");
  if (passes < 1) throw std::invalid_argument("reldg_partition: require passes >= 1");

  constexpr ClusterId kNone = ~ClusterId{0};
  std::size_t capacity = (n + k - 1) / k;

  Rng rng(seed);
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  rng.shuffle(order);
  std::vector<std::size_t> position(n);
  for (std::size_t i = 0; i < n; ++i) position[order[i]] = i;

  std::vector<ClusterId> prev(n, kNone), cur(n, kNone);
  std::vector<std::size_t> sizes(k);
  std::vector<std::uint32_t> neighbor_count(k);

  for (std::size_t pass = 0; pass < passes; ++pass) {
    std::fill(cur.begin(), cur.end(), kNone);
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      NodeId v = order[i];
      for (NodeId u : g.neighbors(v)) {
        ClusterId label = position[u] < i ? cur[u] : prev[u];
        if (label != kNone) ++neighbor_count[label];
      }
      ClusterId best = kNone;
      for (ClusterId c = 0; c < k; ++c) {
        if (sizes[c] >= capacity) continue;
        if (best == kNone || neighbor_count[c] > neighbor_count[best] ||
            (neighbor_count[c] == neighbor_count[best] && sizes[c] < sizes[best]))
          best = c;
      }
      cur[v] = best;
      ++sizes[best];
      for (NodeId u : g.neighbors(v)) {
        ClusterId label = position[u] < i ? cur[u] : prev[u];
        if (label != kNone) neighbor_count[label] = 0;
      }
    }
    prev = cur;
  }
  return Partition{std::move(cur), k};
}

inline void write_partition(const Partition& part, std::ostream& out) {
  out << "node_id,cluster_id\n";
  for (NodeId v = 0; v < part.labels.size(); ++v)
    out << v << ',' << part.labels[v] << '\n';
}

inline void write_partition_file(const Partition& part, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write partition file: " + path.string());
  write_partition(part, out);
}

inline Partition read_partition(std::istream& in) {
  Partition part;
  std::string line;
  std::vector<std::pair<NodeId, ClusterId>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!std::isdigit(static_cast<unsigned char>(line[0]))) continue;  // header
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("partition parse error: expected node_id,cluster_id");
    rows.emplace_back(static_cast<NodeId>(std::stoull(line.substr(0, comma))),
                      static_cast<ClusterId>(std::stoull(line.substr(comma + 1))));
  }
  part.labels.assign(rows.size(), 0);
  for (auto [v, c] : rows) {
    if (v >= part.labels.size())
      throw std::runtime_error("partition parse error: node ids not dense");
    part.labels[v] = c;
    part.k = std::max(part.k, c + 1);
  }
  return part;
}

inline Partition read_partition_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open partition file: " + path.string());
  return read_partition(in);
}

}  // namespace casbr
