#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "casbr/graph.hpp"
#include "casbr/partition.hpp"
#include "casbr/rng.hpp"
#include "casbr/seeding.hpp"

namespace casbr {

enum class Group : std::uint8_t {
  control = 0,
  treatment = 1,
  bystander = 2,
  unassigned = 3,
};

// Per-node treatment label vector. Designs produce full {0,1} coverage;
// bystanders appear only after post-processing.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t n) : groups_(n, Group::unassigned) {}

  std::size_t size() const noexcept { return groups_.size(); }
  Group group(NodeId v) const { return groups_[v]; }
  void set(NodeId v, Group g) { groups_[v] = g; }

  std::size_t count(Group g) const {
    return static_cast<std::size_t>(std::count(groups_.begin(), groups_.end(), g));
  }

  bool fully_assigned() const {
    return count(Group::unassigned) == 0;
  }

  void require_assigned(bool allow_bystander = true) const {
    for (Group g : groups_) {
      if (g == Group::unassigned)
        throw std::invalid_argument("Assignment: unassigned node");
      if (!allow_bystander && g == Group::bystander)
        throw std::invalid_argument("Assignment: bystander label not allowed here");
    }
  }

 private:
  std::vector<Group> groups_;
};

inline void write_assignment(const Assignment& a, std::ostream& out) {
  out << "node_id,label\n";
  for (NodeId v = 0; v < a.size(); ++v)
    out << v << ',' << static_cast<int>(a.group(v)) << '\n';
}

inline void write_assignment_file(const Assignment& a, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write assignment file: " + path.string());
  write_assignment(a, out);
}

inline Assignment read_assignment(std::istream& in) {
  std::vector<std::pair<NodeId, int>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!std::isdigit(static_cast<unsigned char>(line[0]))) continue;  // header
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("assignment parse error: expected node_id,label");
    rows.emplace_back(static_cast<NodeId>(std::stoull(line.substr(0, comma))),
                      std::stoi(line.substr(comma + 1)));
  }
  Assignment a(rows.size());
  for (auto [v, label] : rows) {
    if (v >= a.size()) throw std::runtime_error("assignment parse error: node ids not dense");
    if (label < 0 || label > 2) throw std::runtime_error("assignment parse error: label not in {0,1,2}");
    a.set(v, static_cast<Group>(label));
  }
  return a;
}

inline Assignment read_assignment_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open assignment file: " + path.string());
  return read_assignment(in);
}

// Fraction of v's assigned neighbors that are treated; bystanders and
// unassigned neighbors count on neither side.
inline double treatment_probability(const Graph& g, const Assignment& a, NodeId v) {
  std::size_t treated = 0, control = 0;
  for (NodeId u : g.neighbors(v)) {
    if (a.group(u) == Group::treatment) ++treated;
    else if (a.group(u) == Group::control) ++control;
  }
  if (treated + control == 0)
    throw std::invalid_argument("treatment_probability: node has no assigned neighbors");
  return static_cast<double>(treated) / static_cast<double>(treated + control);
}

inline Assignment randomized_assignment(const Graph& g, RngSeed seed) {
  Rng rng(seed);
  Assignment a(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v)
    a.set(v, rng.bernoulli(0.5) ? Group::treatment : Group::control);
  return a;
}

// Cluster-level coin flips; nodes inherit their cluster's label.
inline Assignment cbr_assignment(const Graph& g, const Partition& part, RngSeed seed) {
  part.validate_for(g);
  Rng rng(seed);
  std::vector<Group> cluster_label(part.k);
  for (ClusterId c = 0; c < part.k; ++c)
    cluster_label[c] = rng.bernoulli(0.5) ? Group::treatment : Group::control;
  Assignment a(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v)
    a.set(v, cluster_label[part.labels[v]]);
  return a;
}

struct CasbrStats {
  std::uint64_t node_pops = 0;
  std::uint64_t edge_scans = 0;
  std::uint64_t touches() const { return node_pops + edge_scans; }
};

// Cascade-based randomization. Seeds get fair coins; labels then propagate
// outward level by level: each frontier level builds the treated- and
// control-adjacent queues, shuffles them, and alternates pops, assigning each
// popped node to treatment with its neighbor fraction. When the frontier dies
// out, whatever remains (seedless components, singletons) gets fair coins.
inline Assignment casbr_assignment(const Graph& g, const SeedSet& seeds, RngSeed seed,
                                   CasbrStats* stats = nullptr) {
  if (seeds.empty()) throw std::invalid_argument("casbr_assignment: empty seed set");
  seeds.validate_for(g);
  std::size_t n = g.node_count();
  Assignment a(n);
  Rng rng(seed);
  CasbrStats local;

  std::vector<NodeId> level = seeds.sorted();
  for (NodeId s : level)
    a.set(s, rng.bernoulli(0.5) ? Group::treatment : Group::control);

  std::vector<NodeId> queue_t, queue_c;
  std::vector<std::uint8_t> queued_t(n, 0), queued_c(n, 0);
  while (true) {
    // Next frontier comes from the nodes assigned in the previous level;
    // older assignees have no unassigned neighbors left. Queue order before
    // the shuffle: ascending assigned-node id, then ascending neighbor id.
    queue_t.clear();
    queue_c.clear();
    std::sort(level.begin(), level.end());
    for (NodeId v : level) {
      Group gv = a.group(v);
      for (NodeId u : g.neighbors(v)) {
        ++local.edge_scans;
        if (a.group(u) != Group::unassigned) continue;
        if (gv == Group::treatment && !queued_t[u]) {
          queued_t[u] = 1;
          queue_t.push_back(u);
        } else if (gv == Group::control && !queued_c[u]) {
          queued_c[u] = 1;
          queue_c.push_back(u);
        }
      }
    }
    for (NodeId u : queue_t) queued_t[u] = 0;
    for (NodeId u : queue_c) queued_c[u] = 0;
    if (queue_t.empty() && queue_c.empty()) break;

    rng.shuffle(queue_t);
    rng.shuffle(queue_c);
    level.clear();
    std::size_t it = 0, ic = 0;
    bool treated_turn = true;
    while (it < queue_t.size() || ic < queue_c.size()) {
      NodeId v = 0;
      bool have = false;
      if (treated_turn && it < queue_t.size()) {
        v = queue_t[it++];
        have = true;
      } else if (!treated_turn && ic < queue_c.size()) {
        v = queue_c[ic++];
        have = true;
      }
      treated_turn = !treated_turn;
      if (!have) continue;
      ++local.node_pops;
      if (a.group(v) != Group::unassigned) continue;  // popped from the other queue already
      double p_t = treatment_probability(g, a, v);
      a.set(v, rng.bernoulli(p_t) ? Group::treatment : Group::control);
      level.push_back(v);
    }
  }

  // Components the frontier never reached.
  for (NodeId v = 0; v < n; ++v)
    if (a.group(v) == Group::unassigned)
      a.set(v, rng.bernoulli(0.5) ? Group::treatment : Group::control);

  if (stats) *stats = local;
  return a;
}

// |treated - control| neighbor gap over full degree. The magnitude is what
// flags a balanced neighborhood; the sign of the gap carries no information
// for that purpose.
inline double bystander_score(const Graph& g, const Assignment& a, NodeId v) {
  std::size_t deg = g.degree(v);
  if (deg == 0)
    throw std::invalid_argument("bystander_score: undefined for isolated nodes");
  std::ptrdiff_t gap = 0;
  for (NodeId u : g.neighbors(v)) {
    if (a.group(u) == Group::treatment) ++gap;
    else if (a.group(u) == Group::control) --gap;
  }
  return static_cast<double>(gap < 0 ? -gap : gap) / static_cast<double>(deg);
}

// Single pass over the input labels: every node scoring below alpha becomes
// a bystander. Scores are not recomputed as nodes drop out.
inline Assignment post_process(const Graph& g, const Assignment& a, double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("post_process: alpha must be nonnegative");
  a.require_assigned(/*allow_bystander=*/false);
  Assignment out = a;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (g.degree(v) == 0) continue;  // isolated nodes are never bystanders
    if (bystander_score(g, a, v) < alpha) out.set(v, Group::bystander);
  }
  return out;
}

// Fraction of all edges running between a treated and a control endpoint.
inline double cut_edge_fraction(const Graph& g, const Assignment& a) {
  a.require_assigned();
  if (g.edge_count() == 0) return 0.0;
  std::size_t cut = 0;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    Group gu = a.group(u);
    for (NodeId v : g.neighbors(u)) {
      if (v <= u) continue;
      Group gv = a.group(v);
      if ((gu == Group::treatment && gv == Group::control) ||
          (gu == Group::control && gv == Group::treatment))
        ++cut;
    }
  }
  return static_cast<double>(cut) / static_cast<double>(g.edge_count());
}

}  // namespace casbr
