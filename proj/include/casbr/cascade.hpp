#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "casbr/designs.hpp"
#include "casbr/graph.hpp"
#include "casbr/rng.hpp"
#include "casbr/seeding.hpp"

namespace casbr {

// Group-dependent activation probabilities. Any attempt with a bystander on
// either side uses p_bystander, so bystanders both receive and exert peer
// effects.
struct SpilloverProbs {
  double p_tt = 0.05;
  double p_ct = 0.02;
  double p_cc = 0.02;
  double p_tc = 0.05;
  double p_bystander = 0.02;

  void validate() const {
    for (double p : {p_tt, p_ct, p_cc, p_tc, p_bystander})
      if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("SpilloverProbs: probabilities must be in [0,1]");
  }

  static SpilloverProbs paper_default() { return {0.05, 0.02, 0.02, 0.05, 0.02}; }
  static SpilloverProbs paper_alternate() { return {0.07, 0.05, 0.05, 0.07, 0.02}; }

  double activation(Group activator, Group target) const {
    if (activator == Group::bystander || target == Group::bystander) return p_bystander;
    if (activator == Group::treatment)
      return target == Group::treatment ? p_tt : p_tc;
    return target == Group::control ? p_cc : p_ct;
  }

  static SpilloverProbs uniform(double p) { return {p, p, p, p, p}; }
};

enum class NodeState : std::uint8_t { inactive, newly_active, activated };

struct ActivationEvent {
  std::uint32_t step;
  NodeId activator;
  Group activator_group;
  NodeId target;
  Group target_group;
};

// Test hook: records every activation attempt a cascade makes.
struct AttemptRecord {
  std::uint32_t step;
  NodeId activator;
  NodeId target;
};

// Time-indexed cascade record. Nodes move inactive -> newly_active ->
// activated exactly once or never; the horizon is the first step with zero
// new activations.
class CascadeTrace {
 public:
  static constexpr std::uint32_t kNever = ~std::uint32_t{0};

  CascadeTrace(std::vector<std::uint32_t> activation_step,
               std::vector<ActivationEvent> events, std::uint32_t horizon)
      : activation_step_(std::move(activation_step)),
        events_(std::move(events)),
        horizon_(horizon) {}

  std::size_t node_count() const noexcept { return activation_step_.size(); }
  std::uint32_t horizon() const noexcept { return horizon_; }
  const std::vector<ActivationEvent>& events() const noexcept { return events_; }
  std::uint32_t activation_step(NodeId v) const { return activation_step_[v]; }

  NodeState state_at(NodeId v, std::uint32_t step) const {
    std::uint32_t s = activation_step_[v];
    if (s == kNever || step < s) return NodeState::inactive;
    return step == s ? NodeState::newly_active : NodeState::activated;
  }

  // Outcome Y at a step: 1 iff the node has left the inactive state.
  bool outcome(NodeId v, std::uint32_t step) const {
    std::uint32_t s = activation_step_[v];
    return s != kNever && s <= step;
  }

  // Cumulative active counts for steps 0..horizon.
  std::vector<std::size_t> cumulative_active() const {
    std::vector<std::size_t> counts(horizon_ + 1, 0);
    for (std::uint32_t s : activation_step_)
      if (s != kNever && s <= horizon_) ++counts[s];
    for (std::size_t t = 1; t < counts.size(); ++t) counts[t] += counts[t - 1];
    return counts;
  }

 private:
  std::vector<std::uint32_t> activation_step_;
  std::vector<ActivationEvent> events_;
  std::uint32_t horizon_;
};

// Independent Cascade Model run. Step 0 activates the seeds; at each later
// step every node activated in the previous step attempts each still-inactive
// neighbor once (neighbors in ascending id, activators in ascending id, so a
// target's same-step suitors arrive in ascending order and stop at the first
// success). Attempt draws are keyed by (activator, target): traces are
// reproducible under a fixed seed, and two runs that share a seed share the
// per-attempt uniforms, which couples them for monotonicity checks.
inline CascadeTrace simulate_cascade(const Graph& g, const Assignment& a,
                                     const SeedSet& seeds, const SpilloverProbs& probs,
                                     RngSeed seed,
                                     std::vector<AttemptRecord>* attempt_log = nullptr) {
  std::size_t n = g.node_count();
  if (a.size() != n) throw std::invalid_argument("simulate_cascade: assignment size mismatch");
  a.require_assigned();
  probs.validate();
  seeds.validate_for(g);

  std::vector<std::uint32_t> activation_step(n, CascadeTrace::kNever);
  std::vector<ActivationEvent> events;
  std::uint64_t base = seed.state();

  std::vector<NodeId> frontier = seeds.sorted();
  for (NodeId s : frontier) activation_step[s] = 0;

  std::uint32_t step = 1;
  std::vector<NodeId> next;
  while (!frontier.empty()) {
    next.clear();
    for (NodeId v : frontier) {
      Group gv = a.group(v);
      for (NodeId u : g.neighbors(v)) {
        if (activation_step[u] != CascadeTrace::kNever) continue;
        if (attempt_log) attempt_log->push_back({step, v, u});
        double p = probs.activation(gv, a.group(u));
        std::uint64_t key = (static_cast<std::uint64_t>(v) << 32) | u;
        if (keyed_unit(base, key) < p) {
          activation_step[u] = step;
          events.push_back({step, v, gv, u, a.group(u)});
          next.push_back(u);
        }
      }
    }
    std::sort(next.begin(), next.end());
    frontier = next;
    ++step;
  }
  std::uint32_t horizon = step - 1;
  return CascadeTrace(std::move(activation_step), std::move(events), horizon);
}

// Counterfactual universe: every node in one group, all four spillover
// probabilities equal to p.
inline CascadeTrace simulate_universe(const Graph& g, const SeedSet& seeds, double p,
                                      RngSeed seed) {
  Assignment all(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) all.set(v, Group::treatment);
  return simulate_cascade(g, all, seeds, SpilloverProbs::uniform(p), seed);
}

// Ground-truth TTE series: q independent universe pairs (all-treatment at
// p_tt against all-control at p_cc, no common random numbers), per-step mean
// outcome difference over all nodes, averaged across pairs. Shorter traces
// carry their final states forward. The last entry is the scalar true TTE.
inline std::vector<double> true_tte(const Graph& g, const SeedSet& seeds, double p_tt,
                                    double p_cc, std::size_t q, RngSeed seed) {
  if (q < 1) throw std::invalid_argument("true_tte: require q >= 1");
  std::size_t n = g.node_count();
  if (n == 0) return {0.0};

  std::vector<double> sums;         // per-step accumulated diffs
  double final_sum = 0.0;           // sum of completed pairs' final diffs
  for (std::size_t i = 0; i < q; ++i) {
    auto treat = simulate_universe(g, seeds, p_tt, seed.derive(2 * i));
    auto control = simulate_universe(g, seeds, p_cc, seed.derive(2 * i + 1));
    auto ct = treat.cumulative_active();
    auto cc = control.cumulative_active();
    std::size_t len = std::max(ct.size(), cc.size());
    if (len > sums.size()) sums.resize(len, final_sum);
    auto at = [](const std::vector<std::size_t>& v, std::size_t t) {
      return v[std::min(t, v.size() - 1)];
    };
    double last = 0.0;
    for (std::size_t t = 0; t < sums.size(); ++t) {
      double diff = (static_cast<double>(at(ct, t)) - static_cast<double>(at(cc, t))) /
                    static_cast<double>(n);
      sums[t] += diff;
      last = diff;
    }
    final_sum += last;
  }
  for (double& s : sums) s /= static_cast<double>(q);
  return sums;
}

// Successful activation tallies by (activator group, target group). The
// treatment->control and control->treatment cells count realized
// cross-group peer-effect events.
struct CrossGroupCounts {
  std::array<std::array<std::uint64_t, 3>, 3> counts{};

  std::uint64_t at(Group activator, Group target) const {
    return counts[static_cast<std::size_t>(activator)][static_cast<std::size_t>(target)];
  }
  std::uint64_t cross_total() const {
    return counts[1][0] + counts[0][1];
  }
};

inline CrossGroupCounts cross_group_activation_counts(const CascadeTrace& trace) {
  CrossGroupCounts out;
  for (const auto& e : trace.events())
    ++out.counts[static_cast<std::size_t>(e.activator_group)]
                [static_cast<std::size_t>(e.target_group)];
  return out;
}

inline void write_trace_events(const CascadeTrace& trace, std::ostream& out) {
  out << "step,activator,activator_group,target,target_group\n";
  for (const auto& e : trace.events())
    out << e.step << ',' << e.activator << ',' << static_cast<int>(e.activator_group) << ','
        << e.target << ',' << static_cast<int>(e.target_group) << '\n';
}

inline void write_trace_events_file(const CascadeTrace& trace,
                                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path.string());
  write_trace_events(trace, out);
}

}  // namespace casbr
