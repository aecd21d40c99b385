#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "casbr/cascade.hpp"
#include "casbr/designs.hpp"

namespace casbr {

// Difference-in-means estimate at a time step: mean outcome over treated
// nodes minus mean outcome over control nodes. Bystanders are excluded from
// the estimator (they still participated in the cascade).
inline double estimated_tte(const CascadeTrace& trace, const Assignment& a,
                            std::uint32_t step) {
  std::size_t treated = 0, control = 0, treated_active = 0, control_active = 0;
  for (NodeId v = 0; v < a.size(); ++v) {
    Group g = a.group(v);
    if (g == Group::treatment) {
      ++treated;
      if (trace.outcome(v, step)) ++treated_active;
    } else if (g == Group::control) {
      ++control;
      if (trace.outcome(v, step)) ++control_active;
    }
  }
  if (treated == 0 || control == 0)
    throw std::invalid_argument("estimated_tte: empty treatment or control group");
  return static_cast<double>(treated_active) / static_cast<double>(treated) -
         static_cast<double>(control_active) / static_cast<double>(control);
}

// Estimates for steps 0..len-1 in one pass over the trace.
inline std::vector<double> estimated_tte_series(const CascadeTrace& trace,
                                                const Assignment& a, std::size_t len) {
  if (len == 0) throw std::invalid_argument("estimated_tte_series: empty window");
  std::size_t treated = 0, control = 0;
  std::vector<double> treated_new(len, 0.0), control_new(len, 0.0);
  for (NodeId v = 0; v < a.size(); ++v) {
    Group g = a.group(v);
    if (g != Group::treatment && g != Group::control) continue;
    if (g == Group::treatment) ++treated; else ++control;
    std::uint32_t s = trace.activation_step(v);
    if (s != CascadeTrace::kNever && s < len)
      (g == Group::treatment ? treated_new : control_new)[s] += 1.0;
  }
  if (treated == 0 || control == 0)
    throw std::invalid_argument("estimated_tte_series: empty treatment or control group");
  std::vector<double> out(len);
  double ta = 0.0, ca = 0.0;
  for (std::size_t t = 0; t < len; ++t) {
    ta += treated_new[t];
    ca += control_new[t];
    out[t] = ta / static_cast<double>(treated) - ca / static_cast<double>(control);
  }
  return out;
}

// Root mean square error of per-simulation estimates against the true value.
inline double rmse(std::span<const double> estimates, double truth) {
  if (estimates.empty()) throw std::invalid_argument("rmse: no estimates");
  double acc = 0.0;
  for (double e : estimates) {
    double d = e - truth;
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(estimates.size()));
}

// Share of nodes post-processing removed from the experiment.
inline double excluded_fraction(const Assignment& a) {
  if (a.size() == 0) return 0.0;
  a.require_assigned();
  return static_cast<double>(a.count(Group::bystander)) / static_cast<double>(a.size());
}

// Everything one design produces in one repetition: per-simulation estimate
// series (Q rows, padded to a common width), the shared truth series, the
// per-step RMSE, and the interference summaries.
struct ExperimentResult {
  std::vector<std::vector<double>> estimates;
  std::vector<double> truth;
  std::vector<double> rmse_by_step;
  double cut_edge_fraction = 0.0;
  double excluded_fraction = 0.0;
  std::vector<CrossGroupCounts> cross_group_counts;

  double final_rmse() const { return rmse_by_step.empty() ? 0.0 : rmse_by_step.back(); }
};

}  // namespace casbr
