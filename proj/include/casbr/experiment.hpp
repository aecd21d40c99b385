#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "casbr/cascade.hpp"
#include "casbr/designs.hpp"
#include "casbr/graph.hpp"
#include "casbr/metrics.hpp"
#include "casbr/parallel.hpp"
#include "casbr/partition.hpp"
#include "casbr/rng.hpp"
#include "casbr/seeding.hpp"

namespace casbr {

struct GraphSource {
  enum class Kind { edge_list, barabasi_albert, forest_fire };
  Kind kind = Kind::barabasi_albert;
  std::filesystem::path path;  // edge_list
  std::size_t n = 5000;
  std::size_t m = 3;        // barabasi_albert
  double p_f = 0.35;        // forest_fire
  double p_b = 0.4;
};

struct SeedMethod {
  enum class Kind { random_fraction, greedy };
  Kind kind = Kind::random_fraction;
  double fraction = 0.1;
  std::size_t k = 0;        // greedy
  double p = 0.01;
  std::size_t rounds = 100;
};

struct DesignSpec {
  enum class Base { randomized, cbr, casbr };
  Base base = Base::casbr;
  bool post = false;

  std::string name() const {
    std::string s = base == Base::randomized ? "randomized"
                    : base == Base::cbr      ? "cbr"
                                             : "casbr";
    if (post) s += "-post";
    return s;
  }

  static DesignSpec parse(const std::string& name) {
    DesignSpec d;
    std::string body = name;
    if (body.size() > 5 && body.substr(body.size() - 5) == "-post") {
      d.post = true;
      body = body.substr(0, body.size() - 5);
    }
    if (body == "randomized") d.base = Base::randomized;
    else if (body == "cbr") d.base = Base::cbr;
    else if (body == "casbr") d.base = Base::casbr;
    else throw std::invalid_argument("unknown design: " + name);
    return d;
  }
};

struct ExperimentConfig {
  GraphSource source;
  SeedMethod seed_method;
  std::vector<DesignSpec> designs = {
      DesignSpec{DesignSpec::Base::randomized, false},
      DesignSpec{DesignSpec::Base::cbr, false},
      DesignSpec{DesignSpec::Base::cbr, true},
      DesignSpec{DesignSpec::Base::casbr, false},
      DesignSpec{DesignSpec::Base::casbr, true},
  };
  double alpha = 0.01;
  SpilloverProbs probs = SpilloverProbs::paper_default();
  std::size_t q = 100;
  std::size_t true_q = 0;          // 0: use q
  std::size_t repetitions = 1;
  RngSeed master_seed{0, 0};
  std::size_t clusters = 0;        // 0: number of cascade seeds
  std::size_t reldg_passes = 10;

  void validate() const {
    if (q < 1) throw std::invalid_argument("config: q must be >= 1");
    if (repetitions < 1) throw std::invalid_argument("config: repetitions must be >= 1");
    if (alpha < 0.0) throw std::invalid_argument("config: alpha must be nonnegative");
    if (designs.empty()) throw std::invalid_argument("config: no designs selected");
    probs.validate();
  }
};

// One design's results across all repetitions plus rep-averaged series used
// for reporting.
struct DesignOutcome {
  std::string design;
  std::vector<ExperimentResult> reps;

  std::vector<double> mean_rmse_by_step;
  std::vector<double> mean_truth_by_step;
  std::vector<double> mean_estimate_by_step;  // pooled over reps x Q
  std::vector<double> std_estimate_by_step;
  double mean_cut_edge_fraction = 0.0;
  double mean_excluded_fraction = 0.0;
  double mean_final_rmse = 0.0;
};

namespace detail {

// Stream tags keep every stage of a run on its own substream.
enum StreamTag : std::uint64_t {
  tag_graph = 0x67726170,
  tag_seeds = 0x73656564,
  tag_truth = 0x74727574,
  tag_partition = 0x70617274,
  tag_assign = 0x61736767,
  tag_sim = 0x73696d75,
};

inline double value_at(const std::vector<double>& v, std::size_t t) {
  return v.empty() ? 0.0 : v[std::min(t, v.size() - 1)];
}

inline void aggregate_outcome(DesignOutcome& out) {
  std::size_t width = 0;
  for (const auto& rep : out.reps)
    width = std::max(width, rep.rmse_by_step.size());
  out.mean_rmse_by_step.assign(width, 0.0);
  out.mean_truth_by_step.assign(width, 0.0);
  out.mean_estimate_by_step.assign(width, 0.0);
  out.std_estimate_by_step.assign(width, 0.0);
  double reps_n = static_cast<double>(out.reps.size());
  std::size_t total_sims = 0;
  for (const auto& rep : out.reps) total_sims += rep.estimates.size();
  for (std::size_t t = 0; t < width; ++t) {
    double est_sum = 0.0, est_sq = 0.0;
    for (const auto& rep : out.reps) {
      out.mean_rmse_by_step[t] += value_at(rep.rmse_by_step, t) / reps_n;
      out.mean_truth_by_step[t] += value_at(rep.truth, t) / reps_n;
      for (const auto& sim : rep.estimates) {
        double e = value_at(sim, t);
        est_sum += e;
        est_sq += e * e;
      }
    }
    double mean = est_sum / static_cast<double>(total_sims);
    out.mean_estimate_by_step[t] = mean;
    double var = est_sq / static_cast<double>(total_sims) - mean * mean;
    out.std_estimate_by_step[t] = std::sqrt(std::max(var, 0.0));
  }
  for (const auto& rep : out.reps) {
    out.mean_cut_edge_fraction += rep.cut_edge_fraction / reps_n;
    out.mean_excluded_fraction += rep.excluded_fraction / reps_n;
    out.mean_final_rmse += rep.final_rmse() / reps_n;
  }
}

}  // namespace detail

inline Graph build_graph(const GraphSource& source, RngSeed seed) {
  switch (source.kind) {
    case GraphSource::Kind::edge_list:
      return load_edge_list_file(source.path).graph;
    case GraphSource::Kind::barabasi_albert:
      return generate_barabasi_albert(source.n, source.m, seed);
    case GraphSource::Kind::forest_fire:
      return generate_forest_fire(source.n, source.p_f, source.p_b, seed);
  }
  throw std::logic_error("build_graph: unreachable");
}

inline SeedSet select_seeds(const Graph& g, const SeedMethod& method, RngSeed seed) {
  if (method.kind == SeedMethod::Kind::random_fraction)
    return random_seeds(g, method.fraction, seed);
  return new_greedy_ic(g, method.k, method.p, method.rounds, seed);
}

// Full evaluation pipeline. Within a repetition, every design sees the same
// graph, seed set, and true-TTE series; only the assignment draw and the
// cascade draws differ. Per-simulation streams are keyed by (repetition,
// design, simulation index), so results do not depend on thread scheduling.
inline std::vector<DesignOutcome> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  auto stage = [](const std::string& name, auto&& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      throw std::runtime_error("run_experiment: stage '" + name + "' failed: " + e.what());
    }
  };

  RngSeed base = cfg.master_seed;
  Graph g = stage("graph", [&] { return build_graph(cfg.source, base.derive(detail::tag_graph)); });

  std::vector<DesignOutcome> outcomes(cfg.designs.size());
  for (std::size_t d = 0; d < cfg.designs.size(); ++d)
    outcomes[d].design = cfg.designs[d].name();

  bool needs_partition = std::any_of(cfg.designs.begin(), cfg.designs.end(), [](auto& ds) {
    return ds.base == DesignSpec::Base::cbr;
  });
  std::size_t true_q = cfg.true_q ? cfg.true_q : cfg.q;

  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    RngSeed rep_seed = base.derive(rep + 1);
    SeedSet seeds = stage("seed selection", [&] {
      return select_seeds(g, cfg.seed_method, rep_seed.derive(detail::tag_seeds));
    });
    std::vector<double> truth = stage("true tte", [&] {
      return true_tte(g, seeds, cfg.probs.p_tt, cfg.probs.p_cc, true_q,
                      rep_seed.derive(detail::tag_truth));
    });
    std::optional<Partition> partition;
    if (needs_partition) {
      std::size_t k = cfg.clusters ? cfg.clusters : seeds.size();
      partition = stage("partition", [&] {
        return reldg_partition(g, static_cast<ClusterId>(k), cfg.reldg_passes,
                               rep_seed.derive(detail::tag_partition));
      });
    }

    for (std::size_t d = 0; d < cfg.designs.size(); ++d) {
      const DesignSpec& spec = cfg.designs[d];
      RngSeed assign_seed = rep_seed.derive(detail::tag_assign).derive(d);
      Assignment assignment = stage("assignment " + spec.name(), [&] {
        switch (spec.base) {
          case DesignSpec::Base::randomized: return randomized_assignment(g, assign_seed);
          case DesignSpec::Base::cbr: return cbr_assignment(g, *partition, assign_seed);
          case DesignSpec::Base::casbr: return casbr_assignment(g, seeds, assign_seed);
        }
        throw std::logic_error("unreachable");
      });
      if (spec.post)
        assignment = stage("post-processing " + spec.name(),
                           [&] { return post_process(g, assignment, cfg.alpha); });

      ExperimentResult result;
      result.cut_edge_fraction = cut_edge_fraction(g, assignment);
      result.excluded_fraction = casbr::excluded_fraction(assignment);

      std::vector<CascadeTrace> traces;
      traces.reserve(cfg.q);
      for (std::size_t s = 0; s < cfg.q; ++s)
        traces.emplace_back(CascadeTrace({}, {}, 0));
      stage("simulation " + spec.name(), [&] {
        parallel_for(cfg.q, [&](std::size_t s) {
          traces[s] = simulate_cascade(g, assignment, seeds, cfg.probs,
                                       rep_seed.derive(detail::tag_sim).derive(d).derive(s));
        });
        return 0;
      });

      std::size_t width = truth.size();
      for (const auto& trace : traces)
        width = std::max<std::size_t>(width, trace.horizon() + 1);

      result.truth = truth;
      result.truth.resize(width, truth.empty() ? 0.0 : truth.back());
      result.estimates.reserve(cfg.q);
      result.cross_group_counts.reserve(cfg.q);
      stage("estimation " + spec.name(), [&] {
        for (const auto& trace : traces) {
          result.estimates.push_back(estimated_tte_series(trace, assignment, width));
          result.cross_group_counts.push_back(cross_group_activation_counts(trace));
        }
        return 0;
      });
      result.rmse_by_step.assign(width, 0.0);
      for (std::size_t t = 0; t < width; ++t) {
        double acc = 0.0;
        for (const auto& est : result.estimates) {
          double dlt = est[t] - result.truth[t];
          acc += dlt * dlt;
        }
        result.rmse_by_step[t] = std::sqrt(acc / static_cast<double>(cfg.q));
      }
      outcomes[d].reps.push_back(std::move(result));
    }
  }

  for (auto& outcome : outcomes) detail::aggregate_outcome(outcome);
  return outcomes;
}

inline std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// One file, two sections: per-step detail rows, then per-design summary rows.
inline void emit_csv(const std::vector<DesignOutcome>& outcomes, std::ostream& out) {
  out << "design,step,rmse,truth,mean_estimate,std_estimate\n";
  for (const auto& o : outcomes) {
    for (std::size_t t = 0; t < o.mean_rmse_by_step.size(); ++t) {
      out << o.design << ',' << t << ',' << format_value(o.mean_rmse_by_step[t]) << ','
          << format_value(o.mean_truth_by_step[t]) << ','
          << format_value(o.mean_estimate_by_step[t]) << ','
          << format_value(o.std_estimate_by_step[t]) << '\n';
    }
  }
  out << "design,cut_edge_fraction,excluded_fraction\n";
  for (const auto& o : outcomes) {
    out << o.design << ',' << format_value(o.mean_cut_edge_fraction) << ','
        << format_value(o.mean_excluded_fraction) << '\n';
  }
}

inline void emit_csv_file(const std::vector<DesignOutcome>& outcomes,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write results file: " + path.string());
  emit_csv(outcomes, out);
}

}  // namespace casbr
