// casbr: network experiment design workbench for cascades.
//
// Subcommands pipe through plain text formats: edge lists, seed files (one
// id per line), node/cluster and node/label CSVs, and the results CSV.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "casbr/cascade.hpp"
#include "casbr/designs.hpp"
#include "casbr/experiment.hpp"
#include "casbr/graph.hpp"
#include "casbr/metrics.hpp"
#include "casbr/partition.hpp"
#include "casbr/plot.hpp"
#include "casbr/seeding.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

casbr::GraphSource parse_graph_source(const json& settings) {
  casbr::GraphSource src;
  int given = settings.contains("graph") + settings.contains("ba") + settings.contains("ff");
  if (given != 1)
    throw std::invalid_argument("choose exactly one graph source: --graph, --ba, or --ff");
  if (settings.contains("graph")) {
    src.kind = casbr::GraphSource::Kind::edge_list;
    src.path = settings["graph"].get<std::string>();
  } else if (settings.contains("ba")) {
    auto parts = split_csv(settings["ba"].get<std::string>());
    if (parts.size() != 2) throw std::invalid_argument("--ba expects n,m");
    src.kind = casbr::GraphSource::Kind::barabasi_albert;
    src.n = std::stoull(parts[0]);
    src.m = std::stoull(parts[1]);
  } else {
    auto parts = split_csv(settings["ff"].get<std::string>());
    if (parts.size() != 3) throw std::invalid_argument("--ff expects n,pf,pb");
    src.kind = casbr::GraphSource::Kind::forest_fire;
    src.n = std::stoull(parts[0]);
    src.p_f = std::stod(parts[1]);
    src.p_b = std::stod(parts[2]);
  }
  return src;
}

casbr::SeedMethod parse_seed_method(const json& settings) {
  casbr::SeedMethod method;
  if (settings.contains("greedy")) {
    auto parts = split_csv(settings["greedy"].get<std::string>());
    if (parts.size() != 3) throw std::invalid_argument("--greedy expects k,p,r");
    method.kind = casbr::SeedMethod::Kind::greedy;
    method.k = std::stoull(parts[0]);
    method.p = std::stod(parts[1]);
    method.rounds = std::stoull(parts[2]);
  } else {
    method.kind = casbr::SeedMethod::Kind::random_fraction;
    method.fraction = settings.value("seed_frac", 0.1);
  }
  return method;
}

casbr::SpilloverProbs parse_probs(const json& settings) {
  casbr::SpilloverProbs probs = settings.value("preset", std::string{"default"}) == "alternate"
                                    ? casbr::SpilloverProbs::paper_alternate()
                                    : casbr::SpilloverProbs::paper_default();
  if (settings.contains("probs")) {
    auto parts = split_csv(settings["probs"].get<std::string>());
    if (parts.size() != 5)
      throw std::invalid_argument("--probs expects ptt,pct,pcc,ptc,pby");
    probs.p_tt = std::stod(parts[0]);
    probs.p_ct = std::stod(parts[1]);
    probs.p_cc = std::stod(parts[2]);
    probs.p_tc = std::stod(parts[3]);
    probs.p_bystander = std::stod(parts[4]);
  }
  probs.validate();
  return probs;
}

casbr::ExperimentConfig config_from_settings(const json& settings) {
  casbr::ExperimentConfig cfg;
  cfg.source = parse_graph_source(settings);
  cfg.seed_method = parse_seed_method(settings);
  if (settings.contains("designs")) {
    cfg.designs.clear();
    for (const auto& name : split_csv(settings["designs"].get<std::string>()))
      cfg.designs.push_back(casbr::DesignSpec::parse(name));
  }
  cfg.alpha = settings.value("alpha", cfg.alpha);
  cfg.probs = parse_probs(settings);
  cfg.q = settings.value("q", cfg.q);
  cfg.true_q = settings.value("true_q", cfg.true_q);
  cfg.repetitions = settings.value("reps", cfg.repetitions);
  cfg.master_seed.master_seed = settings.value("master_seed", std::uint64_t{0});
  cfg.clusters = settings.value("clusters", cfg.clusters);
  cfg.reldg_passes = settings.value("passes", cfg.reldg_passes);
  cfg.validate();
  return cfg;
}

// Settings flow config file -> CLI flags; a present flag wins its key.
struct FlagCollector {
  CLI::App* cmd;
  json& settings;

  void str(const std::string& flag, const std::string& key, const std::string& desc,
           std::vector<std::string> clears = {}) {
    cmd->add_option_function<std::string>(
           flag,
           [&s = settings, key, clears](const std::string& v) {
             for (const auto& c : clears) s.erase(c);
             s[key] = v;
           },
           desc);
  }
  void num(const std::string& flag, const std::string& key, const std::string& desc) {
    cmd->add_option_function<std::uint64_t>(
        flag, [&s = settings, key](std::uint64_t v) { s[key] = v; }, desc);
  }
  void real(const std::string& flag, const std::string& key, const std::string& desc,
            std::vector<std::string> clears = {}) {
    cmd->add_option_function<double>(
        flag,
        [&s = settings, key, clears](double v) {
          for (const auto& c : clears) s.erase(c);
          s[key] = v;
        },
        desc);
  }
};

casbr::RngSeed seed_from(std::uint64_t master) { return casbr::RngSeed{master, 0}; }

int run_pipeline(const json& settings, const std::string& out_dir, bool plot) {
  casbr::ExperimentConfig cfg = config_from_settings(settings);
  fs::create_directories(out_dir);
  auto outcomes = casbr::run_experiment(cfg);
  fs::path csv_path = fs::path(out_dir) / "results.csv";
  casbr::emit_csv_file(outcomes, csv_path);
  std::cout << "wrote " << csv_path.string() << "\n";
  for (const auto& o : outcomes) {
    std::cout << o.design << ": final-step rmse=" << casbr::format_value(o.mean_final_rmse)
              << " cut=" << casbr::format_value(o.mean_cut_edge_fraction)
              << " excluded=" << casbr::format_value(o.mean_excluded_fraction) << "\n";
  }
  if (plot) {
    std::vector<casbr::RmseSeries> series;
    for (const auto& o : outcomes) series.push_back({o.design, o.mean_rmse_by_step});
    fs::path svg_path = fs::path(out_dir) / "rmse.svg";
    casbr::emit_plot_file(series, svg_path);
    std::cout << "wrote " << svg_path.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"casbr: cascade-aware network experiment design workbench"};
  app.require_subcommand(1);

  json settings = json::object();
  // The config file seeds the settings; flags parsed afterwards override it.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      std::ifstream in(argv[i + 1]);
      if (!in) {
        std::cerr << "error: cannot open config file: " << argv[i + 1] << "\n";
        return 1;
      }
      try {
        settings = json::parse(in);
      } catch (const std::exception& e) {
        std::cerr << "error: bad config file: " << e.what() << "\n";
        return 1;
      }
    }
  }

  std::string out_path = "out";
  std::string out_dir = settings.value("out_dir", std::string{"out"});
  bool plot = settings.value("plot", false);
  bool stats = false;
  bool no_dense = false;
  std::string design_name = "casbr";
  std::string seeds_path, assignment_path, partition_path, trace_path, label;
  std::uint64_t master = settings.value("master_seed", std::uint64_t{0});
  std::uint64_t cluster_k = 0, passes = 10;

  auto add_common = [&](CLI::App* cmd, bool with_seed_method, bool with_probs) {
    FlagCollector fc{cmd, settings};
    fc.str("--graph", "graph", "edge list file", {"ba", "ff"});
    fc.str("--ba", "ba", "Barabasi-Albert generator: n,m", {"graph", "ff"});
    fc.str("--ff", "ff", "forest-fire generator: n,pf,pb", {"graph", "ba"});
    if (with_seed_method) {
      fc.real("--seed-frac", "seed_frac", "random seed fraction", {"greedy"});
      fc.str("--greedy", "greedy", "greedy seed selection: k,p,r", {"seed_frac"});
    }
    if (with_probs) {
      fc.str("--probs", "probs", "spillover probabilities: ptt,pct,pcc,ptc,pby");
      fc.str("--preset", "preset", "probability preset: default|alternate");
    }
    cmd->add_option_function<std::uint64_t>(
        "--master-seed", [&](std::uint64_t v) { settings["master_seed"] = v; master = v; },
        "master random seed");
    cmd->add_option("--config", "config file (parsed before flags)")
        ->check(CLI::ExistingFile);
  };

  // generate
  auto* gen = app.add_subcommand("generate", "generate or normalize a graph edge list");
  add_common(gen, false, false);
  gen->add_option("--out", out_path, "output edge list path")->required();
  gen->add_flag("--stats", stats, "print node/edge counts and diameter");
  gen->add_flag("--no-dense", no_dense, "keep original ids when loading an edge list");

  // seed
  auto* seed_cmd = app.add_subcommand("seed", "select cascade seed nodes");
  add_common(seed_cmd, true, false);
  seed_cmd->add_option("--out", out_path, "output seed file")->required();

  // partition
  auto* part_cmd = app.add_subcommand("partition", "balanced reLDG partition");
  add_common(part_cmd, false, false);
  part_cmd->add_option("--k", cluster_k, "cluster count")->required();
  part_cmd->add_option("--passes", passes, "restream passes");
  part_cmd->add_option("--out", out_path, "output node_id,cluster_id CSV")->required();

  // assign
  auto* assign_cmd = app.add_subcommand("assign", "draw a treatment assignment");
  add_common(assign_cmd, false, false);
  assign_cmd->add_option("--design", design_name,
                         "randomized|cbr|casbr, optionally with -post suffix");
  assign_cmd->add_option("--seeds", seeds_path, "seed file (casbr)");
  assign_cmd->add_option("--partition", partition_path, "partition CSV (cbr)");
  assign_cmd->add_option_function<double>(
      "--alpha", [&](double v) { settings["alpha"] = v; }, "bystander threshold for -post");
  assign_cmd->add_option("--out", out_path, "output node_id,label CSV")->required();

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run one cascade on an assignment");
  add_common(sim_cmd, false, true);
  sim_cmd->add_option("--assignment", assignment_path, "node_id,label CSV")->required();
  sim_cmd->add_option("--seeds", seeds_path, "seed file")->required();
  sim_cmd->add_option("--trace", trace_path, "write activation events CSV");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "estimate TTE error for an assignment");
  add_common(eval_cmd, false, true);
  eval_cmd->add_option("--assignment", assignment_path, "node_id,label CSV")->required();
  eval_cmd->add_option("--seeds", seeds_path, "seed file")->required();
  eval_cmd->add_option_function<std::uint64_t>(
      "--q", [&](std::uint64_t v) { settings["q"] = v; }, "simulation count");
  eval_cmd->add_option_function<std::uint64_t>(
      "--true-q", [&](std::uint64_t v) { settings["true_q"] = v; }, "truth simulation count");
  eval_cmd->add_option("--label", label, "design label for the CSV");
  eval_cmd->add_option("--out", out_path, "output results CSV")->required();

  // run
  auto* run_cmd = app.add_subcommand("run", "full experiment pipeline");
  add_common(run_cmd, true, true);
  {
    FlagCollector fc{run_cmd, settings};
    fc.str("--designs", "designs", "comma list of designs to run");
    fc.real("--alpha", "alpha", "bystander threshold");
    fc.num("--q", "q", "cascade simulations per design per repetition");
    fc.num("--true-q", "true_q", "truth simulation count (default: q)");
    fc.num("--reps", "reps", "harness repetitions");
    fc.num("--clusters", "clusters", "CBR cluster count (default: seed count)");
    fc.num("--passes", "passes", "reLDG restream passes");
  }
  run_cmd->add_option_function<std::string>(
      "--out-dir", [&](const std::string& v) { out_dir = v; }, "output directory");
  run_cmd->add_flag_function("--plot", [&](std::int64_t) { plot = true; },
                             "also write an RMSE line chart (SVG)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      casbr::Graph g;
      if (settings.contains("graph")) {
        auto loaded = casbr::load_edge_list_file(settings["graph"].get<std::string>(), !no_dense);
        g = loaded.graph;
        if (loaded.stats.self_loops_dropped || loaded.stats.duplicate_edges_collapsed)
          std::cerr << "warning: dropped " << loaded.stats.self_loops_dropped
                    << " self-loops, collapsed " << loaded.stats.duplicate_edges_collapsed
                    << " duplicate edges\n";
      } else {
        g = casbr::build_graph(parse_graph_source(settings), seed_from(master));
      }
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot write " + out_path);
      casbr::write_edge_list(g, out);
      std::cout << "nodes=" << g.node_count() << " edges=" << g.edge_count() << "\n";
      if (stats) std::cout << "diameter=" << casbr::diameter(g) << "\n";
    } else if (seed_cmd->parsed()) {
      casbr::Graph g = casbr::build_graph(parse_graph_source(settings), seed_from(master));
      casbr::SeedSet seeds =
          casbr::select_seeds(g, parse_seed_method(settings), seed_from(master).derive(1));
      casbr::write_seed_set_file(seeds, out_path);
      std::cout << "selected " << seeds.size() << " seeds\n";
    } else if (part_cmd->parsed()) {
      casbr::Graph g = casbr::build_graph(parse_graph_source(settings), seed_from(master));
      auto part = casbr::reldg_partition(g, static_cast<casbr::ClusterId>(cluster_k),
                                         passes, seed_from(master).derive(2));
      casbr::write_partition_file(part, out_path);
      std::cout << "partitioned " << g.node_count() << " nodes into " << part.k
                << " clusters\n";
    } else if (assign_cmd->parsed()) {
      casbr::Graph g = casbr::build_graph(parse_graph_source(settings), seed_from(master));
      casbr::DesignSpec spec = casbr::DesignSpec::parse(design_name);
      casbr::RngSeed s = seed_from(master).derive(3);
      casbr::Assignment a;
      switch (spec.base) {
        case casbr::DesignSpec::Base::randomized:
          a = casbr::randomized_assignment(g, s);
          break;
        case casbr::DesignSpec::Base::cbr: {
          if (partition_path.empty())
            throw std::invalid_argument("cbr assignment needs --partition");
          auto part = casbr::read_partition_file(partition_path);
          a = casbr::cbr_assignment(g, part, s);
          break;
        }
        case casbr::DesignSpec::Base::casbr: {
          if (seeds_path.empty())
            throw std::invalid_argument("casbr assignment needs --seeds");
          auto seeds = casbr::read_seed_set_file(seeds_path);
          a = casbr::casbr_assignment(g, seeds, s);
          break;
        }
      }
      if (spec.post) a = casbr::post_process(g, a, settings.value("alpha", 0.01));
      casbr::write_assignment_file(a, out_path);
      std::cout << "treatment=" << a.count(casbr::Group::treatment)
                << " control=" << a.count(casbr::Group::control)
                << " bystander=" << a.count(casbr::Group::bystander) << "\n";
    } else if (sim_cmd->parsed()) {
      casbr::Graph g = casbr::build_graph(parse_graph_source(settings), seed_from(master));
      auto a = casbr::read_assignment_file(assignment_path);
      auto seeds = casbr::read_seed_set_file(seeds_path);
      auto trace = casbr::simulate_cascade(g, a, seeds, parse_probs(settings),
                                           seed_from(master).derive(4));
      auto counts = trace.cumulative_active();
      for (std::size_t t = 0; t < counts.size(); ++t)
        std::cout << "step " << t << ": active=" << counts[t] << "\n";
      auto cross = casbr::cross_group_activation_counts(trace);
      std::cout << "cross-group activations: " << cross.cross_total() << "\n";
      if (!trace_path.empty()) casbr::write_trace_events_file(trace, trace_path);
    } else if (eval_cmd->parsed()) {
      casbr::Graph g = casbr::build_graph(parse_graph_source(settings), seed_from(master));
      auto a = casbr::read_assignment_file(assignment_path);
      auto seeds = casbr::read_seed_set_file(seeds_path);
      auto probs = parse_probs(settings);
      std::size_t q = settings.value("q", std::uint64_t{100});
      std::size_t true_q = settings.value("true_q", std::uint64_t{0});
      if (!true_q) true_q = q;
      casbr::RngSeed base = seed_from(master);
      auto truth = casbr::true_tte(g, seeds, probs.p_tt, probs.p_cc, true_q, base.derive(5));

      casbr::DesignOutcome outcome;
      outcome.design = label.empty() ? "custom" : label;
      casbr::ExperimentResult result;
      std::vector<casbr::CascadeTrace> traces;
      for (std::size_t s = 0; s < q; ++s)
        traces.push_back(casbr::simulate_cascade(g, a, seeds, probs, base.derive(6).derive(s)));
      std::size_t width = truth.size();
      for (const auto& t : traces) width = std::max<std::size_t>(width, t.horizon() + 1);
      result.truth = truth;
      result.truth.resize(width, truth.empty() ? 0.0 : truth.back());
      for (const auto& t : traces) {
        result.estimates.push_back(casbr::estimated_tte_series(t, a, width));
        result.cross_group_counts.push_back(casbr::cross_group_activation_counts(t));
      }
      result.rmse_by_step.assign(width, 0.0);
      for (std::size_t t = 0; t < width; ++t) {
        double acc = 0.0;
        for (const auto& est : result.estimates) {
          double d = est[t] - result.truth[t];
          acc += d * d;
        }
        result.rmse_by_step[t] = std::sqrt(acc / static_cast<double>(q));
      }
      result.cut_edge_fraction = casbr::cut_edge_fraction(g, a);
      result.excluded_fraction = casbr::excluded_fraction(a);
      outcome.reps.push_back(std::move(result));
      casbr::detail::aggregate_outcome(outcome);
      casbr::emit_csv_file({outcome}, out_path);
      std::cout << outcome.design << ": final-step rmse="
                << casbr::format_value(outcome.mean_final_rmse) << "\n";
    } else if (run_cmd->parsed()) {
      return run_pipeline(settings, out_dir, plot);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
