#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "casbr/cascade.hpp"
#include "casbr/designs.hpp"
#include "casbr/graph.hpp"
#include "oracles.hpp"

using casbr::Assignment;
using casbr::CascadeTrace;
using casbr::Group;
using casbr::NodeId;
using casbr::RngSeed;
using casbr::SeedSet;
using casbr::SpilloverProbs;

namespace {

Assignment uniform_assignment(std::size_t n, Group g) {
  Assignment a(n);
  for (NodeId v = 0; v < n; ++v) a.set(v, g);
  return a;
}

}  // namespace

TEST_CASE("cascade: zero probabilities never leave the seeds") {
  auto g = casbr::generate_barabasi_albert(30, 2, RngSeed{1, 0});
  auto a = uniform_assignment(30, Group::treatment);
  SeedSet seeds({3, 9, 20});
  auto trace = casbr::simulate_cascade(g, a, seeds, SpilloverProbs::uniform(0.0), RngSeed{2, 0});
  REQUIRE(trace.horizon() == 1);
  REQUIRE(trace.events().empty());
  std::size_t active = 0;
  for (NodeId v = 0; v < 30; ++v)
    if (trace.activation_step(v) != CascadeTrace::kNever) ++active;
  REQUIRE(active == 3);
}

TEST_CASE("cascade: certain propagation floods at BFS distance") {
  auto g = casbr::generate_forest_fire(60, 0.3, 0.3, RngSeed{3, 0});
  auto a = uniform_assignment(60, Group::control);
  SeedSet seeds({0, 31});
  auto trace = casbr::simulate_cascade(g, a, seeds, SpilloverProbs::uniform(1.0), RngSeed{4, 0});
  auto dist = oracles::bfs_distances(g, {0, 31});
  for (NodeId v = 0; v < 60; ++v) {
    if (dist[v] == ~std::uint32_t{0})
      REQUIRE(trace.activation_step(v) == CascadeTrace::kNever);
    else
      REQUIRE(trace.activation_step(v) == dist[v]);
  }
}

TEST_CASE("cascade: single-edge activation frequency matches the Bernoulli rate") {
  auto g = oracles::make_graph(2, {{0, 1}});
  auto a = uniform_assignment(2, Group::treatment);
  SeedSet seeds({0});
  SpilloverProbs probs;
  probs.p_tt = 0.05;
  const int runs = 100000;
  int activated = 0;
  for (int i = 0; i < runs; ++i) {
    auto trace = casbr::simulate_cascade(g, a, seeds, probs,
                                         RngSeed{5, static_cast<std::uint64_t>(i)});
    if (trace.activation_step(1) != CascadeTrace::kNever) ++activated;
  }
  double se = std::sqrt(0.05 * 0.95 / runs);
  REQUIRE_THAT(activated / double(runs), Catch::Matchers::WithinAbs(0.05, 3 * se));
}

TEST_CASE("cascade: expected active count on a path matches the exact value") {
  auto g = oracles::make_graph(3, {{0, 1}, {1, 2}});
  SeedSet seeds({0});
  const int runs = 100000;
  double total = 0.0;
  for (int i = 0; i < runs; ++i) {
    auto trace = casbr::simulate_universe(g, seeds, 0.5, RngSeed{6, static_cast<std::uint64_t>(i)});
    total += static_cast<double>(trace.cumulative_active().back());
  }
  // E = 1 + 0.5 + 0.25
  REQUIRE_THAT(total / runs, Catch::Matchers::WithinAbs(1.75, 0.02));
}

TEST_CASE("cascade: group-pair probabilities route correctly") {
  auto g = oracles::make_graph(2, {{0, 1}});
  SeedSet seeds({0});
  const int runs = 20000;
  auto rate = [&](Group activator, Group target, SpilloverProbs probs, std::uint64_t tag) {
    Assignment a(2);
    a.set(0, activator);
    a.set(1, target);
    int hit = 0;
    for (int i = 0; i < runs; ++i) {
      auto trace = casbr::simulate_cascade(g, a, seeds, probs,
                                           RngSeed{tag, static_cast<std::uint64_t>(i)});
      if (trace.activation_step(1) != CascadeTrace::kNever) ++hit;
    }
    return hit / double(runs);
  };
  SpilloverProbs probs{0.8, 0.4, 0.2, 0.6, 0.1};
  REQUIRE_THAT(rate(Group::treatment, Group::treatment, probs, 10),
               Catch::Matchers::WithinAbs(0.8, 0.01));
  REQUIRE_THAT(rate(Group::control, Group::treatment, probs, 11),
               Catch::Matchers::WithinAbs(0.4, 0.012));
  REQUIRE_THAT(rate(Group::control, Group::control, probs, 12),
               Catch::Matchers::WithinAbs(0.2, 0.01));
  REQUIRE_THAT(rate(Group::treatment, Group::control, probs, 13),
               Catch::Matchers::WithinAbs(0.6, 0.012));
  REQUIRE_THAT(rate(Group::treatment, Group::bystander, probs, 14),
               Catch::Matchers::WithinAbs(0.1, 0.008));
  REQUIRE_THAT(rate(Group::bystander, Group::control, probs, 15),
               Catch::Matchers::WithinAbs(0.1, 0.008));
}

TEST_CASE("cascade: state machine and single-attempt invariants") {
  auto g = casbr::generate_forest_fire(80, 0.35, 0.4, RngSeed{7, 0});
  auto a = casbr::randomized_assignment(g, RngSeed{8, 0});
  SeedSet seeds({0, 5, 11, 40});
  std::vector<casbr::AttemptRecord> attempts;
  auto trace = casbr::simulate_cascade(g, a, seeds, SpilloverProbs::paper_default(),
                                       RngSeed{9, 0}, &attempts);

  std::set<std::pair<NodeId, NodeId>> attempt_pairs;
  for (const auto& at : attempts) {
    REQUIRE(attempt_pairs.emplace(at.activator, at.target).second);
    // activator was newly active in the previous step
    REQUIRE(trace.activation_step(at.activator) == at.step - 1);
    // target was still inactive when the attempt happened
    std::uint32_t ts = trace.activation_step(at.target);
    REQUIRE((ts == CascadeTrace::kNever || ts >= at.step));
  }
  for (const auto& e : trace.events()) {
    REQUIRE(trace.activation_step(e.target) == e.step);
    REQUIRE(trace.activation_step(e.activator) == e.step - 1);
  }
  // horizon is the first step with zero new activations
  std::uint32_t last = 0;
  for (const auto& e : trace.events()) last = std::max(last, e.step);
  REQUIRE(trace.horizon() == last + 1);
}

TEST_CASE("cascade: shared seed couples runs monotonically in the probabilities") {
  auto g = casbr::generate_barabasi_albert(120, 3, RngSeed{10, 0});
  auto a = casbr::randomized_assignment(g, RngSeed{11, 0});
  SeedSet seeds({0, 1, 2, 3, 4, 5});
  for (std::uint64_t s = 0; s < 30; ++s) {
    SpilloverProbs low{0.04, 0.02, 0.02, 0.04, 0.02};
    SpilloverProbs high{0.09, 0.05, 0.03, 0.06, 0.04};
    auto tl = casbr::simulate_cascade(g, a, seeds, low, RngSeed{12, s});
    auto th = casbr::simulate_cascade(g, a, seeds, high, RngSeed{12, s});
    for (NodeId v = 0; v < 120; ++v)
      if (tl.activation_step(v) != CascadeTrace::kNever)
        REQUIRE(th.activation_step(v) != CascadeTrace::kNever);
  }
}

TEST_CASE("cascade: identical seeds give identical traces") {
  auto g = casbr::generate_forest_fire(100, 0.35, 0.4, RngSeed{13, 0});
  auto a = casbr::randomized_assignment(g, RngSeed{14, 0});
  auto seeds = casbr::random_seeds(g, 0.1, RngSeed{15, 0});
  auto t1 = casbr::simulate_cascade(g, a, seeds, SpilloverProbs::paper_default(), RngSeed{16, 0});
  auto t2 = casbr::simulate_cascade(g, a, seeds, SpilloverProbs::paper_default(), RngSeed{16, 0});
  REQUIRE(t1.horizon() == t2.horizon());
  for (NodeId v = 0; v < 100; ++v)
    REQUIRE(t1.activation_step(v) == t2.activation_step(v));
  REQUIRE(t1.events().size() == t2.events().size());
}

TEST_CASE("cascade: unassigned nodes are rejected") {
  auto g = oracles::make_graph(2, {{0, 1}});
  Assignment a(2);
  a.set(0, Group::treatment);
  REQUIRE_THROWS_AS(
      casbr::simulate_cascade(g, a, SeedSet({0}), SpilloverProbs{}, RngSeed{}),
      std::invalid_argument);
  SpilloverProbs bad;
  bad.p_tt = 1.5;
  REQUIRE_THROWS_AS(
      casbr::simulate_cascade(g, uniform_assignment(2, Group::control), SeedSet({0}), bad,
                              RngSeed{}),
      std::invalid_argument);
}

TEST_CASE("universe: boundary probabilities") {
  auto g = oracles::make_graph(3, {{0, 1}, {1, 2}});
  SeedSet seeds({0});
  auto frozen = casbr::simulate_universe(g, seeds, 0.0, RngSeed{17, 0});
  REQUIRE(frozen.cumulative_active().back() == 1);
  auto flood = casbr::simulate_universe(g, seeds, 1.0, RngSeed{18, 0});
  REQUIRE(flood.activation_step(0) == 0);
  REQUIRE(flood.activation_step(1) == 1);
  REQUIRE(flood.activation_step(2) == 2);
}

TEST_CASE("true tte: symmetric universes cancel") {
  auto g = casbr::generate_barabasi_albert(100, 2, RngSeed{19, 0});
  auto seeds = casbr::random_seeds(g, 0.1, RngSeed{20, 0});
  const std::size_t q = 4000;
  auto series = casbr::true_tte(g, seeds, 0.05, 0.05, q, RngSeed{21, 0});
  // generous 3-sigma bound: per-pair diffs live in [-1, 1]
  double bound = 3.0 / std::sqrt(double(q));
  REQUIRE(std::abs(series.back()) <= bound);
}

TEST_CASE("true tte: deterministic endpoints") {
  auto g = casbr::generate_barabasi_albert(50, 2, RngSeed{22, 0});
  SeedSet seeds({0, 7, 13});
  auto series = casbr::true_tte(g, seeds, 1.0, 0.0, 20, RngSeed{23, 0});
  REQUIRE_THAT(series.back(), Catch::Matchers::WithinAbs(1.0 - 3.0 / 50.0, 1e-12));
}

TEST_CASE("true tte: path expectation matches the closed form") {
  auto g = oracles::make_graph(3, {{0, 1}, {1, 2}});
  SeedSet seeds({0});
  auto series = casbr::true_tte(g, seeds, 0.5, 0.2, 100000, RngSeed{24, 0});
  // treat universe: 1 + 0.5 + 0.25; control universe: 1 + 0.2 + 0.04
  REQUIRE_THAT(series.back(), Catch::Matchers::WithinAbs((1.75 - 1.24) / 3.0, 0.005));
}

TEST_CASE("true tte: series rises over time when treatment spreads faster") {
  auto g = casbr::generate_forest_fire(150, 0.3, 0.3, RngSeed{25, 0});
  auto seeds = casbr::random_seeds(g, 0.1, RngSeed{26, 0});
  auto series = casbr::true_tte(g, seeds, 0.3, 0.05, 1000, RngSeed{27, 0});
  REQUIRE(series.size() >= 2);
  // allow two standard errors of slack per comparison
  double slack = 2.0 / std::sqrt(1000.0);
  for (std::size_t t = 1; t < series.size(); ++t)
    REQUIRE(series[t] >= series[t - 1] - slack);
  REQUIRE_THROWS_AS(casbr::true_tte(g, seeds, 0.1, 0.1, 0, RngSeed{}), std::invalid_argument);
}

TEST_CASE("cross-group counts: tallies by activator and target group") {
  auto g = oracles::make_graph(2, {{0, 1}});
  Assignment a(2);
  a.set(0, Group::treatment);
  a.set(1, Group::control);
  SpilloverProbs probs;
  probs.p_tc = 1.0;
  auto trace = casbr::simulate_cascade(g, a, SeedSet({0}), probs, RngSeed{28, 0});
  auto counts = casbr::cross_group_activation_counts(trace);
  REQUIRE(counts.at(Group::treatment, Group::control) == 1);
  REQUIRE(counts.cross_total() == 1);

  auto same = casbr::simulate_cascade(g, uniform_assignment(2, Group::treatment),
                                      SeedSet({0}), SpilloverProbs::uniform(1.0),
                                      RngSeed{29, 0});
  REQUIRE(casbr::cross_group_activation_counts(same).cross_total() == 0);
}

TEST_CASE("cross-group counts: casbr beats randomized in paired runs") {
  auto g = casbr::generate_barabasi_albert(400, 3, RngSeed{30, 0});
  auto seeds = casbr::random_seeds(g, 0.1, RngSeed{31, 0});
  // pairs share the cascade stream, so the keyed draws couple the two runs
  SpilloverProbs probs{0.2, 0.1, 0.1, 0.2, 0.1};
  int casbr_wins = 0;
  const int pairs = 100;
  for (int i = 0; i < pairs; ++i) {
    auto su = static_cast<std::uint64_t>(i);
    auto a_cas = casbr::casbr_assignment(g, seeds, RngSeed{32, su});
    auto a_rnd = casbr::randomized_assignment(g, RngSeed{33, su});
    auto t_cas = casbr::simulate_cascade(g, a_cas, seeds, probs, RngSeed{34, su});
    auto t_rnd = casbr::simulate_cascade(g, a_rnd, seeds, probs, RngSeed{34, su});
    if (casbr::cross_group_activation_counts(t_cas).cross_total() <=
        casbr::cross_group_activation_counts(t_rnd).cross_total())
      ++casbr_wins;
  }
  INFO("casbr <= randomized in " << casbr_wins << "/" << pairs << " paired runs");
  REQUIRE(casbr_wins >= 90);
}

TEST_CASE("trace events export") {
  auto g = oracles::make_graph(3, {{0, 1}, {1, 2}});
  auto a = uniform_assignment(3, Group::treatment);
  auto trace = casbr::simulate_cascade(g, a, SeedSet({0}), SpilloverProbs::uniform(1.0),
                                       RngSeed{36, 0});
  std::ostringstream out;
  casbr::write_trace_events(trace, out);
  REQUIRE(out.str() ==
          "step,activator,activator_group,target,target_group\n"
          "1,0,1,1,1\n"
          "2,1,1,2,1\n");
}
