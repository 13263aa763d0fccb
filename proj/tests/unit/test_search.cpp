#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "insight/error.hpp"
#include "insight/search.hpp"
#include "json.hpp"
#include "oracle.hpp"

using namespace insight;
using namespace insight::search;

namespace {

RewardStats stats(double mean, std::size_t n) {
  RewardStats s;
  for (std::size_t i = 0; i < n; ++i) s.add(mean);
  return s;
}

struct TwoEdges {
  Node parent, first, second;
  TwoEdges(RewardStats a, RewardStats b) {
    parent.stats.visits = a.visits + b.visits;
    parent.edges.push_back({actions::parse_action("select(a)"), &first, a});
    parent.edges.push_back({actions::parse_action("select(b)"), &second, b});
  }
};

}  // namespace

TEST_CASE("uct prefers the under-explored edge") {
  TwoEdges t(stats(0.9, 10), stats(0.2, 1));
  SearchConfig cfg;
  const double s0 = oracle::uct(0.9, 11, 10, std::sqrt(2.0));
  const double s1 = oracle::uct(0.2, 11, 1, std::sqrt(2.0));
  CHECK(edge_score(t.parent, t.parent.edges[0], cfg) == doctest::Approx(s0).epsilon(1e-12));
  CHECK(edge_score(t.parent, t.parent.edges[1], cfg) == doctest::Approx(s1).epsilon(1e-12));
  CHECK(s1 > s0);
  Rng rng(1);
  CHECK(select_child(t.parent, cfg, rng) == 1);
}

TEST_CASE("spuct adds the variance term") {
  RewardStats a;
  a.add(0.0);
  a.add(1.0);
  TwoEdges t(a, stats(0.5, 2));
  SearchConfig cfg;
  cfg.tree_policy = TreePolicy::SpUct;
  cfg.d_const = 2.0;
  CHECK(edge_score(t.parent, t.parent.edges[0], cfg) ==
        doctest::Approx(oracle::spuct(0.5, 0.25, 4, 2, std::sqrt(2.0), 2.0)).epsilon(1e-12));
  CHECK(edge_score(t.parent, t.parent.edges[1], cfg) ==
        doctest::Approx(oracle::spuct(0.5, 0.0, 4, 2, std::sqrt(2.0), 2.0)).epsilon(1e-12));
}

TEST_CASE("random tree policy is seeded") {
  TwoEdges t(stats(0.9, 10), stats(0.2, 1));
  SearchConfig cfg;
  cfg.tree_policy = TreePolicy::Random;
  std::vector<std::size_t> a, b;
  Rng r1(9), r2(9);
  for (int i = 0; i < 30; ++i) {
    a.push_back(select_child(t.parent, cfg, r1));
    b.push_back(select_child(t.parent, cfg, r2));
  }
  CHECK(a == b);
  CHECK(std::count(a.begin(), a.end(), 0u) > 0);
  CHECK(std::count(a.begin(), a.end(), 1u) > 0);
}

TEST_CASE("uct2 reads the pooled child estimate") {
  Node p1, p2, shared;
  p1.stats = stats(0.2, 3);
  p2.stats = stats(0.8, 3);
  p1.edges.push_back({actions::parse_action("select(x)"), &shared, stats(0.2, 3)});
  p2.edges.push_back({actions::parse_action("select(y)"), &shared, stats(0.8, 3)});
  shared.stats = stats(0.2, 3);
  for (int i = 0; i < 3; ++i) shared.stats.add(0.8);
  SearchConfig cfg;
  cfg.tree_policy = TreePolicy::Uct2;
  const double bonus = std::sqrt(2.0) * std::sqrt(std::log(3.0) / 3.0);
  CHECK(shared.q(Backprop::Mean) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(edge_score(p1, p1.edges[0], cfg) == doctest::Approx(0.5 + bonus).epsilon(1e-12));
  CHECK(edge_score(p2, p2.edges[0], cfg) == doctest::Approx(0.5 + bonus).epsilon(1e-12));
}

TEST_CASE("expansion gate") {
  SearchConfig pw;
  pw.alpha = 0.5;
  CHECK(expansion_gate_open(4, 2, pw));
  CHECK_FALSE(expansion_gate_open(3, 2, pw));
  SearchConfig fixed;
  fixed.expansion = ExpansionMode::FixedFanOut;
  fixed.fan_out = 3;
  CHECK_FALSE(expansion_gate_open(1000000, 3, fixed));
  CHECK(expansion_gate_open(1, 2, fixed));
}

TEST_CASE("reward aggregation") {
  RewardStats s;
  s.add(0.1);
  s.add(0.9);
  CHECK(aggregate(s, Backprop::Mean) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(aggregate(s, Backprop::Rms) == doctest::Approx(std::sqrt((0.01 + 0.81) / 2)).epsilon(1e-12));
  CHECK(aggregate(s, Backprop::Rms) == doctest::Approx(0.640312).epsilon(1e-6));
  const auto one = stats(0.37, 1);
  CHECK(aggregate(one, Backprop::Mean) == doctest::Approx(0.37).epsilon(1e-12));
  CHECK(aggregate(one, Backprop::Rms) == doctest::Approx(0.37).epsilon(1e-12));
  const auto zero = stats(0.0, 5);
  CHECK(aggregate(zero, Backprop::Mean) == 0.0);
  CHECK(aggregate(zero, Backprop::Rms) == 0.0);
}

TEST_CASE("search with no iterations") {
  const auto r = run_search(fixtures::exams(), [] {
    SearchConfig c;
    c.iterations = 0;
    return c;
  }());
  CHECK(r.patterns.empty());
  CHECK(r.node_count == 1);
  CHECK(r.iterations == 0);
}

TEST_CASE("the first iteration selects a column") {
  Search s(fixtures::exams(), SearchConfig{});
  s.step();
  REQUIRE(s.root().edges.size() == 1);
  CHECK(s.root().edges[0].action.kind() == ActionKind::Select);
  CHECK(s.node_count() == 2);
}

TEST_CASE("searches are deterministic") {
  auto cfg = preset("C4");
  cfg.iterations = 150;
  cfg.seed = 21;
  const auto d = fixtures::planted_outlier();
  std::ostringstream t1, t2;
  const auto a = run_search(d, cfg, &t1);
  const auto b = run_search(d, cfg, &t2);
  CHECK(a == b);
  CHECK(t1.str() == t2.str());
}

TEST_CASE("trace lines are JSON") {
  auto cfg = preset("C3");
  cfg.iterations = 10;
  std::ostringstream trace;
  run_search(fixtures::exams(), cfg, &trace);
  std::istringstream in(trace.str());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.at("iteration") == ++n);
    CHECK(j.contains("reward"));
  }
  CHECK(n == 10);
}

TEST_CASE("random simulation is seeded") {
  auto cfg = preset("C1");
  cfg.iterations = 40;
  const auto d = fixtures::planted_outlier();
  std::ostringstream a, b;
  run_search(d, cfg, &a);
  run_search(d, cfg, &b);
  CHECK(a.str() == b.str());
}

TEST_CASE("simulation reward on correlated columns") {
  const auto d = tabular::Dataset::from_columns(
      {fixtures::numbers("a", {-2, -1, 0, 1, 2}), fixtures::numbers("b", {-4, -2, 0, 2, 4})});
  auto cfg = preset("C3");
  Search s(d, cfg);
  auto e1 = s.add_child(s.root(), actions::parse_action("select(a)"));
  REQUIRE(e1);
  Node* a = s.root().edges[*e1].child;
  auto e2 = s.add_child(*a, actions::parse_action("select(b)"));
  REQUIRE(e2);
  CHECK(a->edges[*e2].child->base_score >= 0.5);
}

TEST_CASE("presets") {
  CHECK(preset("C1").tree_policy == TreePolicy::Random);
  CHECK(preset("C1").random_simulation);
  CHECK_FALSE(preset("C3").random_simulation);
  CHECK(preset("C4").action_policy == actions::ParamPolicy::WeightedRandom);
  CHECK(preset("C5").alpha == 0.25);
  CHECK(preset("C7").alpha == 0.75);
  CHECK(preset("C8").expansion == ExpansionMode::FixedFanOut);
  CHECK(preset("C8").fan_out == 3);
  CHECK(preset("C9").fan_out == 6);
  CHECK(preset("C10").tree_policy == TreePolicy::SpUct);
  CHECK_THROWS_AS(preset("C11"), InputError);
  CHECK(preset_names().size() == 10);
}

TEST_CASE("collect metrics") {
  SearchResult r;
  Pattern p;
  p.model_kind = "associationRules";
  p.base_columns = {"a", "b"};
  r.patterns = {p, p, p};
  PatternDescriptor hit{"rule", {"associationRules"}, {"a"}, {}};
  PatternDescriptor miss{"tree", {"decisionTree"}, {}, {}};
  const auto m = collect_metrics(r, {hit, miss});
  CHECK(m[0].count == 3);
  CHECK(m[0].found == 1);
  CHECK(m[1].count == 0);
  CHECK(m[1].found == 0);
}

TEST_CASE("replay reproduces pattern states") {
  auto cfg = preset("C3");
  cfg.iterations = 200;
  cfg.seed = 4;
  const auto d = fixtures::planted_outlier();
  const auto r = run_search(d, cfg);
  REQUIRE_FALSE(r.patterns.empty());
  for (const auto& p : r.patterns) {
    std::vector<std::string> data_path(p.state_path.begin(), p.state_path.end() - 1);
    const auto st = replay(d, p.state_path);
    REQUIRE(st.model);
    const auto pre = replay(d, data_path);
    CHECK(actions::canonical_state_key(pre.dataset, st.model->action.canonical()).hex() == p.state_key);
  }
}
