#include "doctest.h"
#include "insight/error.hpp"
#include "insight/mining.hpp"
#include "insight/report.hpp"
#include "insight/synth.hpp"
#include "oracle.hpp"

using namespace insight;
using namespace insight::synth;

TEST_CASE("scenario 1 shapes") {
  const auto g1 = generate_scenario1(1, 5);
  CHECK(g1.dataset.row_count() == 1000);
  CHECK(g1.dataset.column_count() == 6);
  const auto g10 = generate_scenario1(10, 5);
  CHECK(g10.dataset.column_count() == 24);
  CHECK(g1.dataset.find("timestamp")->type() == tabular::ColumnType::Datetime);
  CHECK_THROWS_AS(generate_scenario1(0, 1), InputError);
  CHECK_THROWS_AS(generate_scenario1(11, 1), InputError);
}

TEST_CASE("scenario 1 signal carries trend and outliers") {
  for (uint64_t seed : {1, 2, 3}) {
    const auto g = generate_scenario1(2, seed);
    const auto m = mining::analyze_trend(*g.dataset.find("timestamp"), *g.dataset.find("signal"));
    const auto& a = std::get<mining::TrendArtifacts>(m.artifacts);
    CHECK(a.trend);
    CHECK(a.outliers);
    REQUIRE(g.specs.size() == 1);
    const auto fit = direct_fit(g.dataset, g.specs[0]);
    CHECK(g.specs[0].matches(fit.pattern));
  }
}

TEST_CASE("scenario 2 shapes") {
  for (char which : {'A', 'B', 'C', 'D', 'E'}) {
    const auto shape = scenario2_shape(which);
    const auto g = generate_scenario2(which, 3);
    CHECK(g.dataset.column_count() == shape.columns);
    CHECK(g.dataset.row_count() == shape.rows);
    for (const auto& s : g.specs) {
      CHECK_FALSE(s.matchers.empty());
      for (const auto& c : s.involved_columns) CHECK(g.dataset.find(c) != nullptr);
    }
  }
  const auto a = scenario2_shape('A');
  CHECK(a.columns == 5);
  CHECK(a.rows == 1000);
  CHECK(a.cluster == 1);
  CHECK(a.cluster_n == 2);
  CHECK(scenario2_shape('E').columns == 30);
  CHECK(scenario2_shape('E').rows == 30000);
  CHECK_THROWS_AS(scenario2_shape('F'), InputError);
}

TEST_CASE("noise-free linear plant is exactly correlated") {
  GeneratorParams p;
  p.correlation_noise = 0.0;
  const auto g = generate_scenario2('A', 9, p);
  for (const auto& s : g.specs) {
    if (s.kind != PlantKind::Correlation || s.parameters.at("relation") != "linear") continue;
    const auto x = g.dataset.find(s.involved_columns[0])->encoded();
    const auto y = g.dataset.find(s.involved_columns[1])->encoded();
    CHECK(oracle::pearson(x, y) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("direct fits are recognised by their specs") {
  const auto g = generate_scenario2('B', 4);
  for (const auto& s : g.specs) {
    if (s.kind == PlantKind::PartialRule) continue;
    const auto fit = direct_fit(g.dataset, s);
    const auto parsed = report::spec_from_json(report::to_json(s));
    const auto ev = evaluate_run({fit.pattern}, {parsed});
    CHECK_MESSAGE(ev.per_spec[0].found == 1, s.name);
    CHECK_MESSAGE(fit.interestingness > 0.5, s.name);
  }
}

TEST_CASE("run evaluation") {
  SUBCASE("empty") {
    const auto ev = evaluate_run({}, generate_scenario2('A', 1).specs);
    for (const auto& m : ev.per_spec) CHECK(m.found == 0);
    CHECK(ev.other_count == 0);
  }
  SUBCASE("two matching rules and one other") {
    PlantedPatternSpec spec;
    spec.name = "r";
    spec.kind = PlantKind::Rule;
    spec.matchers = {{"rule", {"associationRules"}, {"f"}, {}}};
    Pattern rule;
    rule.model_kind = "associationRules";
    rule.base_columns = {"f", "g"};
    Pattern cluster;
    cluster.model_kind = "clustering";
    cluster.base_columns = {"f"};
    const auto ev = evaluate_run({rule, rule, cluster}, {spec});
    CHECK(ev.per_spec[0].count == 2);
    CHECK(ev.per_spec[0].found == 1);
    CHECK(ev.other_count == 1);
  }
  SUBCASE("expectation over seeds") {
    CHECK(expectation({1, 1, 1, 1, 1, 1, 1, 0, 0, 0}) == doctest::Approx(0.7));
    CHECK(expectation({}) == 0.0);
  }
}

TEST_CASE("configuration ranks") {
  CHECK(rank_configurations({{{"x", "d"}, 5.0}, {{"y", "d"}, 3.0}}) == std::map<std::string, double>{{"x", 1}, {"y", 2}});
  CHECK(rank_configurations({{{"x", "d"}, 4.0}, {{"y", "d"}, 4.0}}) ==
        std::map<std::string, double>{{"x", 1.5}, {"y", 1.5}});
  const ScoreTable t = {{{"x", "d1"}, 9}, {{"y", "d1"}, 1}, {{"x", "d2"}, 1}, {{"y", "d2"}, 9},
                        {{"x", "d3"}, 9}, {{"y", "d3"}, 1}};
  CHECK(rank_configurations(t).at("x") == doctest::Approx(4.0 / 3.0));
  CHECK(rank_configurations({{{"x", "d"}, 5.0}, {{"y", "d"}, 3.0}}, false).at("y") == 1.0);
  CHECK_THROWS_AS(rank_configurations({{{"x", "d1"}, 1.0}, {{"y", "d2"}, 2.0}}), InputError);
}

TEST_CASE("generation is seed-deterministic") {
  const auto a = generate_scenario2('A', 77);
  const auto b = generate_scenario2('A', 77);
  CHECK(a.dataset.same_content(b.dataset));
  CHECK(a.seed == b.seed);
}
