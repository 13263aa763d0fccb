#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "insight/error.hpp"
#include "insight/interestingness.hpp"
#include "insight/mining.hpp"
#include "oracle.hpp"

using namespace insight;
using namespace insight::mining;
using tabular::Column;
using tabular::ColumnType;
using tabular::Dataset;

namespace {

Column datetimes(const std::string& name, std::size_t n) {
  std::vector<double> t;
  for (std::size_t i = 0; i < n; ++i) t.push_back(1.6e9 + 86400.0 * static_cast<double>(i));
  return Column::numbers(name, ColumnType::Datetime, t);
}

const TreeArtifacts& tree_of(const FittedModel& m) { return std::get<TreeArtifacts>(m.artifacts); }

}  // namespace

TEST_CASE("tree on a separable target") {
  std::vector<double> x;
  std::vector<std::string> y;
  for (int i = 0; i < 40; ++i) {
    x.push_back(i);
    y.push_back(i < 20 ? "low" : "high");
  }
  const auto d = Dataset::from_columns({fixtures::numbers("x", x), fixtures::categories("y", y)});
  const auto m = fit_tree(d, "y", 2);
  CHECK(m.kind == ModelKind::DecisionTree);
  CHECK(tree_of(m).accuracy == doctest::Approx(1.0));
  CHECK(tree_of(m).coverage == doctest::Approx(1.0));
  CHECK(tree_of(m).used_features.front() == "x");
  CHECK(intr::intr_tree(m) == doctest::Approx(1.0));
}

TEST_CASE("regression tree on an independent target") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> normal;
  std::vector<double> a, b, y;
  for (int i = 0; i < 1000; ++i) {
    a.push_back(normal(rng));
    b.push_back(normal(rng));
    y.push_back(normal(rng));
  }
  const auto d = Dataset::from_columns({fixtures::numbers("a", a), fixtures::numbers("b", b), fixtures::numbers("y", y)});
  for (int depth : {2, 3}) {
    const auto m = fit_tree(d, "y", depth);
    CHECK(m.kind == ModelKind::RegressionTree);
    CHECK(tree_of(m).accuracy <= 0.1);
  }
}

TEST_CASE("tree coverage counts predicted classes") {
  // A rare third class too small for its own leaf (min leaf 5).
  std::vector<double> x;
  std::vector<std::string> y;
  for (int i = 0; i < 60; ++i) {
    x.push_back(i);
    y.push_back(i == 3 || i == 40 ? "rare" : (i < 30 ? "A" : "B"));
  }
  const auto d = Dataset::from_columns({fixtures::numbers("x", x), fixtures::categories("y", y)});
  const auto m = fit_tree(d, "y", 2);
  CHECK(tree_of(m).coverage == doctest::Approx(2.0 / 3.0));
  CHECK(tree_of(m).predicted_classes == 2);
}

TEST_CASE("tree errors") {
  const auto d = Dataset::from_columns({fixtures::numbers("x", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}),
                                        fixtures::categories("y", std::vector<std::string>(11, "same"))});
  CHECK_THROWS_AS(fit_tree(d, "y", 2), MiningError);
  const auto small = Dataset::from_columns({fixtures::numbers("x", {1, 2, 3}), fixtures::categories("y", {"a", "b", "a"})});
  CHECK_THROWS_AS(fit_tree(small, "y", 2), MiningError);
}

TEST_CASE("univariate quantitative outliers") {
  const std::vector<double> v = {1, 1, 1, 1, 1, 1, 1, 1, 1, 11};
  CHECK(oracle::mean(v) == 2.0);
  CHECK(oracle::zscore(v, 11) == doctest::Approx(3.0));
  const auto m = detect_univariate_outliers(fixtures::numbers("Score", v));
  const auto& a = std::get<UnivariateArtifacts>(m.artifacts);
  CHECK(a.mean == doctest::Approx(2.0));
  CHECK(a.stddev == doctest::Approx(3.0));
  REQUIRE(a.flagged.size() == 1);
  CHECK(a.flagged[0].value == "11");
  CHECK(a.flagged[0].score == doctest::Approx(oracle::zscore(v, 11)));
  REQUIRE(m.appended);
  CHECK(m.appended->type() == ColumnType::Boolean);
}

TEST_CASE("univariate qualitative outliers respect the mode gate") {
  std::vector<std::string> v(8, "A");
  v.push_back("B");
  v.push_back("C");
  const auto m = detect_univariate_outliers(fixtures::categories("c", v));
  CHECK(std::get<UnivariateArtifacts>(m.artifacts).mode_frequency == doctest::Approx(0.8));
  CHECK(std::get<UnivariateArtifacts>(m.artifacts).flagged.empty());
  CHECK(intr::intr_univariate_outliers(m) == 0.0);

  std::vector<std::string> w(19, "A");
  w.push_back("B");
  const auto m2 = detect_univariate_outliers(fixtures::categories("c", w));
  REQUIRE(std::get<UnivariateArtifacts>(m2.artifacts).flagged.size() == 1);
  CHECK(std::get<UnivariateArtifacts>(m2.artifacts).flagged[0].score == doctest::Approx(0.05));
}

TEST_CASE("constant column has no outliers") {
  const auto m = detect_univariate_outliers(fixtures::numbers("k", std::vector<double>(12, 4.0)));
  CHECK(std::get<UnivariateArtifacts>(m.artifacts).flagged.empty());
}

TEST_CASE("bivariate residual outlier") {
  std::vector<double> x, y;
  for (int i = 1; i <= 20; ++i) {
    x.push_back(i);
    y.push_back(i == 20 ? 100 : 2 * i);
  }
  const auto d = Dataset::from_columns({fixtures::numbers("X", x), fixtures::numbers("Y", y)});
  const auto corr = tabular::pearson_matrix(d);
  CHECK(corr.at(0, 1) == doctest::Approx(oracle::pearson(x, y)).epsilon(1e-12));
  CHECK(corr.at(0, 1) > 0.8);
  const auto m = detect_bivariate_outliers(d, "X", "Y", corr);
  const auto& a = std::get<BivariateArtifacts>(m.artifacts);
  REQUIRE_FALSE(a.flagged.empty());
  CHECK(a.flagged[0].first_value == "20");
  CHECK(a.flagged[0].second_value == "100");
  CHECK(a.flagged[0].z > 2.0);
}

TEST_CASE("bivariate gate and independent categories") {
  SUBCASE("uniform contingency") {
    std::vector<std::string> a, b;
    for (int i = 0; i < 40; ++i) {
      a.push_back(i % 2 ? "p" : "q");
      b.push_back((i / 2) % 2 ? "r" : "s");
    }
    const auto d = Dataset::from_columns({fixtures::categories("a", a), fixtures::categories("b", b)});
    const auto m = detect_bivariate_outliers(d, "a", "b", tabular::pearson_matrix(d));
    CHECK(std::get<BivariateArtifacts>(m.artifacts).flagged.empty());
  }
  SUBCASE("weak correlation") {
    // y = x + orthogonal noise of equal norm: corr = 0.5 exactly.
    std::vector<double> x = {-3, -1, 1, 3, -3, -1, 1, 3}, e = {1, -1, -1, 1, -1, 1, 1, -1};
    std::vector<double> y;
    const double scale = std::sqrt(15.0);  // |y|^2 = 40 + 8 s^2 = 4 |x|^2
    for (std::size_t i = 0; i < x.size(); ++i) y.push_back(x[i] + scale * e[i]);
    const auto d = Dataset::from_columns({fixtures::numbers("x", x), fixtures::numbers("y", y)});
    const auto corr = tabular::pearson_matrix(d);
    CHECK(corr.at(0, 1) == doctest::Approx(0.5).epsilon(1e-9));
    const auto m = detect_bivariate_outliers(d, "x", "y", corr);
    CHECK(std::get<BivariateArtifacts>(m.artifacts).flagged.empty());
    CHECK(intr::intr_bivariate_outliers(m) == 0.0);
  }
}

TEST_CASE("k-means silhouettes") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> normal;
  SUBCASE("two separated blobs") {
    std::vector<double> a, b;
    for (int i = 0; i < 200; ++i) {
      const double off = i < 100 ? 0.0 : 10.0;
      a.push_back(off + normal(gen));
      b.push_back(off + normal(gen));
    }
    const auto d = Dataset::from_columns({fixtures::numbers("a", a), fixtures::numbers("b", b)});
    actions::Rng rng(1);
    const auto m = cluster_kmeans(d, 2, rng);
    CHECK(std::get<ClusterArtifacts>(m.artifacts).silhouette > 0.7);
    REQUIRE(m.appended);
    CHECK(m.appended->type() == ColumnType::Numerical);
  }
  SUBCASE("one blob") {
    std::vector<double> a, b;
    for (int i = 0; i < 200; ++i) {
      a.push_back(normal(gen));
      b.push_back(normal(gen));
    }
    const auto d = Dataset::from_columns({fixtures::numbers("a", a), fixtures::numbers("b", b)});
    actions::Rng rng(1);
    CHECK(std::get<ClusterArtifacts>(cluster_kmeans(d, 2, rng).artifacts).silhouette < 0.5);
  }
  SUBCASE("identical rows") {
    const auto same = Dataset::from_columns({fixtures::numbers("a", {1, 1, 1}), fixtures::numbers("b", {2, 2, 2})});
    actions::Rng rng(1);
    MiningParams p;
    p.min_rows = 1;
    CHECK_THROWS_AS(cluster_kmeans(same, 2, rng, p), MiningError);
  }
}

TEST_CASE("silhouette matches a hand computation") {
  // Points 0,1 in one cluster and 10 in the other, on a line.
  const std::vector<std::vector<double>> pts = {{0}, {1}, {10}};
  const double s0 = (10.0 - 1.0) / 10.0, s1 = (9.0 - 1.0) / 9.0;  // singleton scores 0
  CHECK(silhouette(pts, {0, 0, 1}, 2) == doctest::Approx((s0 + s1 + 0.0) / 3.0));
}

TEST_CASE("trend flags") {
  SUBCASE("monotone ramp") {
    std::vector<double> y;
    for (int i = 0; i < 60; ++i) y.push_back(i);
    const auto m = analyze_trend(datetimes("t", 60), fixtures::numbers("y", y));
    const auto& a = std::get<TrendArtifacts>(m.artifacts);
    CHECK(a.trend);
    CHECK_FALSE(a.period);
    CHECK(a.direction == 1);
  }
  SUBCASE("twelve-sample sine") {
    std::vector<double> y;
    for (int i = 0; i < 120; ++i) y.push_back(std::sin(2 * std::numbers::pi * i / 12.0));
    const auto m = analyze_trend(datetimes("t", 120), fixtures::numbers("y", y));
    const auto& a = std::get<TrendArtifacts>(m.artifacts);
    CHECK(a.period);
    CHECK(a.best_lag == 12);
  }
  SUBCASE("constant") {
    const auto m = analyze_trend(datetimes("t", 30), fixtures::numbers("y", std::vector<double>(30, 2.0)));
    const auto& a = std::get<TrendArtifacts>(m.artifacts);
    CHECK_FALSE(a.trend);
    CHECK_FALSE(a.period);
    CHECK_FALSE(a.outliers);
    CHECK(intr::intr_trend(m) == 0.0);
  }
}

TEST_CASE("mann-kendall statistic") {
  CHECK(mann_kendall_s({1, 2, 3, 4}) == 6);
  CHECK(mann_kendall_s({4, 3, 2, 1}) == -6);
  CHECK(mann_kendall_s({1, 3, 2}) == 1);
}

TEST_CASE("association rules measures") {
  SUBCASE("perfect co-occurrence") {
    std::vector<std::string> a, b;
    for (int i = 0; i < 10; ++i) {
      a.push_back(i < 4 ? "x" : "o" + std::to_string(i % 2));
      b.push_back(i < 4 ? "y" : "p" + std::to_string(i / 7));
    }
    const auto d = Dataset::from_columns({fixtures::categories("A", a), fixtures::categories("B", b)});
    const auto m = mine_association_rules(d);
    bool seen = false;
    for (const auto& r : std::get<RuleArtifacts>(m.artifacts).rules) {
      if (r.antecedent == std::vector<Item>{{"A", "x"}} && r.consequent == std::vector<Item>{{"B", "y"}}) {
        seen = true;
        CHECK(r.support_a == doctest::Approx(0.4));
        CHECK(r.kulc == doctest::Approx(oracle::kulc(0.4, 0.4, 0.4)));
        CHECK(r.kulc == doctest::Approx(1.0));
        CHECK(r.imbalance == 0.0);
      }
    }
    CHECK(seen);
  }
  SUBCASE("independence") {
    CHECK(oracle::kulc(0.5, 0.5, 0.25) == doctest::Approx(0.5));
    std::vector<std::string> a, b;
    for (int i = 0; i < 20; ++i) {
      a.push_back(i % 2 ? "a1" : "a0");
      b.push_back((i / 2) % 2 ? "b1" : "b0");
    }
    const auto d = Dataset::from_columns({fixtures::categories("A", a), fixtures::categories("B", b)});
    MiningParams p;
    p.min_confidence = 0.5;
    const auto m = mine_association_rules(d, p);
    const auto& rules = std::get<RuleArtifacts>(m.artifacts).rules;
    REQUIRE_FALSE(rules.empty());
    for (const auto& r : rules) CHECK(r.kulc == doctest::Approx(0.5));
  }
  SUBCASE("numbers only") {
    const auto d = Dataset::from_columns({fixtures::numbers("a", std::vector<double>(12, 1.0)),
                                          fixtures::numbers("b", std::vector<double>(12, 2.0))});
    CHECK_THROWS_AS(mine_association_rules(d), MiningError);
  }
}

TEST_CASE("rendered summaries name their contents") {
  const auto d = Dataset::from_columns({fixtures::numbers("Score", {1, 1, 1, 1, 1, 1, 1, 1, 1, 11})});
  auto out = apply_model_action(d, actions::parse_action("outliers(Score)"));
  const double value = intr::interestingness(out.model);
  const auto p = render_pattern(out.model, value, out.dataset, {"select(Score)", "outliers(Score)"});
  CHECK(p.summary.find("Score") != std::string::npos);
  CHECK(p.summary.find("outlier") != std::string::npos);
  CHECK(p.summary.find("11") != std::string::npos);
  CHECK(p.summary.find("z=3") != std::string::npos);
  CHECK(p.model_kind == "univariateOutliers");
  CHECK(p.base_columns == std::vector<std::string>{"Score"});
  CHECK_THROWS_AS(render_pattern(out.model, 1.5, out.dataset, {}), PreconditionError);

  std::vector<std::string> a, b;
  for (int i = 0; i < 20; ++i) {
    a.push_back(i < 10 ? "x" : "z");
    b.push_back(i < 10 ? "y" : "w");
  }
  const auto rd = Dataset::from_columns({fixtures::categories("A", a), fixtures::categories("B", b)});
  const auto rules = apply_model_action(rd, actions::parse_action("rules()"));
  const auto rp = render_pattern(rules.model, intr::interestingness(rules.model), rules.dataset, {"rules()"});
  CHECK(rp.summary.find("A=") != std::string::npos);
  CHECK(rp.summary.find("B=") != std::string::npos);
  CHECK(rp.summary.find("kulc") != std::string::npos);

  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal;
  std::vector<double> u, v;
  for (int i = 0; i < 90; ++i) {
    u.push_back(10.0 * (i % 3) + normal(gen));
    v.push_back(normal(gen));
  }
  const auto cd = Dataset::from_columns({fixtures::numbers("u", u), fixtures::numbers("v", v)});
  const auto cl = apply_model_action(cd, actions::parse_action("cluster(3)"));
  const auto cp = render_pattern(cl.model, intr::interestingness(cl.model), cl.dataset, {"cluster(3)"});
  CHECK(cp.summary.find("k=3") != std::string::npos);
  CHECK(cp.summary.find("silhouette") != std::string::npos);
}

TEST_CASE("model actions append at most one column") {
  const auto d = fixtures::planted_outlier();
  for (const char* a : {"outliers(X)", "cluster(2)", "tree(X,2)", "bioutliers(X,Y)"}) {
    try {
      const auto out = apply_model_action(d, actions::parse_action(a));
      CHECK(out.dataset.column_count() <= d.column_count() + 1);
      const bool appends = out.model.kind == ModelKind::Clustering || out.model.kind == ModelKind::UnivariateOutliers ||
                           out.model.kind == ModelKind::BivariateOutliers;
      CHECK((out.dataset.column_count() == d.column_count() + 1) == appends);
    } catch (const MiningError&) {
      // bioutliers needs a valid correlation, which this pair may lack
    }
  }
}
