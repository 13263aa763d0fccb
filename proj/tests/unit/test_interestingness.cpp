#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "insight/error.hpp"
#include "insight/interestingness.hpp"

using namespace insight;
using namespace insight::intr;
using namespace insight::mining;
using tabular::Dataset;

namespace {

FittedModel with(ModelKind k, Artifacts a) {
  FittedModel m;
  m.kind = k;
  m.artifacts = std::move(a);
  return m;
}

FittedModel univariate(bool quantitative, std::vector<double> scores) {
  UnivariateArtifacts a;
  a.quantitative = quantitative;
  for (double s : scores) a.flagged.push_back({"v", s, 1});
  return with(ModelKind::UnivariateOutliers, a);
}

FittedModel bivariate(double corr, std::vector<double> zs) {
  BivariateArtifacts a;
  a.correlation = corr;
  for (double z : zs) a.flagged.push_back({"a", "b", z, 0.0});
  return with(ModelKind::BivariateOutliers, a);
}

FittedModel clustering(double sil, std::optional<double> assoc) {
  ClusterArtifacts a;
  a.silhouette = sil;
  a.max_association = assoc;
  return with(ModelKind::Clustering, a);
}

FittedModel trend(bool t, bool p, bool o) {
  TrendArtifacts a;
  a.trend = t;
  a.period = p;
  a.outliers = o;
  return with(ModelKind::Trend, a);
}

FittedModel rules(std::vector<std::pair<double, double>> kulc_ir) {
  RuleArtifacts a;
  for (auto [k, ir] : kulc_ir) {
    Rule r;
    r.kulc = k;
    r.imbalance = ir;
    a.rules.push_back(r);
  }
  return with(ModelKind::AssociationRules, a);
}

FittedModel tree(double acc, double ent, double cover) {
  TreeArtifacts a;
  a.accuracy = acc;
  a.target_entropy = ent;
  a.coverage = cover;
  return with(ModelKind::DecisionTree, a);
}

}  // namespace

TEST_CASE("tree interestingness") {
  CHECK(intr_tree(tree(0.9, 0.8, 1.0)) == doctest::Approx(0.9 * 0.8 * 1.0).epsilon(1e-12));
  CHECK(intr_tree(tree(1.0, 1.0, 1.0)) == 1.0);
  CHECK(intr_tree(tree(1.0, 0.0, 1.0)) == 0.0);
  CHECK(intr_tree(tree(-0.4, 1.0, 1.0)) == 0.0);
}

TEST_CASE("univariate interestingness") {
  const double outlier = 1.0 - 2.0 / 4.0;
  CHECK(intr_univariate_outliers(univariate(true, {4.0})) == doctest::Approx(0.5 + outlier / 2).epsilon(1e-12));
  CHECK(intr_univariate_outliers(univariate(true, {4.0})) == doctest::Approx(0.75).epsilon(1e-12));
  const double qual = 1.0 - 0.05 / (1.0 - 0.85);
  CHECK(intr_univariate_outliers(univariate(false, {0.05})) == doctest::Approx(0.5 + qual / 2).epsilon(1e-12));
  CHECK(intr_univariate_outliers(univariate(false, {0.05})) == doctest::Approx(0.8333333333).epsilon(1e-9));
  CHECK(intr_univariate_outliers(univariate(true, {})) == 0.0);
  CHECK(intr_univariate_outliers(univariate(true, {3.0, 8.0})) == doctest::Approx(0.5 + (1 - 2.0 / 8) / 2));
}

TEST_CASE("bivariate interestingness") {
  CHECK(intr_bivariate_outliers(bivariate(0.5, {4.0})) == 0.0);
  CHECK(intr_bivariate_outliers(bivariate(0.95, {4.0})) == doctest::Approx(1.0 - 2.0 / 4.0).epsilon(1e-12));
  CHECK(intr_bivariate_outliers(bivariate(-0.95, {4.0})) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(intr_bivariate_outliers(bivariate(0.95, {})) == 0.0);
  CHECK(intr_bivariate_outliers(bivariate(0.8, {4.0})) == 0.0);
}

TEST_CASE("clustering interestingness") {
  CHECK(intr_clustering(clustering(0.6, 0.9)) == doctest::Approx((1 + 0.6) / 2 * 0.9).epsilon(1e-12));
  CHECK(intr_clustering(clustering(0.6, 0.9)) == doctest::Approx(0.72).epsilon(1e-12));
  CHECK(intr_clustering(clustering(-1.0, 0.7)) == 0.0);
  CHECK(intr_clustering(clustering(0.6, std::nullopt)) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("trend interestingness") {
  CHECK(intr_trend(trend(true, false, true)) == doctest::Approx(0.5 + 2.0 / 6.0).epsilon(1e-12));
  CHECK(intr_trend(trend(false, false, false)) == 0.0);
  CHECK(intr_trend(trend(true, true, true)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(intr_trend(trend(false, true, false)) == doctest::Approx(0.5 + 1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("rule interestingness") {
  CHECK(intr_rules(rules({{1.0, 0.0}})) == 1.0);
  CHECK(intr_rules(rules({{0.5, 0.0}})) == 0.5);
  CHECK(intr_rules(rules({})) == 0.0);
  CHECK(intr_rules(rules({{0.5, 0.0}, {0.9, 0.5}})) == doctest::Approx(0.5));
  CHECK(kulczynski(0.4, 0.4, 0.4) == 1.0);
  CHECK(imbalance_ratio(0.4, 0.4, 0.4) == 0.0);
  CHECK(kulczynski(0.5, 0.5, 0.25) == doctest::Approx(0.5));
  CHECK(imbalance_ratio(0.6, 0.2, 0.1) == doctest::Approx(0.4 / 0.7));
}

TEST_CASE("a rule at exactly one half is not reported") {
  const IntrConfig cfg;
  CHECK_FALSE(intr_rules(rules({{0.5, 0.0}})) > cfg.success_threshold);
}

TEST_CASE("config validation") {
  IntrConfig c;
  CHECK_NOTHROW(c.validate());
  c.t_qual = 1.0;
  CHECK_THROWS_AS(c.validate(), InputError);
  c = {};
  c.t_quant = 0.0;
  CHECK_THROWS_AS(c.validate(), InputError);
  c = {};
  c.success_threshold = 1.0;
  CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("simulation scores") {
  SUBCASE("single constant qualitative column") {
    const auto d = Dataset::from_columns({fixtures::categories("c", {"k", "k", "k", "k"})});
    const auto s = simulate_score(d);
    CHECK(s.per_column.at("c") == 1.0);
    CHECK(s.correlated_pair_fraction == 0.0);
    CHECK(s.total == doctest::Approx(0.5));
  }
  SUBCASE("two exactly linear columns") {
    const auto d = Dataset::from_columns({fixtures::numbers("a", {-2, -1, 0, 1, 2}), fixtures::numbers("b", {-4, -2, 0, 2, 4})});
    const auto s = simulate_score(d);
    CHECK(s.correlated_pair_fraction == 1.0);
    CHECK(s.total >= 0.5);
  }
  SUBCASE("uniform two categories") {
    const auto d = Dataset::from_columns({fixtures::categories("c", {"a", "b", "a", "b"})});
    CHECK(simulate_score(d).per_column.at("c") == doctest::Approx(1.0));
  }
  SUBCASE("no columns") { CHECK_THROWS_AS(simulate_score(fixtures::exams().empty_view()), PreconditionError); }
}

TEST_CASE("squash") {
  CHECK(squash(0.0) == 0.0);
  CHECK(squash(1.0) == 0.5);
  CHECK(squash(std::numeric_limits<double>::infinity()) == 1.0);
  CHECK(squash(-3.0) == 0.0);
}
