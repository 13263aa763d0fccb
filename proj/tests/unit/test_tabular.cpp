#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "insight/csv.hpp"
#include "insight/error.hpp"
#include "insight/tabular.hpp"
#include "insight/timefmt.hpp"
#include "oracle.hpp"

using namespace insight;
using namespace insight::tabular;

TEST_CASE("exam table loads with inferred types") {
  const auto d = fixtures::exams();
  REQUIRE(d.column_count() == 4);
  CHECK(d.row_count() == 4);
  CHECK(d.find("Student")->type() == ColumnType::Categorical);
  CHECK(d.find("Exam Date")->type() == ColumnType::Datetime);
  CHECK(d.find("Score")->type() == ColumnType::Numerical);
  CHECK(d.find("Course Duration")->type() == ColumnType::Timedelta);
  for (const auto& c : d.columns()) CHECK(c->origin() == Origin::Original);
  // 30-day months, 365-day years
  CHECK(d.find("Course Duration")->values()[1] == doctest::Approx(90 * 86400.0));
  CHECK(d.find("Course Duration")->values()[0] == doctest::Approx(365 * 86400.0));
}

TEST_CASE("header-only csv gives zero rows") {
  const auto d = parse_csv("a,b\n");
  CHECK(d.row_count() == 0);
  CHECK(d.column_count() == 2);
}

TEST_CASE("mixed cells fall back to categorical") {
  CHECK(infer_type({"1", "2", "x"}) == ColumnType::Categorical);
  CHECK(infer_type({"1", "2", "3.5"}) == ColumnType::Numerical);
  CHECK(infer_type({"true", "false"}) == ColumnType::Boolean);
  CHECK(infer_type({"2020-01-01", "2021-05-05T10:00"}) == ColumnType::Datetime);
}

TEST_CASE("schema mismatch names row and column") {
  const auto schema = parse_schema(R"({"v": "numerical"})");
  try {
    parse_csv("v\n1\nabc\n", schema);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("v") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);
  }
}

TEST_CASE("csv round trip keeps cells") {
  const auto d = fixtures::exams();
  const auto again = parse_csv(to_csv(d), parse_schema(schema_to_json(d)));
  CHECK(again.same_content(d));
}

TEST_CASE("categorical column stats") {
  const auto c = fixtures::categories("c", {"A", "A", "A", "B"});
  const auto s = column_stats(c);
  CHECK(s.mode_value == "A");
  CHECK(s.mode_frequency == doctest::Approx(0.75));
  CHECK(s.unique_count == 2);
}

TEST_CASE("skewness uses population moments") {
  CHECK(column_stats(fixtures::numbers("x", {1, 2, 3, 4, 5})).skewness == doctest::Approx(0.0).epsilon(1e-12));
  const std::vector<double> x = {1, 1, 1, 1, 100};
  const double expected = oracle::skewness(x);
  CHECK(expected == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(column_stats(fixtures::numbers("x", x)).skewness == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("pearson matrix") {
  SUBCASE("exact linear") {
    const auto d = Dataset::from_columns({fixtures::numbers("X", {1, 2, 3}), fixtures::numbers("Y", {2, 4, 6})});
    const auto m = pearson_matrix(d);
    REQUIRE(m.valid(0, 1));
    CHECK(m.at(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("constant column is masked") {
    const auto d = Dataset::from_columns({fixtures::numbers("X", {1, 2, 3}), fixtures::numbers("Y", {5, 5, 5})});
    const auto m = pearson_matrix(d);
    CHECK_FALSE(m.valid(0, 1));
    CHECK_FALSE(m.valid(1, 1));
    CHECK(m.valid(0, 0));
    CHECK(m.at(0, 0) == 1.0);
  }
  SUBCASE("single extreme value stays under the gate") {
    const std::vector<double> x = {1, 2, 3, 4}, y = {1, 2, 3, 100};
    const auto d = Dataset::from_columns({fixtures::numbers("X", x), fixtures::numbers("Y", y)});
    const auto m = pearson_matrix(d);
    const double expected = oracle::pearson(x, y);
    CHECK(m.at(0, 1) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(149.0 / std::sqrt(36025.0)).epsilon(1e-12));
    CHECK(m.at(0, 1) < 0.8);
  }
}

TEST_CASE("pearson matrix is symmetric with unit diagonal") {
  const auto d = fixtures::planted_outlier(5);
  const auto m = pearson_matrix(d);
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(m.at(i, i) == 1.0);
    for (std::size_t j = 0; j < m.size(); ++j) CHECK(m.at(i, j) == m.at(j, i));
  }
}

TEST_CASE("normalized entropy") {
  CHECK(normalized_entropy(fixtures::categories("c", {"A", "B"})) == doctest::Approx(1.0));
  CHECK(normalized_entropy(fixtures::categories("c", {"A", "A", "A", "A"})) == 0.0);
  const std::vector<std::string> v = {"A", "A", "A", "B"};
  CHECK(normalized_entropy(fixtures::categories("c", v)) == doctest::Approx(oracle::normalized_entropy(v)).epsilon(1e-12));
  CHECK(oracle::normalized_entropy(v) == doctest::Approx(0.811278).epsilon(1e-6));
}

TEST_CASE("duration literals") {
  CHECK(*timefmt::parse_duration("6 months") == 180 * 86400.0);
  CHECK(*timefmt::parse_duration("P1Y") == 365 * 86400.0);
  CHECK(timefmt::format_duration(180 * 86400.0) == "6 months");
  CHECK_FALSE(timefmt::parse_duration("soon").has_value());
}
