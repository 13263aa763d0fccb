#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "insight/csv.hpp"
#include "insight/tabular.hpp"

namespace fixtures {

inline constexpr const char* kExamsCsv =
    "Student,Exam Date,Score,Course Duration\n"
    "S1,2020-09-01,88,1 year\n"
    "S2,2019-08-15,92,3 months\n"
    "S3,2021-01-10,75,6 months\n"
    "S4,2018-05-20,85,1 year\n";

inline insight::tabular::Dataset exams() { return insight::tabular::parse_csv(kExamsCsv, std::nullopt, "exams"); }

inline insight::tabular::Column numbers(const std::string& name, std::vector<double> v) {
  return insight::tabular::Column::numbers(name, insight::tabular::ColumnType::Numerical, std::move(v));
}

inline insight::tabular::Column categories(const std::string& name, const std::vector<std::string>& v) {
  std::vector<std::optional<std::string>> cells(v.begin(), v.end());
  return insight::tabular::Column::categorical(name, cells);
}

/// Planted univariate outlier: 19 standard-normal values and one value of 10 in X; Y independent noise.
inline insight::tabular::Dataset planted_outlier(uint64_t seed = 11) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x, y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(i == 13 ? 10.0 : normal(rng));
    y.push_back(normal(rng));
  }
  return insight::tabular::Dataset::from_columns({numbers("X", x), numbers("Y", y)});
}

}  // namespace fixtures
