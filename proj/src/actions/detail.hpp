#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "insight/actions.hpp"
#include "insight/tabular.hpp"

namespace insight::actions::detail {

using tabular::Column;
using tabular::ColumnType;

inline constexpr std::string_view kWhereOps[] = {"=", "!=", ">", "<"};
inline constexpr std::string_view kArithmeticOps[] = {"+", "-", "*", "/"};
inline constexpr std::string_view kComparisonOps[] = {"=", "!=", ">", "<"};

/// Cell rendering for a value of the given type (as Column::cell_string).
std::string format_value(ColumnType t, double v);
/// Inverse of format_value; categorical values are not numeric and yield nullopt.
std::optional<double> parse_value(ColumnType t, std::string_view s);

/// Original columns behind a column; an original column stands for itself.
std::vector<std::string> column_bases(const Column& c);

/// Distinct non-null values, most frequent first (ties by first appearance).
std::vector<std::string> top_values(const Column& c, std::size_t max);
std::size_t distinct_count(const Column& c);

std::vector<std::string> where_operators(ColumnType t);
/// Candidate comparison values: order statistics for quantitative columns,
/// frequent values for qualitative ones.
std::vector<std::string> where_values(const Column& c, std::size_t max_listed);

std::vector<std::string> aggregators_for(ColumnType t);
std::optional<ColumnType> aggregate_type(ColumnType in, std::string_view agg);

/// Discretization methods and their arguments per column type.
std::vector<std::string> discretize_methods(ColumnType t);
std::vector<std::string> discretize_args(std::string_view method);

/// Number of distinct rows over the non-constant quantitative columns.
std::size_t distinct_feature_rows(const tabular::Dataset& d, std::size_t stop_at);
bool has_cluster_features(const tabular::Dataset& d);

/// Splits a canonical argument list at top-level separators, honouring escapes and parentheses.
std::vector<std::string> split_args(std::string_view s, char sep);
std::string unescape_token(std::string_view s);

}  // namespace insight::actions::detail
