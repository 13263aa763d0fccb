#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace insight::tabular {

enum class ColumnType { Numerical, Datetime, Timedelta, Categorical, Boolean };

constexpr bool is_quantitative(ColumnType t) {
  return t == ColumnType::Numerical || t == ColumnType::Datetime || t == ColumnType::Timedelta;
}
constexpr bool is_qualitative(ColumnType t) { return !is_quantitative(t); }

std::string_view to_string(ColumnType t);
std::optional<ColumnType> parse_column_type(std::string_view s);

enum class Origin { Original, Derived, Model };

std::string_view to_string(Origin o);

/// One typed column. Quantitative and boolean cells live in a double vector
/// (NaN = null); categorical cells are integer codes (-1 = null) into a level
/// list ordered by first appearance, so the code of a value is a pure
/// function of the column's value sequence.
class Column {
 public:
  Column() = default;

  static Column numbers(std::string name, ColumnType type, std::vector<double> values);
  static Column booleans(std::string name, std::vector<std::optional<bool>> values);
  static Column categorical(std::string name, const std::vector<std::optional<std::string>>& values);
  /// Codes are re-derived in first-appearance order; `levels` may be a superset.
  static Column categorical_codes(std::string name, std::span<const int32_t> codes,
                                  const std::vector<std::string>& levels);

  const std::string& name() const { return name_; }
  ColumnType type() const { return type_; }
  std::size_t size() const { return type_ == ColumnType::Categorical ? codes_.size() : values_.size(); }

  bool is_null(std::size_t row) const {
    return type_ == ColumnType::Categorical ? codes_[row] < 0 : std::isnan(values_[row]);
  }
  /// Numeric encoding: identity, epoch seconds, 0/1, or categorical code. NaN for null.
  double numeric(std::size_t row) const {
    if (type_ == ColumnType::Categorical) {
      return codes_[row] < 0 ? std::nan("") : static_cast<double>(codes_[row]);
    }
    return values_[row];
  }
  std::span<const double> values() const { return values_; }
  std::span<const int32_t> codes() const { return codes_; }
  const std::vector<std::string>& levels() const { return levels_; }

  /// Rendered cell; empty string for null.
  std::string cell_string(std::size_t row) const;
  std::size_t non_null_count() const;
  std::vector<double> encoded() const;

  Origin origin() const { return origin_; }
  const std::string& provenance() const { return provenance_; }
  /// Original columns this column was computed from (sorted, unique).
  const std::vector<std::string>& base_columns() const { return bases_; }

  Column& set_origin(Origin origin, std::string provenance, std::vector<std::string> bases);
  Column& rename(std::string name);

  /// Row subset in the given order.
  Column take(std::span<const uint32_t> rows) const;

  bool operator==(const Column& other) const;

 private:
  std::string name_;
  ColumnType type_ = ColumnType::Categorical;
  std::vector<double> values_;
  std::vector<int32_t> codes_;
  std::vector<std::string> levels_;
  Origin origin_ = Origin::Original;
  std::string provenance_;
  std::vector<std::string> bases_;
};

using ColumnPtr = std::shared_ptr<const Column>;

/// The pool `select` draws from: the loaded table, or an aggregated table after groupby.
struct SourceTable {
  std::vector<ColumnPtr> columns;
  std::size_t row_count = 0;

  ColumnPtr find(std::string_view name) const;
};

/// An immutable view over a subset of rows and columns. Rows are tracked as
/// indices into the source table so that a later `select` stays row-aligned.
class Dataset {
 public:
  Dataset() = default;

  /// A full table: every source column selected, identity row index.
  static Dataset from_columns(std::vector<Column> columns, std::vector<std::string> lineage = {});

  /// The empty dataset over the same source: no columns, all rows.
  Dataset empty_view() const;

  const std::vector<ColumnPtr>& columns() const { return columns_; }
  std::size_t column_count() const { return columns_.size(); }
  std::size_t row_count() const { return row_count_; }
  const std::vector<std::string>& lineage() const { return lineage_; }
  const std::shared_ptr<const SourceTable>& source() const { return source_; }
  const std::vector<uint32_t>& row_index() const { return *row_index_; }
  bool empty() const { return columns_.empty(); }

  ColumnPtr find(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;

  // Builders used by the action layer. Each returns a new dataset whose
  // lineage is extended by `action`.
  Dataset with_column(ColumnPtr column, std::string action) const;
  Dataset with_rows(const std::vector<uint32_t>& keep, std::string action) const;
  /// Same data, lineage extended (model actions that append nothing).
  Dataset with_lineage(std::string action) const;
  /// Replaces the schema and the source (groupby).
  static Dataset regrouped(std::vector<Column> columns, std::vector<std::string> lineage);

  /// Cell-exact equality of columns (names, types, cells, provenance) and row count.
  bool same_content(const Dataset& other) const;

 private:
  std::shared_ptr<const SourceTable> source_;
  std::shared_ptr<const std::vector<uint32_t>> row_index_ = std::make_shared<const std::vector<uint32_t>>();
  std::vector<ColumnPtr> columns_;
  std::size_t row_count_ = 0;
  std::vector<std::string> lineage_;
};

struct ColumnStats {
  bool quantitative = false;
  std::size_t count = 0;  // non-null cells
  double entropy = 0.0;   // bits; 10-bin histogram for quantitative columns
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double iqr_to_mean = 0.0;
  std::size_t unique_count = 0;
  std::string mode_value;
  double mode_frequency = 0.0;
};

/// Population moments over non-null cells. Spread measures are 0 for constant
/// columns. Throws PreconditionError on an all-null column.
ColumnStats column_stats(const Column& c);

/// Shannon entropy of the value frequencies divided by log(k); 0 when k == 1.
double normalized_entropy(const Column& c);

/// Linear-interpolation quantile of sorted data, q in [0,1].
double quantile_sorted(std::span<const double> sorted, double q);

class CorrelationMatrix {
 public:
  CorrelationMatrix() = default;
  CorrelationMatrix(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  bool valid(std::size_t i, std::size_t j) const { return valid_[i * size() + j] != 0; }
  double at(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
  std::optional<std::size_t> index_of(std::string_view name) const;
  /// |corr| for a named pair, nullopt when masked.
  std::optional<double> lookup(std::string_view a, std::string_view b) const;

  void set(std::size_t i, std::size_t j, double v);

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
  std::vector<uint8_t> valid_;
};

/// Pairwise Pearson over jointly non-null rows. Pairs with fewer than three
/// joint observations or zero variance are masked.
CorrelationMatrix pearson_matrix(const Dataset& d);

/// Pearson of two equally long encodings with pairwise deletion.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

}  // namespace insight::tabular
