#include <algorithm>
#include <unordered_map>

#include "insight/error.hpp"
#include "insight/tabular.hpp"
#include "insight/timefmt.hpp"

namespace insight::tabular {

std::string_view to_string(ColumnType t) {
  switch (t) {
    case ColumnType::Numerical: return "numerical";
    case ColumnType::Datetime: return "datetime";
    case ColumnType::Timedelta: return "timedelta";
    case ColumnType::Categorical: return "categorical";
    case ColumnType::Boolean: return "boolean";
  }
  return "categorical";
}

std::optional<ColumnType> parse_column_type(std::string_view s) {
  if (s == "numerical" || s == "numeric" || s == "number") return ColumnType::Numerical;
  if (s == "datetime") return ColumnType::Datetime;
  if (s == "timedelta" || s == "duration") return ColumnType::Timedelta;
  if (s == "categorical" || s == "category") return ColumnType::Categorical;
  if (s == "boolean" || s == "bool") return ColumnType::Boolean;
  return std::nullopt;
}

std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::Original: return "original";
    case Origin::Derived: return "derived";
    case Origin::Model: return "model";
  }
  return "original";
}

Column Column::numbers(std::string name, ColumnType type, std::vector<double> values) {
  if (type == ColumnType::Categorical) throw PreconditionError("numbers() cannot build a categorical column");
  Column c;
  c.name_ = std::move(name);
  c.type_ = type;
  c.values_ = std::move(values);
  for (double& v : c.values_) {
    if (std::isnan(v)) continue;
    if (!std::isfinite(v)) v = std::nan("");
    if (type == ColumnType::Boolean) v = v != 0.0 ? 1.0 : 0.0;
  }
  return c;
}

Column Column::booleans(std::string name, std::vector<std::optional<bool>> values) {
  std::vector<double> v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    v[i] = values[i] ? (*values[i] ? 1.0 : 0.0) : std::nan("");
  }
  return numbers(std::move(name), ColumnType::Boolean, std::move(v));
}

Column Column::categorical(std::string name, const std::vector<std::optional<std::string>>& values) {
  Column c;
  c.name_ = std::move(name);
  c.type_ = ColumnType::Categorical;
  c.codes_.reserve(values.size());
  std::unordered_map<std::string, int32_t> index;
  for (const auto& v : values) {
    if (!v) {
      c.codes_.push_back(-1);
      continue;
    }
    auto [it, inserted] = index.try_emplace(*v, static_cast<int32_t>(c.levels_.size()));
    if (inserted) c.levels_.push_back(*v);
    c.codes_.push_back(it->second);
  }
  return c;
}

Column Column::categorical_codes(std::string name, std::span<const int32_t> codes,
                                 const std::vector<std::string>& levels) {
  Column c;
  c.name_ = std::move(name);
  c.type_ = ColumnType::Categorical;
  c.codes_.reserve(codes.size());
  std::vector<int32_t> remap(levels.size(), -1);
  for (int32_t code : codes) {
    if (code < 0) {
      c.codes_.push_back(-1);
      continue;
    }
    if (static_cast<std::size_t>(code) >= levels.size()) {
      throw PreconditionError("categorical code out of range in column '" + c.name_ + "'");
    }
    int32_t& m = remap[code];
    if (m < 0) {
      m = static_cast<int32_t>(c.levels_.size());
      c.levels_.push_back(levels[code]);
    }
    c.codes_.push_back(m);
  }
  return c;
}

std::string Column::cell_string(std::size_t row) const {
  if (is_null(row)) return {};
  switch (type_) {
    case ColumnType::Numerical: return timefmt::format_number(values_[row]);
    case ColumnType::Datetime: return timefmt::format_datetime(values_[row]);
    case ColumnType::Timedelta: return timefmt::format_duration(values_[row]);
    case ColumnType::Boolean: return values_[row] != 0.0 ? "true" : "false";
    case ColumnType::Categorical: return levels_[codes_[row]];
  }
  return {};
}

std::size_t Column::non_null_count() const {
  if (type_ == ColumnType::Categorical) {
    return static_cast<std::size_t>(std::count_if(codes_.begin(), codes_.end(), [](int32_t c) { return c >= 0; }));
  }
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](double v) { return !std::isnan(v); }));
}

std::vector<double> Column::encoded() const {
  if (type_ != ColumnType::Categorical) return values_;
  std::vector<double> out(codes_.size());
  for (std::size_t i = 0; i < codes_.size(); ++i) out[i] = codes_[i] < 0 ? std::nan("") : codes_[i];
  return out;
}

Column& Column::set_origin(Origin origin, std::string provenance, std::vector<std::string> bases) {
  origin_ = origin;
  provenance_ = std::move(provenance);
  std::sort(bases.begin(), bases.end());
  bases.erase(std::unique(bases.begin(), bases.end()), bases.end());
  bases_ = std::move(bases);
  return *this;
}

Column& Column::rename(std::string name) {
  name_ = std::move(name);
  return *this;
}

Column Column::take(std::span<const uint32_t> rows) const {
  Column c;
  if (type_ == ColumnType::Categorical) {
    std::vector<int32_t> codes(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) codes[i] = codes_[rows[i]];
    c = categorical_codes(name_, codes, levels_);
  } else {
    c.name_ = name_;
    c.type_ = type_;
    c.values_.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) c.values_[i] = values_[rows[i]];
  }
  c.origin_ = origin_;
  c.provenance_ = provenance_;
  c.bases_ = bases_;
  return c;
}

bool Column::operator==(const Column& other) const {
  if (name_ != other.name_ || type_ != other.type_ || origin_ != other.origin_ ||
      provenance_ != other.provenance_ || bases_ != other.bases_) {
    return false;
  }
  if (type_ == ColumnType::Categorical) return codes_ == other.codes_ && levels_ == other.levels_;
  if (values_.size() != other.values_.size()) return false;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double a = values_[i];
    const double b = other.values_[i];
    if (std::isnan(a) != std::isnan(b)) return false;
    if (!std::isnan(a) && a != b) return false;
  }
  return true;
}

}  // namespace insight::tabular
