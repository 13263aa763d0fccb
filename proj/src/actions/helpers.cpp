#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "detail.hpp"
#include "insight/hash.hpp"
#include "insight/timefmt.hpp"

namespace insight::actions::detail {

std::string format_value(ColumnType t, double v) {
  switch (t) {
    case ColumnType::Numerical: return timefmt::format_number(v);
    case ColumnType::Datetime: return timefmt::format_datetime(v);
    case ColumnType::Timedelta: return timefmt::format_duration(v);
    case ColumnType::Boolean: return v != 0.0 ? "true" : "false";
    case ColumnType::Categorical: break;
  }
  return timefmt::format_number(v);
}

std::optional<double> parse_value(ColumnType t, std::string_view s) {
  switch (t) {
    case ColumnType::Numerical: return timefmt::parse_number(s);
    case ColumnType::Datetime: return timefmt::parse_iso_datetime(s);
    case ColumnType::Timedelta: return timefmt::parse_duration(s);
    case ColumnType::Boolean: {
      auto b = timefmt::parse_bool(s);
      if (!b) return std::nullopt;
      return *b ? 1.0 : 0.0;
    }
    case ColumnType::Categorical: break;
  }
  return std::nullopt;
}

std::vector<std::string> column_bases(const Column& c) {
  if (c.origin() == tabular::Origin::Original && c.base_columns().empty()) return {c.name()};
  return c.base_columns();
}

std::vector<std::string> top_values(const Column& c, std::size_t max) {
  struct Entry {
    std::size_t count = 0;
    std::size_t first = 0;
    std::string text;
  };
  std::vector<Entry> entries;
  if (c.type() == ColumnType::Categorical) {
    entries.resize(c.levels().size());
    const auto codes = c.codes();
    for (std::size_t i = 0; i < codes.size(); ++i) {
      if (codes[i] < 0) continue;
      Entry& e = entries[codes[i]];
      if (e.count++ == 0) e.first = i;
    }
    for (std::size_t k = 0; k < entries.size(); ++k) entries[k].text = c.levels()[k];
  } else {
    std::unordered_map<double, std::size_t> slot;
    const auto values = c.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (std::isnan(values[i])) continue;
      auto [it, inserted] = slot.try_emplace(values[i] == 0.0 ? 0.0 : values[i], entries.size());
      if (inserted) entries.push_back({0, i, c.cell_string(i)});
      ++entries[it->second].count;
    }
  }
  entries.erase(std::remove_if(entries.begin(), entries.end(), [](const Entry& e) { return e.count == 0; }),
                entries.end());
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < entries.size() && i < max; ++i) out.push_back(entries[i].text);
  return out;
}

std::size_t distinct_count(const Column& c) {
  if (c.type() == ColumnType::Categorical) {
    std::vector<bool> seen(c.levels().size(), false);
    std::size_t n = 0;
    for (int32_t code : c.codes()) {
      if (code >= 0 && !seen[code]) {
        seen[code] = true;
        ++n;
      }
    }
    return n;
  }
  std::unordered_set<double> seen;
  for (double v : c.values()) {
    if (!std::isnan(v)) seen.insert(v == 0.0 ? 0.0 : v);
  }
  return seen.size();
}

std::vector<std::string> where_operators(ColumnType t) {
  if (tabular::is_qualitative(t)) return {"=", "!="};
  return {"=", "!=", ">", "<"};
}

std::vector<std::string> where_values(const Column& c, std::size_t max_listed) {
  if (tabular::is_qualitative(c.type())) return top_values(c, max_listed);
  std::vector<double> x;
  x.reserve(c.size());
  for (double v : c.values()) {
    if (!std::isnan(v)) x.push_back(v);
  }
  if (x.empty()) return {};
  std::sort(x.begin(), x.end());
  std::vector<std::string> out;
  for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto idx = static_cast<std::size_t>(std::floor(p * static_cast<double>(x.size() - 1)));
    std::string s = format_value(c.type(), x[idx]);
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> aggregators_for(ColumnType t) {
  switch (t) {
    case ColumnType::Numerical: return {"min", "max", "avg", "median", "sum", "std"};
    case ColumnType::Timedelta: return {"min", "max", "avg", "median", "sum", "std", "freq"};
    case ColumnType::Datetime: return {"min", "max", "avg", "median"};
    case ColumnType::Boolean: return {"all", "any"};
    case ColumnType::Categorical: return {"mode", "freq"};
  }
  return {};
}

std::optional<ColumnType> aggregate_type(ColumnType in, std::string_view agg) {
  const auto allowed = aggregators_for(in);
  if (std::find(allowed.begin(), allowed.end(), agg) == allowed.end()) return std::nullopt;
  if (agg == "freq") return ColumnType::Numerical;
  if (agg == "mode") return ColumnType::Categorical;
  if (agg == "all" || agg == "any") return ColumnType::Boolean;
  return in;
}

std::vector<std::string> discretize_methods(ColumnType t) {
  if (t == ColumnType::Numerical || t == ColumnType::Timedelta) return {"bins", "quantiles"};
  if (t == ColumnType::Datetime) return {"time"};
  return {};
}

std::vector<std::string> discretize_args(std::string_view method) {
  if (method == "bins") return {"2", "3", "4", "5", "6", "7", "8", "9", "10"};
  if (method == "quantiles") return {"2", "3", "4", "5", "10"};
  if (method == "time") return {"year", "quarter", "month", "day", "weekday", "hour", "minute", "seconds"};
  return {};
}

namespace {

std::vector<const Column*> feature_columns(const tabular::Dataset& d) {
  std::vector<const Column*> out;
  for (const auto& c : d.columns()) {
    if (tabular::is_quantitative(c->type()) && distinct_count(*c) >= 2) out.push_back(c.get());
  }
  return out;
}

}  // namespace

bool has_cluster_features(const tabular::Dataset& d) { return !feature_columns(d).empty(); }

std::size_t distinct_feature_rows(const tabular::Dataset& d, std::size_t stop_at) {
  const auto features = feature_columns(d);
  if (features.empty()) return 0;
  std::unordered_set<uint64_t> rows;
  for (std::size_t r = 0; r < d.row_count(); ++r) {
    uint64_t h = 0x51ed27a1u;
    bool complete = true;
    for (const Column* c : features) {
      const double v = c->values()[r];
      if (std::isnan(v)) {
        complete = false;
        break;
      }
      h = hash_combine(h, hash_double(v));
    }
    if (!complete) continue;
    rows.insert(h);
    if (rows.size() >= stop_at) break;
  }
  return rows.size();
}

}  // namespace insight::actions::detail
