#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "detail.hpp"
#include "insight/error.hpp"
#include "insight/timefmt.hpp"

namespace insight::actions {

using tabular::Column;
using tabular::ColumnPtr;
using tabular::ColumnType;
using tabular::Origin;

namespace {

ColumnPtr need(const Dataset& d, const std::string& name) {
  auto c = d.find(name);
  if (!c) throw PreconditionError("unknown column '" + name + "'");
  return c;
}

std::vector<std::string> merge_bases(const Column& a, const Column& b) {
  auto x = detail::column_bases(a);
  auto y = detail::column_bases(b);
  x.insert(x.end(), y.begin(), y.end());
  return x;
}

std::string interval(ColumnType t, double lo, double hi, bool open_left, bool closed_right) {
  return std::string(open_left ? "(" : "[") + detail::format_value(t, lo) + ", " + detail::format_value(t, hi) +
         (closed_right ? "]" : ")");
}

Column discretize(const Column& c, const std::string& method, const std::string& arg, const std::string& name) {
  const std::size_t n = c.size();
  std::vector<std::optional<std::string>> labels(n);
  if (method == "time") {
    const auto attr = timefmt::parse_time_attribute(arg);
    if (!attr) throw PreconditionError("unknown time attribute '" + arg + "'");
    for (std::size_t i = 0; i < n; ++i) {
      if (!c.is_null(i)) labels[i] = std::to_string(timefmt::extract(*attr, c.values()[i]));
    }
    return Column::categorical(name, labels);
  }
  const int parts = std::stoi(arg);
  std::vector<double> x;
  for (double v : c.values()) {
    if (!std::isnan(v)) x.push_back(v);
  }
  std::sort(x.begin(), x.end());
  if (x.empty()) return Column::categorical(name, labels);
  std::vector<double> edges;
  if (method == "bins") {
    const double lo = x.front(), hi = x.back();
    const double width = (hi - lo) / parts;
    for (int i = 0; i <= parts; ++i) edges.push_back(i == parts ? hi : lo + width * i);
  } else {
    for (int i = 0; i <= parts; ++i) edges.push_back(tabular::quantile_sorted(x, static_cast<double>(i) / parts));
  }
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  if (edges.size() < 2) edges.push_back(edges.front());
  const std::size_t bins = edges.size() - 1;
  std::vector<std::string> names(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    if (method == "bins") {
      names[b] = interval(c.type(), edges[b], edges[b + 1], false, b + 1 == bins);
    } else {
      names[b] = interval(c.type(), edges[b], edges[b + 1], b > 0, true);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double v = c.values()[i];
    if (std::isnan(v)) continue;
    std::size_t b;
    if (method == "bins") {
      // [e0,e1) ... [e_{k-1}, e_k]
      b = static_cast<std::size_t>(std::upper_bound(edges.begin() + 1, edges.end() - 1, v) - (edges.begin() + 1));
    } else {
      // [e0,e1], (e1,e2], ...
      b = static_cast<std::size_t>(std::lower_bound(edges.begin() + 1, edges.end() - 1, v) - (edges.begin() + 1));
    }
    labels[i] = names[std::min(b, bins - 1)];
  }
  return Column::categorical(name, labels);
}

bool compare(std::string_view op, double a, double b) {
  if (op == "=") return a == b;
  if (op == "!=") return a != b;
  if (op == ">") return a > b;
  return a < b;
}

Column binop(const Column& l, const Column& r, const std::string& op, ColumnType result, const std::string& name) {
  const std::size_t n = l.size();
  std::vector<double> out(n, std::nan(""));
  const bool categorical = l.type() == ColumnType::Categorical;
  for (std::size_t i = 0; i < n; ++i) {
    if (l.is_null(i) || r.is_null(i)) continue;
    if (categorical) {
      const bool eq = l.levels()[l.codes()[i]] == r.levels()[r.codes()[i]];
      out[i] = (op == "=") == eq ? 1.0 : 0.0;
      continue;
    }
    const double a = l.values()[i];
    const double b = r.values()[i];
    if (op == "+") out[i] = a + b;
    else if (op == "-") out[i] = a - b;
    else if (op == "*") out[i] = a * b;
    else if (op == "/") out[i] = b == 0.0 ? std::nan("") : a / b;
    else out[i] = compare(op, a, b) ? 1.0 : 0.0;
  }
  return Column::numbers(name, result, std::move(out));
}

double aggregate_numbers(std::vector<double>& x, std::string_view agg) {
  if (x.empty()) return std::nan("");
  if (agg == "min") return *std::min_element(x.begin(), x.end());
  if (agg == "max") return *std::max_element(x.begin(), x.end());
  double sum = 0.0;
  for (double v : x) sum += v;
  if (agg == "sum") return sum;
  const double mean = sum / static_cast<double>(x.size());
  if (agg == "avg") return mean;
  if (agg == "median") {
    std::sort(x.begin(), x.end());
    return tabular::quantile_sorted(x, 0.5);
  }
  if (agg == "std") {
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size()));
  }
  if (agg == "all") return std::all_of(x.begin(), x.end(), [](double v) { return v != 0.0; }) ? 1.0 : 0.0;
  if (agg == "any") return std::any_of(x.begin(), x.end(), [](double v) { return v != 0.0; }) ? 1.0 : 0.0;
  throw PreconditionError("unknown aggregator '" + std::string(agg) + "'");
}

std::string aggregate_name(const std::string& agg, const std::string& column, const std::string* value) {
  std::string out = agg + "(" + escape_token(column);
  if (value) out += "," + escape_token(*value);
  return out + ")";
}

Dataset group_by(const Dataset& d, const GroundAction& a) {
  const ColumnPtr g = need(d, a.get("grouper"));
  // Groups in first-appearance order of their key.
  std::vector<std::vector<uint32_t>> groups;
  std::unordered_map<double, std::size_t> by_key;
  for (std::size_t r = 0; r < d.row_count(); ++r) {
    if (g->is_null(r)) continue;
    const double key = g->numeric(r);
    auto [it, inserted] = by_key.try_emplace(key == 0.0 ? 0.0 : key, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(static_cast<uint32_t>(r));
  }
  std::vector<uint32_t> heads;
  for (const auto& grp : groups) heads.push_back(grp.front());

  std::vector<Column> columns;
  columns.push_back(g->take(heads));
  for (const auto& b : a.bindings()) {
    if (b.param.rfind("agg:", 0) != 0) continue;
    const std::string col_name = b.param.substr(4);
    const ColumnPtr c = need(d, col_name);
    const std::string& agg = b.value;
    const auto result_type = detail::aggregate_type(c->type(), agg);
    if (!result_type) throw PreconditionError("aggregator '" + agg + "' does not apply to '" + col_name + "'");
    Column out;
    if (agg == "mode") {
      std::vector<std::optional<std::string>> modes;
      for (const auto& grp : groups) {
        std::unordered_map<int32_t, std::size_t> counts;
        std::vector<int32_t> order;
        for (uint32_t r : grp) {
          const int32_t code = c->codes()[r];
          if (code < 0) continue;
          if (counts[code]++ == 0) order.push_back(code);
        }
        int32_t best = -1;
        for (int32_t code : order) {
          if (best < 0 || counts[code] > counts[best]) best = code;
        }
        modes.push_back(best < 0 ? std::nullopt : std::optional<std::string>(c->levels()[best]));
      }
      out = Column::categorical(aggregate_name(agg, col_name, nullptr), modes);
    } else if (agg == "freq") {
      const std::string& value = a.get("value:" + col_name);
      std::vector<double> counts;
      const auto numeric = detail::parse_value(c->type(), value);
      for (const auto& grp : groups) {
        double n = 0.0;
        for (uint32_t r : grp) {
          if (c->is_null(r)) continue;
          if (c->type() == ColumnType::Categorical ? c->levels()[c->codes()[r]] == value
                                                    : numeric && c->values()[r] == *numeric) {
            n += 1.0;
          }
        }
        counts.push_back(n);
      }
      out = Column::numbers(aggregate_name(agg, col_name, &value), ColumnType::Numerical, std::move(counts));
    } else {
      std::vector<double> values;
      for (const auto& grp : groups) {
        std::vector<double> x;
        for (uint32_t r : grp) {
          if (!c->is_null(r)) x.push_back(c->values()[r]);
        }
        values.push_back(aggregate_numbers(x, agg));
      }
      out = Column::numbers(aggregate_name(agg, col_name, nullptr), *result_type, std::move(values));
    }
    out.set_origin(Origin::Derived, a.canonical(), detail::column_bases(*c));
    columns.push_back(std::move(out));
  }
  auto lineage = d.lineage();
  lineage.push_back(a.canonical());
  return Dataset::regrouped(std::move(columns), std::move(lineage));
}

}  // namespace

Column derive_column(const Dataset& d, const GroundAction& a) {
  if (a.kind() == ActionKind::DeriveDiscretize) {
    const ColumnPtr c = need(d, a.get("target"));
    Column out = discretize(*c, a.get("method"), a.get("arg"), a.canonical());
    out.set_origin(Origin::Derived, a.canonical(), detail::column_bases(*c));
    return out;
  }
  if (a.kind() == ActionKind::DeriveBinop) {
    const ColumnPtr l = need(d, a.get("left"));
    const ColumnPtr r = need(d, a.get("right"));
    const auto type = binop_result_type(l->type(), a.get("operator"), r->type());
    if (!type) throw PreconditionError("incompatible operands in '" + a.canonical() + "'");
    Column out = binop(*l, *r, a.get("operator"), *type, a.canonical());
    out.set_origin(Origin::Derived, a.canonical(), merge_bases(*l, *r));
    return out;
  }
  throw PreconditionError("'" + a.canonical() + "' is not a derive action");
}

std::vector<uint32_t> where_rows(const Dataset& d, const GroundAction& a) {
  const ColumnPtr c = need(d, a.get("column"));
  const std::string& op = a.get("operator");
  const std::string& value = a.get("value");
  std::vector<uint32_t> keep;
  if (c->type() == ColumnType::Categorical) {
    for (std::size_t r = 0; r < c->size(); ++r) {
      if (c->is_null(r)) continue;
      const bool eq = c->levels()[c->codes()[r]] == value;
      if ((op == "=") == eq) keep.push_back(static_cast<uint32_t>(r));
    }
    return keep;
  }
  const auto v = detail::parse_value(c->type(), value);
  if (!v) throw PreconditionError("value '" + value + "' does not parse as " + std::string(to_string(c->type())));
  for (std::size_t r = 0; r < c->size(); ++r) {
    if (!c->is_null(r) && compare(op, c->values()[r], *v)) keep.push_back(static_cast<uint32_t>(r));
  }
  return keep;
}

Dataset apply_data_action(const Dataset& d, const GroundAction& a) {
  if (!is_data_action(a.kind())) throw PreconditionError("'" + a.canonical() + "' is not a data action");
  const Verdict v = check_hard(a, d);
  if (!v.ok()) throw PreconditionError("cannot apply '" + a.canonical() + "': " + v.reason);
  switch (a.kind()) {
    case ActionKind::Select: {
      ColumnPtr src = d.source()->find(a.get("column"));
      if (d.row_index().size() != d.source()->row_count) {
        src = std::make_shared<const Column>(src->take(d.row_index()));
      }
      return d.with_column(std::move(src), a.canonical());
    }
    case ActionKind::DeriveDiscretize:
    case ActionKind::DeriveBinop:
      return d.with_column(std::make_shared<const Column>(derive_column(d, a)), a.canonical());
    case ActionKind::Where: return d.with_rows(where_rows(d, a), a.canonical());
    case ActionKind::GroupBy: return group_by(d, a);
    default: break;
  }
  throw PreconditionError("'" + a.canonical() + "' is not a data action");
}

}  // namespace insight::actions
