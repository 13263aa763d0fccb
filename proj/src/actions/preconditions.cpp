#include <algorithm>

#include "detail.hpp"
#include "insight/error.hpp"
#include "insight/timefmt.hpp"

namespace insight::actions {

using tabular::ColumnPtr;
using tabular::ColumnType;

namespace {

bool contains(const std::vector<std::string>& v, std::string_view s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::optional<int> parse_int(std::string_view s) {
  auto v = timefmt::parse_number(s);
  if (!v || *v != static_cast<int>(*v)) return std::nullopt;
  return static_cast<int>(*v);
}

Verdict missing(const std::string& name, const std::string& param) {
  return Verdict::hard("unknown column '" + name + "'", param);
}

bool has_qualitative(const Dataset& d) {
  return std::any_of(d.columns().begin(), d.columns().end(),
                     [](const ColumnPtr& c) { return tabular::is_qualitative(c->type()) && c->non_null_count() > 0; });
}

Verdict model_column_free(const GroundAction& a, const Dataset& d) {
  if (d.find(a.canonical())) return Verdict::hard("model column '" + a.canonical() + "' already present");
  return Verdict::pass();
}

}  // namespace

Verdict check_hard(const GroundAction& a, const Dataset& d, std::size_t min_model_rows) {
  switch (a.kind()) {
    case ActionKind::Select: {
      const std::string& name = a.get("column");
      if (!d.source() || !d.source()->find(name)) return missing(name, "column");
      if (d.find(name)) return Verdict::hard("column '" + name + "' already selected", "column");
      return Verdict::pass();
    }
    case ActionKind::DeriveDiscretize: {
      const std::string& name = a.get("target");
      const ColumnPtr c = d.find(name);
      if (!c) return missing(name, "target");
      const auto methods = detail::discretize_methods(c->type());
      if (!contains(methods, a.get("method"))) {
        return Verdict::hard("method '" + a.get("method") + "' does not apply to " + std::string(to_string(c->type())),
                             "method");
      }
      if (!contains(detail::discretize_args(a.get("method")), a.get("arg"))) {
        return Verdict::hard("argument '" + a.get("arg") + "' is not valid", "arg");
      }
      if (d.find(a.canonical())) return Verdict::hard("column already derived", "arg");
      return Verdict::pass();
    }
    case ActionKind::DeriveBinop: {
      const ColumnPtr l = d.find(a.get("left"));
      if (!l) return missing(a.get("left"), "left");
      const ColumnPtr r = d.find(a.get("right"));
      if (!r) return missing(a.get("right"), "right");
      if (l == r) return Verdict::hard("operands must differ", "right");
      if (!binop_result_type(l->type(), a.get("operator"), r->type())) {
        return Verdict::hard(std::string(to_string(l->type())) + " " + a.get("operator") + " " +
                                 std::string(to_string(r->type())) + " is not defined",
                             "right");
      }
      if (d.find(a.canonical())) return Verdict::hard("column already derived", "right");
      return Verdict::pass();
    }
    case ActionKind::Where: {
      const ColumnPtr c = d.find(a.get("column"));
      if (!c) return missing(a.get("column"), "column");
      if (!contains(detail::where_operators(c->type()), a.get("operator"))) {
        return Verdict::hard("operator '" + a.get("operator") + "' does not apply to " +
                                 std::string(to_string(c->type())),
                             "operator");
      }
      if (c->type() != ColumnType::Categorical && !detail::parse_value(c->type(), a.get("value"))) {
        return Verdict::hard("value '" + a.get("value") + "' does not parse", "value");
      }
      return Verdict::pass();
    }
    case ActionKind::GroupBy: {
      const ColumnPtr g = d.find(a.get("grouper"));
      if (!g) return missing(a.get("grouper"), "grouper");
      std::size_t aggs = 0;
      for (const auto& b : a.bindings()) {
        if (b.param.rfind("agg:", 0) != 0) continue;
        ++aggs;
        const std::string col = b.param.substr(4);
        const ColumnPtr c = d.find(col);
        if (!c) return missing(col, b.param);
        if (c == g) return Verdict::hard("the grouper cannot be aggregated", b.param);
        if (!detail::aggregate_type(c->type(), b.value)) {
          return Verdict::hard("aggregator '" + b.value + "' does not apply to '" + col + "'", b.param);
        }
        if (b.value == "freq" && !a.find("value:" + col)) {
          return Verdict::hard("freq on '" + col + "' needs a value", b.param);
        }
      }
      if (aggs == 0) return Verdict::hard("groupby needs at least one aggregated column", "grouper");
      return Verdict::pass();
    }
    case ActionKind::DecisionTree: {
      const ColumnPtr t = d.find(a.get("target"));
      if (!t) return missing(a.get("target"), "target");
      const auto depth = parse_int(a.get("depth"));
      if (!depth || (*depth != 2 && *depth != 3)) return Verdict::hard("depth must be 2 or 3", "depth");
      if (d.row_count() < min_model_rows) return Verdict::hard("too few rows for a tree", "target");
      if (d.column_count() < 2) return Verdict::hard("a tree needs at least one feature", "target");
      return model_column_free(a, d);
    }
    case ActionKind::UnaryOutliers: {
      const ColumnPtr c = d.find(a.get("column"));
      if (!c) return missing(a.get("column"), "column");
      if (c->non_null_count() < 3) return Verdict::hard("fewer than 3 values", "column");
      return model_column_free(a, d);
    }
    case ActionKind::BinaryOutliers: {
      const ColumnPtr f = d.find(a.get("first"));
      if (!f) return missing(a.get("first"), "first");
      const ColumnPtr s = d.find(a.get("second"));
      if (!s) return missing(a.get("second"), "second");
      if (f == s) return Verdict::hard("the pair must contain two columns", "second");
      return model_column_free(a, d);
    }
    case ActionKind::Clustering: {
      const auto k = parse_int(a.get("k"));
      if (!k || *k < 2 || *k > 10) return Verdict::hard("k must be in 2..10", "k");
      if (!detail::has_cluster_features(d)) return Verdict::hard("no quantitative features", "k");
      if (d.row_count() < static_cast<std::size_t>(2 * *k)) return Verdict::hard("fewer than 2k rows", "k");
      if (detail::distinct_feature_rows(d, static_cast<std::size_t>(*k)) < static_cast<std::size_t>(*k)) {
        return Verdict::hard("fewer distinct rows than k", "k");
      }
      return model_column_free(a, d);
    }
    case ActionKind::Trend: {
      const ColumnPtr t = d.find(a.get("datetime"));
      if (!t) return missing(a.get("datetime"), "datetime");
      if (t->type() != ColumnType::Datetime) return Verdict::hard("'" + t->name() + "' is not a datetime", "datetime");
      if (t->non_null_count() < 10) return Verdict::hard("fewer than 10 timestamps", "datetime");
      const ColumnPtr c = d.find(a.get("target"));
      if (!c) return missing(a.get("target"), "target");
      if (c == t || !tabular::is_quantitative(c->type())) return Verdict::hard("target must be quantitative", "target");
      return model_column_free(a, d);
    }
    case ActionKind::AssociationRules:
      if (!has_qualitative(d)) return Verdict::hard("no qualitative columns");
      if (d.row_count() < min_model_rows) return Verdict::hard("too few rows for rule mining");
      return model_column_free(a, d);
  }
  return Verdict::pass();
}

Verdict check_precondition(const GroundAction& a, const Dataset& d, const PreconditionContext& ctx) {
  Verdict v = check_hard(a, d, ctx.min_model_rows);
  if (!v.ok()) return v;
  const std::string last = a.bindings().empty() ? std::string() : a.bindings().back().param;
  if (ctx.taken && ctx.taken->count(a.canonical())) {
    return Verdict::search("'" + a.canonical() + "' is already used at this state or on its path", last);
  }
  switch (a.kind()) {
    case ActionKind::Where: {
      const std::size_t kept = where_rows(d, a).size();
      if (kept < ctx.min_rows) {
        return Verdict::qualitative("keeps " + std::to_string(kept) + " of " + std::to_string(d.row_count()) +
                                        " rows (minimum " + std::to_string(ctx.min_rows) + ")",
                                    "value");
      }
      if (kept == d.row_count()) return Verdict::qualitative("removes no rows", "value");
      return Verdict::pass();
    }
    case ActionKind::DeriveDiscretize:
    case ActionKind::DeriveBinop: {
      const auto c = derive_column(d, a);
      if (detail::distinct_count(c) < 2) return Verdict::qualitative("derived column is constant", last);
      return Verdict::pass();
    }
    case ActionKind::GroupBy: {
      const ColumnPtr g = d.find(a.get("grouper"));
      if (detail::distinct_count(*g) < 2) return Verdict::qualitative("fewer than 2 groups", "grouper");
      return Verdict::pass();
    }
    default: return Verdict::pass();
  }
}

}  // namespace insight::actions
