#include <algorithm>
#include <functional>

#include "detail.hpp"

namespace insight::actions {

using tabular::ColumnType;

namespace {

std::size_t sat_mul(std::size_t a, std::size_t b, std::size_t cap) {
  if (a == 0 || b == 0) return 0;
  if (a > cap / b) return cap;
  return std::min(a * b, cap);
}

std::size_t count_paths(const std::vector<ParamSlot>& seq, std::size_t cap) {
  std::size_t total = 1;
  for (const auto& slot : seq) {
    std::size_t options = 0;
    for (std::size_t v = 0; v < slot.values.size(); ++v) {
      const std::size_t sub = slot.next.empty() || slot.next[v].empty() ? 1 : count_paths(slot.next[v], cap);
      options = std::min(cap, options + sub);
    }
    total = sat_mul(total, options, cap);
    if (total == 0) return 0;
  }
  return total;
}

// Depth-first expansion of a slot sequence. `rest` holds continuation frames.
void expand_paths(ActionKind kind, std::vector<std::pair<const std::vector<ParamSlot>*, std::size_t>> frames,
                  std::vector<Binding>& bindings, std::vector<GroundAction>& out, std::size_t cap) {
  if (out.size() >= cap) return;
  while (!frames.empty() && frames.back().second >= frames.back().first->size()) frames.pop_back();
  if (frames.empty()) {
    out.emplace_back(kind, bindings);
    return;
  }
  auto [seq, idx] = frames.back();
  const ParamSlot& slot = (*seq)[idx];
  for (std::size_t v = 0; v < slot.values.size() && out.size() < cap; ++v) {
    auto next_frames = frames;
    next_frames.back().second = idx + 1;
    if (!slot.next.empty() && !slot.next[v].empty()) next_frames.emplace_back(&slot.next[v], 0);
    bindings.push_back({slot.name, slot.values[v]});
    expand_paths(kind, std::move(next_frames), bindings, out, cap);
    bindings.pop_back();
  }
}

struct ColumnInfo {
  const tabular::Column* column;
  std::size_t distinct;
  std::size_t non_null;
};

ParamSlot leaf_slot(std::string name, std::vector<std::string> values) {
  return ParamSlot{std::move(name), std::move(values), {}};
}

}  // namespace

std::size_t ActionTemplate::path_count(std::size_t cap) const { return count_paths(slots, cap); }

std::vector<GroundAction> ActionTemplate::enumerate(std::size_t cap) const {
  std::vector<GroundAction> out;
  std::vector<Binding> bindings;
  expand_paths(kind, {{&slots, 0}}, bindings, out, cap);
  return out;
}

std::vector<ActionTemplate> enumerate_templates(const Dataset& d, const TemplateOptions& opts) {
  auto allowed = [&](ActionKind k) { return opts.allowed.empty() || opts.allowed.count(k) > 0; };
  std::vector<ActionTemplate> out;
  auto push = [&](ActionTemplate t) {
    if (t.path_count(1) > 0) out.push_back(std::move(t));
  };

  std::vector<ColumnInfo> cols;
  for (const auto& c : d.columns()) cols.push_back({c.get(), detail::distinct_count(*c), c->non_null_count()});

  if (allowed(ActionKind::Select) && d.source()) {
    ParamSlot slot{"column", {}, {}};
    for (const auto& c : d.source()->columns) {
      if (!d.find(c->name())) slot.values.push_back(c->name());
    }
    push({ActionKind::Select, {slot}});
  }

  if (allowed(ActionKind::DeriveDiscretize)) {
    ParamSlot target{"target", {}, {}};
    for (const auto& ci : cols) {
      const auto methods = detail::discretize_methods(ci.column->type());
      if (methods.empty() || ci.distinct < 2) continue;
      ParamSlot method{"method", {}, {}};
      for (const auto& m : methods) {
        method.values.push_back(m);
        method.next.push_back({leaf_slot("arg", detail::discretize_args(m))});
      }
      target.values.push_back(ci.column->name());
      target.next.push_back({method});
    }
    push({ActionKind::DeriveDiscretize, {target}});
  }

  if (allowed(ActionKind::DeriveBinop)) {
    ParamSlot op_slot{"operator", {}, {}};
    std::vector<std::string_view> ops(std::begin(detail::kArithmeticOps), std::end(detail::kArithmeticOps));
    ops.insert(ops.end(), std::begin(detail::kComparisonOps), std::end(detail::kComparisonOps));
    for (auto op : ops) {
      ParamSlot left{"left", {}, {}};
      for (const auto& l : cols) {
        if (l.distinct < 2) continue;
        ParamSlot right{"right", {}, {}};
        for (const auto& r : cols) {
          if (r.column == l.column || r.distinct < 2) continue;
          if (is_commutative(op) && !(l.column->name() < r.column->name())) continue;
          if (!binop_result_type(l.column->type(), op, r.column->type())) continue;
          right.values.push_back(r.column->name());
        }
        if (right.values.empty()) continue;
        left.values.push_back(l.column->name());
        left.next.push_back({right});
      }
      if (left.values.empty()) continue;
      op_slot.values.emplace_back(op);
      op_slot.next.push_back({left});
    }
    push({ActionKind::DeriveBinop, {op_slot}});
  }

  if (allowed(ActionKind::Where)) {
    ParamSlot column{"column", {}, {}};
    for (const auto& ci : cols) {
      if (ci.distinct < 2) continue;
      auto values = detail::where_values(*ci.column, opts.max_listed_values);
      if (values.empty()) continue;
      ParamSlot op{"operator", {}, {}};
      for (const auto& o : detail::where_operators(ci.column->type())) {
        op.values.push_back(o);
        op.next.push_back({leaf_slot("value", values)});
      }
      column.values.push_back(ci.column->name());
      column.next.push_back({op});
    }
    push({ActionKind::Where, {column}});
  }

  if (allowed(ActionKind::GroupBy) && cols.size() >= 2) {
    ParamSlot grouper{"grouper", {}, {}};
    for (const auto& g : cols) {
      if (g.distinct < 2) continue;
      std::vector<ParamSlot> aggs;
      for (const auto& c : cols) {
        if (c.column == g.column) continue;
        ParamSlot agg{"agg:" + c.column->name(), {}, {}};
        for (const auto& a : detail::aggregators_for(c.column->type())) {
          if (a == "freq") {
            auto values = detail::top_values(*c.column, opts.max_listed_values);
            if (values.empty()) continue;
            agg.values.push_back(a);
            agg.next.push_back({leaf_slot("value:" + c.column->name(), std::move(values))});
          } else {
            agg.values.push_back(a);
            agg.next.push_back({});
          }
        }
        if (!agg.values.empty()) aggs.push_back(std::move(agg));
      }
      if (aggs.empty()) continue;
      grouper.values.push_back(g.column->name());
      grouper.next.push_back(std::move(aggs));
    }
    push({ActionKind::GroupBy, {grouper}});
  }

  const bool model_rows = d.row_count() >= opts.min_model_rows;

  if (allowed(ActionKind::DecisionTree) && model_rows && cols.size() >= 2) {
    ParamSlot target{"target", {}, {}};
    for (const auto& ci : cols) {
      if (ci.distinct < 2) continue;
      target.values.push_back(ci.column->name());
      target.next.push_back({leaf_slot("depth", {"2", "3"})});
    }
    push({ActionKind::DecisionTree, {target}});
  }

  if (allowed(ActionKind::UnaryOutliers)) {
    ParamSlot column{"column", {}, {}};
    for (const auto& ci : cols) {
      if (ci.non_null < 3) continue;
      if (tabular::is_quantitative(ci.column->type()) && ci.distinct < 2) continue;
      column.values.push_back(ci.column->name());
    }
    push({ActionKind::UnaryOutliers, {column}});
  }

  if (allowed(ActionKind::BinaryOutliers)) {
    ParamSlot first{"first", {}, {}};
    for (const auto& a : cols) {
      if (a.non_null < 3 || a.distinct < 2) continue;
      ParamSlot second{"second", {}, {}};
      for (const auto& b : cols) {
        if (b.non_null < 3 || b.distinct < 2 || !(a.column->name() < b.column->name())) continue;
        second.values.push_back(b.column->name());
      }
      if (second.values.empty()) continue;
      first.values.push_back(a.column->name());
      first.next.push_back({second});
    }
    push({ActionKind::BinaryOutliers, {first}});
  }

  if (allowed(ActionKind::Clustering) && detail::has_cluster_features(d)) {
    const std::size_t distinct_rows = detail::distinct_feature_rows(d, 11);
    const std::size_t kmax = std::min<std::size_t>({10, distinct_rows, d.row_count() / 2});
    ParamSlot k{"k", {}, {}};
    for (std::size_t v = 2; v <= kmax; ++v) k.values.push_back(std::to_string(v));
    push({ActionKind::Clustering, {k}});
  }

  if (allowed(ActionKind::Trend)) {
    ParamSlot dt{"datetime", {}, {}};
    for (const auto& t : cols) {
      if (t.column->type() != ColumnType::Datetime || t.non_null < opts.min_trend_points || t.distinct < 2) continue;
      ParamSlot target{"target", {}, {}};
      for (const auto& c : cols) {
        if (c.column == t.column || c.distinct < 2) continue;
        if (c.column->type() != ColumnType::Numerical && c.column->type() != ColumnType::Timedelta) continue;
        target.values.push_back(c.column->name());
      }
      if (target.values.empty()) continue;
      dt.values.push_back(t.column->name());
      dt.next.push_back({target});
    }
    push({ActionKind::Trend, {dt}});
  }

  if (allowed(ActionKind::AssociationRules) && model_rows) {
    const bool qualitative = std::any_of(cols.begin(), cols.end(), [](const ColumnInfo& c) {
      return tabular::is_qualitative(c.column->type()) && c.non_null > 0;
    });
    if (qualitative) push({ActionKind::AssociationRules, {}});
  }
  return out;
}

}  // namespace insight::actions
