#include <algorithm>

#include "detail.hpp"
#include "insight/error.hpp"

namespace insight::actions {

using tabular::ColumnType;

std::string_view to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Select: return "select";
    case ActionKind::DeriveDiscretize: return "derive-discretize";
    case ActionKind::DeriveBinop: return "derive-binop";
    case ActionKind::Where: return "where";
    case ActionKind::GroupBy: return "groupby";
    case ActionKind::DecisionTree: return "decision-tree";
    case ActionKind::UnaryOutliers: return "unary-outliers";
    case ActionKind::BinaryOutliers: return "binary-outliers";
    case ActionKind::Clustering: return "clustering";
    case ActionKind::Trend: return "trend";
    case ActionKind::AssociationRules: return "association-rules";
  }
  return "select";
}

std::optional<ActionKind> parse_action_kind(std::string_view s) {
  for (ActionKind k : kAllActionKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::string_view to_string(VerdictClass c) {
  switch (c) {
    case VerdictClass::Ok: return "ok";
    case VerdictClass::Hard: return "hard";
    case VerdictClass::Qualitative: return "qualitative";
    case VerdictClass::Search: return "search";
  }
  return "ok";
}

std::string escape_token(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '\\' || c == ',' || c == ';' || c == '(' || c == ')') out += '\\';
    out += c;
  }
  return out;
}

bool is_commutative(std::string_view op) { return op == "+" || op == "*" || op == "=" || op == "!="; }

std::optional<ColumnType> binop_result_type(ColumnType l, std::string_view op, ColumnType r) {
  using T = ColumnType;
  const bool comparison = op == "=" || op == "!=" || op == ">" || op == "<";
  if (comparison) {
    if (l != r) return std::nullopt;
    if (tabular::is_qualitative(l) && op != "=" && op != "!=") return std::nullopt;
    return T::Boolean;
  }
  if (op == "+") {
    if (l == T::Numerical && r == T::Numerical) return T::Numerical;
    if ((l == T::Datetime && r == T::Timedelta) || (l == T::Timedelta && r == T::Datetime)) return T::Datetime;
    if (l == T::Timedelta && r == T::Timedelta) return T::Timedelta;
    return std::nullopt;
  }
  if (op == "-") {
    if (l == T::Numerical && r == T::Numerical) return T::Numerical;
    if (l == T::Datetime && r == T::Datetime) return T::Timedelta;
    if (l == T::Datetime && r == T::Timedelta) return T::Datetime;
    if (l == T::Timedelta && r == T::Timedelta) return T::Timedelta;
    return std::nullopt;
  }
  if (op == "*") {
    if (l == T::Numerical && r == T::Numerical) return T::Numerical;
    if ((l == T::Timedelta && r == T::Numerical) || (l == T::Numerical && r == T::Timedelta)) return T::Timedelta;
    return std::nullopt;
  }
  if (op == "/") {
    if (l == T::Numerical && r == T::Numerical) return T::Numerical;
    if (l == T::Timedelta && r == T::Numerical) return T::Timedelta;
    if (l == T::Timedelta && r == T::Timedelta) return T::Numerical;
    return std::nullopt;
  }
  return std::nullopt;
}

namespace {

const std::string& require(const std::vector<Binding>& b, std::string_view param, ActionKind kind) {
  for (const auto& x : b) {
    if (x.param == param) return x.value;
  }
  throw PreconditionError(std::string(to_string(kind)) + " action lacks parameter '" + std::string(param) + "'");
}

std::string call(std::string_view name, std::initializer_list<std::string_view> args) {
  std::string out(name);
  out += '(';
  bool first = true;
  for (auto a : args) {
    if (!first) out += ',';
    first = false;
    out += escape_token(a);
  }
  out += ')';
  return out;
}

}  // namespace

std::string canonical_form(ActionKind kind, const std::vector<Binding>& b) {
  switch (kind) {
    case ActionKind::Select: return call("select", {require(b, "column", kind)});
    case ActionKind::DeriveDiscretize:
      return call("derive", {require(b, "target", kind), require(b, "method", kind), require(b, "arg", kind)});
    case ActionKind::DeriveBinop: {
      const std::string& op = require(b, "operator", kind);
      std::string_view l = require(b, "left", kind);
      std::string_view r = require(b, "right", kind);
      if (is_commutative(op) && r < l) std::swap(l, r);
      return call("derive", {l, op, r});
    }
    case ActionKind::Where:
      return call("where", {require(b, "column", kind), require(b, "operator", kind), require(b, "value", kind)});
    case ActionKind::GroupBy: {
      std::string out = "group(" + escape_token(require(b, "grouper", kind)) + ";";
      bool first = true;
      for (const auto& x : b) {
        if (x.param.rfind("agg:", 0) != 0) continue;
        const std::string col = x.param.substr(4);
        if (!first) out += ',';
        first = false;
        if (x.value == "freq") {
          out += call("freq", {col, require(b, "value:" + col, kind)});
        } else {
          out += call(x.value, {col});
        }
      }
      return out + ")";
    }
    case ActionKind::DecisionTree: return call("tree", {require(b, "target", kind), require(b, "depth", kind)});
    case ActionKind::UnaryOutliers: return call("outliers", {require(b, "column", kind)});
    case ActionKind::BinaryOutliers: {
      std::string_view f = require(b, "first", kind);
      std::string_view s = require(b, "second", kind);
      if (s < f) std::swap(f, s);
      return call("bioutliers", {f, s});
    }
    case ActionKind::Clustering: return call("cluster", {require(b, "k", kind)});
    case ActionKind::Trend: return call("trend", {require(b, "datetime", kind), require(b, "target", kind)});
    case ActionKind::AssociationRules: return "rules()";
  }
  return {};
}

GroundAction::GroundAction(ActionKind kind, std::vector<Binding> bindings)
    : kind_(kind), bindings_(std::move(bindings)), canonical_(canonical_form(kind_, bindings_)) {}

std::optional<std::string_view> GroundAction::find(std::string_view param) const {
  for (const auto& b : bindings_) {
    if (b.param == param) return std::string_view(b.value);
  }
  return std::nullopt;
}

const std::string& GroundAction::get(std::string_view param) const { return require(bindings_, param, kind_); }

namespace detail {

std::vector<std::string> split_args(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '\\' && i + 1 < s.size()) {
      cur += c;
      cur += s[++i];
      continue;
    }
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth < 0) throw InputError("unbalanced parentheses in '" + std::string(s) + "'");
    if (c == sep && depth == 0) {
      out.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    cur += c;
  }
  if (depth != 0) throw InputError("unbalanced parentheses in '" + std::string(s) + "'");
  out.push_back(std::move(cur));
  return out;
}

std::string unescape_token(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) ++i;
    out += s[i];
  }
  return out;
}

}  // namespace detail

namespace {

struct Call {
  std::string name;
  std::string inner;  // still escaped
};

Call split_call(std::string_view text) {
  const auto open = text.find('(');
  if (open == std::string_view::npos || open == 0 || text.back() != ')') {
    throw InputError("malformed action '" + std::string(text) + "'");
  }
  return {std::string(text.substr(0, open)), std::string(text.substr(open + 1, text.size() - open - 2))};
}

std::vector<std::string> args_of(const Call& c, std::size_t expected, std::string_view text) {
  std::vector<std::string> raw = c.inner.empty() ? std::vector<std::string>{} : detail::split_args(c.inner, ',');
  if (raw.size() != expected) {
    throw InputError("action '" + std::string(text) + "' expects " + std::to_string(expected) + " arguments");
  }
  for (auto& a : raw) a = detail::unescape_token(a);
  return raw;
}

}  // namespace

GroundAction parse_action(std::string_view text) {
  const Call c = split_call(text);
  using K = ActionKind;
  if (c.name == "select") {
    auto a = args_of(c, 1, text);
    return GroundAction(K::Select, {{"column", a[0]}});
  }
  if (c.name == "derive") {
    auto a = args_of(c, 3, text);
    if (a[1] == "bins" || a[1] == "quantiles" || a[1] == "time") {
      return GroundAction(K::DeriveDiscretize, {{"target", a[0]}, {"method", a[1]}, {"arg", a[2]}});
    }
    return GroundAction(K::DeriveBinop, {{"operator", a[1]}, {"left", a[0]}, {"right", a[2]}});
  }
  if (c.name == "where") {
    auto a = args_of(c, 3, text);
    return GroundAction(K::Where, {{"column", a[0]}, {"operator", a[1]}, {"value", a[2]}});
  }
  if (c.name == "group") {
    auto parts = detail::split_args(c.inner, ';');
    if (parts.size() != 2) throw InputError("malformed group action '" + std::string(text) + "'");
    std::vector<Binding> b{{"grouper", detail::unescape_token(parts[0])}};
    if (!parts[1].empty()) {
      for (const auto& entry : detail::split_args(parts[1], ',')) {
        const Call e = split_call(entry);
        if (e.name == "freq") {
          auto a = args_of(e, 2, entry);
          b.push_back({"agg:" + a[0], "freq"});
          b.push_back({"value:" + a[0], a[1]});
        } else {
          auto a = args_of(e, 1, entry);
          b.push_back({"agg:" + a[0], e.name});
        }
      }
    }
    return GroundAction(K::GroupBy, std::move(b));
  }
  if (c.name == "tree") {
    auto a = args_of(c, 2, text);
    return GroundAction(K::DecisionTree, {{"target", a[0]}, {"depth", a[1]}});
  }
  if (c.name == "outliers") {
    auto a = args_of(c, 1, text);
    return GroundAction(K::UnaryOutliers, {{"column", a[0]}});
  }
  if (c.name == "bioutliers") {
    auto a = args_of(c, 2, text);
    return GroundAction(K::BinaryOutliers, {{"first", a[0]}, {"second", a[1]}});
  }
  if (c.name == "cluster") {
    auto a = args_of(c, 1, text);
    return GroundAction(K::Clustering, {{"k", a[0]}});
  }
  if (c.name == "trend") {
    auto a = args_of(c, 2, text);
    return GroundAction(K::Trend, {{"datetime", a[0]}, {"target", a[1]}});
  }
  if (c.name == "rules") {
    args_of(c, 0, text);
    return GroundAction(K::AssociationRules, {});
  }
  throw InputError("unknown action '" + std::string(text) + "'");
}

}  // namespace insight::actions
