#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "insight/hash.hpp"
#include "insight/tabular.hpp"

namespace insight::actions {

using tabular::Dataset;
using Rng = std::mt19937_64;

enum class ActionKind {
  Select,
  DeriveDiscretize,
  DeriveBinop,
  Where,
  GroupBy,
  DecisionTree,
  UnaryOutliers,
  BinaryOutliers,
  Clustering,
  Trend,
  AssociationRules,
};

inline constexpr std::array kAllActionKinds = {
    ActionKind::Select,        ActionKind::DeriveDiscretize, ActionKind::DeriveBinop,
    ActionKind::Where,         ActionKind::GroupBy,          ActionKind::DecisionTree,
    ActionKind::UnaryOutliers, ActionKind::BinaryOutliers,   ActionKind::Clustering,
    ActionKind::Trend,         ActionKind::AssociationRules,
};

constexpr bool is_model_action(ActionKind k) { return k >= ActionKind::DecisionTree; }
constexpr bool is_data_action(ActionKind k) { return !is_model_action(k); }

std::string_view to_string(ActionKind k);
std::optional<ActionKind> parse_action_kind(std::string_view s);

struct Binding {
  std::string param;
  std::string value;
  bool operator==(const Binding&) const = default;
};

// Binding parameter names per kind:
//   select            column
//   derive-discretize target, method (bins|quantiles|time), arg
//   derive-binop      operator, left, right
//   where             column, operator, value
//   groupby           grouper, agg:<column>..., value:<column> (freq only)
//   decision-tree     target, depth
//   unary-outliers    column
//   binary-outliers   first, second
//   clustering        k
//   trend             datetime, target
//   association-rules (none)

/// A fully bound action. The canonical form is the identity of the action:
/// `kind(arg,...)` with commutative binary operands sorted, e.g.
/// `where(Score,<,60)` or `group(Student;max(Exam Date),avg(Score))`.
class GroundAction {
 public:
  GroundAction() = default;
  GroundAction(ActionKind kind, std::vector<Binding> bindings);

  ActionKind kind() const { return kind_; }
  const std::vector<Binding>& bindings() const { return bindings_; }
  const std::string& canonical() const { return canonical_; }

  std::optional<std::string_view> find(std::string_view param) const;
  /// Throws PreconditionError when absent.
  const std::string& get(std::string_view param) const;

  bool operator==(const GroundAction& o) const { return canonical_ == o.canonical_; }
  auto operator<=>(const GroundAction& o) const { return canonical_ <=> o.canonical_; }

 private:
  ActionKind kind_ = ActionKind::Select;
  std::vector<Binding> bindings_;
  std::string canonical_;
};

std::string canonical_form(ActionKind kind, const std::vector<Binding>& bindings);

/// Inverse of canonical_form. Throws InputError on malformed text.
GroundAction parse_action(std::string_view canonical);

/// Escapes `\ , ; ( )` in names and values inside canonical forms.
std::string escape_token(std::string_view s);

bool is_commutative(std::string_view op);
/// Column type produced by `left op right`, nullopt when the operands are incompatible.
std::optional<tabular::ColumnType> binop_result_type(tabular::ColumnType left, std::string_view op,
                                                     tabular::ColumnType right);

/// One level of an action tree. A slot with one value is ground, with several
/// it is lifted. `next`, when non-empty, holds one continuation sequence per value.
struct ParamSlot {
  std::string name;
  std::vector<std::string> values;
  std::vector<std::vector<ParamSlot>> next;
};

struct ActionTemplate {
  ActionKind kind = ActionKind::Select;
  std::vector<ParamSlot> slots;

  /// Number of root-leaf paths, saturating at `cap`.
  std::size_t path_count(std::size_t cap = SIZE_MAX) const;
  /// Every ground action the tree denotes, up to `cap` of them, in tree order.
  std::vector<GroundAction> enumerate(std::size_t cap = SIZE_MAX) const;
};

struct TemplateOptions {
  std::size_t max_listed_values = 20;  // categorical where/freq candidates (most frequent first)
  std::size_t min_model_rows = 10;     // trees, trends, rules
  std::size_t min_trend_points = 10;
  std::set<ActionKind> allowed;        // empty = every kind
};

/// Templates applicable to a state; lifted sets are pre-filtered by hard
/// preconditions and empty templates are dropped. The fitted model of the
/// state does not restrict the action set: model states chain from their
/// (possibly extended) dataset. An empty result marks a terminal state.
std::vector<ActionTemplate> enumerate_templates(const Dataset& d, const TemplateOptions& opts = {});

enum class VerdictClass { Ok, Hard, Qualitative, Search };

struct Verdict {
  VerdictClass cls = VerdictClass::Ok;
  std::string reason;
  /// Parameter whose value caused the failure; instantiation prunes that subtree.
  std::string blamed_param;

  bool ok() const { return cls == VerdictClass::Ok; }
  static Verdict pass() { return {}; }
  static Verdict hard(std::string reason, std::string param = {}) {
    return {VerdictClass::Hard, std::move(reason), std::move(param)};
  }
  static Verdict qualitative(std::string reason, std::string param = {}) {
    return {VerdictClass::Qualitative, std::move(reason), std::move(param)};
  }
  static Verdict search(std::string reason, std::string param = {}) {
    return {VerdictClass::Search, std::move(reason), std::move(param)};
  }
};

std::string_view to_string(VerdictClass c);

struct PreconditionContext {
  /// Canonical forms already used at the node or on its path.
  const std::set<std::string>* taken = nullptr;
  std::size_t min_rows = 5;
  std::size_t min_model_rows = 10;
};

Verdict check_precondition(const GroundAction& a, const Dataset& d, const PreconditionContext& ctx = {});
/// Only the feasibility rules (types, column existence, model minimums).
Verdict check_hard(const GroundAction& a, const Dataset& d, std::size_t min_model_rows = 10);

/// Executes a data action. Re-checks hard preconditions and throws
/// PreconditionError on violation.
Dataset apply_data_action(const Dataset& d, const GroundAction& a);

/// The column a derive action would append (not yet attached to a dataset).
tabular::Column derive_column(const Dataset& d, const GroundAction& a);

/// Rows of `d` satisfying a where action.
std::vector<uint32_t> where_rows(const Dataset& d, const GroundAction& a);

/// Content fingerprint of a (dataset, model) state: sorted column names with
/// provenance, an order-independent hash of row contents, and the model's
/// canonical form. Independent of the action order that produced the state.
Fingerprint canonical_state_key(const Dataset& d, std::string_view model_canonical = {});

struct ParamValueStats {
  double delta_sum = 0.0;
  std::size_t visits = 0;

  std::optional<double> mean_delta() const {
    if (visits == 0) return std::nullopt;
    return delta_sum / static_cast<double>(visits);
  }
};

/// Per (action kind, parameter, value) running averages of the change in
/// interestingness between a child state and its parent.
class ParamStatsStore {
 public:
  const ParamValueStats* find(ActionKind kind, std::string_view param, std::string_view value) const;
  ParamValueStats& at(ActionKind kind, std::string_view param, std::string_view value);
  /// Adds `delta` to every parameter value bound in `a`.
  void record(const GroundAction& a, double delta);
  std::size_t size() const { return entries_.size(); }

 private:
  static std::string key(ActionKind kind, std::string_view param, std::string_view value);
  std::map<std::string, ParamValueStats, std::less<>> entries_;
};

enum class ParamPolicy { Random, WeightedRandom, Uct };

std::string_view to_string(ParamPolicy p);

struct PolicyParams {
  ParamPolicy policy = ParamPolicy::Random;
  double exploration = 1.4142135623730951;
  double epsilon = 0.01;
};

/// Selection probabilities of the weighted-random policy: proportional to
/// max(meanDelta, epsilon), epsilon for unvisited values.
std::vector<double> weighted_probabilities(ActionKind kind, std::string_view param,
                                           std::span<const std::string> values, const ParamStatsStore& stats,
                                           double epsilon);

/// Picks one of `values` (index) under the policy.
std::size_t choose_value(ActionKind kind, std::string_view param, std::span<const std::string> values,
                         const PolicyParams& policy, const ParamStatsStore& stats, Rng& rng);

struct InstantiateLog {
  std::size_t attempts = 0;
  std::vector<Verdict> rejected;
};

/// Walks the template top-down choosing lifted values by policy. Failed
/// bindings are pruned and the walk repeats until an action passes every
/// precondition, the tree is exhausted, or `max_attempts` walks were made.
std::optional<GroundAction> instantiate(const ActionTemplate& t, const Dataset& d, const PolicyParams& policy,
                                        const ParamStatsStore& stats, Rng& rng,
                                        const PreconditionContext& ctx = {}, std::size_t max_attempts = 256,
                                        InstantiateLog* log = nullptr);

}  // namespace insight::actions
