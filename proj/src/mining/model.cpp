#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "insight/error.hpp"
#include "insight/mining.hpp"
#include "insight/timefmt.hpp"

namespace insight::mining {
namespace {

constexpr std::pair<ModelKind, std::string_view> kKindNames[] = {
    {ModelKind::DecisionTree, "decisionTree"},
    {ModelKind::RegressionTree, "regressionTree"},
    {ModelKind::UnivariateOutliers, "univariateOutliers"},
    {ModelKind::BivariateOutliers, "bivariateOutliers"},
    {ModelKind::Clustering, "clustering"},
    {ModelKind::Trend, "trend"},
    {ModelKind::AssociationRules, "associationRules"},
};

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string items_text(const std::vector<Item>& items) {
  std::string s = "{";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += ", ";
    s += items[i].column + "=" + items[i].value;
  }
  return s + "}";
}

std::vector<std::string> bases_of(const Dataset& d, const std::string& column) {
  const auto c = d.find(column);
  if (!c) return {};
  if (c->origin() == tabular::Origin::Original && c->base_columns().empty()) return {c->name()};
  return c->base_columns();
}

std::string joined(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

int parse_int(const GroundAction& a, std::string_view param) {
  const std::string& v = a.get(param);
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw PreconditionError("parameter '" + std::string(param) + "' is not an integer: '" + v + "'");
}

}  // namespace

std::string_view to_string(ModelKind k) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view s) {
  for (const auto& [kind, name] : kKindNames) {
    if (name == s) return kind;
  }
  return std::nullopt;
}

ModelOutcome apply_model_action(const Dataset& d, const GroundAction& a, const MiningParams& p) {
  if (!actions::is_model_action(a.kind())) {
    throw PreconditionError("'" + a.canonical() + "' is not a model action");
  }
  const auto verdict = actions::check_hard(a, d, p.min_rows);
  if (!verdict.ok()) throw PreconditionError(a.canonical() + ": " + verdict.reason);

  auto column = [&](std::string_view param) {
    const auto c = d.find(a.get(param));
    if (!c) throw PreconditionError("unknown column '" + a.get(param) + "'");
    return c;
  };

  FittedModel m;
  switch (a.kind()) {
    case actions::ActionKind::DecisionTree:
      m = fit_tree(d, a.get("target"), parse_int(a, "depth"), p);
      break;
    case actions::ActionKind::UnaryOutliers:
      m = detect_univariate_outliers(*column("column"), p);
      break;
    case actions::ActionKind::BinaryOutliers: {
      const auto x = column("first");
      const auto y = column("second");
      tabular::CorrelationMatrix corr({x->name(), y->name()});
      std::vector<double> ex(d.row_count()), ey(d.row_count());
      for (std::size_t r = 0; r < d.row_count(); ++r) {
        ex[r] = x->numeric(r);
        ey[r] = y->numeric(r);
      }
      if (const auto r = tabular::pearson(ex, ey)) corr.set(0, 1, *r);
      m = detect_bivariate_outliers(d, x->name(), y->name(), corr, p);
      break;
    }
    case actions::ActionKind::Clustering: {
      const Fingerprint fp = actions::canonical_state_key(d, a.canonical());
      Rng rng(fp.hi ^ mix64(fp.lo));
      m = cluster_kmeans(d, parse_int(a, "k"), rng, p);
      break;
    }
    case actions::ActionKind::Trend:
      m = analyze_trend(*column("datetime"), *column("target"), p);
      break;
    case actions::ActionKind::AssociationRules:
      m = mine_association_rules(d, p);
      break;
    default:
      throw PreconditionError("'" + a.canonical() + "' is not a model action");
  }
  m.action = a;

  if (!m.appended) return {std::move(m), d.with_lineage(a.canonical())};

  // Name the appended column after the action and record where it came from.
  std::set<std::string> bases;
  for (const auto& c : m.involved_columns) {
    for (auto& b : bases_of(d, c)) bases.insert(std::move(b));
  }
  tabular::Column col = *m.appended;
  col.set_origin(tabular::Origin::Model, a.canonical(), {bases.begin(), bases.end()});
  m.appended = std::make_shared<const tabular::Column>(std::move(col));
  Dataset next = d.with_column(m.appended, a.canonical());
  return {std::move(m), std::move(next)};
}

std::string render_summary(const FittedModel& m) {
  return std::visit(
      [&](const auto& art) -> std::string {
        using T = std::decay_t<decltype(art)>;
        if constexpr (std::is_same_v<T, TreeArtifacts>) {
          std::string s;
          if (art.classification) {
            s = "Decision tree predicting " + art.target + " reaches f1-macro " + fixed(art.accuracy) + " and covers " +
                std::to_string(art.predicted_classes) + " of " + std::to_string(art.classes.size()) + " classes";
          } else {
            s = "Regression tree predicting " + art.target + " reaches R^2 " + fixed(art.accuracy);
          }
          if (!art.nodes.empty() && art.nodes[0].feature >= 0) {
            s += "; top split " + art.features[art.nodes[0].feature] +
                 " <= " + timefmt::format_number(art.nodes[0].threshold);
          }
          if (!art.used_features.empty()) s += "; uses " + joined(art.used_features);
          return s + ".";
        } else if constexpr (std::is_same_v<T, UnivariateArtifacts>) {
          if (art.flagged.empty()) return "No outlier found in " + art.column + ".";
          std::string s = art.column + " has " + std::to_string(art.flagged.size()) + " outlier value" +
                          (art.flagged.size() == 1 ? "" : "s") + ": ";
          const std::size_t shown = std::min<std::size_t>(art.flagged.size(), 5);
          for (std::size_t i = 0; i < shown; ++i) {
            const auto& f = art.flagged[i];
            if (i) s += ", ";
            s += f.value + (art.quantitative ? " (z=" + fixed(f.score, 2) + ")" : " (frequency " + fixed(f.score) + ")");
          }
          if (shown < art.flagged.size()) s += ", ...";
          if (!art.quantitative) s += "; mode " + art.mode_value + " covers " + fixed(art.mode_frequency);
          return s + ".";
        } else if constexpr (std::is_same_v<T, BivariateArtifacts>) {
          std::string s = art.first + " and " + art.second + " (correlation " + fixed(art.correlation) + ")";
          if (art.flagged.empty()) return s + " show no outlier pair.";
          s += " have " + std::to_string(art.flagged.size()) + " outlier pair" + (art.flagged.size() == 1 ? "" : "s") + ": ";
          const std::size_t shown = std::min<std::size_t>(art.flagged.size(), 5);
          for (std::size_t i = 0; i < shown; ++i) {
            const auto& f = art.flagged[i];
            if (i) s += ", ";
            s += "(" + f.first_value + ", " + f.second_value + ") z=" + fixed(f.z, 2);
          }
          if (shown < art.flagged.size()) s += ", ...";
          return s + ".";
        } else if constexpr (std::is_same_v<T, ClusterArtifacts>) {
          std::string s = "k-means with k=" + std::to_string(art.k) + " on " + joined(art.features) +
                          " has silhouette " + fixed(art.silhouette);
          if (art.max_association) {
            s += "; clusters associate with " + art.associated_column + " (Cramer's V " + fixed(*art.max_association) +
                 ")";
          }
          return s + ".";
        } else if constexpr (std::is_same_v<T, TrendArtifacts>) {
          std::string s = art.target + " over " + art.datetime + ": ";
          std::vector<std::string> parts;
          if (art.trend) {
            parts.push_back(std::string(art.direction > 0 ? "increasing" : "decreasing") + " trend (Mann-Kendall z=" +
                            fixed(art.mann_kendall_z, 2) + ")");
          }
          if (art.period) {
            parts.push_back("periodic with lag " + std::to_string(art.best_lag) + " (autocorrelation " +
                            fixed(art.max_autocorrelation) + ")");
          }
          if (art.outliers) parts.push_back("outliers after detrending (max z=" + fixed(art.max_residual_z, 2) + ")");
          if (parts.empty()) return s + "stationary, aperiodic and without outliers.";
          for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "; " : "") + parts[i];
          return s + ".";
        } else {
          if (art.rules.empty()) return "No association rule above the support and confidence thresholds.";
          const auto& r = art.rules.front();
          std::string s = "Rule " + items_text(r.antecedent) + " => " + items_text(r.consequent) + " with kulc " +
                          fixed(r.kulc) + ", imbalance " + fixed(r.imbalance) + ", confidence " + fixed(r.confidence);
          if (art.rules.size() > 1) s += " (" + std::to_string(art.rules.size() - 1) + " more rules)";
          return s + ".";
        }
      },
      m.artifacts);
}

Pattern render_pattern(const FittedModel& m, double intr, const Dataset& d, std::vector<std::string> path) {
  if (!(intr >= 0.0 && intr <= 1.0)) throw PreconditionError("interestingness must lie in [0,1]");
  Pattern p;
  p.summary = render_summary(m);
  p.interestingness = intr;
  p.model_kind = std::string(to_string(m.kind));
  p.state_path = std::move(path);
  p.state_key = actions::canonical_state_key(d, m.action.canonical()).hex();

  std::set<std::string> bases;
  for (const auto& c : m.involved_columns) {
    for (auto& b : bases_of(d, c)) bases.insert(std::move(b));
  }
  p.base_columns.assign(bases.begin(), bases.end());

  auto target_of = [&](const std::string& column) { p.target_base = joined(bases_of(d, column)); };
  auto flag = [](bool b) { return b ? 1.0 : 0.0; };
  std::visit(
      [&](const auto& art) {
        using T = std::decay_t<decltype(art)>;
        if constexpr (std::is_same_v<T, TreeArtifacts>) {
          target_of(art.target);
          p.metrics["accuracy"] = art.accuracy;
          p.metrics["entropy"] = art.target_entropy;
          p.metrics["coverage"] = art.coverage;
          int depth = 0;
          std::vector<std::pair<int, int>> stack{{0, 0}};
          while (!stack.empty() && !art.nodes.empty()) {
            const auto [id, dep] = stack.back();
            stack.pop_back();
            depth = std::max(depth, dep);
            if (art.nodes[id].feature >= 0) {
              stack.emplace_back(art.nodes[id].left, dep + 1);
              stack.emplace_back(art.nodes[id].right, dep + 1);
            }
          }
          p.metrics["depth"] = depth;
        } else if constexpr (std::is_same_v<T, UnivariateArtifacts>) {
          target_of(art.column);
          double best = 0.0;
          for (const auto& f : art.flagged) best = std::max(best, art.quantitative ? f.score : 1.0 - f.score);
          p.metrics["flagged"] = static_cast<double>(art.flagged.size());
          p.metrics["max_score"] = best;
        } else if constexpr (std::is_same_v<T, BivariateArtifacts>) {
          p.metrics["correlation"] = art.correlation;
          p.metrics["flagged"] = static_cast<double>(art.flagged.size());
          p.metrics["max_z"] = art.flagged.empty() ? 0.0 : art.flagged.front().z;
        } else if constexpr (std::is_same_v<T, ClusterArtifacts>) {
          p.metrics["k"] = art.k;
          p.metrics["silhouette"] = art.silhouette;
          if (art.max_association) p.metrics["association"] = *art.max_association;
        } else if constexpr (std::is_same_v<T, TrendArtifacts>) {
          target_of(art.target);
          p.metrics["trend"] = flag(art.trend);
          p.metrics["period"] = flag(art.period);
          p.metrics["outliers"] = flag(art.outliers);
          p.metrics["mann_kendall_z"] = art.mann_kendall_z;
        } else {
          p.metrics["rules"] = static_cast<double>(art.rules.size());
          if (!art.rules.empty()) {
            p.metrics["top_kulc"] = art.rules.front().kulc;
            p.metrics["top_imbalance"] = art.rules.front().imbalance;
          }
        }
      },
      m.artifacts);
  return p;
}

}  // namespace insight::mining
