#include <algorithm>
#include <cmath>
#include <limits>

#include "insight/error.hpp"
#include "insight/interestingness.hpp"

namespace insight::intr {

using namespace mining;

void IntrConfig::validate() const {
  auto check = [](double v, double lo, double hi, bool open_lo, bool open_hi, const char* name) {
    const bool ok = std::isfinite(v) && (open_lo ? v > lo : v >= lo) && (open_hi ? v < hi : v <= hi);
    if (!ok) throw InputError(std::string("intr config: ") + name + " out of range");
  };
  check(t_qual, 0.0, 1.0, true, true, "t_qual");
  check(t_quant, 0.0, std::numeric_limits<double>::max(), true, false, "t_quant");
  check(corr_gate, 0.0, 1.0, false, true, "corr_gate");
  check(mode_gate, 0.0, 1.0, false, true, "mode_gate");
  check(success_threshold, 0.0, 1.0, true, true, "success_threshold");
}

double squash(double x) {
  if (std::isinf(x) && x > 0) return 1.0;
  if (!(x > 0.0)) return 0.0;
  return x / (1.0 + x);
}

SimulationScore simulate_score(const Dataset& d, const IntrConfig& cfg) {
  if (d.columns().empty()) throw PreconditionError("simulation needs at least one column");
  SimulationScore s;
  double sum = 0.0;
  for (const auto& c : d.columns()) {
    double pec = 0.0;
    if (c->non_null_count() > 0) {
      const auto st = tabular::column_stats(*c);
      if (st.quantitative) {
        pec = (squash(std::abs(st.skewness)) + squash(std::max(st.excess_kurtosis, 0.0)) + squash(st.iqr_to_mean)) /
              3.0;
      } else {
        pec = std::max(st.mode_frequency > cfg.mode_gate ? 1.0 : 0.0, tabular::normalized_entropy(*c));
      }
    }
    pec = std::clamp(pec, 0.0, 1.0);
    s.per_column[c->name()] = pec;
    sum += pec;
  }
  const auto corr = tabular::pearson_matrix(d);
  std::size_t valid = 0, high = 0;
  for (std::size_t i = 0; i < corr.size(); ++i) {
    for (std::size_t j = i + 1; j < corr.size(); ++j) {
      if (!corr.valid(i, j)) continue;
      ++valid;
      if (std::abs(corr.at(i, j)) > cfg.corr_gate) ++high;
    }
  }
  s.correlated_pair_fraction = valid ? static_cast<double>(high) / static_cast<double>(valid) : 0.0;
  s.total = std::clamp(0.5 * sum / static_cast<double>(d.columns().size()) + 0.5 * s.correlated_pair_fraction, 0.0,
                       1.0);
  return s;
}

double tree_score(double acc, double ent, double cover) {
  return std::clamp(std::max(acc, 0.0), 0.0, 1.0) * std::clamp(ent, 0.0, 1.0) * std::clamp(cover, 0.0, 1.0);
}

double quantitative_outlier_score(double z, double t_quant) {
  if (!(z > 0.0)) return 0.0;
  return std::clamp(1.0 - t_quant / z, 0.0, 1.0);
}

double qualitative_outlier_score(double frequency, double t_qual) {
  return std::clamp(1.0 - frequency / (1.0 - t_qual), 0.0, 1.0);
}

double clustering_score(double silhouette, double association) {
  return std::clamp((1.0 + silhouette) / 2.0, 0.0, 1.0) * std::clamp(association, 0.0, 1.0);
}

double trend_score(bool trend, bool period, bool outliers) {
  const int flags = static_cast<int>(trend) + static_cast<int>(period) + static_cast<int>(outliers);
  return flags == 0 ? 0.0 : 0.5 + flags / 6.0;
}

double rule_score(double kulc, double imbalance) {
  return std::clamp(kulc, 0.0, 1.0) * (1.0 - std::clamp(imbalance, 0.0, 1.0));
}

double kulczynski(double sup_a, double sup_b, double sup_ab) {
  if (sup_a <= 0.0 || sup_b <= 0.0) return 0.0;
  return 0.5 * (sup_ab / sup_a + sup_ab / sup_b);
}

double imbalance_ratio(double sup_a, double sup_b, double sup_ab) {
  const double denom = sup_a + sup_b - sup_ab;
  return denom > 0.0 ? std::abs(sup_a - sup_b) / denom : 0.0;
}

double intr_tree(const FittedModel& m) {
  const auto* a = std::get_if<TreeArtifacts>(&m.artifacts);
  if (!a) throw PreconditionError("intr_tree: not a tree model");
  return tree_score(a->accuracy, a->target_entropy, a->classification ? a->coverage : 1.0);
}

double intr_univariate_outliers(const FittedModel& m, const IntrConfig& cfg) {
  const auto* a = std::get_if<UnivariateArtifacts>(&m.artifacts);
  if (!a) throw PreconditionError("intr_univariate_outliers: not a univariate outlier model");
  if (a->flagged.empty()) return 0.0;
  double best = 0.0;
  for (const auto& f : a->flagged) {
    best = std::max(best, a->quantitative ? quantitative_outlier_score(f.score, cfg.t_quant)
                                          : qualitative_outlier_score(f.score, cfg.t_qual));
  }
  return 0.5 + best / 2.0;
}

double intr_bivariate_outliers(const FittedModel& m, const IntrConfig& cfg) {
  const auto* a = std::get_if<BivariateArtifacts>(&m.artifacts);
  if (!a) throw PreconditionError("intr_bivariate_outliers: not a bivariate outlier model");
  if (!(std::abs(a->correlation) > cfg.corr_gate)) return 0.0;
  double best = 0.0;
  for (const auto& f : a->flagged) best = std::max(best, quantitative_outlier_score(f.z, cfg.t_quant));
  return best;
}

double intr_clustering(const FittedModel& m) {
  const auto* a = std::get_if<ClusterArtifacts>(&m.artifacts);
  if (!a) throw PreconditionError("intr_clustering: not a clustering model");
  return clustering_score(a->silhouette, a->max_association.value_or(1.0));
}

double intr_trend(const FittedModel& m) {
  const auto* a = std::get_if<TrendArtifacts>(&m.artifacts);
  if (!a) throw PreconditionError("intr_trend: not a trend model");
  return trend_score(a->trend, a->period, a->outliers);
}

double intr_rules(const FittedModel& m) {
  const auto* a = std::get_if<RuleArtifacts>(&m.artifacts);
  if (!a) throw PreconditionError("intr_rules: not a rule model");
  double best = 0.0;
  for (const auto& r : a->rules) best = std::max(best, rule_score(r.kulc, r.imbalance));
  return best;
}

double interestingness(const FittedModel& m, const IntrConfig& cfg) {
  switch (m.kind) {
    case ModelKind::DecisionTree:
    case ModelKind::RegressionTree:
      return intr_tree(m);
    case ModelKind::UnivariateOutliers:
      return intr_univariate_outliers(m, cfg);
    case ModelKind::BivariateOutliers:
      return intr_bivariate_outliers(m, cfg);
    case ModelKind::Clustering:
      return intr_clustering(m);
    case ModelKind::Trend:
      return intr_trend(m);
    case ModelKind::AssociationRules:
      return intr_rules(m);
  }
  return 0.0;
}

}  // namespace insight::intr
