#pragma once

#include <map>
#include <string>

#include "insight/mining.hpp"
#include "insight/tabular.hpp"

namespace insight::intr {

using mining::FittedModel;
using tabular::Dataset;

struct IntrConfig {
  double t_qual = 0.85;
  double t_quant = 2.0;
  double corr_gate = 0.8;
  double mode_gate = 0.9;
  double success_threshold = 0.5;

  /// Throws InputError when a value is outside its documented range.
  void validate() const;
};

struct SimulationScore {
  std::map<std::string, double> per_column;  // peculiarity in [0,1]
  double correlated_pair_fraction = 0.0;
  double total = 0.0;
};

/// x / (1 + x) for x >= 0, 1 for +inf.
double squash(double x);

/// Base score of a model-less state from unary and pairwise statistics.
/// Throws PreconditionError for a dataset without columns.
SimulationScore simulate_score(const Dataset& d, const IntrConfig& cfg = {});

double intr_tree(const FittedModel& m);
double intr_univariate_outliers(const FittedModel& m, const IntrConfig& cfg = {});
double intr_bivariate_outliers(const FittedModel& m, const IntrConfig& cfg = {});
double intr_clustering(const FittedModel& m);
double intr_trend(const FittedModel& m);
double intr_rules(const FittedModel& m);

/// Dispatches on the model kind.
double interestingness(const FittedModel& m, const IntrConfig& cfg = {});

// Scalar forms of the formulas.
double tree_score(double acc, double ent, double cover);
double quantitative_outlier_score(double z, double t_quant);
double qualitative_outlier_score(double frequency, double t_qual);
double clustering_score(double silhouette, double association);
double trend_score(bool trend, bool period, bool outliers);
double rule_score(double kulc, double imbalance);
double kulczynski(double sup_a, double sup_b, double sup_ab);
double imbalance_ratio(double sup_a, double sup_b, double sup_ab);

}  // namespace insight::intr
