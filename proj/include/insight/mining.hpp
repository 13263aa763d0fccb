#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "insight/actions.hpp"
#include "insight/tabular.hpp"

namespace insight::mining {

using actions::GroundAction;
using actions::Rng;
using tabular::Column;
using tabular::Dataset;

enum class ModelKind {
  DecisionTree,
  RegressionTree,
  UnivariateOutliers,
  BivariateOutliers,
  Clustering,
  Trend,
  AssociationRules,
};

std::string_view to_string(ModelKind k);
std::optional<ModelKind> parse_model_kind(std::string_view s);

struct TreeNode {
  int feature = -1;  // -1 for a leaf
  double threshold = 0.0;
  int left = -1;     // rows with feature <= threshold
  int right = -1;    // everything else, nulls included
  double value = 0.0;  // leaf prediction: class code or mean
  std::size_t rows = 0;
};

struct TreeArtifacts {
  std::string target;
  bool classification = true;
  std::vector<std::string> features;
  std::vector<std::string> classes;  // classification targets, by code
  std::vector<TreeNode> nodes;       // nodes[0] is the root
  double accuracy = 0.0;             // f1-macro or R^2 on the fitted rows
  double target_entropy = 0.0;       // normalized entropy (10-bin discretized for regression)
  double coverage = 1.0;             // fraction of classes predicted by some leaf
  std::size_t predicted_classes = 0;
  std::vector<std::string> used_features;  // features appearing in splits, root first
};

struct FlaggedValue {
  std::string value;
  double score = 0.0;  // z-score (quantitative) or relative frequency (qualitative)
  std::size_t count = 0;
};

struct UnivariateArtifacts {
  std::string column;
  bool quantitative = true;
  double mean = 0.0;
  double stddev = 0.0;
  std::string mode_value;
  double mode_frequency = 0.0;
  std::vector<FlaggedValue> flagged;  // strongest first
};

struct FlaggedPair {
  std::string first_value;
  std::string second_value;
  double z = 0.0;
  double score = 0.0;  // 1 - tQuant / z, clamped to [0,1]
};

struct BivariateArtifacts {
  std::string first;
  std::string second;
  double correlation = 0.0;
  bool qualitative_pair = false;
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<FlaggedPair> flagged;  // strongest first
};

struct ClusterArtifacts {
  int k = 0;
  double silhouette = 0.0;
  std::vector<std::string> features;
  std::vector<std::size_t> sizes;
  std::optional<double> max_association;  // Cramer's V, when qualitative columns exist
  std::string associated_column;
};

struct TrendArtifacts {
  std::string datetime;
  std::string target;
  bool trend = false;
  bool period = false;
  bool outliers = false;
  double mann_kendall_z = 0.0;
  int direction = 0;  // +1 increasing, -1 decreasing
  double max_autocorrelation = 0.0;
  int best_lag = 0;
  double max_residual_z = 0.0;
  std::size_t points = 0;
};

struct Item {
  std::string column;
  std::string value;
  bool operator==(const Item&) const = default;
  auto operator<=>(const Item&) const = default;
};

struct Rule {
  std::vector<Item> antecedent;
  std::vector<Item> consequent;
  double support_a = 0.0;
  double support_b = 0.0;
  double support_ab = 0.0;
  double confidence = 0.0;
  double kulc = 0.0;
  double imbalance = 0.0;
};

struct RuleArtifacts {
  std::vector<Rule> rules;
  std::size_t transactions = 0;
  std::size_t frequent_itemsets = 0;
};

using Artifacts = std::variant<TreeArtifacts, UnivariateArtifacts, BivariateArtifacts, ClusterArtifacts,
                               TrendArtifacts, RuleArtifacts>;

/// A fitted model. Clustering appends a numerical cluster-id column and the
/// outlier detectors append a boolean flag column; other kinds append nothing.
struct FittedModel {
  ModelKind kind = ModelKind::DecisionTree;
  GroundAction action;
  Artifacts artifacts;
  std::shared_ptr<const Column> appended;
  /// Dataset columns the model was fitted on or reports about.
  std::vector<std::string> involved_columns;
};

struct MiningParams {
  double t_quant = 2.0;
  double t_qual = 0.85;
  std::size_t min_leaf = 5;
  std::size_t min_rows = 10;
  double min_support = 0.1;
  double min_confidence = 0.6;
  std::size_t max_itemset = 4;
  double trend_alpha = 0.05;
  double period_threshold = 0.5;
  std::size_t silhouette_sample = 2000;
  int kmeans_iterations = 100;
  double kmeans_tolerance = 1e-6;
};

FittedModel fit_tree(const Dataset& d, const std::string& target, int max_depth, const MiningParams& p = {});
FittedModel detect_univariate_outliers(const Column& c, const MiningParams& p = {});
FittedModel detect_bivariate_outliers(const Dataset& d, const std::string& first, const std::string& second,
                                      const tabular::CorrelationMatrix& corr, const MiningParams& p = {});
FittedModel cluster_kmeans(const Dataset& d, int k, Rng& rng, const MiningParams& p = {});
FittedModel analyze_trend(const Column& datetime, const Column& target, const MiningParams& p = {});
FittedModel mine_association_rules(const Dataset& d, const MiningParams& p = {});

struct ModelOutcome {
  FittedModel model;
  Dataset dataset;  // D' (the input dataset plus any appended column)
};

/// Fits the model an action names. Clustering seeds its generator from the
/// dataset's content fingerprint so refits and replays are deterministic.
ModelOutcome apply_model_action(const Dataset& d, const GroundAction& a, const MiningParams& p = {});

// Building blocks, exposed for tests.

/// Mann-Kendall S statistic, O(n log n).
long long mann_kendall_s(const std::vector<double>& x);
/// Two-sided Mann-Kendall z with tie correction.
double mann_kendall_z(const std::vector<double>& x);
/// Mean silhouette of a labelling under Euclidean distance.
double silhouette(const std::vector<std::vector<double>>& points, const std::vector<int>& labels, int k);
/// Cramer's V between two code vectors (negative codes skipped).
double cramers_v(const std::vector<int>& a, const std::vector<int>& b);
/// Macro-averaged F1 over the classes present in `truth`.
double f1_macro(const std::vector<int>& truth, const std::vector<int>& predicted);

/// Textual summary of a fitted model.
std::string render_summary(const FittedModel& m);

/// A reported insight.
struct Pattern {
  std::string summary;
  double interestingness = 0.0;
  std::string model_kind;
  std::vector<std::string> state_path;  // canonical forms from the root, model last
  std::string state_key;
  std::vector<std::string> base_columns;  // original columns behind the involved columns
  std::string target_base;                // analysed column (tree target, outlier column, trend target)
  std::map<std::string, double> metrics;
  std::size_t discovery_iteration = 0;

  bool operator==(const Pattern&) const = default;
};

/// Throws PreconditionError when `intr` is outside [0,1].
Pattern render_pattern(const FittedModel& m, double intr, const Dataset& d, std::vector<std::string> path);

}  // namespace insight::mining
