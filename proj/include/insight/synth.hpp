#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "insight/mining.hpp"
#include "insight/search.hpp"
#include "insight/tabular.hpp"

namespace insight::synth {

using mining::Pattern;
using tabular::Dataset;

enum class PlantKind { Correlation, Outlier, Cluster, Trend, Rule, PartialRule, TrendWithOutliers };

std::string_view to_string(PlantKind k);
std::optional<PlantKind> parse_plant_kind(std::string_view s);

/// A pattern planted by a generator and the predicates that recognise it.
struct PlantedPatternSpec {
  std::string name;
  PlantKind kind = PlantKind::Correlation;
  std::vector<std::string> involved_columns;
  std::map<std::string, std::string> parameters;
  std::vector<search::PatternDescriptor> matchers;  // a pattern matching any of them is expected

  bool matches(const Pattern& p) const;
};

struct GeneratedDataset {
  std::string name;
  Dataset dataset;
  std::vector<PlantedPatternSpec> specs;
  uint64_t seed = 0;  // seed actually used after plant verification
};

/// Declared shape of a scenario-2 dataset.
struct Scenario2Shape {
  std::size_t columns = 0;
  std::size_t rows = 0;
  std::size_t random = 0;
  std::size_t correlation = 0;
  std::size_t outliers = 0;
  std::size_t cluster = 0;
  std::size_t cluster_n = 0;
  std::size_t trend = 0;
  std::size_t rules = 0;
  std::size_t partial_rules = 0;
};

/// Throws InputError unless `which` is one of A..E.
Scenario2Shape scenario2_shape(char which);

struct GeneratorParams {
  double correlation_noise = 0.05;   // noise sd relative to the signal's sd
  double outlier_fraction = 0.005;
  double outlier_magnitude = 7.0;    // in standard deviations
  double dominant_share = 0.93;      // categorical outlier columns
  double cluster_separation = 10.0;  // centre spacing in cluster sd units
  double trend_noise = 0.3;
  double rule_threshold = 0.7;
  double partial_threshold = 0.5;
  double partial_compliance = 0.6;
  std::size_t max_reseeds = 20;
};

/// 1000 rows: a skewed datetime, a signal increasing with time with five
/// injected outliers, and (i + 1) * 2 standard-normal noise columns.
GeneratedDataset generate_scenario1(int i, uint64_t seed, const GeneratorParams& params = {});

/// Dataset with the declared scenario-2 shape for `which` in A..E.
GeneratedDataset generate_scenario2(char which, uint64_t seed, const GeneratorParams& params = {});

/// Fits the model that should reveal a plant directly on its signal columns.
struct DirectFit {
  mining::FittedModel model;
  Pattern pattern;
  double interestingness = 0.0;
};
DirectFit direct_fit(const Dataset& d, const PlantedPatternSpec& spec);

struct RunEvaluation {
  std::vector<search::PatternMetrics> per_spec;
  std::size_t other_count = 0;  // reported patterns matching no spec
  std::size_t total = 0;
};

RunEvaluation evaluate_run(const std::vector<Pattern>& patterns, const std::vector<PlantedPatternSpec>& specs);

/// Mean of per-seed found (or count) values.
double expectation(const std::vector<double>& per_seed);

using ScoreTable = std::map<std::pair<std::string, std::string>, double>;  // (config, dataset) -> score

/// Per-dataset ranks (1 = best, ties share the mean rank) averaged over
/// datasets. Throws InputError when a (config, dataset) cell is missing.
std::map<std::string, double> rank_configurations(const ScoreTable& table, bool higher_is_better = true);

}  // namespace insight::synth
