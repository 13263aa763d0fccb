#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "insight/error.hpp"
#include "insight/interestingness.hpp"
#include "insight/synth.hpp"
#include "insight/timefmt.hpp"

namespace insight::synth {
namespace {

using tabular::Column;
using tabular::ColumnType;
using Rng = std::mt19937_64;

constexpr std::pair<PlantKind, std::string_view> kPlantNames[] = {
    {PlantKind::Correlation, "correlation"},   {PlantKind::Outlier, "outlier"},
    {PlantKind::Cluster, "cluster"},           {PlantKind::Trend, "trend"},
    {PlantKind::Rule, "rule"},                 {PlantKind::PartialRule, "partial-rule"},
    {PlantKind::TrendWithOutliers, "trend-with-outliers"},
};

constexpr double kYear = 365.0 * 86400.0;
constexpr double kEpoch2020 = 1577836800.0;  // 2020-01-01T00:00:00Z

std::vector<double> normals(Rng& rng, std::size_t n, double mean = 0.0, double sd = 1.0) {
  std::normal_distribution<double> dist(mean, sd);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

std::vector<double> uniforms(Rng& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

double mean_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double sd_of(std::span<const double> v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / v.size());
}

double quantile_of(std::span<const double> x, double q) {
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  return tabular::quantile_sorted(v, q);
}

std::vector<std::optional<std::string>> labels(Rng& rng, std::size_t n, const std::vector<std::string>& levels) {
  std::uniform_int_distribution<std::size_t> pick(0, levels.size() - 1);
  std::vector<std::optional<std::string>> v(n);
  for (auto& x : v) x = levels[pick(rng)];
  return v;
}

search::PatternDescriptor descriptor(std::string name, std::vector<std::string> kinds, std::vector<std::string> bases,
                                     std::map<std::string, double> metrics = {}) {
  return {std::move(name), std::move(kinds), std::move(bases), std::move(metrics)};
}

Dataset subset(const Dataset& d, const std::vector<std::string>& names) {
  std::vector<Column> cols;
  for (const auto& n : names) {
    const auto c = d.find(n);
    if (!c) throw PreconditionError("unknown column '" + n + "'");
    cols.push_back(*c);
  }
  return Dataset::from_columns(std::move(cols));
}

bool verify(const GeneratedDataset& g) {
  for (const auto& s : g.specs) {
    if (s.kind == PlantKind::PartialRule) continue;  // below the threshold by construction
    try {
      if (!(direct_fit(g.dataset, s).interestingness > 0.5)) return false;
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

uint64_t reseed(uint64_t seed, std::size_t attempt) {
  return attempt == 0 ? seed : mix64(seed ^ (0x5851f42d4c957f2dULL * attempt));
}

// Skewed timestamps: dense early, sparse late.
std::vector<double> skewed_times(Rng& rng, std::size_t n) {
  std::vector<double> u = uniforms(rng, n);
  std::sort(u.begin(), u.end());
  std::vector<double> t(n);
  const double lambda = 3.0;
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = kEpoch2020 + std::round(kYear * (std::exp(lambda * u[i]) - 1.0) / (std::exp(lambda) - 1.0));
  }
  return t;
}

GeneratedDataset build_scenario1(int i, uint64_t seed) {
  const std::size_t n = 1000;
  Rng rng(seed);
  std::vector<double> t = skewed_times(rng, n);
  std::vector<double> y(n);
  const double t0 = t.front(), span = t.back() - t.front();
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t r = 0; r < n; ++r) y[r] = 10.0 * (t[r] - t0) / span + noise(rng);
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  std::shuffle(rows.begin(), rows.end(), rng);
  for (std::size_t k = 0; k < 5; ++k) y[rows[k]] += 15.0;

  std::vector<Column> cols;
  cols.push_back(Column::numbers("timestamp", ColumnType::Datetime, t));
  cols.push_back(Column::numbers("signal", ColumnType::Numerical, y));
  for (int k = 1; k <= (i + 1) * 2; ++k) {
    cols.push_back(Column::numbers("noise_" + std::to_string(k), ColumnType::Numerical, normals(rng, n)));
  }

  GeneratedDataset g;
  g.name = "SD_" + std::to_string(i);
  g.dataset = Dataset::from_columns(std::move(cols));
  g.seed = seed;
  PlantedPatternSpec s;
  s.name = "trend-with-outliers(timestamp,signal)";
  s.kind = PlantKind::TrendWithOutliers;
  s.involved_columns = {"timestamp", "signal"};
  s.parameters = {{"outliers", "5"}, {"shift", "15"}};
  s.matchers = {
      descriptor("trend", {"trend"}, {"timestamp", "signal"}, {{"trend", 1.0}, {"outliers", 1.0}}),
      descriptor("linked", {"bivariateOutliers", "univariateOutliers", "associationRules", "decisionTree", "regressionTree"},
                 {"timestamp", "signal"}),
  };
  g.specs.push_back(std::move(s));
  return g;
}

struct Builder {
  Rng rng;
  std::size_t n;
  std::vector<Column> cols;
  std::vector<PlantedPatternSpec> specs;

  const Column& col(const std::string& name) const {
    for (const auto& c : cols) {
      if (c.name() == name) return c;
    }
    throw PreconditionError("unknown column '" + name + "'");
  }
  Column& col_mut(const std::string& name) {
    for (auto& c : cols) {
      if (c.name() == name) return c;
    }
    throw PreconditionError("unknown column '" + name + "'");
  }
};

GeneratedDataset build_scenario2(char which, uint64_t seed, const GeneratorParams& gp) {
  const Scenario2Shape shape = scenario2_shape(which);
  Builder b{Rng(seed), shape.rows, {}, {}};
  const std::size_t n = shape.rows;

  // Random columns cycle through normal, uniform and categorical; the last
  // one is the reference datetime when trends are planted.
  std::vector<std::string> numeric_sources, categorical_randoms;
  std::string reference;
  for (std::size_t k = 1; k <= shape.random; ++k) {
    const std::string name = "random_" + std::to_string(k);
    if (shape.trend > 0 && k == shape.random) {
      std::vector<double> t = uniforms(b.rng, n);
      for (double& x : t) x = std::round(kEpoch2020 + kYear * x);
      b.cols.push_back(Column::numbers(name, ColumnType::Datetime, std::move(t)));
      reference = name;
      continue;
    }
    switch ((k - 1) % 3) {
      case 0:
        b.cols.push_back(Column::numbers(name, ColumnType::Numerical, normals(b.rng, n)));
        numeric_sources.push_back(name);
        break;
      case 1:
        b.cols.push_back(Column::numbers(name, ColumnType::Numerical, uniforms(b.rng, n)));
        numeric_sources.push_back(name);
        break;
      default:
        b.cols.push_back(Column::categorical(name, labels(b.rng, n, {"r1", "r2", "r3", "r4"})));
        categorical_randoms.push_back(name);
        break;
    }
  }
  if (numeric_sources.empty()) throw PreconditionError("scenario shape without a numeric random column");

  // Correlated columns: linear, logarithmic and exponential in turn.
  static const char* kRelations[] = {"linear", "log", "exp"};
  for (std::size_t k = 0; k < shape.correlation; ++k) {
    const std::string source = numeric_sources[k % numeric_sources.size()];
    const std::string relation = kRelations[k % 3];
    const auto x = b.col(source).values();
    const double m = mean_of(x), sd = sd_of(x);
    std::vector<double> z(n), y(n);
    for (std::size_t r = 0; r < n; ++r) z[r] = (x[r] - m) / sd;
    const double zmin = *std::min_element(z.begin(), z.end());
    for (std::size_t r = 0; r < n; ++r) {
      if (relation == "linear") y[r] = 2.0 * z[r] + 1.0;
      else if (relation == "log") y[r] = std::log(z[r] - zmin + 1.0);
      else y[r] = std::exp(z[r] / 3.0);
    }
    const double ysd = sd_of(y);
    std::normal_distribution<double> noise(0.0, gp.correlation_noise * ysd);
    for (double& v : y) v += noise(b.rng);
    const std::string name = "corr_" + std::to_string(k + 1);
    b.cols.push_back(Column::numbers(name, ColumnType::Numerical, std::move(y)));
    PlantedPatternSpec s;
    s.name = relation + "(" + source + "," + name + ")";
    s.kind = PlantKind::Correlation;
    s.involved_columns = {source, name};
    s.parameters = {{"relation", relation}, {"noise", std::to_string(gp.correlation_noise)}};
    s.matchers = {descriptor("related", {"regressionTree", "decisionTree", "bivariateOutliers", "associationRules"},
                             {source, name})};
    b.specs.push_back(std::move(s));
  }

  // Outlier columns: numerical with extreme values, categorical with a dominant level.
  for (std::size_t k = 0; k < shape.outliers; ++k) {
    const std::string name = "outlier_" + std::to_string(k + 1);
    PlantedPatternSpec s;
    s.name = "outliers(" + name + ")";
    s.kind = PlantKind::Outlier;
    s.involved_columns = {name};
    if (k % 2 == 0) {
      std::vector<double> v = normals(b.rng, n);
      const std::size_t count = std::max<std::size_t>(1, static_cast<std::size_t>(std::round(gp.outlier_fraction * n)));
      std::vector<std::size_t> rows(n);
      std::iota(rows.begin(), rows.end(), 0);
      std::shuffle(rows.begin(), rows.end(), b.rng);
      for (std::size_t j = 0; j < count; ++j) v[rows[j]] = (j % 2 ? -1.0 : 1.0) * gp.outlier_magnitude;
      b.cols.push_back(Column::numbers(name, ColumnType::Numerical, std::move(v)));
      s.parameters = {{"type", "numerical"}, {"count", std::to_string(count)}};
    } else {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::vector<std::optional<std::string>> v(n);
      const double rare = (1.0 - gp.dominant_share) / 3.0;
      for (auto& x : v) {
        const double p = u(b.rng);
        x = p < gp.dominant_share ? "dominant"
            : p < gp.dominant_share + rare ? "rare_a"
            : p < gp.dominant_share + 2 * rare ? "rare_b"
            : "rare_c";
      }
      b.cols.push_back(Column::categorical(name, v));
      s.parameters = {{"type", "categorical"}, {"dominant_share", std::to_string(gp.dominant_share)}};
    }
    s.matchers = {descriptor("outliers", {"univariateOutliers", "bivariateOutliers"}, {name})};
    b.specs.push_back(std::move(s));
  }

  // Cluster columns share one group assignment with well-separated centres.
  if (shape.cluster > 0) {
    std::uniform_int_distribution<std::size_t> group(0, shape.cluster_n - 1);
    std::vector<std::size_t> g(n);
    for (auto& x : g) x = group(b.rng);
    std::vector<std::string> names;
    for (std::size_t k = 0; k < shape.cluster; ++k) {
      const std::string name = "cluster_" + std::to_string(k + 1);
      std::vector<double> centre(shape.cluster_n);
      for (std::size_t c = 0; c < shape.cluster_n; ++c) {
        // Centres on a line per dimension, permuted so dimensions differ.
        centre[c] = gp.cluster_separation * static_cast<double>((c + k) % shape.cluster_n);
      }
      std::normal_distribution<double> noise(0.0, 1.0);
      std::vector<double> v(n);
      for (std::size_t r = 0; r < n; ++r) v[r] = centre[g[r]] + noise(b.rng);
      b.cols.push_back(Column::numbers(name, ColumnType::Numerical, std::move(v)));
      names.push_back(name);
    }
    PlantedPatternSpec s;
    s.name = "clusters(" + std::to_string(shape.cluster_n) + ")";
    s.kind = PlantKind::Cluster;
    s.involved_columns = names;
    s.parameters = {{"k", std::to_string(shape.cluster_n)}};
    s.matchers = {descriptor("clusters", {"clustering"}, names)};
    b.specs.push_back(std::move(s));
  }

  // Trend columns against the reference datetime.
  static const char* kTrends[] = {"increasing", "decreasing", "periodic"};
  for (std::size_t k = 0; k < shape.trend; ++k) {
    const std::string name = "trend_" + std::to_string(k + 1);
    const std::string shape_name = kTrends[k % 3];
    const auto t = b.col(reference).values();
    std::normal_distribution<double> noise(0.0, gp.trend_noise);
    std::vector<double> v(n);
    for (std::size_t r = 0; r < n; ++r) {
      const double u = (t[r] - kEpoch2020) / kYear;
      const double base = shape_name == std::string("increasing")   ? 3.0 * u
                          : shape_name == std::string("decreasing") ? -3.0 * u
                                                                     : std::sin(2.0 * M_PI * 12.0 * u);
      v[r] = base + noise(b.rng);
    }
    b.cols.push_back(Column::numbers(name, ColumnType::Numerical, std::move(v)));
    PlantedPatternSpec s;
    s.name = shape_name + "(" + reference + "," + name + ")";
    s.kind = PlantKind::Trend;
    s.involved_columns = {reference, name};
    s.parameters = {{"shape", shape_name}};
    s.matchers = {descriptor("trend", {"trend"}, {reference, name})};
    b.specs.push_back(std::move(s));
  }

  // Rule columns: source above its quantile threshold implies Category_A.
  for (std::size_t k = 0; k < shape.rules; ++k) {
    const std::string name = "rule_" + std::to_string(k + 1);
    const std::string source = numeric_sources[k % numeric_sources.size()];
    const auto x = b.col(source).values();
    const double theta = quantile_of(x, gp.rule_threshold);
    std::vector<std::optional<std::string>> v(n);
    for (std::size_t r = 0; r < n; ++r) v[r] = x[r] > theta ? "Category_A" : "Category_B";
    b.cols.push_back(Column::categorical(name, v));
    PlantedPatternSpec s;
    s.name = source + ">" + timefmt::format_number(theta) + "=>" + name + "=Category_A";
    s.kind = PlantKind::Rule;
    s.involved_columns = {source, name};
    s.parameters = {{"threshold", timefmt::format_number(theta)}, {"category", "Category_A"}};
    s.matchers = {descriptor("rule", {"decisionTree", "associationRules"}, {source, name})};
    b.specs.push_back(std::move(s));
  }

  // Filler random columns when the declared parts fall short of the column count.
  std::size_t filler = 0;
  while (b.cols.size() < shape.columns) {
    b.cols.push_back(
        Column::numbers("filler_" + std::to_string(++filler), ColumnType::Numerical, normals(b.rng, n)));
  }

  // Partial rules overwrite part of an existing categorical random column.
  for (std::size_t k = 0; k < shape.partial_rules; ++k) {
    if (categorical_randoms.empty()) throw PreconditionError("partial rule without a categorical random column");
    const std::string target = categorical_randoms[k % categorical_randoms.size()];
    const std::string source = numeric_sources[(k + 1) % numeric_sources.size()];
    const auto x = b.col(source).values();
    const double theta = quantile_of(x, gp.partial_threshold);
    const std::string category = "Partial_" + std::to_string(k + 1);
    Column& tc = b.col_mut(target);
    std::vector<std::optional<std::string>> v(n);
    for (std::size_t r = 0; r < n; ++r) v[r] = tc.cell_string(r);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t r = 0; r < n; ++r) {
      if (x[r] > theta && u(b.rng) < gp.partial_compliance) v[r] = category;
    }
    tc = Column::categorical(target, v);
    PlantedPatternSpec s;
    s.name = source + ">" + timefmt::format_number(theta) + "~>" + target + "=" + category;
    s.kind = PlantKind::PartialRule;
    s.involved_columns = {source, target};
    s.parameters = {{"threshold", timefmt::format_number(theta)},
                    {"category", category},
                    {"compliance", std::to_string(gp.partial_compliance)}};
    s.matchers = {descriptor("rule", {"decisionTree", "associationRules"}, {source, target})};
    b.specs.push_back(std::move(s));
  }

  GeneratedDataset g;
  g.name = std::string("SD_") + which;
  g.dataset = Dataset::from_columns(std::move(b.cols));
  g.specs = std::move(b.specs);
  g.seed = seed;
  return g;
}

}  // namespace

std::string_view to_string(PlantKind k) {
  for (const auto& [kind, name] : kPlantNames) {
    if (kind == k) return name;
  }
  return "unknown";
}

std::optional<PlantKind> parse_plant_kind(std::string_view s) {
  for (const auto& [kind, name] : kPlantNames) {
    if (name == s) return kind;
  }
  return std::nullopt;
}

bool PlantedPatternSpec::matches(const Pattern& p) const {
  return std::any_of(matchers.begin(), matchers.end(), [&](const auto& m) { return m.matches(p); });
}

Scenario2Shape scenario2_shape(char which) {
  switch (std::toupper(static_cast<unsigned char>(which))) {
    case 'A': return {5, 1000, 1, 1, 1, 1, 2, 0, 1, 0};
    case 'B': return {10, 5000, 4, 2, 2, 1, 3, 1, 0, 1};
    case 'C': return {15, 10000, 8, 1, 2, 1, 5, 1, 1, 2};
    case 'D': return {20, 20000, 10, 2, 3, 2, 5, 1, 2, 2};
    case 'E': return {30, 30000, 14, 4, 4, 2, 6, 2, 4, 3};
    default: throw InputError(std::string("unknown scenario-2 dataset '") + which + "' (expected A..E)");
  }
}

GeneratedDataset generate_scenario1(int i, uint64_t seed, const GeneratorParams& params) {
  if (i < 1 || i > 10) throw InputError("scenario-1 index must lie in 1..10");
  for (std::size_t attempt = 0; attempt <= params.max_reseeds; ++attempt) {
    GeneratedDataset g = build_scenario1(i, reseed(seed, attempt));
    if (verify(g)) return g;
  }
  throw Error("scenario-1 plant could not be verified after reseeding");
}

GeneratedDataset generate_scenario2(char which, uint64_t seed, const GeneratorParams& params) {
  const char w = static_cast<char>(std::toupper(static_cast<unsigned char>(which)));
  scenario2_shape(w);
  for (std::size_t attempt = 0; attempt <= params.max_reseeds; ++attempt) {
    GeneratedDataset g = build_scenario2(w, reseed(seed, attempt), params);
    if (verify(g)) return g;
  }
  throw Error(std::string("scenario-2 dataset ") + w + " could not be verified after reseeding");
}

DirectFit direct_fit(const Dataset& d, const PlantedPatternSpec& spec) {
  mining::FittedModel m;
  Dataset fitted;
  switch (spec.kind) {
    case PlantKind::Correlation: {
      fitted = subset(d, spec.involved_columns);
      m = mining::fit_tree(fitted, spec.involved_columns.at(1), 3);
      break;
    }
    case PlantKind::Outlier:
      fitted = subset(d, spec.involved_columns);
      m = mining::detect_univariate_outliers(*fitted.find(spec.involved_columns.at(0)));
      break;
    case PlantKind::Cluster: {
      fitted = subset(d, spec.involved_columns);
      Rng rng(0x1234abcdULL);
      m = mining::cluster_kmeans(fitted, std::stoi(spec.parameters.at("k")), rng);
      break;
    }
    case PlantKind::Trend:
    case PlantKind::TrendWithOutliers:
      fitted = subset(d, spec.involved_columns);
      m = mining::analyze_trend(*fitted.find(spec.involved_columns.at(0)), *fitted.find(spec.involved_columns.at(1)));
      break;
    case PlantKind::Rule:
    case PlantKind::PartialRule:
      fitted = subset(d, spec.involved_columns);
      m = mining::fit_tree(fitted, spec.involved_columns.at(1), 2);
      break;
  }
  DirectFit out;
  out.interestingness = intr::interestingness(m);
  out.pattern = mining::render_pattern(m, out.interestingness, fitted, {m.action.canonical()});
  out.model = std::move(m);
  return out;
}

RunEvaluation evaluate_run(const std::vector<Pattern>& patterns, const std::vector<PlantedPatternSpec>& specs) {
  RunEvaluation ev;
  ev.per_spec.resize(specs.size());
  ev.total = patterns.size();
  for (const auto& p : patterns) {
    bool expected = false;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      if (specs[i].matches(p)) {
        ++ev.per_spec[i].count;
        expected = true;
      }
    }
    if (!expected) ++ev.other_count;
  }
  for (auto& m : ev.per_spec) m.found = std::min<std::size_t>(m.count, 1);
  return ev;
}

double expectation(const std::vector<double>& per_seed) {
  if (per_seed.empty()) return 0.0;
  return std::accumulate(per_seed.begin(), per_seed.end(), 0.0) / static_cast<double>(per_seed.size());
}

std::map<std::string, double> rank_configurations(const ScoreTable& table, bool higher_is_better) {
  std::set<std::string> configs, datasets;
  for (const auto& [key, _] : table) {
    configs.insert(key.first);
    datasets.insert(key.second);
  }
  std::map<std::string, double> sum;
  for (const auto& ds : datasets) {
    std::vector<std::pair<double, std::string>> scores;
    for (const auto& c : configs) {
      auto it = table.find({c, ds});
      if (it == table.end()) throw InputError("missing score for configuration " + c + " on dataset " + ds);
      scores.emplace_back(it->second, c);
    }
    std::sort(scores.begin(), scores.end(), [&](const auto& a, const auto& b) {
      return higher_is_better ? a.first > b.first : a.first < b.first;
    });
    for (std::size_t i = 0; i < scores.size();) {
      std::size_t j = i;
      while (j < scores.size() && scores[j].first == scores[i].first) ++j;
      const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
      for (std::size_t k = i; k < j; ++k) sum[scores[k].second] += rank;
      i = j;
    }
  }
  std::map<std::string, double> out;
  for (const auto& c : configs) out[c] = datasets.empty() ? 0.0 : sum[c] / static_cast<double>(datasets.size());
  return out;
}

}  // namespace insight::synth
