#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "insight/error.hpp"
#include "insight/mining.hpp"

namespace insight::mining {
namespace {

struct Problem {
  bool classification = true;
  std::size_t classes = 0;
  std::vector<double> y;                  // class code or value, per used row
  std::vector<std::vector<double>> x;     // per feature, per used row (NaN = null)
  std::vector<std::vector<uint32_t>> order;  // per feature: non-null rows sorted by value
  std::size_t min_leaf = 5;
};

struct Impurity {
  // classification: class counts; regression: sum and sum of squares
  std::vector<double> counts;
  double n = 0.0, sum = 0.0, sq = 0.0;

  void add(const Problem& p, uint32_t r, double w = 1.0) {
    n += w;
    if (p.classification) {
      counts[static_cast<std::size_t>(p.y[r])] += w;
    } else {
      sum += w * p.y[r];
      sq += w * p.y[r] * p.y[r];
    }
  }
  // Gini * n, or SSE.
  double cost(const Problem& p) const {
    if (n <= 0.0) return 0.0;
    if (p.classification) {
      double g = 0.0;
      for (double c : counts) g += c * c;
      return n - g / n;
    }
    return std::max(0.0, sq - sum * sum / n);
  }
};

Impurity empty_impurity(const Problem& p) {
  Impurity i;
  if (p.classification) i.counts.assign(p.classes, 0.0);
  return i;
}

double leaf_value(const Problem& p, const std::vector<uint32_t>& rows) {
  if (p.classification) {
    std::vector<std::size_t> counts(p.classes, 0);
    for (uint32_t r : rows) ++counts[static_cast<std::size_t>(p.y[r])];
    return static_cast<double>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  }
  double s = 0.0;
  for (uint32_t r : rows) s += p.y[r];
  return s / static_cast<double>(rows.size());
}

int grow(const Problem& p, std::vector<TreeNode>& nodes, const std::vector<uint32_t>& rows,
         std::vector<uint8_t>& member, int depth, int max_depth) {
  const int id = static_cast<int>(nodes.size());
  nodes.push_back({});
  nodes[id].rows = rows.size();
  nodes[id].value = leaf_value(p, rows);
  if (depth >= max_depth || rows.size() < 2 * p.min_leaf) return id;

  Impurity all = empty_impurity(p);
  for (uint32_t r : rows) all.add(p, r);
  const double parent_cost = all.cost(p);
  if (parent_cost <= 1e-12) return id;

  int best_feature = -1;
  double best_threshold = 0.0;
  double best_cost = parent_cost - 1e-12;
  for (std::size_t f = 0; f < p.x.size(); ++f) {
    // Nulls always go right: start with every member row on the right.
    Impurity left = empty_impurity(p);
    Impurity right = all;
    std::size_t seen = 0;
    const auto& order = p.order[f];
    const auto& xf = p.x[f];
    for (std::size_t i = 0; i < order.size(); ++i) {
      const uint32_t r = order[i];
      if (!member[r]) continue;
      left.add(p, r);
      right.add(p, r, -1.0);
      ++seen;
      // Next member row in sorted order, to place a threshold between distinct values.
      std::size_t j = i + 1;
      while (j < order.size() && !member[order[j]]) ++j;
      if (j == order.size()) break;
      const double here = xf[r];
      const double next = xf[order[j]];
      if (next == here) continue;
      if (seen < p.min_leaf || rows.size() - seen < p.min_leaf) continue;
      const double cost = left.cost(p) + right.cost(p);
      if (cost < best_cost) {
        best_cost = cost;
        best_feature = static_cast<int>(f);
        best_threshold = here + (next - here) / 2.0;
      }
    }
  }
  if (best_feature < 0) return id;

  std::vector<uint32_t> lrows, rrows;
  for (uint32_t r : rows) {
    const double v = p.x[best_feature][r];
    (!std::isnan(v) && v <= best_threshold ? lrows : rrows).push_back(r);
  }
  nodes[id].feature = best_feature;
  nodes[id].threshold = best_threshold;

  for (uint32_t r : rrows) member[r] = 0;
  const int l = grow(p, nodes, lrows, member, depth + 1, max_depth);
  for (uint32_t r : rrows) member[r] = 1;
  for (uint32_t r : lrows) member[r] = 0;
  const int rgt = grow(p, nodes, rrows, member, depth + 1, max_depth);
  for (uint32_t r : lrows) member[r] = 1;
  nodes[id].left = l;
  nodes[id].right = rgt;
  return id;
}

double predict(const Problem& p, const std::vector<TreeNode>& nodes, uint32_t r) {
  int id = 0;
  while (nodes[id].feature >= 0) {
    const double v = p.x[nodes[id].feature][r];
    id = !std::isnan(v) && v <= nodes[id].threshold ? nodes[id].left : nodes[id].right;
  }
  return nodes[id].value;
}

double normalized_code_entropy(const std::vector<int>& codes) {
  std::vector<std::size_t> counts;
  for (int c : codes) {
    if (static_cast<std::size_t>(c) >= counts.size()) counts.resize(c + 1, 0);
    ++counts[c];
  }
  std::size_t k = 0;
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    ++k;
    const double q = static_cast<double>(c) / static_cast<double>(codes.size());
    h -= q * std::log(q);
  }
  if (k <= 1) return 0.0;
  return std::clamp(h / std::log(static_cast<double>(k)), 0.0, 1.0);
}

}  // namespace

FittedModel fit_tree(const Dataset& d, const std::string& target, int max_depth, const MiningParams& params) {
  const auto t = d.find(target);
  if (!t) throw MiningError("unknown target '" + target + "'");
  if (max_depth < 1) throw MiningError("tree depth must be positive");

  Problem p;
  p.min_leaf = params.min_leaf;
  p.classification = tabular::is_qualitative(t->type());
  std::vector<uint32_t> used;
  for (std::size_t r = 0; r < d.row_count(); ++r) {
    if (!t->is_null(r)) used.push_back(static_cast<uint32_t>(r));
  }
  if (used.size() < params.min_rows) {
    throw MiningError("tree on '" + target + "' needs at least " + std::to_string(params.min_rows) + " rows");
  }

  TreeArtifacts art;
  art.target = target;
  art.classification = p.classification;
  std::vector<int> truth;
  if (p.classification) {
    // Compact class codes in first-appearance order.
    std::vector<int> remap;
    for (uint32_t r : used) {
      const auto raw = static_cast<std::size_t>(t->numeric(r));
      if (raw >= remap.size()) remap.resize(raw + 1, -1);
      if (remap[raw] < 0) {
        remap[raw] = static_cast<int>(art.classes.size());
        art.classes.push_back(t->cell_string(r));
      }
      truth.push_back(remap[raw]);
      p.y.push_back(remap[raw]);
    }
    p.classes = art.classes.size();
    if (p.classes < 2) throw MiningError("target '" + target + "' is constant");
  } else {
    for (uint32_t r : used) p.y.push_back(t->values()[r]);
    if (*std::min_element(p.y.begin(), p.y.end()) == *std::max_element(p.y.begin(), p.y.end())) {
      throw MiningError("target '" + target + "' is constant");
    }
  }

  for (const auto& c : d.columns()) {
    if (c == t) continue;
    std::vector<double> xs;
    xs.reserve(used.size());
    for (uint32_t r : used) xs.push_back(c->numeric(r));
    std::vector<uint32_t> order;
    for (uint32_t i = 0; i < xs.size(); ++i) {
      if (!std::isnan(xs[i])) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) { return xs[a] < xs[b]; });
    art.features.push_back(c->name());
    p.x.push_back(std::move(xs));
    p.order.push_back(std::move(order));
  }
  if (p.x.empty()) throw MiningError("tree on '" + target + "' has no features");

  std::vector<uint32_t> rows(used.size());
  std::iota(rows.begin(), rows.end(), 0u);
  std::vector<uint8_t> member(used.size(), 1);
  grow(p, art.nodes, rows, member, 0, max_depth);

  std::vector<double> pred(rows.size());
  for (uint32_t r : rows) pred[r] = predict(p, art.nodes, r);

  if (p.classification) {
    std::vector<int> predicted(pred.begin(), pred.end());
    art.accuracy = f1_macro(truth, predicted);
    std::set<int> leaf_classes;
    for (const auto& n : art.nodes) {
      if (n.feature < 0) leaf_classes.insert(static_cast<int>(n.value));
    }
    art.predicted_classes = leaf_classes.size();
    art.coverage = static_cast<double>(leaf_classes.size()) / static_cast<double>(p.classes);
    art.target_entropy = normalized_code_entropy(truth);
  } else {
    double mean = 0.0;
    for (double v : p.y) mean += v;
    mean /= static_cast<double>(p.y.size());
    double sse = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < p.y.size(); ++i) {
      sse += (p.y[i] - pred[i]) * (p.y[i] - pred[i]);
      sst += (p.y[i] - mean) * (p.y[i] - mean);
    }
    art.accuracy = sst > 0.0 ? 1.0 - sse / sst : 0.0;
    art.coverage = 1.0;
    const double lo = *std::min_element(p.y.begin(), p.y.end());
    const double hi = *std::max_element(p.y.begin(), p.y.end());
    std::vector<int> bins;
    for (double v : p.y) bins.push_back(std::min(9, static_cast<int>((v - lo) / (hi - lo) * 10.0)));
    art.target_entropy = normalized_code_entropy(bins);
  }
  for (const auto& n : art.nodes) {
    if (n.feature < 0) continue;
    const auto& name = art.features[n.feature];
    if (std::find(art.used_features.begin(), art.used_features.end(), name) == art.used_features.end()) {
      art.used_features.push_back(name);
    }
  }

  FittedModel m;
  m.kind = p.classification ? ModelKind::DecisionTree : ModelKind::RegressionTree;
  m.action = GroundAction(actions::ActionKind::DecisionTree, {{"target", target}, {"depth", std::to_string(max_depth)}});
  m.involved_columns.push_back(target);
  for (const auto& f : art.used_features) m.involved_columns.push_back(f);
  m.artifacts = std::move(art);
  return m;
}

}  // namespace insight::mining
