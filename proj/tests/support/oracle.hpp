#pragma once

// Naive reference computations used to cross-check the library. Written
// directly from the textbook definitions, sharing no code with src/.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

inline double mean(const std::vector<double>& x) {
  long double s = 0;
  for (double v : x) s += v;
  return static_cast<double>(s / x.size());
}

inline double central_moment(const std::vector<double>& x, int k) {
  const double m = mean(x);
  long double s = 0;
  for (double v : x) s += std::pow(static_cast<long double>(v - m), k);
  return static_cast<double>(s / x.size());
}

inline double skewness(const std::vector<double>& x) {
  return central_moment(x, 3) / std::pow(central_moment(x, 2), 1.5);
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

inline double normalized_entropy(const std::vector<std::string>& v) {
  std::map<std::string, int> counts;
  for (const auto& s : v) ++counts[s];
  if (counts.size() < 2) return 0.0;
  double h = 0;
  for (const auto& [_, c] : counts) {
    const double p = static_cast<double>(c) / v.size();
    h -= p * std::log2(p);
  }
  return h / std::log2(static_cast<double>(counts.size()));
}

inline double zscore(const std::vector<double>& x, double v) {
  return std::abs(v - mean(x)) / std::sqrt(central_moment(x, 2));
}

inline double uct(double q, double n_parent, double n_edge, double c) {
  return q + c * std::sqrt(std::log(n_parent) / n_edge);
}

inline double spuct(double q, double var, double n_parent, double n_edge, double c, double d) {
  return uct(q, n_parent, n_edge, c) + std::sqrt(var + d / n_edge);
}

inline double kulc(double a, double b, double ab) { return 0.5 * (ab / a + ab / b); }
inline double imbalance(double a, double b, double ab) { return std::abs(a - b) / (a + b - ab); }

/// Brute-force association rules over (column, value) items, one item per column per itemset.
struct BruteRule {
  std::set<std::pair<std::string, std::string>> antecedent, consequent;
  double sup_a, sup_b, sup_ab, kulc, ir;
};

inline std::vector<BruteRule> brute_rules(const std::vector<std::string>& columns,
                                          const std::vector<std::vector<std::string>>& rows, double min_support,
                                          double min_confidence, std::size_t max_size) {
  using Item = std::pair<std::string, std::string>;
  std::set<Item> items;
  for (const auto& r : rows)
    for (std::size_t c = 0; c < columns.size(); ++c)
      if (!r[c].empty()) items.insert({columns[c], r[c]});
  const std::vector<Item> all(items.begin(), items.end());
  const double n = static_cast<double>(rows.size());
  auto support = [&](const std::set<Item>& s) {
    std::size_t hits = 0;
    for (const auto& r : rows) {
      bool ok = true;
      for (const auto& [col, val] : s) {
        const auto c = std::find(columns.begin(), columns.end(), col) - columns.begin();
        if (r[c] != val) ok = false;
      }
      hits += ok;
    }
    return hits / n;
  };
  std::vector<std::set<Item>> frequent;
  const std::size_t m = all.size();
  for (unsigned long mask = 1; mask < (1ul << m); ++mask) {
    std::set<Item> s;
    std::set<std::string> cols;
    bool ok = true;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1ul << i)) {
        if (!cols.insert(all[i].first).second) ok = false;
        s.insert(all[i]);
      }
    }
    if (!ok || s.size() < 2 || s.size() > max_size) continue;
    if (support(s) + 1e-12 < min_support) continue;
    frequent.push_back(s);
  }
  std::vector<BruteRule> out;
  for (const auto& s : frequent) {
    const std::vector<Item> v(s.begin(), s.end());
    for (unsigned long mask = 1; mask + 1 < (1ul << v.size()); ++mask) {
      std::set<Item> a, b;
      for (std::size_t i = 0; i < v.size(); ++i) ((mask & (1ul << i)) ? a : b).insert(v[i]);
      const double sa = support(a), sb = support(b), sab = support(s);
      if (sab / sa + 1e-12 < min_confidence) continue;
      out.push_back({a, b, sa, sb, sab, kulc(sa, sb, sab), imbalance(sa, sb, sab)});
    }
  }
  return out;
}

}  // namespace oracle
