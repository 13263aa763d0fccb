#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "insight/error.hpp"
#include "insight/mining.hpp"

namespace insight::mining {

long long mann_kendall_s(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  // Fenwick tree over value ranks of the prefix seen so far.
  std::vector<long long> tree(sorted.size() + 1, 0);
  auto add = [&](std::size_t i) {
    for (++i; i < tree.size(); i += i & (~i + 1)) ++tree[i];
  };
  auto prefix = [&](std::size_t i) {  // count of ranks < i
    long long s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree[i];
    return s;
  };
  long long s = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto rank = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), x[j]) - sorted.begin());
    const long long smaller = prefix(rank);
    const long long not_greater = prefix(rank + 1);
    const long long greater = static_cast<long long>(j) - not_greater;
    s += smaller - greater;
    add(rank);
  }
  return s;
}

double mann_kendall_z(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 3) return 0.0;
  const long long s = mann_kendall_s(x);
  std::map<double, std::size_t> ties;
  for (double v : x) ++ties[v];
  double var = n * (n - 1) * (2 * n + 5);
  for (const auto& [_, t] : ties) {
    const double tt = static_cast<double>(t);
    var -= tt * (tt - 1) * (2 * tt + 5);
  }
  var /= 18.0;
  if (var <= 0.0) return 0.0;
  if (s > 0) return (static_cast<double>(s) - 1.0) / std::sqrt(var);
  if (s < 0) return (static_cast<double>(s) + 1.0) / std::sqrt(var);
  return 0.0;
}

double silhouette(const std::vector<std::vector<double>>& points, const std::vector<int>& labels, int k) {
  const std::size_t n = points.size();
  if (n != labels.size()) throw PreconditionError("silhouette: labels and points differ in length");
  if (n == 0 || k < 2) return 0.0;
  std::vector<std::size_t> sizes(k, 0);
  for (int l : labels) ++sizes[l];
  double total = 0.0;
  std::vector<double> sums(k);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double d2 = 0.0;
      const auto& a = points[i];
      const auto& b = points[j];
      for (std::size_t f = 0; f < a.size(); ++f) d2 += (a[f] - b[f]) * (a[f] - b[f]);
      sums[labels[j]] += std::sqrt(d2);
    }
    const int own = labels[i];
    if (sizes[own] <= 1) continue;  // singleton clusters score 0
    const double a = sums[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == own || sizes[c] == 0) continue;
      b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    }
    if (!std::isfinite(b)) continue;
    const double m = std::max(a, b);
    if (m > 0.0) total += (b - a) / m;
  }
  return std::clamp(total / static_cast<double>(n), -1.0, 1.0);
}

double cramers_v(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw PreconditionError("cramers_v: length mismatch");
  std::map<int, std::size_t> ra, rb;
  std::map<std::pair<int, int>, double> cells;
  double n = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || b[i] < 0) continue;
    ++ra[a[i]];
    ++rb[b[i]];
    cells[{a[i], b[i]}] += 1.0;
    n += 1.0;
  }
  const std::size_t r = ra.size();
  const std::size_t c = rb.size();
  if (n == 0.0 || r < 2 || c < 2) return 0.0;
  double chi2 = 0.0;
  for (const auto& [x, nx] : ra) {
    for (const auto& [y, ny] : rb) {
      const double expected = static_cast<double>(nx) * static_cast<double>(ny) / n;
      auto it = cells.find({x, y});
      const double observed = it == cells.end() ? 0.0 : it->second;
      chi2 += (observed - expected) * (observed - expected) / expected;
    }
  }
  const double denom = n * static_cast<double>(std::min(r, c) - 1);
  return std::clamp(std::sqrt(chi2 / denom), 0.0, 1.0);
}

double f1_macro(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) throw PreconditionError("f1_macro: length mismatch");
  std::set<int> classes(truth.begin(), truth.end());
  if (classes.empty()) return 0.0;
  double sum = 0.0;
  for (int c : classes) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const bool t = truth[i] == c;
      const bool p = predicted[i] == c;
      if (t && p) ++tp;
      else if (p) ++fp;
      else if (t) ++fn;
    }
    if (tp == 0) continue;
    const double precision = tp / (tp + fp);
    const double recall = tp / (tp + fn);
    sum += 2 * precision * recall / (precision + recall);
  }
  return sum / static_cast<double>(classes.size());
}

}  // namespace insight::mining
