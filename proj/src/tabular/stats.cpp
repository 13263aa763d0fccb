#include <algorithm>
#include <limits>
#include <map>

#include "insight/error.hpp"
#include "insight/tabular.hpp"

namespace insight::tabular {
namespace {

double shannon_bits(const std::vector<std::size_t>& counts, std::size_t total) {
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

// Counts per distinct value, in first-appearance order of the value.
struct Frequencies {
  std::vector<std::size_t> counts;
  std::vector<std::size_t> first_row;
  std::size_t total = 0;
};

Frequencies frequencies(const Column& c) {
  Frequencies f;
  if (c.type() == ColumnType::Categorical) {
    f.counts.assign(c.levels().size(), 0);
    f.first_row.assign(c.levels().size(), 0);
    const auto codes = c.codes();
    for (std::size_t i = 0; i < codes.size(); ++i) {
      if (codes[i] < 0) continue;
      if (f.counts[codes[i]]++ == 0) f.first_row[codes[i]] = i;
      ++f.total;
    }
    return f;
  }
  std::map<double, std::size_t> slot;
  const auto values = c.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (std::isnan(v)) continue;
    auto [it, inserted] = slot.try_emplace(v == 0.0 ? 0.0 : v, f.counts.size());
    if (inserted) {
      f.counts.push_back(0);
      f.first_row.push_back(i);
    }
    ++f.counts[it->second];
    ++f.total;
  }
  return f;
}

}  // namespace

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw PreconditionError("quantile of an empty sequence");
  q = std::clamp(q, 0.0, 1.0);
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

ColumnStats column_stats(const Column& c) {
  ColumnStats s;
  s.quantitative = is_quantitative(c.type());
  const Frequencies f = frequencies(c);
  if (f.total == 0) throw PreconditionError("column '" + c.name() + "' has no non-null cells");
  s.count = f.total;
  s.unique_count = f.counts.size();
  std::size_t mode = 0;
  for (std::size_t i = 1; i < f.counts.size(); ++i) {
    if (f.counts[i] > f.counts[mode] || (f.counts[i] == f.counts[mode] && f.first_row[i] < f.first_row[mode])) {
      mode = i;
    }
  }
  s.mode_value = c.cell_string(f.first_row[mode]);
  s.mode_frequency = static_cast<double>(f.counts[mode]) / static_cast<double>(f.total);

  if (!s.quantitative) {
    s.entropy = shannon_bits(f.counts, f.total);
    return s;
  }

  std::vector<double> x;
  x.reserve(f.total);
  for (double v : c.values()) {
    if (!std::isnan(v)) x.push_back(v);
  }
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;

  std::sort(x.begin(), x.end());
  const double lo = x.front();
  const double hi = x.back();
  if (lo == hi) return s;  // constant: spread measures and histogram entropy stay 0

  s.skewness = m3 / std::pow(m2, 1.5);
  s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  const double iqr = quantile_sorted(x, 0.75) - quantile_sorted(x, 0.25);
  if (mean != 0.0) {
    s.iqr_to_mean = iqr / std::abs(mean);
  } else {
    s.iqr_to_mean = iqr > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }

  std::vector<std::size_t> bins(10, 0);
  const double width = (hi - lo) / 10.0;
  for (double v : x) {
    std::size_t b = static_cast<std::size_t>((v - lo) / width);
    bins[std::min<std::size_t>(b, 9)]++;
  }
  s.entropy = shannon_bits(bins, x.size());
  return s;
}

double normalized_entropy(const Column& c) {
  const Frequencies f = frequencies(c);
  if (f.total == 0) throw PreconditionError("column '" + c.name() + "' has no non-null cells");
  const std::size_t k = f.counts.size();
  if (k <= 1) return 0.0;
  return std::clamp(shannon_bits(f.counts, f.total) / std::log2(static_cast<double>(k)), 0.0, 1.0);
}

CorrelationMatrix::CorrelationMatrix(std::vector<std::string> names)
    : names_(std::move(names)), values_(names_.size() * names_.size(), 0.0), valid_(values_.size(), 0) {}

std::optional<std::size_t> CorrelationMatrix::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

std::optional<double> CorrelationMatrix::lookup(std::string_view a, std::string_view b) const {
  const auto i = index_of(a);
  const auto j = index_of(b);
  if (!i || !j || !valid(*i, *j)) return std::nullopt;
  return std::abs(at(*i, *j));
}

void CorrelationMatrix::set(std::size_t i, std::size_t j, double v) {
  const std::size_t n = size();
  values_[i * n + j] = v;
  values_[j * n + i] = v;
  valid_[i * n + j] = 1;
  valid_[j * n + i] = 1;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw PreconditionError("pearson: length mismatch");
  std::size_t n = 0;
  double mx = 0.0, my = 0.0;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    ++n;
    mx += x[i];
    my += y[i];
    xmin = std::min(xmin, x[i]);
    xmax = std::max(xmax, x[i]);
    ymin = std::min(ymin, y[i]);
    ymax = std::max(ymax, y[i]);
  }
  if (n < 3 || xmin == xmax || ymin == ymax) return std::nullopt;
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix pearson_matrix(const Dataset& d) {
  std::vector<std::string> names;
  std::vector<std::vector<double>> enc;
  for (const auto& c : d.columns()) {
    names.push_back(c->name());
    enc.push_back(c->encoded());
  }
  CorrelationMatrix m(std::move(names));
  for (std::size_t i = 0; i < enc.size(); ++i) {
    for (std::size_t j = i; j < enc.size(); ++j) {
      auto r = pearson(enc[i], enc[j]);
      if (!r) continue;
      m.set(i, j, i == j ? 1.0 : *r);
    }
  }
  return m;
}

}  // namespace insight::tabular
