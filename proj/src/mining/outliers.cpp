#include <algorithm>
#include <cmath>
#include <map>

#include "insight/error.hpp"
#include "insight/mining.hpp"

namespace insight::mining {

using tabular::ColumnType;

namespace {

struct MeanStd {
  double mean = 0.0;
  double sd = 0.0;
};

MeanStd mean_std(const std::vector<double>& x) {
  MeanStd m;
  if (x.empty()) return m;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  m.sd = std::sqrt(ss / static_cast<double>(x.size()));
  return m;
}

std::shared_ptr<const Column> flag_column(const std::string& name, const Column& like,
                                          const std::vector<bool>& flagged, const std::vector<bool>& known) {
  std::vector<std::optional<bool>> v(like.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (known[i]) v[i] = flagged[i];
  }
  return std::make_shared<const Column>(Column::booleans(name, std::move(v)));
}

double gini(const std::vector<double>& counts) {
  double n = 0.0, s = 0.0;
  for (double c : counts) {
    n += c;
    s += c * c;
  }
  return n > 0.0 ? 1.0 - s / (n * n) : 0.0;
}

}  // namespace

FittedModel detect_univariate_outliers(const Column& c, const MiningParams& p) {
  UnivariateArtifacts art;
  art.column = c.name();
  art.quantitative = tabular::is_quantitative(c.type());
  std::vector<bool> flagged(c.size(), false), known(c.size(), false);
  for (std::size_t i = 0; i < c.size(); ++i) known[i] = !c.is_null(i);
  const std::size_t count = c.non_null_count();

  if (count >= 3) {
    if (art.quantitative) {
      std::vector<double> x;
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (known[i]) x.push_back(c.values()[i]);
      }
      const MeanStd ms = mean_std(x);
      art.mean = ms.mean;
      art.stddev = ms.sd;
      if (ms.sd > 0.0) {
        std::map<double, std::size_t> hits;
        for (std::size_t i = 0; i < c.size(); ++i) {
          if (!known[i]) continue;
          const double z = std::abs(c.values()[i] - ms.mean) / ms.sd;
          if (z > p.t_quant) {
            flagged[i] = true;
            auto [it, inserted] = hits.try_emplace(c.values()[i], art.flagged.size());
            if (inserted) art.flagged.push_back({c.cell_string(i), z, 0});
            ++art.flagged[it->second].count;
          }
        }
      }
    } else {
      const auto stats = tabular::column_stats(c);
      art.mode_value = stats.mode_value;
      art.mode_frequency = stats.mode_frequency;
      if (stats.mode_frequency > p.t_qual) {
        std::map<std::string, std::size_t> hits;
        for (std::size_t i = 0; i < c.size(); ++i) {
          if (!known[i]) continue;
          const std::string v = c.cell_string(i);
          if (v == stats.mode_value) continue;
          flagged[i] = true;
          auto [it, inserted] = hits.try_emplace(v, art.flagged.size());
          if (inserted) art.flagged.push_back({v, 0.0, 0});
          ++art.flagged[it->second].count;
        }
        for (auto& f : art.flagged) f.score = static_cast<double>(f.count) / static_cast<double>(count);
      }
    }
  }
  // Strongest first: largest z, or rarest value.
  std::stable_sort(art.flagged.begin(), art.flagged.end(), [&](const FlaggedValue& a, const FlaggedValue& b) {
    return art.quantitative ? a.score > b.score : a.score < b.score;
  });

  FittedModel m;
  m.kind = ModelKind::UnivariateOutliers;
  m.action = GroundAction(actions::ActionKind::UnaryOutliers, {{"column", c.name()}});
  m.appended = flag_column(m.action.canonical(), c, flagged, known);
  m.involved_columns = {c.name()};
  m.artifacts = std::move(art);
  return m;
}

FittedModel detect_bivariate_outliers(const Dataset& d, const std::string& first, const std::string& second,
                                      const tabular::CorrelationMatrix& corr, const MiningParams& p) {
  const auto a = d.find(first);
  const auto b = d.find(second);
  if (!a || !b) throw MiningError("unknown column in pair (" + first + ", " + second + ")");
  const auto ia = corr.index_of(first);
  const auto ib = corr.index_of(second);
  if (!ia || !ib || !corr.valid(*ia, *ib)) {
    throw MiningError("no valid correlation for (" + first + ", " + second + ")");
  }
  BivariateArtifacts art;
  art.first = first;
  art.second = second;
  art.correlation = corr.at(*ia, *ib);
  art.qualitative_pair = tabular::is_qualitative(a->type()) && tabular::is_qualitative(b->type());

  const std::size_t n = d.row_count();
  std::vector<bool> flagged(n, false), known(n, false);
  for (std::size_t r = 0; r < n; ++r) known[r] = !a->is_null(r) && !b->is_null(r);

  auto add_pair = [&](const std::string& va, const std::string& vb, double z) {
    const double score = std::clamp(1.0 - p.t_quant / z, 0.0, 1.0);
    for (auto& f : art.flagged) {
      if (f.first_value == va && f.second_value == vb) {
        if (z > f.z) {
          f.z = z;
          f.score = score;
        }
        return;
      }
    }
    art.flagged.push_back({va, vb, z, score});
  };

  if (art.qualitative_pair) {
    std::vector<int> ca, cb;
    std::size_t ka = 0, kb = 0;
    for (std::size_t r = 0; r < n; ++r) {
      const int x = known[r] ? static_cast<int>(a->numeric(r)) : -1;
      const int y = known[r] ? static_cast<int>(b->numeric(r)) : -1;
      ca.push_back(x);
      cb.push_back(y);
      if (x >= 0) ka = std::max<std::size_t>(ka, x + 1);
      if (y >= 0) kb = std::max<std::size_t>(kb, y + 1);
    }
    std::vector<std::vector<double>> table(ka, std::vector<double>(kb, 0.0));
    std::vector<std::size_t> sample_a(ka, 0), sample_b(kb, 0);  // a row holding each value
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      if (ca[r] < 0) continue;
      table[ca[r]][cb[r]] += 1.0;
      sample_a[ca[r]] = r;
      sample_b[cb[r]] = r;
      total += 1.0;
    }
    std::vector<double> row_tot(ka, 0.0), col_tot(kb, 0.0);
    for (std::size_t i = 0; i < ka; ++i) {
      for (std::size_t j = 0; j < kb; ++j) {
        row_tot[i] += table[i][j];
        col_tot[j] += table[i][j];
      }
    }
    auto deviating = [&](std::size_t i, std::size_t j) {
      return std::abs(table[i][j] - row_tot[i] * col_tot[j] / total);
    };
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    // Rows of the contingency table.
    {
      std::vector<double> g;
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < ka; ++i) {
        if (row_tot[i] == 0.0) continue;
        g.push_back(gini(table[i]));
        idx.push_back(i);
      }
      const MeanStd ms = mean_std(g);
      for (std::size_t t = 0; ms.sd > 0.0 && t < g.size(); ++t) {
        const double z = std::abs(g[t] - ms.mean) / ms.sd;
        if (z <= p.t_quant) continue;
        const std::size_t i = idx[t];
        std::size_t best = 0;
        for (std::size_t j = 1; j < kb; ++j) {
          if (deviating(i, j) > deviating(i, best)) best = j;
        }
        add_pair(a->cell_string(sample_a[i]), b->cell_string(sample_b[best]), z);
        cells.emplace_back(i, best);
      }
    }
    // Columns of the contingency table.
    {
      std::vector<double> g;
      std::vector<std::size_t> idx;
      for (std::size_t j = 0; j < kb; ++j) {
        if (col_tot[j] == 0.0) continue;
        std::vector<double> col(ka);
        for (std::size_t i = 0; i < ka; ++i) col[i] = table[i][j];
        g.push_back(gini(col));
        idx.push_back(j);
      }
      const MeanStd ms = mean_std(g);
      for (std::size_t t = 0; ms.sd > 0.0 && t < g.size(); ++t) {
        const double z = std::abs(g[t] - ms.mean) / ms.sd;
        if (z <= p.t_quant) continue;
        const std::size_t j = idx[t];
        std::size_t best = 0;
        for (std::size_t i = 1; i < ka; ++i) {
          if (deviating(i, j) > deviating(best, j)) best = i;
        }
        add_pair(a->cell_string(sample_a[best]), b->cell_string(sample_b[j]), z);
        cells.emplace_back(best, j);
      }
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (ca[r] < 0) continue;
      for (const auto& [i, j] : cells) {
        if (static_cast<std::size_t>(ca[r]) == i && static_cast<std::size_t>(cb[r]) == j) flagged[r] = true;
      }
    }
  } else {
    std::vector<double> x, y;
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < n; ++r) {
      if (!known[r]) continue;
      x.push_back(a->numeric(r));
      y.push_back(b->numeric(r));
      rows.push_back(r);
    }
    const MeanStd mx = mean_std(x);
    const MeanStd my = mean_std(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (x[i] - mx.mean) * (y[i] - my.mean);
      sxx += (x[i] - mx.mean) * (x[i] - mx.mean);
    }
    art.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    art.intercept = my.mean - art.slope * mx.mean;
    std::vector<double> res(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) res[i] = y[i] - (art.intercept + art.slope * x[i]);
    const MeanStd mr = mean_std(res);
    if (mr.sd > 1e-12 * std::max(1.0, my.sd)) {
      for (std::size_t i = 0; i < res.size(); ++i) {
        const double z = std::abs(res[i] - mr.mean) / mr.sd;
        if (z <= p.t_quant) continue;
        flagged[rows[i]] = true;
        add_pair(a->cell_string(rows[i]), b->cell_string(rows[i]), z);
      }
    }
  }
  std::stable_sort(art.flagged.begin(), art.flagged.end(),
                   [](const FlaggedPair& l, const FlaggedPair& r) { return l.z > r.z; });

  FittedModel m;
  m.kind = ModelKind::BivariateOutliers;
  m.action = GroundAction(actions::ActionKind::BinaryOutliers, {{"first", first}, {"second", second}});
  m.appended = flag_column(m.action.canonical(), *a, flagged, known);
  m.involved_columns = {first, second};
  m.artifacts = std::move(art);
  return m;
}

}  // namespace insight::mining
