#include <algorithm>
#include <cmath>
#include <numeric>

#include "insight/error.hpp"
#include "insight/mining.hpp"

namespace insight::mining {

FittedModel analyze_trend(const Column& datetime, const Column& target, const MiningParams& p) {
  if (datetime.type() != tabular::ColumnType::Datetime) {
    throw MiningError("trend needs a datetime column, got '" + datetime.name() + "'");
  }
  if (target.type() != tabular::ColumnType::Numerical && target.type() != tabular::ColumnType::Timedelta) {
    throw MiningError("trend target '" + target.name() + "' must be numerical or timedelta");
  }
  if (datetime.size() != target.size()) throw PreconditionError("trend columns differ in length");

  std::vector<std::pair<double, double>> pts;
  for (std::size_t r = 0; r < datetime.size(); ++r) {
    if (datetime.is_null(r) || target.is_null(r)) continue;
    pts.emplace_back(datetime.values()[r], target.values()[r]);
  }
  if (pts.size() < p.min_rows) {
    throw MiningError("trend needs at least " + std::to_string(p.min_rows) + " complete rows");
  }
  std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  TrendArtifacts art;
  art.datetime = datetime.name();
  art.target = target.name();
  art.points = pts.size();
  const std::size_t n = pts.size();
  std::vector<double> t(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = pts[i].first;
    y[i] = pts[i].second;
  }

  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  if (*ymin < *ymax) {
    art.mann_kendall_z = mann_kendall_z(y);
    const double pvalue = std::erfc(std::abs(art.mann_kendall_z) / std::sqrt(2.0));
    art.trend = pvalue < p.trend_alpha;
    art.direction = art.mann_kendall_z > 0 ? 1 : (art.mann_kendall_z < 0 ? -1 : 0);

    // Least-squares detrending on time.
    const double tm = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(n);
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      stt += (t[i] - tm) * (t[i] - tm);
      sty += (t[i] - tm) * (y[i] - ym);
      syy += (y[i] - ym) * (y[i] - ym);
    }
    const double slope = stt > 0.0 ? sty / stt : 0.0;
    std::vector<double> res(n);
    double rm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      res[i] = y[i] - (ym + slope * (t[i] - tm));
      rm += res[i];
    }
    rm /= static_cast<double>(n);
    double c0 = 0.0;
    for (double& v : res) {
      v -= rm;
      c0 += v * v;
    }
    if (c0 > 1e-18 * std::max(1.0, syy)) {
      // Biased autocorrelation over lags 2..n/2.
      art.max_autocorrelation = -1.0;
      for (std::size_t lag = 2; lag <= n / 2; ++lag) {
        double c = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) c += res[i] * res[i + lag];
        const double rho = c / c0;
        if (rho > art.max_autocorrelation) {
          art.max_autocorrelation = rho;
          art.best_lag = static_cast<int>(lag);
        }
      }
      if (art.best_lag == 0) art.max_autocorrelation = 0.0;
      art.period = art.max_autocorrelation > p.period_threshold;

      const double sd = std::sqrt(c0 / static_cast<double>(n));
      for (double v : res) art.max_residual_z = std::max(art.max_residual_z, std::abs(v) / sd);
      art.outliers = art.max_residual_z > p.t_quant;
    }
  }

  FittedModel m;
  m.kind = ModelKind::Trend;
  m.action = GroundAction(actions::ActionKind::Trend, {{"datetime", datetime.name()}, {"target", target.name()}});
  m.involved_columns = {datetime.name(), target.name()};
  m.artifacts = std::move(art);
  return m;
}

}  // namespace insight::mining
