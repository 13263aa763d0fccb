#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "insight/error.hpp"
#include "insight/hash.hpp"
#include "insight/mining.hpp"

namespace insight::mining {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t f = 0; f < a.size(); ++f) s += (a[f] - b[f]) * (a[f] - b[f]);
  return s;
}

std::size_t distinct_points(const std::vector<std::vector<double>>& pts, std::size_t stop_at) {
  std::unordered_set<uint64_t> seen;
  for (const auto& p : pts) {
    uint64_t h = 0x1f83d9abfb41bd6bULL;
    for (double v : p) h = hash_combine(h, hash_double(v));
    seen.insert(h);
    if (seen.size() >= stop_at) break;
  }
  return seen.size();
}

}  // namespace

FittedModel cluster_kmeans(const Dataset& d, int k, Rng& rng, const MiningParams& p) {
  if (k < 2) throw MiningError("k must be at least 2");
  ClusterArtifacts art;
  art.k = k;
  std::vector<const Column*> features;
  for (const auto& c : d.columns()) {
    if (!tabular::is_quantitative(c->type())) continue;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : c->values()) {
      if (std::isnan(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (lo < hi) {
      features.push_back(c.get());
      art.features.push_back(c->name());
    }
  }
  if (features.empty()) throw MiningError("clustering needs at least one non-constant quantitative column");

  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < d.row_count(); ++r) {
    bool complete = true;
    for (const auto* c : features) complete = complete && !std::isnan(c->values()[r]);
    if (complete) rows.push_back(r);
  }
  if (rows.size() < static_cast<std::size_t>(2 * k)) throw MiningError("clustering needs at least 2k complete rows");

  // Standardized feature vectors.
  std::vector<std::vector<double>> pts(rows.size(), std::vector<double>(features.size()));
  for (std::size_t f = 0; f < features.size(); ++f) {
    double mean = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) mean += features[f]->values()[rows[i]];
    mean /= static_cast<double>(rows.size());
    double ss = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double dv = features[f]->values()[rows[i]] - mean;
      ss += dv * dv;
    }
    const double sd = std::sqrt(ss / static_cast<double>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      pts[i][f] = sd > 0.0 ? (features[f]->values()[rows[i]] - mean) / sd : 0.0;
    }
  }
  if (distinct_points(pts, static_cast<std::size_t>(k)) < static_cast<std::size_t>(k)) {
    throw MiningError("fewer distinct rows than k");
  }

  // Farthest-point seeding from a random first centre.
  const std::size_t n = pts.size();
  std::vector<std::vector<double>> centres;
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  centres.push_back(pts[pick(rng)]);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (centres.size() < static_cast<std::size_t>(k)) {
    std::size_t far = 0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], sq_dist(pts[i], centres.back()));
      if (nearest[i] > nearest[far]) far = i;
    }
    centres.push_back(pts[far]);
  }

  std::vector<int> labels(n, 0);
  for (int iter = 0; iter < p.kmeans_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(pts[i], centres[0]);
      for (int c = 1; c < k; ++c) {
        const double dd = sq_dist(pts[i], centres[c]);
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      labels[i] = best;
    }
    std::vector<std::vector<double>> next(k, std::vector<double>(features.size(), 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[labels[i]];
      for (std::size_t f = 0; f < features.size(); ++f) next[labels[i]][f] += pts[i][f];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Re-seed an empty cluster at the point farthest from its centre.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double dd = sq_dist(pts[i], centres[labels[i]]);
          if (dd > far_d) {
            far_d = dd;
            far = i;
          }
        }
        next[c] = pts[far];
        labels[far] = c;
        continue;
      }
      for (double& v : next[c]) v /= static_cast<double>(counts[c]);
    }
    double shift = 0.0;
    for (int c = 0; c < k; ++c) shift = std::max(shift, std::sqrt(sq_dist(next[c], centres[c])));
    centres = std::move(next);
    if (shift < p.kmeans_tolerance) break;
  }
  // Final assignment against the converged centres.
  for (std::size_t i = 0; i < n; ++i) {
    int best = 0;
    double best_d = sq_dist(pts[i], centres[0]);
    for (int c = 1; c < k; ++c) {
      const double dd = sq_dist(pts[i], centres[c]);
      if (dd < best_d) {
        best_d = dd;
        best = c;
      }
    }
    labels[i] = best;
  }

  art.sizes.assign(k, 0);
  for (int l : labels) ++art.sizes[l];

  if (n > p.silhouette_sample) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(p.silhouette_sample);
    std::sort(idx.begin(), idx.end());
    std::vector<std::vector<double>> sp;
    std::vector<int> sl;
    for (std::size_t i : idx) {
      sp.push_back(pts[i]);
      sl.push_back(labels[i]);
    }
    art.silhouette = silhouette(sp, sl, k);
  } else {
    art.silhouette = silhouette(pts, labels, k);
  }

  std::vector<int> cluster_codes(d.row_count(), -1);
  for (std::size_t i = 0; i < n; ++i) cluster_codes[rows[i]] = labels[i];
  for (const auto& c : d.columns()) {
    if (!tabular::is_qualitative(c->type())) continue;
    std::vector<int> codes(d.row_count());
    for (std::size_t r = 0; r < d.row_count(); ++r) codes[r] = c->is_null(r) ? -1 : static_cast<int>(c->numeric(r));
    const double v = cramers_v(cluster_codes, codes);
    if (!art.max_association || v > *art.max_association) {
      art.max_association = v;
      art.associated_column = c->name();
    }
  }

  std::vector<double> ids(d.row_count(), std::nan(""));
  for (std::size_t i = 0; i < n; ++i) ids[rows[i]] = labels[i];

  FittedModel m;
  m.kind = ModelKind::Clustering;
  m.action = GroundAction(actions::ActionKind::Clustering, {{"k", std::to_string(k)}});
  m.appended = std::make_shared<const Column>(
      Column::numbers(m.action.canonical(), tabular::ColumnType::Numerical, std::move(ids)));
  m.involved_columns = art.features;
  if (!art.associated_column.empty()) m.involved_columns.push_back(art.associated_column);
  m.artifacts = std::move(art);
  return m;
}

}  // namespace insight::mining
