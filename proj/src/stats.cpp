#include "hgas/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hgas/error.hpp"
#include "hgas/geometry.hpp"

namespace hgas {
namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

struct MeanSe {
  double mean, se;
};

MeanSe mean_se(const std::vector<double>& v) {
  if (v.empty()) return {nan, nan};
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() < 2) return {m, nan};
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()))};
}

std::vector<double> midranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double RadialHistogram::bin_volume(std::size_t b) const {
  return geometric_constants(dimension).ball_volume * (std::pow(edges[b + 1], dimension) - std::pow(edges[b], dimension));
}

RadialHistogram radial_profiles(std::span<const Configuration> configs, std::size_t bins, double r_max) {
  if (configs.empty()) throw Error(Errc::domain, "radial_profiles needs at least one configuration");
  if (bins < 1) throw Error(Errc::domain, "need at least one bin");
  const int d = configs.front().dim();
  if (r_max <= 0) {
    for (const auto& c : configs)
      for (std::size_t i = 0; i < c.size(); ++i) r_max = std::max(r_max, c.radius(i));
    r_max *= 1 + 1e-9;
    if (r_max <= 0) r_max = 1;
  }
  std::vector<double> edges;
  for (std::size_t b = 0; b <= bins; ++b) edges.push_back(r_max * std::pow(static_cast<double>(b) / bins, 1.0 / d));
  return radial_profiles(configs, std::move(edges));
}

RadialHistogram radial_profiles(std::span<const Configuration> configs, std::vector<double> edges) {
  if (configs.empty()) throw Error(Errc::domain, "radial_profiles needs at least one configuration");
  if (edges.size() < 2 || edges.front() < 0 || !std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw Error(Errc::domain, "bin edges must be non-negative and strictly increasing");
  const int d = configs.front().dim();
  const std::size_t bins = edges.size() - 1;
  RadialHistogram h;
  h.dimension = d;
  h.replicas = configs.size();
  h.edges = std::move(edges);
  h.counts.assign(bins, 0);

  std::vector<std::vector<double>> rho(bins), rho_q(bins), qbar(bins);
  std::vector<double> qsum(bins, 0), q2sum(bins, 0);
  for (const auto& c : configs) {
    if (c.dim() != d) throw Error(Errc::invalid_dimension, "mixed dimensions in ensemble");
    std::vector<std::size_t> cnt(bins, 0);
    std::vector<double> qs(bins, 0);
    const double N = static_cast<double>(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double r = c.radius(i);
      if (r < h.edges.front() || r >= h.edges.back()) continue;
      const std::size_t b = static_cast<std::size_t>(std::upper_bound(h.edges.begin(), h.edges.end(), r) - h.edges.begin()) - 1;
      ++cnt[b];
      qs[b] += c.charges()[i];
      q2sum[b] += c.charges()[i] * c.charges()[i];
    }
    for (std::size_t b = 0; b < bins; ++b) {
      const double vol = h.bin_volume(b);
      rho[b].push_back(cnt[b] / (N * vol));
      rho_q[b].push_back(qs[b] / (N * vol));
      if (cnt[b] > 0) qbar[b].push_back(qs[b] / cnt[b]);
      h.counts[b] += cnt[b];
      qsum[b] += qs[b];
    }
  }
  const double R = static_cast<double>(configs.size());
  for (std::size_t b = 0; b < bins; ++b) {
    auto a = mean_se(rho[b]), aq = mean_se(rho_q[b]);
    h.empty.push_back(h.counts[b] == 0);
    h.rho.push_back(a.mean);
    h.rho_q.push_back(aq.mean);
    const double cnt = static_cast<double>(h.counts[b]);
    const double mq = cnt > 0 ? qsum[b] / cnt : nan;
    h.mean_charge.push_back(mq);
    if (configs.size() > 1) {
      h.rho_se.push_back(a.se);
      h.rho_q_se.push_back(aq.se);
      h.mean_charge_se.push_back(mean_se(qbar[b]).se);
    } else {
      // Poisson counting error for a single configuration.
      const double N = static_cast<double>(configs.front().size());
      const double vol = h.bin_volume(b);
      h.rho_se.push_back(std::sqrt(cnt) / (N * vol));
      h.rho_q_se.push_back(cnt > 0 ? mq * std::sqrt(cnt) / (N * vol) : 0.0);
      const double var = cnt > 1 ? (q2sum[b] / cnt - mq * mq) * cnt / (cnt - 1) : nan;
      h.mean_charge_se.push_back(cnt > 1 ? std::sqrt(std::max(var, 0.0) / cnt) : nan);
    }
  }
  (void)R;
  return h;
}

std::vector<double> spacing_edges(int d, std::size_t n, double support_radius, double r_max, double rows) {
  if (n < 1 || !(support_radius > 0) || !(r_max > 0) || !(rows > 0)) throw Error(Errc::domain, "invalid annulus rule");
  const double a = std::pow(geometric_constants(d).ball_volume * std::pow(support_radius, d) / n, 1.0 / d);
  const std::size_t bins = std::max<std::size_t>(1, static_cast<std::size_t>(r_max / (rows * a)));
  std::vector<double> edges;
  for (std::size_t b = 0; b <= bins; ++b) edges.push_back(r_max * static_cast<double>(b) / bins);
  return edges;
}

Histogram histogram(std::span<const double> values, std::size_t bins, double lo, double hi) {
  if (bins < 1 || !(hi > lo)) throw Error(Errc::domain, "invalid histogram range");
  Histogram h;
  for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(lo + (hi - lo) * static_cast<double>(b) / bins);
  h.counts.assign(bins, 0);
  std::size_t total = 0;
  for (double v : values) {
    if (v < lo || v >= hi) continue;
    ++h.counts[std::min(bins - 1, static_cast<std::size_t>((v - lo) / (hi - lo) * bins))];
    ++total;
  }
  const double w = (hi - lo) / bins;
  for (auto c : h.counts) h.density.push_back(total ? c / (total * w) : 0.0);
  return h;
}

std::vector<double> nearest_neighbor_distances(const Configuration& c, bool blow_up) {
  const std::size_t n = c.size();
  if (n < 2) throw Error(Errc::domain, "nearest-neighbour distances need N >= 2");
  const int d = c.dim();
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double r2 = 0;
      for (int k = 0; k < d; ++k) {
        const double dx = c.coord(i, k) - c.coord(j, k);
        r2 += dx * dx;
      }
      best[i] = std::min(best[i], r2);
      best[j] = std::min(best[j], r2);
    }
  const double scale = blow_up ? std::pow(static_cast<double>(n), 1.0 / d) : 1.0;
  for (auto& v : best) v = scale * std::sqrt(v);
  return best;
}

std::vector<double> histogram_peaks(const Histogram& h, double min_fraction) {
  std::vector<double> peaks;
  const auto& y = h.density;
  if (y.empty()) return peaks;
  const double top = *std::max_element(y.begin(), y.end());
  for (std::size_t b = 0; b < y.size(); ++b) {
    const double left = b > 0 ? y[b - 1] : 0.0;
    // Plateaus count once, at their left end.
    std::size_t e = b;
    while (e + 1 < y.size() && y[e + 1] == y[b]) ++e;
    const double right = e + 1 < y.size() ? y[e + 1] : 0.0;
    if (y[b] > left && y[b] > right && y[b] >= min_fraction * top)
      peaks.push_back(0.5 * (h.edges[b] + h.edges[e + 1]));
    b = e;
  }
  return peaks;
}

CorrelationCurve local_pair_correlation(std::span<const Configuration> configs, double r0, double width,
                                        std::span<const double> edges, std::size_t min_references) {
  if (configs.empty()) throw Error(Errc::domain, "correlation needs at least one configuration");
  if (edges.size() < 2 || !(width > 0)) throw Error(Errc::domain, "invalid correlation grid");
  const int d = configs.front().dim();
  const double ball = geometric_constants(d).ball_volume;
  const std::size_t bins = edges.size() - 1;
  CorrelationCurve out;
  out.r0 = r0;
  out.width = width;
  out.edges.assign(edges.begin(), edges.end());
  out.replicas = configs.size();
  const double lo = std::max(0.0, r0 - 0.5 * width), hi = r0 + 0.5 * width;
  const double tmax = edges.back();

  std::vector<std::vector<double>> per(bins);
  std::vector<double> pooled(bins, 0);
  double density_sum = 0, ref_total = 0;
  for (const auto& c : configs) {
    const std::size_t n = c.size();
    const double N = static_cast<double>(n);
    const double blow = std::pow(N, 1.0 / d);
    std::vector<std::size_t> refs;
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(c.radius(i) - r0) < 0.5 * width) refs.push_back(i);
    if (refs.empty()) continue;
    // Local density in blown-up units from the same annulus.
    const double vol = ball * (std::pow(hi, d) - std::pow(lo, d)) * N;
    const double dens = refs.size() / vol;
    std::vector<double> cnt(bins, 0);
    for (std::size_t i : refs)
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        double r2 = 0;
        for (int k = 0; k < d; ++k) {
          const double dx = c.coord(i, k) - c.coord(j, k);
          r2 += dx * dx;
        }
        const double t = blow * std::sqrt(r2);
        if (t >= tmax || t < edges.front()) continue;
        const auto it = std::upper_bound(edges.begin(), edges.end(), t);
        cnt[static_cast<std::size_t>(it - edges.begin()) - 1] += 1;
      }
    const double nref = static_cast<double>(refs.size());
    for (std::size_t b = 0; b < bins; ++b) {
      const double shell = ball * (std::pow(edges[b + 1], d) - std::pow(edges[b], d));
      per[b].push_back(cnt[b] / (nref * shell * dens));
      pooled[b] += cnt[b];
    }
    density_sum += dens * nref;
    ref_total += nref;
  }
  out.references = static_cast<std::size_t>(ref_total);
  if (out.references < min_references)
    throw InsufficientStatistics("only " + std::to_string(out.references) + " reference particles in the annulus",
                                 out.references);
  out.normalization = density_sum / ref_total;
  for (std::size_t b = 0; b < bins; ++b) {
    auto m = mean_se(per[b]);
    out.g.push_back(m.mean);
    if (per[b].size() > 1) {
      out.se.push_back(m.se);
    } else {
      const double shell = ball * (std::pow(edges[b + 1], d) - std::pow(edges[b], d));
      out.se.push_back(std::sqrt(pooled[b]) / (ref_total * shell * out.normalization));
    }
  }
  return out;
}

double first_peak(const CorrelationCurve& c) {
  const auto& g = c.g;
  if (g.size() < 3) throw Error(Errc::domain, "curve too short for a peak");
  // The first bin that is a strict local maximum above the plateau.
  std::size_t best = 0;
  for (std::size_t b = 1; b + 1 < g.size(); ++b)
    if (g[b] > 1 && g[b] >= g[b - 1] && g[b] > g[b + 1]) {
      best = b;
      break;
    }
  if (best == 0) best = static_cast<std::size_t>(std::max_element(g.begin(), g.end()) - g.begin());
  if (best == 0 || best + 1 >= g.size()) return c.center(best);
  const double y0 = g[best - 1], y1 = g[best], y2 = g[best + 1];
  const double den = y0 - 2 * y1 + y2;
  const double h = c.center(best) - c.center(best - 1);
  const double shift = den != 0 ? 0.5 * (y0 - y2) / den : 0.0;
  return c.center(best) + std::clamp(shift, -0.5, 0.5) * h;
}

double curve_discrepancy(const CorrelationCurve& a, const CorrelationCurve& b) {
  if (a.g.size() != b.g.size()) throw Error(Errc::domain, "curves on different grids");
  double worst = 0;
  for (std::size_t k = 1; k < a.g.size(); ++k) {
    const double s = std::sqrt(a.se[k] * a.se[k] + b.se[k] * b.se[k]);
    const double diff = std::abs(a.g[k] - b.g[k]);
    if (s > 0) worst = std::max(worst, diff / s);
    else if (diff > 0) worst = std::numeric_limits<double>::infinity();
  }
  return worst;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw Error(Errc::domain, "spearman needs paired samples");
  auto ra = midranks(a), rb = midranks(b);
  const double n = static_cast<double>(a.size());
  const double m = (n + 1) / 2;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - m) * (rb[i] - m);
    saa += (ra[i] - m) * (ra[i] - m);
    sbb += (rb[i] - m) * (rb[i] - m);
  }
  if (saa == 0 || sbb == 0) throw Error(Errc::undefined_metric, "rank correlation of a constant sample");
  return sab / std::sqrt(saa * sbb);
}

namespace {

void check_ordering_input(const Configuration& c) {
  if (c.size() < 10) throw Error(Errc::domain, "ordering metric needs N >= 10");
  const auto q = c.charges();
  if (std::all_of(q.begin(), q.end(), [&](double v) { return v == q[0]; }))
    throw Error(Errc::undefined_metric, "all charges are equal");
}

}  // namespace

double ordering_metric(const Configuration& c) {
  check_ordering_input(c);
  std::vector<double> r(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) r[i] = c.radius(i);
  return spearman(c.charges(), r);
}

double axis_ordering_metric(const Configuration& c, int axis) {
  check_ordering_input(c);
  if (axis < 0 || axis >= c.dim()) throw Error(Errc::domain, "axis outside the configuration dimension");
  std::vector<double> z(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) z[i] = std::abs(c.coord(i, axis));
  return spearman(c.charges(), z);
}

}  // namespace hgas
