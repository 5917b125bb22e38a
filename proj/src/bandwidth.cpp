#include "hfdecon/bandwidth.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <stdexcept>

#include "hfdecon/errors.h"
#include "hfdecon/rng.h"
#include "hfdecon/stats.h"
#include "hfdecon/ticks.h"
#include "hfdecon/trig_sums.h"

namespace hfdecon {

namespace {

const double kSqrt2 = std::numbers::sqrt2;

// Differences of four-point sums: sum_k (y[j+lag+o_k] - y[j+o_k]) / 2 for j < count.
LagDifferences pattern_differences(const TickSeries& series, const std::array<std::size_t, 4>& offsets,
                                   std::size_t lag, std::size_t count) {
  const auto& y = series.y;
  const auto& t = series.grid.points();
  LagDifferences out;
  out.values.resize(count);
  out.gaps.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    double v = 0.0, g = 0.0;
    for (std::size_t o : offsets) {
      v += y[j + lag + o] - y[j + o];
      g += t[j + lag + o] - t[j + o];
    }
    out.values[j] = v / 2.0;
    out.gaps[j] = g / 4.0;
  }
  return out;
}

std::vector<double> first_differences_scaled(const TickSeries& series) {
  std::vector<double> d(series.intervals());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = (series.y[j + 1] - series.y[j]) / kSqrt2;
  return d;
}

}  // namespace

std::vector<double> SurrogateSeries::within(double xi) const {
  const double window = xi * (1.0 + kWindowSlack);
  std::vector<double> out;
  for (const auto& [lag, d] : deltas) {
    for (std::size_t j = 0; j < d.values.size(); ++j) {
      if (d.gaps[j] <= window) out.push_back(d.values[j]);
    }
  }
  return out;
}

SurrogateSeries build_delta1(const TickSeries& series, std::size_t max_lag) {
  const std::size_t n = series.intervals();
  if (n < 4) throw std::invalid_argument("level-1 surrogates need at least 5 observations");
  const auto& y = series.y;
  const auto& t = series.grid.points();
  SurrogateSeries out;
  out.level = 1;
  out.times.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.times[j] = (t[j] + t[j + 1]) / 2.0;

  // Lag 1: points (Y_j + Y_{j+2})/sqrt 2 at (t_j + t_{j+2})/2, j = 0..n-2.
  if (max_lag >= 1) {
    LagDifferences d;
    for (std::size_t j = 0; j + 3 <= n; ++j) {
      d.values.push_back(((y[j + 1] - y[j]) + (y[j + 3] - y[j + 2])) / kSqrt2);
      d.gaps.push_back(((t[j + 1] - t[j]) + (t[j + 3] - t[j + 2])) / 2.0);
    }
    out.deltas.emplace(1, std::move(d));
  }
  // Lags >= 2: points (Y_j + Y_{j+1})/sqrt 2, j = 0..n-lag-1.
  for (std::size_t lag = 2; lag <= std::min(max_lag, n - 1); ++lag) {
    LagDifferences d;
    for (std::size_t j = 0; j + lag + 1 <= n; ++j) {
      d.values.push_back(((y[j + lag] - y[j]) + (y[j + lag + 1] - y[j + 1])) / kSqrt2);
      d.gaps.push_back(((t[j + lag] - t[j]) + (t[j + lag + 1] - t[j + 1])) / 2.0);
    }
    out.deltas.emplace(lag, std::move(d));
  }
  out.direct = first_differences_scaled(series);
  return out;
}

SurrogateSeries build_delta2(const TickSeries& series, std::uint64_t seed, std::size_t max_lag,
                             std::span<const std::size_t> pilot_index) {
  const std::size_t n = series.intervals();
  if (n < 10) throw std::invalid_argument("level-2 surrogates need at least 11 observations");
  const auto& t = series.grid.points();
  SurrogateSeries out;
  out.level = 2;
  out.times.resize(n - 2);
  for (std::size_t j = 0; j + 3 <= n; ++j) out.times[j] = (t[j] + t[j + 1] + t[j + 2] + t[j + 3]) / 4.0;

  if (max_lag >= 1) out.deltas.emplace(1, pattern_differences(series, {0, 2, 4, 6}, 1, n - 6));
  if (max_lag >= 2) out.deltas.emplace(2, pattern_differences(series, {0, 1, 4, 5}, 2, n - 6));
  if (max_lag >= 3) out.deltas.emplace(3, pattern_differences(series, {0, 1, 2, 6}, 3, n - 8));
  for (std::size_t lag = 4; lag <= std::min(max_lag, n - 3); ++lag) {
    out.deltas.emplace(lag, pattern_differences(series, {0, 1, 2, 3}, lag, n - lag - 2));
  }

  const auto d1 = first_differences_scaled(series);
  std::vector<std::size_t> idx(pilot_index.begin(), pilot_index.end());
  if (idx.empty()) {
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
  }
  if (idx.size() < 2) throw std::invalid_argument("level-2 pilot needs at least two samples");
  Rng rng(seed);
  out.direct.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::size_t k;
    do {
      k = static_cast<std::size_t>(rng.below(idx.size()));
    } while (k == i);
    out.direct[i] = (d1[idx[i]] - d1[idx[k]]) / kSqrt2;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sheather-Jones

double normal_reference_bandwidth(std::span<const double> data) {
  if (data.size() < 2) throw std::invalid_argument("bandwidth needs at least two values");
  const double scale = std::min(stddev(data), iqr(data) / 1.34);
  const double s = scale > 0.0 ? scale : stddev(data);
  if (!(s > 0.0)) throw std::invalid_argument("bandwidth undefined for constant data");
  return 0.9 * s * std::pow(static_cast<double>(data.size()), -0.2);
}

namespace {

struct BinnedPairs {
  double width = 0.0;
  std::vector<double> counts;  // counts[k]: unordered pairs k bins apart
  double n = 0.0;
};

BinnedPairs bin_pairs(std::span<const double> data, std::size_t nb = 1000) {
  BinnedPairs out;
  out.n = static_cast<double>(data.size());
  const auto [lo_it, hi_it] = std::minmax_element(data.begin(), data.end());
  const double lo = *lo_it;
  out.width = (*hi_it - lo) * 1.01 / static_cast<double>(nb);
  std::vector<double> c(nb, 0.0);
  for (double x : data) {
    auto b = static_cast<std::size_t>(std::floor((x - lo) / out.width));
    c[std::min(b, nb - 1)] += 1.0;
  }
  out.counts.assign(nb, 0.0);
  for (std::size_t i = 0; i < nb; ++i) {
    if (c[i] == 0.0) continue;
    out.counts[0] += c[i] * (c[i] - 1.0) / 2.0;
    for (std::size_t j = i + 1; j < nb; ++j) out.counts[j - i] += c[i] * c[j];
  }
  return out;
}

// Estimate of int f''(x)^2 dx with Gaussian pilot bandwidth h.
double phi4(const BinnedPairs& bp, double h) {
  double sum = 0.0;
  for (std::size_t k = 0; k < bp.counts.size(); ++k) {
    double delta = static_cast<double>(k) * bp.width / h;
    delta *= delta;
    if (delta >= 1000.0) break;
    sum += std::exp(-delta / 2.0) * (delta * delta - 6.0 * delta + 3.0) * bp.counts[k];
  }
  sum = 2.0 * sum + bp.n * 3.0;
  return sum / (bp.n * (bp.n - 1.0) * std::pow(h, 5.0) * std::sqrt(2.0 * std::numbers::pi));
}

// Estimate of -int f'''(x)^2 dx.
double phi6(const BinnedPairs& bp, double h) {
  double sum = 0.0;
  for (std::size_t k = 0; k < bp.counts.size(); ++k) {
    double delta = static_cast<double>(k) * bp.width / h;
    delta *= delta;
    if (delta >= 1000.0) break;
    sum += std::exp(-delta / 2.0) * (delta * delta * delta - 15.0 * delta * delta + 45.0 * delta - 15.0) *
           bp.counts[k];
  }
  sum = 2.0 * sum - 15.0 * bp.n;
  return sum / (bp.n * (bp.n - 1.0) * std::pow(h, 7.0) * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace

PilotBandwidth sheather_jones(std::span<const double> data) {
  std::set<double> distinct(data.begin(), data.end());
  if (distinct.size() < 16) {
    throw std::invalid_argument("Sheather-Jones bandwidth needs at least 16 distinct values");
  }
  const double h_ref = normal_reference_bandwidth(data);
  const double n = static_cast<double>(data.size());
  const double sd = stddev(data);
  const double q = iqr(data) / 1.349;
  const double scale = q > 0.0 ? std::min(sd, q) : sd;

  const auto bp = bin_pairs(data);
  const double a = 1.24 * scale * std::pow(n, -1.0 / 7.0);
  const double b = 1.23 * scale * std::pow(n, -1.0 / 9.0);
  const double c1 = 1.0 / (2.0 * std::sqrt(std::numbers::pi) * n);
  const double td = -phi6(bp, b);
  if (!(td > 0.0) || !std::isfinite(td)) return {h_ref, true};
  const double alph2 = 1.357 * std::pow(phi4(bp, a) / td, 1.0 / 7.0);
  if (!std::isfinite(alph2)) return {h_ref, true};

  auto f = [&](double h) { return std::pow(c1 / phi4(bp, alph2 * std::pow(h, 5.0 / 7.0)), 0.2) - h; };
  double lo = 1e-3 * h_ref, hi = 10.0 * h_ref;
  double flo = f(lo), fhi = f(hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi) || flo * fhi > 0.0) return {h_ref, true};
  for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (!std::isfinite(fm)) return {h_ref, true};
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), false};
}

DensityEstimate pilot_kde(std::span<const double> data, double bandwidth, std::span<const double> x_grid) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("pilot bandwidth must be positive");
  if (data.empty()) throw std::invalid_argument("pilot density needs data");
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  // exp(-z^2/2) < 3e-18 beyond 9 bandwidths.
  const double reach = 9.0 * bandwidth;
  const double norm = 1.0 / (static_cast<double>(sorted.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  DensityEstimate est;
  est.x_grid.assign(x_grid.begin(), x_grid.end());
  est.values.resize(x_grid.size());
  est.kernel = KernelSpec{KernelFamily::Gaussian, bandwidth};
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double x = x_grid[i];
    auto first = std::lower_bound(sorted.begin(), sorted.end(), x - reach);
    auto last = std::upper_bound(first, sorted.end(), x + reach);
    double acc = 0.0;
    for (auto it = first; it != last; ++it) {
      const double z = (x - *it) / bandwidth;
      acc += std::exp(-0.5 * z * z);
    }
    est.values[i] = acc * norm;
  }
  return est;
}

// ---------------------------------------------------------------------------
// Grid search

namespace {

// Per-xi characteristic function of a surrogate series on a common frequency
// grid. Entries are bucketed by the smallest xi they satisfy so each
// difference is accumulated once; the estimates are cumulative over buckets.
std::vector<std::vector<double>> surrogate_charfns(const SurrogateSeries& sur,
                                                   std::span<const double> xi_sorted,
                                                   std::span<const double> s_grid,
                                                   std::vector<std::size_t>& counts) {
  const std::size_t nx = xi_sorted.size();
  std::vector<std::vector<double>> buckets(nx);
  for (const auto& [lag, d] : sur.deltas) {
    for (std::size_t j = 0; j < d.values.size(); ++j) {
      const double g = d.gaps[j];
      for (std::size_t i = 0; i < nx; ++i) {
        if (g <= xi_sorted[i] * (1.0 + kWindowSlack)) {
          buckets[i].push_back(d.values[j]);
          break;
        }
      }
    }
  }
  std::vector<std::vector<double>> out(nx);
  std::vector<double> cum(s_grid.size(), 0.0);
  std::size_t cum_count = 0;
  counts.assign(nx, 0);
  for (std::size_t i = 0; i < nx; ++i) {
    if (!buckets[i].empty()) {
      TrigSums sums(s_grid);
      sums.add(buckets[i]);
      const auto c = sums.cos_sums();
      for (std::size_t k = 0; k < cum.size(); ++k) cum[k] += c[k];
      cum_count += buckets[i].size();
    }
    counts[i] = cum_count;
    if (cum_count == 0) continue;
    out[i].resize(cum.size());
    for (std::size_t k = 0; k < cum.size(); ++k) {
      out[i][k] = std::min(1.0, std::sqrt(std::fabs(cum[k] / static_cast<double>(cum_count))));
    }
  }
  return out;
}

double discrete_ise(std::span<const double> x, std::span<const double> a, std::span<const double> b) {
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (a[i] - b[i]) * (a[i] - b[i]);
  return trapezoid(x, sq);
}

}  // namespace

BandwidthSelection select_h_xi(const TickSeries& series, const BandwidthConfig& config) {
  const std::size_t n = series.intervals();
  if (n < 10) throw std::invalid_argument("bandwidth selection needs at least 11 observations");
  if (config.h_points < 1 || config.xi_multiples.empty()) {
    throw std::invalid_argument("bandwidth search grids must be nonempty");
  }
  BandwidthSelection out;
  const auto spacing = series.grid.spacings();
  const double min_dt = *std::min_element(spacing.begin(), spacing.end());
  const double max_dt = *std::max_element(spacing.begin(), spacing.end());
  const double med_dt = median(spacing);

  for (double m : config.xi_multiples) out.xi_grid.push_back(m * med_dt);
  std::vector<double> xi_sorted = out.xi_grid;
  std::sort(xi_sorted.begin(), xi_sorted.end());
  const double xi_max = xi_sorted.back();
  const auto max_lag = static_cast<std::size_t>(std::floor(xi_max * (1.0 + kWindowSlack) / min_dt));
  if (max_lag < 1) throw EstimationError("every xi in the search grid is below the grid spacing");

  // Pilot samples: all first differences, or the quarter with the smallest
  // spacing when the grid is markedly unequispaced.
  std::vector<std::size_t> pilot_index(n);
  std::iota(pilot_index.begin(), pilot_index.end(), std::size_t{0});
  if (max_dt / min_dt > config.unequal_ratio) {
    std::stable_sort(pilot_index.begin(), pilot_index.end(),
                     [&](std::size_t a, std::size_t b) { return spacing[a] < spacing[b]; });
    const auto keep = std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(config.pilot_fraction * n)));
    pilot_index.resize(std::min(keep, n));
    std::sort(pilot_index.begin(), pilot_index.end());
  }

  const auto level1 = build_delta1(series, max_lag);
  std::vector<double> pilot1;
  pilot1.reserve(pilot_index.size());
  for (std::size_t j : pilot_index) pilot1.push_back(level1.direct[j]);

  auto pilot_bandwidth = [&](const std::vector<double>& data, std::uint64_t stream) {
    if (config.break_ties) return sheather_jones(break_ties(data, derive_seed(config.seed, stream)));
    return sheather_jones(data);
  };
  const auto bw1 = pilot_bandwidth(pilot1, 101);
  out.pilot_h1 = bw1.h;
  out.pilot_fallback = bw1.fallback;

  const double x_scale = robust_scale(level1.direct);
  if (!(x_scale > 0.0)) throw EstimationError("first differences have zero spread");
  out.x_grid = default_x_grid(x_scale, config.x_points);
  const auto target1 = pilot_kde(pilot1, bw1.h, out.x_grid).values;

  out.h_grid = logspace(config.h_lo_factor * bw1.h, config.h_hi_factor * bw1.h, config.h_points);
  const double h_min = out.h_grid.front();
  const double s_max = KernelSpec{config.kernel, h_min}.support();
  std::size_t s_count = config.s_points;
  if (s_count == 0) {
    const double x_half = out.x_grid.back();
    s_count = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(4.0 * s_max * x_half)) + 1, 512, 4096);
  }
  const auto s_grid = linspace(0.0, s_max, s_count);
  const FourierInverter inverter(s_grid, out.x_grid);
  std::vector<std::vector<double>> weights;
  for (double h : out.h_grid) weights.push_back(inverter.weights(KernelSpec{config.kernel, h}));

  auto density = [&](const std::vector<double>& phi, std::size_t hi) {
    auto f = inverter.apply(phi, weights[hi]);
    if (config.truncate) {
      for (auto& v : f) v = std::max(v, 0.0);
    }
    return f;
  };

  // Level 1: (h, xi) search against the pilot estimate of f_1.
  std::vector<std::size_t> counts;
  const auto phi1 = surrogate_charfns(level1, xi_sorted, s_grid, counts);
  const double inf = std::numeric_limits<double>::infinity();
  out.ise_surface.assign(out.xi_grid.size(), std::vector<double>(out.h_grid.size(), inf));
  double best = inf;
  for (std::size_t xi_idx = 0; xi_idx < out.xi_grid.size(); ++xi_idx) {
    const auto pos = static_cast<std::size_t>(
        std::lower_bound(xi_sorted.begin(), xi_sorted.end(), out.xi_grid[xi_idx]) - xi_sorted.begin());
    if (counts[pos] == 0) continue;
    for (std::size_t hi = 0; hi < out.h_grid.size(); ++hi) {
      const double e = discrete_ise(out.x_grid, density(phi1[pos], hi), target1);
      out.ise_surface[xi_idx][hi] = e;
      if (e < best) {
        best = e;
        out.h1 = out.h_grid[hi];
        out.xi1 = out.xi_grid[xi_idx];
      }
    }
  }
  if (!(best < inf)) throw EstimationError("no feasible xi in the level-1 search grid");

  // Level 2: h search at xi2 = xi1 against the pilot estimate of f_2.
  const auto level2 = build_delta2(series, derive_seed(config.seed, 102), max_lag, pilot_index);
  const auto bw2 = pilot_bandwidth(level2.direct, 103);
  out.pilot_h2 = bw2.h;
  out.pilot_fallback = out.pilot_fallback || bw2.fallback;
  const auto target2 = pilot_kde(level2.direct, bw2.h, out.x_grid).values;
  const double xi1_only[] = {out.xi1};
  const auto phi2 = surrogate_charfns(level2, xi1_only, s_grid, counts);
  if (counts[0] == 0) throw EstimationError("level-2 surrogates have no pairs within xi1");
  out.ise_level2.assign(out.h_grid.size(), inf);
  double best2 = inf;
  for (std::size_t hi = 0; hi < out.h_grid.size(); ++hi) {
    const double e = discrete_ise(out.x_grid, density(phi2[0], hi), target2);
    out.ise_level2[hi] = e;
    if (e < best2) {
      best2 = e;
      out.h2 = out.h_grid[hi];
    }
  }

  out.h_hat = out.h1 * out.h1 / out.h2;
  out.xi_hat = out.xi1;
  return out;
}

}  // namespace hfdecon
