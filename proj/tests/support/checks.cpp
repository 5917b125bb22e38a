#include "checks.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hfdecon/bandwidth.h"
#include "hfdecon/density.h"
#include "hfdecon/ecf.h"
#include "hfdecon/ivol.h"
#include "hfdecon/moments.h"
#include "hfdecon/rng.h"
#include "hfdecon/stats.h"
#include "oracles.h"

namespace hfdecon::checks {

namespace {

std::string fmt(const char* label, double v) {
  std::ostringstream os;
  os.precision(3);
  os << label << '=' << std::scientific << v;
  return os.str();
}

TickSeries noisy_series(double delta_s, std::uint64_t seed, double sigma_u = 0.005, double jitter = 0.0) {
  const auto grid = make_time_grid(delta_s, jitter, derive_seed(seed, 4));
  const auto path = simulate_heston(HestonParams::model_i(), grid, 10, derive_seed(seed, 1));
  return make_observations(path, generate_noise({NoiseFamily::Normal, sigma_u}, grid.size(), derive_seed(seed, 2)));
}

// Short irregular series with n + 1 points.
TickSeries short_series(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> t{0.0}, y{rng.normal()};
  for (std::size_t j = 0; j < n; ++j) {
    t.push_back(t.back() + rng.uniform(0.5, 1.5));
    y.push_back(0.3 * rng.normal() + 0.05 * t.back());
  }
  return TickSeries(TimeGrid(std::move(t)), std::move(y));
}

// Pascal-triangle binomials, independent of the library's recurrence.
std::vector<std::vector<double>> pascal(int n) {
  std::vector<std::vector<double>> c(n + 1);
  for (int i = 0; i <= n; ++i) {
    c[i].assign(i + 1, 1.0);
    for (int j = 1; j < i; ++j) c[i][j] = c[i - 1][j - 1] + c[i - 1][j];
  }
  return c;
}

}  // namespace

CheckResult ecf_bounds_evenness_origin() {
  const auto series = noisy_series(30.0, 11);
  const auto nbhd = build_neighborhoods(series.grid, 3.0 * series.grid.median_spacing());
  const auto s = linspace(-2000.0, 2000.0, 801);
  const auto cf = ecf_error(series, nbhd, s);
  double worst_bound = 0.0, worst_even = 0.0, origin_err = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double v = cf.values[k];
    worst_bound = std::max({worst_bound, -v, v - 1.0});
    worst_even = std::max(worst_even, std::fabs(v - cf.values[s.size() - 1 - k]));
    if (s[k] == 0.0) origin_err = std::fabs(v - 1.0);
  }
  CheckResult r{"ecf bounds, evenness, value at 0", false, ""};
  r.pass = worst_bound <= 0.0 && worst_even <= 1e-15 && origin_err == 0.0;
  r.detail = fmt("bound_excess", worst_bound) + " " + fmt("even_err", worst_even) + " " + fmt("origin_err", origin_err);
  return r;
}

CheckResult multiscale_weight_identities() {
  double worst_sum = 0.0, worst_inv = 0.0, worst_zeta = 0.0;
  for (std::size_t N = 3; N <= 200; ++N) {
    for (std::size_t n : {std::max<std::size_t>(N * N - 1, 9), N * N + 2 * N - 1}) {
      const auto w = multiscale_weights(n);
      if (w.N != N) return {"multiscale weight identities", false, "wrong N for n=" + std::to_string(n)};
      long double sa = 0.0L, sak = 0.0L;
      for (std::size_t m = 0; m < N; ++m) {
        sa += w.a[m];
        sak += w.a[m] / w.K[m];
      }
      worst_sum = std::max(worst_sum, static_cast<double>(std::fabs(sa - 1.0L)));
      worst_inv = std::max(worst_inv, static_cast<double>(std::fabs(sak)));
      worst_zeta = std::max(worst_zeta, std::fabs(w.zeta - 2.0 / static_cast<double>(n + 1)) * (n + 1));
    }
  }
  CheckResult r{"multiscale weight identities N in [3, 200]", false, ""};
  r.pass = worst_sum <= 1e-12 && worst_inv <= 1e-12 && worst_zeta <= 1e-12;
  r.detail = fmt("sum_a-1", worst_sum) + " " + fmt("sum_a/K", worst_inv) + " " + fmt("zeta_rel", worst_zeta);
  return r;
}

CheckResult moment_round_trip() {
  const auto c = pascal(2 * kMaxMomentOrder);
  Rng rng(2024);
  double worst = 0.0, worst_mu = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    // Even moments of a random scale mixture of normal and uniform laws.
    const int parts = 1 + static_cast<int>(rng.below(4));
    std::vector<double> w(parts), sc(parts);
    std::vector<bool> uni(parts);
    double wsum = 0.0;
    for (int p = 0; p < parts; ++p) {
      w[p] = rng.uniform(0.1, 1.0);
      sc[p] = std::exp(rng.uniform(-3.0, 3.0));
      uni[p] = rng.uniform() < 0.5;
      wsum += w[p];
    }
    const int kmax = 1 + static_cast<int>(rng.below(kMaxMomentOrder));
    std::vector<double> mu(kmax + 1, 0.0);
    mu[0] = 1.0;
    for (int k = 1; k <= kmax; ++k) {
      for (int p = 0; p < parts; ++p) {
        double m = std::pow(sc[p], 2 * k);
        if (uni[p]) {
          m /= (2 * k + 1);
        } else {
          for (int i = 1; i < 2 * k; i += 2) m *= i;
        }
        mu[k] += w[p] / wsum * m;
      }
    }
    std::vector<double> mt(kmax);
    for (int k = 1; k <= kmax; ++k) {
      long double acc = 0.0L;
      for (int j = 0; j <= k; ++j) acc += static_cast<long double>(c[2 * k][2 * j]) * mu[j] * mu[k - j];
      mt[k - 1] = static_cast<double>(acc);
    }
    const auto back = recover_moments(mt);
    if (back[0] != mt[0] / 2.0) return {"moment recursion round trip", false, "half relation violated"};
    // Forward expansion of the recovered moments, by oracle binomials.
    for (int k = 1; k <= kmax; ++k) {
      long double acc = 2.0L * back[k - 1];
      for (int j = 1; j < k; ++j) acc += static_cast<long double>(c[2 * k][2 * j]) * back[j - 1] * back[k - j - 1];
      worst = std::max(worst, static_cast<double>(std::fabs(acc - mt[k - 1]) / mt[k - 1]));
      worst_mu = std::max(worst_mu, std::fabs(back[k - 1] - mu[k]) / mu[k]);
    }
  }
  CheckResult r{"moment recursion round trip k <= 8", worst <= 1e-12,
                fmt("max_rel_err", worst) + " " + fmt("mu_rel_err", worst_mu)};
  return r;
}

CheckResult bandwidth_ratio_identity() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto series = noisy_series(60.0, seed);
    BandwidthConfig cfg;
    cfg.seed = seed;
    const auto sel = select_h_xi(series, cfg);
    ok = ok && sel.h_hat == sel.h1 * sel.h1 / sel.h2 && sel.xi_hat == sel.xi1;
    ok = ok && std::find(sel.h_grid.begin(), sel.h_grid.end(), sel.h1) != sel.h_grid.end();
    ok = ok && std::find(sel.h_grid.begin(), sel.h_grid.end(), sel.h2) != sel.h_grid.end();
    ok = ok && std::find(sel.xi_grid.begin(), sel.xi_grid.end(), sel.xi1) != sel.xi_grid.end();
  }
  return {"h_hat = h1^2/h2 and xi_hat = xi1", ok, ok ? "exact on 3 series" : "identity broken"};
}

CheckResult surrogate_index_ranges() {
  const auto series = short_series(40, 5);
  const std::size_t n = series.intervals();
  const auto& y = series.y;
  const auto& t = series.grid.points();
  const double r2 = std::sqrt(2.0);
  std::vector<std::string> problems;
  auto expect = [&](bool cond, const std::string& what) {
    if (!cond) problems.push_back(what);
  };

  const auto d1 = build_delta1(series, 12);
  // Surrogate points of the two level-1 constructions.
  std::vector<double> skip, adj, skip_t, adj_t;
  for (std::size_t j = 0; j + 2 <= n; ++j) {
    skip.push_back((y[j] + y[j + 2]) / r2);
    skip_t.push_back((t[j] + t[j + 2]) / 2.0);
  }
  for (std::size_t j = 0; j + 1 <= n; ++j) {
    adj.push_back((y[j] + y[j + 1]) / r2);
    adj_t.push_back((t[j] + t[j + 1]) / 2.0);
  }
  expect(d1.direct.size() == n, "level-1 pilot count");
  for (std::size_t j = 0; j < n; ++j) expect(std::fabs(d1.direct[j] - (y[j + 1] - y[j]) / r2) < 1e-14, "pilot value");
  for (const auto& [lag, d] : d1.deltas) {
    const auto& pts = lag == 1 ? skip : adj;
    const auto& pt = lag == 1 ? skip_t : adj_t;
    const std::size_t want = lag == 1 ? n - 2 : n - lag;
    expect(d.values.size() == want, "level-1 lag " + std::to_string(lag) + " count");
    for (std::size_t j = 0; j < std::min(want, d.values.size()); ++j) {
      expect(std::fabs(d.values[j] - (pts[j + lag] - pts[j])) < 1e-13, "level-1 value");
      expect(std::fabs(d.gaps[j] - (pt[j + lag] - pt[j])) < 1e-13, "level-1 gap");
    }
  }

  const auto d2 = build_delta2(series, 9, 12);
  struct Pattern {
    std::size_t lag;
    std::vector<std::size_t> off;
    std::size_t count;
  };
  std::vector<Pattern> pats{{1, {0, 2, 4, 6}, n - 6}, {2, {0, 1, 4, 5}, n - 6}, {3, {0, 1, 2, 6}, n - 8}};
  for (std::size_t lag = 4; lag <= 12; ++lag) pats.push_back({lag, {0, 1, 2, 3}, n - lag - 2});
  for (const auto& p : pats) {
    auto it = d2.deltas.find(p.lag);
    if (it == d2.deltas.end()) {
      problems.push_back("level-2 lag missing");
      continue;
    }
    const auto& d = it->second;
    expect(d.values.size() == p.count, "level-2 lag " + std::to_string(p.lag) + " count");
    for (std::size_t j = 0; j < std::min(p.count, d.values.size()); ++j) {
      double a = 0.0, b = 0.0;
      for (auto o : p.off) {
        a += y[j + o];
        b += y[j + p.lag + o];
      }
      expect(std::fabs(d.values[j] - (b - a) / 2.0) < 1e-13, "level-2 value");
    }
    // The last entry reaches exactly the last observation.
    expect(p.lag + p.off.back() + p.count - 1 == n, "level-2 lag " + std::to_string(p.lag) + " end index");
  }
  expect(d2.direct.size() == n, "level-2 pilot count");

  CheckResult r{"surrogate index ranges (levels 1 and 2)", problems.empty(), ""};
  r.detail = problems.empty() ? "n=40, lags 1..12" : problems.front();
  return r;
}

std::vector<CheckResult> exactness_suite() {
  return {ecf_bounds_evenness_origin(), multiscale_weight_identities(), moment_round_trip(),
          bandwidth_ratio_identity(), surrogate_index_ranges()};
}

CheckResult ecf_double_loop() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto series = short_series(10 + 8 * seed, seed);
    for (double xi : {1.0, 2.5, 6.0}) {
      const auto nbhd = build_neighborhoods(series.grid, xi);
      const auto s = linspace(-12.0, 12.0, 241);
      const auto got = ecf_diff(series, nbhd, s);
      const auto ref = oracle::mean_cosine_pairs(series, xi, s);
      const auto err_cf = ecf_error(series, nbhd, s);
      for (std::size_t k = 0; k < s.size(); ++k) {
        worst = std::max(worst, std::fabs(got.values[k] - std::min(1.0, std::fabs(ref[k]))));
        worst = std::max(worst, std::fabs(err_cf.values[k] * err_cf.values[k] - std::min(1.0, std::fabs(ref[k]))));
      }
    }
  }
  return {"ecf vs double-loop oracle (n <= 50)", worst <= 1e-14, fmt("max_abs_err", worst)};
}

CheckResult inversion_quadrature() {
  double worst = 0.0;
  Rng rng(77);
  // Random characteristic-function samples on a coarse grid.
  for (int trial = 0; trial < 4; ++trial) {
    const double h = rng.uniform(0.3, 1.5);
    for (auto family : {KernelFamily::Sinc, KernelFamily::Gaussian}) {
      const KernelSpec kernel{family, h};
      const double top = kernel.support() * (family == KernelFamily::Sinc ? rng.uniform(1.0, 1.3) : 1.0);
      const auto s = linspace(0.0, top, 37 + trial);
      std::vector<double> phi(s.size());
      for (auto& v : phi) v = rng.uniform();
      const auto x = linspace(-5.0, 5.0, 21);
      const FourierInverter inv(s, x);
      const auto got = inv.apply(phi, kernel);
      for (std::size_t i = 0; i < x.size(); ++i) {
        worst = std::max(worst, std::fabs(got[i] - oracle::trapezoid_reference(s, phi, kernel, x[i])));
      }
    }
  }
  return {"inversion vs adaptive quadrature", worst <= 1e-8, fmt("max_abs_err", worst)};
}

CheckResult pilot_kde_direct() {
  Rng rng(19);
  double worst = 0.0;
  for (std::size_t n : {50u, 400u, 3000u}) {
    std::vector<double> data(n);
    for (auto& v : data) v = rng.uniform() < 0.3 ? 2.0 + 0.5 * rng.normal() : rng.normal();
    const auto x = linspace(-5.0, 5.0, 301);
    for (double h : {0.05, 0.3, 1.0}) {
      const auto est = pilot_kde(data, h, x);
      for (std::size_t i = 0; i < x.size(); ++i) {
        worst = std::max(worst, std::fabs(est.values[i] - oracle::kde_direct(data, h, x[i])));
      }
    }
  }
  return {"pilot KDE vs direct summation", worst <= 1e-12, fmt("max_abs_err", worst)};
}

CheckResult second_moment_vs_difference_variance() {
  double worst = 0.0;
  std::string detail;
  bool ok = true;
  for (double ds : {30.0, 5.0, 1.0}) {
    const auto series = noisy_series(ds, 31);
    const std::size_t n = series.intervals();
    const auto m = estimate_moments(series, series.grid[2] - series.grid[1], 1);
    long double acc = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
      const long double d = series.y[j + 1] - series.y[j];
      acc += d * d;
    }
    const double classical = static_cast<double>(acc / (2.0L * n));
    const double rel = std::fabs(m.m_u[0] - classical) / classical;
    worst = std::max(worst, rel * static_cast<double>(n));
    ok = ok && rel <= 1.0 / static_cast<double>(n);
  }
  return {"M_U,2 vs first-difference variance", ok, fmt("max n*rel_diff", worst)};
}

std::vector<CheckResult> oracle_suite() {
  return {ecf_double_loop(), inversion_quadrature(), pilot_kde_direct(), second_moment_vs_difference_variance()};
}

}  // namespace hfdecon::checks
