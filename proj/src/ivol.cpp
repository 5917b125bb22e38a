#include "hfdecon/ivol.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hfdecon/errors.h"
#include "hfdecon/stats.h"
#include "hfdecon/trig_sums.h"

namespace hfdecon {

MultiscaleWeights multiscale_weights(std::size_t n) {
  if (n < 9) throw std::invalid_argument("multiscale estimator needs at least 10 observations");
  MultiscaleWeights w;
  w.n = n;
  w.N = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n + 1))));
  const double N = static_cast<double>(w.N);
  for (std::size_t m = 1; m <= w.N; ++m) {
    const double km = static_cast<double>(m);
    w.K.push_back(km);
    w.a.push_back(12.0 * km * (km - N / 2.0 - 0.5) / (N * (N * N - 1.0)));
  }
  w.zeta = w.K[0] * w.K[1] / (static_cast<double>(n + 1) * (w.K[1] - w.K[0]));
  return w;
}

std::vector<std::complex<double>> lag_exponential_sum(const TickSeries& series, std::size_t lag,
                                                      std::span<const double> s) {
  const auto& y = series.y;
  if (lag < 1 || lag >= y.size()) throw std::invalid_argument("lag outside the series");
  std::vector<double> d(y.size() - lag);
  for (std::size_t l = lag; l < y.size(); ++l) d[l - lag] = y[l] - y[l - lag];
  TrigSums sums(s, true);
  sums.add(d);
  const auto c = sums.cos_sums();
  const auto sn = sums.sin_sums();
  std::vector<std::complex<double>> out(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) out[k] = {c[k], sn[k]};
  return out;
}

std::vector<std::complex<double>> multiscale_g(const TickSeries& series, std::span<const double> s) {
  const auto w = multiscale_weights(series.intervals());
  // Coefficient on the raw lag-K exponential sum.
  std::vector<double> coef(w.N);
  for (std::size_t m = 0; m < w.N; ++m) coef[m] = w.a[m] / w.K[m];
  coef[0] += w.zeta / w.K[0];
  coef[1] -= w.zeta / w.K[1];

  std::vector<CompensatedSum> re(s.size()), im(s.size());
  for (std::size_t m = 0; m < w.N; ++m) {
    const auto sums = lag_exponential_sum(series, m + 1, s);
    for (std::size_t k = 0; k < s.size(); ++k) {
      re[k].add(coef[m] * sums[k].real());
      im[k].add(coef[m] * sums[k].imag());
    }
  }
  std::vector<std::complex<double>> g(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) g[k] = {re[k].value(), im[k].value()};
  return g;
}

std::complex<double> multiscale_g(const TickSeries& series, double s) {
  return multiscale_g(series, std::span<const double>(&s, 1)).front();
}

SGridSelection select_sgrid(const CharFnEstimate& charfn_diff, std::size_t m, double threshold) {
  if (charfn_diff.kind != CharFnKind::DiffFUtilde) {
    throw std::invalid_argument("select_sgrid expects the difference characteristic function");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  const auto& s = charfn_diff.s_grid;
  const auto& v = charfn_diff.values;
  SGridSelection out;
  std::optional<double> last_ok;
  std::optional<double> first_positive;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] < 0.0) continue;
    if (k > 0 && s[k] <= s[k - 1]) throw std::invalid_argument("scan grid must be increasing");
    if (s[k] == 0.0) continue;
    if (!first_positive) first_positive = s[k];
    if (v[k] < threshold) break;
    last_ok = s[k];
  }
  if (!first_positive) throw std::invalid_argument("scan grid has no positive frequency");
  if (last_ok) {
    out.S = *last_ok;
  } else {
    out.S = *first_positive;
    out.degenerate = true;
  }
  out.s_points.resize(m);
  for (std::size_t j = 1; j <= m; ++j) {
    out.s_points[j - 1] = out.S * static_cast<double>(j) / static_cast<double>(m);
  }
  out.s_points.back() = out.S;
  return out;
}

double realized_volatility(const TickSeries& series) {
  CompensatedSum acc;
  for (std::size_t j = 1; j < series.y.size(); ++j) {
    const double d = series.y[j] - series.y[j - 1];
    acc.add(d * d);
  }
  return acc.value();
}

VolatilityResult estimate_iv(const TickSeries& series, const IvolConfig& config) {
  if (series.size() < 10) throw std::invalid_argument("integrated volatility needs >= 10 observations");
  const auto& t = series.grid.points();
  const double xi = config.xi.value_or(t[2] - t[1]);
  const auto nbhd = build_neighborhoods(series.grid, xi);

  std::vector<double> first(series.size() - 1);
  for (std::size_t j = 1; j < series.size(); ++j) first[j - 1] = series.y[j] - series.y[j - 1];
  const double scale = robust_scale(first);
  if (!(scale > 0.0)) throw EstimationError("first differences have zero spread");
  const double cap = config.scan_cap_factor / scale;
  const double ds = cap / static_cast<double>(config.scan_steps);

  // Scan in blocks, stopping after the first block that drops below threshold.
  CharFnEstimate scanned;
  scanned.kind = CharFnKind::DiffFUtilde;
  scanned.xi = xi;
  constexpr std::size_t kBlock = 128;
  for (std::size_t start = 1; start <= config.scan_steps; start += kBlock) {
    const std::size_t stop = std::min(config.scan_steps, start + kBlock - 1);
    std::vector<double> block;
    for (std::size_t k = start; k <= stop; ++k) block.push_back(ds * static_cast<double>(k));
    const auto cf = ecf_diff(series, nbhd, block);
    scanned.s_grid.insert(scanned.s_grid.end(), cf.s_grid.begin(), cf.s_grid.end());
    scanned.values.insert(scanned.values.end(), cf.values.begin(), cf.values.end());
    if (std::any_of(cf.values.begin(), cf.values.end(),
                    [&](double v) { return v < config.threshold; })) {
      break;
    }
  }
  const auto sel = select_sgrid(scanned, config.m, config.threshold);

  const auto fdiff = ecf_diff(series, nbhd, sel.s_points);
  const auto g = multiscale_g(series, sel.s_points);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t j = 0; j < sel.s_points.size(); ++j) {
    const double s = sel.s_points[j];
    const double x = -0.5 * s * s * fdiff.values[j];
    sxy += x * g[j].real();
    sxx += x * x;
  }
  if (!(sxx > 0.0)) throw EstimationError("degenerate regression design (all regressors zero)");

  VolatilityResult out;
  out.beta_hat = sxy / sxx;
  out.s_points = sel.s_points;
  out.xi = xi;
  out.rv_baseline = realized_volatility(series);
  out.S = sel.S;
  out.m = sel.s_points.size();
  out.degenerate_sgrid = sel.degenerate;
  out.flagged_negative = out.beta_hat < 0.0;
  return out;
}

}  // namespace hfdecon
