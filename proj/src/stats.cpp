#include "hfdecon/stats.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hfdecon {

double compensated_sum(std::span<const double> values) {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of empty sample");
  return compensated_sum(values) / static_cast<double>(values.size());
}

double variance(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("variance needs at least two values");
  const double m = mean(values);
  CompensatedSum acc;
  for (double v : values) acc.add((v - m) * (v - m));
  return acc.value() / static_cast<double>(values.size() - 1);
}

double stddev(std::span<const double> values) { return std::sqrt(variance(values)); }

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level outside [0,1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

double median(std::span<const double> values) { return quantile(values, 0.5); }

double iqr(std::span<const double> values) {
  return quantile(values, 0.75) - quantile(values, 0.25);
}

double mad_scale(std::span<const double> values) {
  const double med = median(values);
  std::vector<double> dev;
  dev.reserve(values.size());
  for (double v : values) dev.push_back(std::fabs(v - med));
  return 1.4826 * median(dev);
}

double robust_scale(std::span<const double> values) {
  double s = mad_scale(values);
  if (s > 0.0) return s;
  s = iqr(values) / 1.349;
  if (s > 0.0) return s;
  return values.size() >= 2 ? stddev(values) : 0.0;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count < 2) throw std::invalid_argument("linspace needs at least two points");
  std::vector<double> out(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

std::vector<double> logspace(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > 0.0)) throw std::invalid_argument("logspace bounds must be positive");
  auto exps = linspace(std::log(lo), std::log(hi), count);
  for (auto& e : exps) e = std::exp(e);
  exps.front() = lo;
  exps.back() = hi;
  return exps;
}

double trapezoid(std::span<const double> grid, std::span<const double> values) {
  if (grid.size() != values.size()) throw std::invalid_argument("trapezoid: size mismatch");
  CompensatedSum acc;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    acc.add(0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]));
  }
  return acc.value();
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ols_slope: bad input");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace hfdecon
