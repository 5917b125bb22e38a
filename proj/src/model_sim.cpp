#include "hfdecon/model_sim.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hfdecon/rng.h"
#include "hfdecon/stats.h"

namespace hfdecon {

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw std::invalid_argument("TimeGrid needs at least two points");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i])) throw std::invalid_argument("TimeGrid contains non-finite time");
    if (i > 0 && !(points_[i] > points_[i - 1])) {
      throw std::invalid_argument("TimeGrid times must be strictly increasing");
    }
  }
}

std::vector<double> TimeGrid::spacings() const {
  std::vector<double> d;
  d.reserve(intervals());
  for (std::size_t i = 1; i < points_.size(); ++i) d.push_back(points_[i] - points_[i - 1]);
  return d;
}

double TimeGrid::min_spacing() const {
  const auto d = spacings();
  return *std::min_element(d.begin(), d.end());
}

double TimeGrid::max_spacing() const {
  const auto d = spacings();
  return *std::max_element(d.begin(), d.end());
}

double TimeGrid::median_spacing() const { return median(spacings()); }

void HestonParams::validate() const {
  if (!(kappa > 0.0)) throw std::invalid_argument("Heston kappa must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("Heston tau must be positive");
  if (!(gamma >= 0.0)) throw std::invalid_argument("Heston gamma must be nonnegative");
  if (!(std::fabs(rho) <= 1.0)) throw std::invalid_argument("Heston rho must lie in [-1, 1]");
  if (!std::isfinite(x0)) throw std::invalid_argument("Heston x0 must be finite");
  if (!(initial_variance() >= 0.0)) throw std::invalid_argument("initial variance must be nonnegative");
}

HestonParams HestonParams::model_i() {
  return HestonParams{6.0, 0.16, 0.5, -0.6, std::log(100.0), std::nullopt};
}

HestonParams HestonParams::model_ii() {
  return HestonParams{4.0, 0.09, 0.3, -0.75, std::log(100.0), std::nullopt};
}

HestonParams HestonParams::named(const std::string& name) {
  if (name == "i" || name == "1") return model_i();
  if (name == "ii" || name == "2") return model_ii();
  throw std::invalid_argument("unknown model '" + name + "' (expected i or ii)");
}

std::string to_string(NoiseFamily f) { return f == NoiseFamily::Normal ? "normal" : "t8"; }

NoiseFamily parse_noise_family(const std::string& s) {
  if (s == "normal") return NoiseFamily::Normal;
  if (s == "t8" || s == "scaled_t8" || s == "student") return NoiseFamily::ScaledT8;
  throw std::invalid_argument("unknown noise family '" + s + "' (expected normal or t8)");
}

void NoiseSpec::validate() const {
  if (!(sigma_u >= 0.0) || !std::isfinite(sigma_u)) {
    throw std::invalid_argument("noise sigma_u must be finite and nonnegative");
  }
}

double NoiseSpec::variance() const {
  const double s2 = sigma_u * sigma_u;
  return family == NoiseFamily::Normal ? s2 : s2 * 8.0 / 6.0;
}

double NoiseSpec::even_moment(int k) const {
  if (k < 1) throw std::invalid_argument("even_moment: k must be >= 1");
  const double s2k = std::pow(sigma_u, 2 * k);
  double m = 1.0;
  if (family == NoiseFamily::Normal) {
    for (int i = 1; i <= 2 * k - 1; i += 2) m *= i;  // (2k-1)!!
  } else {
    // E T^(2k) = nu^k * prod_{i=1..k} (2i-1)/(nu-2i) for nu = 8, defined for k < 4.
    if (k >= 4) throw std::invalid_argument("t(8) moments of order >= 8 are infinite");
    const double nu = 8.0;
    m = std::pow(nu, k);
    for (int i = 1; i <= k; ++i) m *= (2.0 * i - 1.0) / (nu - 2.0 * i);
  }
  return m * s2k;
}

double NoiseSpec::pdf(double x) const {
  if (sigma_u <= 0.0) throw std::domain_error("pdf undefined for degenerate noise");
  const double z = x / sigma_u;
  if (family == NoiseFamily::Normal) {
    return std::exp(-0.5 * z * z) / (sigma_u * std::sqrt(2.0 * std::numbers::pi));
  }
  const double nu = 8.0;
  const double lc = std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
                    0.5 * std::log(nu * std::numbers::pi);
  return std::exp(lc - (nu + 1.0) / 2.0 * std::log1p(z * z / nu)) / sigma_u;
}

TickSeries::TickSeries(TimeGrid g, std::vector<double> values)
    : grid(std::move(g)), y(std::move(values)) {
  if (grid.size() != y.size()) throw std::invalid_argument("TickSeries: grid and values differ in length");
  for (double v : y) {
    if (!std::isfinite(v)) throw std::invalid_argument("TickSeries: non-finite observation");
  }
}

TimeGrid make_time_grid(double delta_s, double jitter, std::uint64_t seed) {
  if (!(delta_s >= 1.0 && delta_s <= 1800.0)) {
    throw std::invalid_argument("delta_s must lie in [1, 1800] seconds");
  }
  if (!(jitter >= 0.0 && jitter < 0.5)) throw std::invalid_argument("jitter must lie in [0, 0.5)");
  const auto n = static_cast<std::size_t>(std::floor(kSecondsPerTradingDay / delta_s));
  const double horizon = 1.0 / kTradingDaysPerYear;
  std::vector<double> t(n + 1);
  for (std::size_t j = 0; j <= n; ++j) t[j] = horizon * static_cast<double>(j) / static_cast<double>(n);
  t.back() = horizon;
  if (jitter > 0.0) {
    const double dt = horizon / static_cast<double>(n);
    Rng rng(seed);
    for (std::size_t j = 1; j < n; ++j) t[j] += rng.uniform(-jitter, jitter) * dt;
    std::sort(t.begin(), t.end());
  }
  TimeGrid grid(std::move(t));
  const double ratio = grid.spacing_ratio();
  if (ratio < kMinSpacingRatio) {
    std::ostringstream msg;
    msg << "jittered grid has min/max spacing ratio " << ratio << " < " << kMinSpacingRatio
        << " (jitter " << jitter << " too large)";
    throw std::invalid_argument(msg.str());
  }
  return grid;
}

PathSample simulate_heston(const HestonParams& params, const TimeGrid& grid, int substeps,
                           std::uint64_t seed) {
  params.validate();
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
  if (grid.size() < 2) throw std::invalid_argument("grid needs at least two points");

  Rng rng(seed);
  const double rho_perp = std::sqrt(std::max(0.0, 1.0 - params.rho * params.rho));
  PathSample out;
  out.grid = grid;
  out.x.resize(grid.size());
  out.sigma_sq.resize(grid.size());

  double x = params.x0;
  double v = params.initial_variance();
  CompensatedSum iv;
  out.x[0] = x;
  out.sigma_sq[0] = std::max(v, 0.0);
  for (std::size_t j = 1; j < grid.size(); ++j) {
    const double dt = (grid[j] - grid[j - 1]) / substeps;
    const double sqrt_dt = std::sqrt(dt);
    for (int k = 0; k < substeps; ++k) {
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      const double db = sqrt_dt * z1;
      const double dw = sqrt_dt * (params.rho * z1 + rho_perp * z2);
      const double vp = std::max(v, 0.0);
      const double vol = std::sqrt(vp);
      x += vol * db;
      iv.add(vp * dt);
      v += params.kappa * (params.tau - vp) * dt + params.gamma * vol * dw;
    }
    out.x[j] = x;
    out.sigma_sq[j] = std::max(v, 0.0);
  }
  out.integrated_vol = iv.value();
  return out;
}

std::vector<double> generate_noise(const NoiseSpec& spec, std::size_t count, std::uint64_t seed) {
  spec.validate();
  if (count < 1) throw std::invalid_argument("noise count must be >= 1");
  std::vector<double> u(count, 0.0);
  if (spec.sigma_u == 0.0) return u;
  Rng rng(seed);
  for (auto& v : u) {
    v = spec.sigma_u * (spec.family == NoiseFamily::Normal ? rng.normal() : rng.student_t(8));
  }
  return u;
}

TickSeries make_observations(const PathSample& path, std::span<const double> noise) {
  if (noise.size() != path.x.size()) {
    throw std::invalid_argument("make_observations: noise length differs from path length");
  }
  std::vector<double> y(path.x.size());
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = path.x[j] + noise[j];
  return TickSeries(path.grid, std::move(y));
}

std::pair<HestonParams, NoiseSpec> rescale_model(const HestonParams& params, const NoiseSpec& spec,
                                                  double c) {
  if (!(c > 0.0)) throw std::invalid_argument("rescale factor must be positive");
  HestonParams p = params;
  p.tau = c * c * params.tau;
  p.gamma = c * params.gamma;
  p.x0 = c * params.x0;
  if (params.sigma0_sq) p.sigma0_sq = c * c * *params.sigma0_sq;
  NoiseSpec s = spec;
  s.sigma_u = c * spec.sigma_u;
  return {p, s};
}

}  // namespace hfdecon
