#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hfdecon {

/// Trading-calendar constants: 252 active days per year, 6.5 hours per day.
inline constexpr double kTradingDaysPerYear = 252.0;
inline constexpr double kSecondsPerTradingDay = 6.5 * 3600.0;

/// Lower bound on min/max spacing accepted for simulated grids.
inline constexpr double kMinSpacingRatio = 0.25;

/// Ordered observation times in year units.
class TimeGrid {
 public:
  TimeGrid() = default;
  /// Throws std::invalid_argument unless the points are finite and strictly increasing.
  explicit TimeGrid(std::vector<double> points);

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  /// Number of intervals n (there are n + 1 points t_0..t_n).
  std::size_t intervals() const { return points_.empty() ? 0 : points_.size() - 1; }
  double horizon() const { return points_.empty() ? 0.0 : points_.back(); }
  double operator[](std::size_t i) const { return points_[i]; }

  double min_spacing() const;
  double max_spacing() const;
  double median_spacing() const;
  double spacing_ratio() const { return min_spacing() / max_spacing(); }
  std::vector<double> spacings() const;

 private:
  std::vector<double> points_;
};

struct HestonParams {
  double kappa = 0.0;
  double tau = 0.0;
  double gamma = 0.0;
  double rho = 0.0;
  double x0 = 0.0;
  std::optional<double> sigma0_sq;  ///< defaults to tau

  double initial_variance() const { return sigma0_sq.value_or(tau); }
  void validate() const;

  /// (kappa, tau, gamma, rho) = (6, 0.16, 0.5, -0.6), X0 = log 100.
  static HestonParams model_i();
  /// (kappa, tau, gamma, rho) = (4, 0.09, 0.3, -0.75), X0 = log 100.
  static HestonParams model_ii();
  /// "i" or "ii".
  static HestonParams named(const std::string& name);
};

enum class NoiseFamily { Normal, ScaledT8 };

std::string to_string(NoiseFamily f);
NoiseFamily parse_noise_family(const std::string& s);

struct NoiseSpec {
  NoiseFamily family = NoiseFamily::Normal;
  double sigma_u = 0.0;

  void validate() const;
  /// Variance of U: sigma_u^2, or sigma_u^2 * 8/6 for the scaled t(8) law.
  double variance() const;
  /// E U^(2k).
  double even_moment(int k) const;
  /// Density of U at x.
  double pdf(double x) const;
};

struct PathSample {
  TimeGrid grid;
  std::vector<double> x;
  std::vector<double> sigma_sq;
  double integrated_vol = 0.0;
};

struct TickSeries {
  TimeGrid grid;
  std::vector<double> y;

  TickSeries() = default;
  /// Validates equal lengths and finite values.
  TickSeries(TimeGrid g, std::vector<double> values);
  std::size_t size() const { return y.size(); }
  std::size_t intervals() const { return grid.intervals(); }
};

/// Equispaced (or jittered) intraday grid on [0, 1/252] with
/// floor(23400 / delta_s) intervals. Interior points are displaced by
/// uniform(-jitter, jitter) * spacing. Throws std::invalid_argument when the
/// result violates the min/max spacing bound.
TimeGrid make_time_grid(double delta_s, double jitter = 0.0, std::uint64_t seed = 0);

/// Euler-Maruyama with full truncation on `substeps` equal sub-steps per
/// observation interval; drift of X is zero.
PathSample simulate_heston(const HestonParams& params, const TimeGrid& grid, int substeps,
                           std::uint64_t seed);

std::vector<double> generate_noise(const NoiseSpec& spec, std::size_t count, std::uint64_t seed);

TickSeries make_observations(const PathSample& path, std::span<const double> noise);

/// (tau, gamma, sigma_u, x0, sigma0^2) -> (c^2 tau, c gamma, c sigma_u, c x0, c^2 sigma0^2).
std::pair<HestonParams, NoiseSpec> rescale_model(const HestonParams& params, const NoiseSpec& spec,
                                                  double c);

}  // namespace hfdecon
