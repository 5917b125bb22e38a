#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "hfdecon/density.h"

namespace hfdecon {

/// Surrogate differences for one lag: values and the time separation of the
/// two surrogate points each value spans.
struct LagDifferences {
  std::vector<double> values;
  std::vector<double> gaps;
};

/// Level-k surrogate data whose pair differences behave like differences of
/// independent draws from f_k (f_1 = law of (U + U')/sqrt 2, f_2 = law of
/// (U_1 + U_2 + U_3 + U_4)/2).
struct SurrogateSeries {
  int level = 1;
  /// Surrogate times of the generic construction (midpoints of adjacent
  /// pairs for level 1, four-point averages for level 2).
  std::vector<double> times;
  std::map<std::size_t, LagDifferences> deltas;
  /// Pilot samples: Delta_{Y,j} (level 1) or Delta_{Y,j,2} (level 2).
  std::vector<double> direct;

  /// Every surrogate difference whose gap is within xi.
  std::vector<double> within(double xi) const;
  std::size_t max_lag() const { return deltas.empty() ? 0 : deltas.rbegin()->first; }
};

/// Level-1 construction. Lag 1 uses the pair-skip points (Y_j + Y_{j+2})/sqrt 2,
/// lags >= 2 the adjacent-pair points (Y_j + Y_{j+1})/sqrt 2. Requires n >= 4.
SurrogateSeries build_delta1(const TickSeries& series, std::size_t max_lag = 16);

/// Level-2 construction: four-point sums /2 with offset patterns
/// {0,1,2,3} (lags >= 4), {0,2,4,6} (lag 1), {0,1,4,5} (lag 2), {0,1,2,6} (lag 3).
/// Pilot samples Delta_{Y,j,2} = (Delta_{Y,j} - Delta_{Y,k(j)})/sqrt 2 with k(j)
/// drawn uniformly (k(j) != j) from `pilot_index` (all of 0..n-1 when empty).
/// Requires n >= 10.
SurrogateSeries build_delta2(const TickSeries& series, std::uint64_t seed, std::size_t max_lag = 16,
                             std::span<const std::size_t> pilot_index = {});

struct PilotBandwidth {
  double h = 0.0;
  bool fallback = false;  ///< normal-reference rule used instead of the plug-in root
};

/// 0.9 min(sd, IQR/1.34) n^(-1/5).
double normal_reference_bandwidth(std::span<const double> data);

/// Solve-the-equation plug-in bandwidth for a Gaussian-kernel density
/// estimate (binned pairwise functionals, bisection on
/// [1e-3, 10] x normal-reference bandwidth). Needs >= 16 distinct values.
PilotBandwidth sheather_jones(std::span<const double> data);

/// Gaussian-kernel density estimate on x_grid.
DensityEstimate pilot_kde(std::span<const double> data, double bandwidth,
                          std::span<const double> x_grid);

struct BandwidthConfig {
  KernelFamily kernel = KernelFamily::Sinc;
  std::size_t h_points = 20;
  double h_lo_factor = 0.1;
  double h_hi_factor = 10.0;
  std::vector<double> xi_multiples{1.0, 2.0, 3.0, 5.0, 8.0};
  std::size_t x_points = 512;
  /// Frequency points of the search quadrature; 0 picks a count from the
  /// grid extents so that (s step) * (x half-width) <= 1/4.
  std::size_t s_points = 0;
  bool truncate = true;
  bool break_ties = false;
  double pilot_fraction = 0.25;
  double unequal_ratio = 1.5;
  std::uint64_t seed = 0;
};

struct BandwidthSelection {
  double h1 = 0.0;
  double xi1 = 0.0;
  double h2 = 0.0;
  double h_hat = 0.0;
  double xi_hat = 0.0;
  std::vector<double> h_grid;
  std::vector<double> xi_grid;
  /// ise_surface[i][j]: level-1 ISE at (xi_grid[i], h_grid[j]); +inf where xi is infeasible.
  std::vector<std::vector<double>> ise_surface;
  std::vector<double> ise_level2;
  std::vector<double> x_grid;
  double pilot_h1 = 0.0;
  double pilot_h2 = 0.0;
  bool pilot_fallback = false;
};

/// Two-level grid search and ratio extrapolation h_hat = h1^2 / h2, xi_hat = xi1.
BandwidthSelection select_h_xi(const TickSeries& series, const BandwidthConfig& config = {});

}  // namespace hfdecon
