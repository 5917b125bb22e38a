#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hfdecon/ecf.h"

namespace hfdecon {

/// Zhang-type multiscale weights with K_m = m, m = 1..N, N = floor(sqrt(n + 1)):
/// a_m = 12 K_m (m - N/2 - 1/2) / (N (N^2 - 1)) and zeta = K_1 K_2 / ((n + 1)(K_2 - K_1)).
struct MultiscaleWeights {
  std::size_t n = 0;
  std::size_t N = 0;
  std::vector<double> K;
  std::vector<double> a;
  double zeta = 0.0;
};

/// Throws std::invalid_argument when n < 9 (fewer than three scales).
MultiscaleWeights multiscale_weights(std::size_t n);

/// G(s) = sum_m a_m phi^{K_m}(s) + zeta (phi^{K_1}(s) - phi^{K_2}(s)), where
/// phi^K(s) = K^-1 sum_{l=K}^{n} exp{i s (Y_l - Y_{l-K})}.
std::vector<std::complex<double>> multiscale_g(const TickSeries& series, std::span<const double> s);
std::complex<double> multiscale_g(const TickSeries& series, double s);

/// Single-scale sum phi^K(s) * K; used as the noise-dominated reference.
std::vector<std::complex<double>> lag_exponential_sum(const TickSeries& series, std::size_t lag,
                                                      std::span<const double> s);

struct SGridSelection {
  std::vector<double> s_points;
  double S = 0.0;
  bool degenerate = false;  ///< threshold failed at the first scanned frequency
};

/// S = the largest scanned s (before the first drop below `threshold`) with
/// f_{U-U'}(s) >= threshold; returns m equispaced points in (0, S].
SGridSelection select_sgrid(const CharFnEstimate& charfn_diff, std::size_t m = 50,
                            double threshold = 0.99);

struct IvolConfig {
  std::optional<double> xi;      ///< defaults to t_2 - t_1
  std::size_t m = 50;
  double threshold = 0.99;
  std::size_t scan_steps = 4096;
  double scan_cap_factor = 4.0;  ///< S_cap = factor / robust scale of first differences
};

struct VolatilityResult {
  double beta_hat = 0.0;
  std::vector<double> s_points;
  double xi = 0.0;
  double rv_baseline = 0.0;
  double S = 0.0;
  std::size_t m = 0;
  bool degenerate_sgrid = false;
  bool flagged_negative = false;
};

/// Least squares through the origin of Re G(s_j) on -(s_j^2 / 2) f_{U-U'}(s_j; xi).
VolatilityResult estimate_iv(const TickSeries& series, const IvolConfig& config = {});

/// Sum of squared first differences.
double realized_volatility(const TickSeries& series);

}  // namespace hfdecon
