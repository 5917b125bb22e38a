#pragma once

#include <span>
#include <vector>

#include "hfdecon/ecf.h"

namespace hfdecon {

inline constexpr int kMaxMomentOrder = 8;

struct MomentSet {
  double xi = 0.0;
  std::vector<double> m_tilde;  ///< estimates of E (U - U')^(2k), k = 1..kmax
  std::vector<double> m_u;      ///< estimates of E U^(2k), k = 1..kmax
};

/// Empirical 2k-th moments of the neighbourhood differences Y_l - Y_j.
std::vector<double> mtilde_moments(const TickSeries& series, const NeighborhoodIndex& nbhd, int kmax);

/// Inverts M_{U-U',2k} = sum_j C(2k,2j) M_{U,2j} M_{U,2k-2j} recursively.
/// Negative outputs at high order are passed through.
std::vector<double> recover_moments(std::span<const double> m_tilde);

/// Forward map used by the round-trip checks: difference moments implied by
/// the even moments of a symmetric law.
std::vector<double> convolve_moments(std::span<const double> m_u);

/// Neighbourhoods at xi, difference moments, then the recursion.
MomentSet estimate_moments(const TickSeries& series, double xi, int kmax);

/// C(n, k) as an exact integer recurrence converted once to double.
double binomial(int n, int k);

}  // namespace hfdecon
