#include "hfdecon/moments.h"

#include <cstdint>
#include <stdexcept>

#include "hfdecon/errors.h"
#include "hfdecon/stats.h"

namespace hfdecon {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return static_cast<double>(c);
}

std::vector<double> mtilde_moments(const TickSeries& series, const NeighborhoodIndex& nbhd, int kmax) {
  if (kmax < 1 || kmax > kMaxMomentOrder) throw std::invalid_argument("kmax must lie in [1, 8]");
  if (nbhd.empty()) throw EstimationError("empty neighbourhood index");
  if (nbhd.points() != series.size()) {
    throw std::invalid_argument("neighbourhood index was built for a different grid");
  }
  std::vector<CompensatedSum> acc(static_cast<std::size_t>(kmax));
  nbhd.for_each_difference_chunk(series.y, [&](std::span<const double> diffs) {
    for (double d : diffs) {
      const double d2 = d * d;
      double p = d2;
      for (int k = 0; k < kmax; ++k) {
        acc[static_cast<std::size_t>(k)].add(p);
        p *= d2;
      }
    }
  });
  const double half_total = static_cast<double>(nbhd.total()) / 2.0;
  std::vector<double> out(static_cast<std::size_t>(kmax));
  for (int k = 0; k < kmax; ++k) out[static_cast<std::size_t>(k)] = acc[static_cast<std::size_t>(k)].value() / half_total;
  return out;
}

std::vector<double> recover_moments(std::span<const double> m_tilde) {
  if (m_tilde.empty()) throw std::invalid_argument("recover_moments needs at least one moment");
  if (m_tilde.size() > static_cast<std::size_t>(kMaxMomentOrder)) {
    throw std::invalid_argument("at most 8 even moments are supported");
  }
  const int kmax = static_cast<int>(m_tilde.size());
  // mu[k] holds E U^(2k), mu[0] = 1.
  std::vector<long double> mu(static_cast<std::size_t>(kmax) + 1, 0.0L);
  mu[0] = 1.0L;
  for (int k = 1; k <= kmax; ++k) {
    long double cross = 0.0L;
    for (int j = 1; j <= k - 1; ++j) {
      cross += binomial(2 * k, 2 * j) * mu[static_cast<std::size_t>(j)] * mu[static_cast<std::size_t>(k - j)];
    }
    mu[static_cast<std::size_t>(k)] = 0.5L * (m_tilde[static_cast<std::size_t>(k - 1)] - cross);
  }
  return {mu.begin() + 1, mu.end()};
}

std::vector<double> convolve_moments(std::span<const double> m_u) {
  const int kmax = static_cast<int>(m_u.size());
  std::vector<double> mu(static_cast<std::size_t>(kmax) + 1);
  mu[0] = 1.0;
  for (int k = 1; k <= kmax; ++k) mu[static_cast<std::size_t>(k)] = m_u[static_cast<std::size_t>(k - 1)];
  std::vector<double> out(static_cast<std::size_t>(kmax));
  for (int k = 1; k <= kmax; ++k) {
    double s = 0.0;
    for (int j = 0; j <= k; ++j) {
      s += binomial(2 * k, 2 * j) * mu[static_cast<std::size_t>(j)] * mu[static_cast<std::size_t>(k - j)];
    }
    out[static_cast<std::size_t>(k - 1)] = s;
  }
  return out;
}

MomentSet estimate_moments(const TickSeries& series, double xi, int kmax) {
  const auto nbhd = build_neighborhoods(series.grid, xi);
  MomentSet out;
  out.xi = xi;
  out.m_tilde = mtilde_moments(series, nbhd, kmax);
  out.m_u = recover_moments(out.m_tilde);
  return out;
}

}  // namespace hfdecon
