#include "hfdecon/density.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hfdecon/stats.h"

namespace hfdecon {

std::string to_string(KernelFamily k) { return k == KernelFamily::Sinc ? "sinc" : "gaussian"; }

KernelFamily parse_kernel_family(const std::string& s) {
  if (s == "sinc") return KernelFamily::Sinc;
  if (s == "gaussian" || s == "normal") return KernelFamily::Gaussian;
  throw std::invalid_argument("unknown kernel '" + s + "' (expected sinc or gaussian)");
}

void KernelSpec::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw std::invalid_argument("kernel bandwidth must be positive and finite");
  }
}

double KernelSpec::ft(double s) const {
  const double u = s * bandwidth;
  if (family == KernelFamily::Sinc) return std::fabs(u) <= 1.0 ? 1.0 : 0.0;
  return std::exp(-0.5 * u * u);
}

double KernelSpec::support() const {
  return (family == KernelFamily::Sinc ? 1.0 : 8.0) / bandwidth;
}

std::vector<double> default_s_grid(const KernelSpec& kernel, std::size_t count) {
  kernel.validate();
  return linspace(0.0, kernel.support(), count);
}

std::vector<double> default_x_grid(double scale, std::size_t count) {
  if (!(scale > 0.0)) throw std::invalid_argument("x grid scale must be positive");
  return linspace(-6.0 * scale, 6.0 * scale, count);
}

FourierInverter::FourierInverter(std::span<const double> s_grid, std::span<const double> x_grid)
    : x_(x_grid.begin(), x_grid.end()) {
  if (s_grid.empty()) throw std::invalid_argument("empty frequency grid");
  const double smax = std::fabs(s_grid.back()) > std::fabs(s_grid.front()) ? std::fabs(s_grid.back())
                                                                          : std::fabs(s_grid.front());
  while (offset_ < s_grid.size() && s_grid[offset_] < 0.0 &&
         !(std::fabs(s_grid[offset_]) <= 1e-12 * smax)) {
    ++offset_;
  }
  if (offset_ == s_grid.size() || std::fabs(s_grid[offset_]) > 1e-12 * smax) {
    throw std::invalid_argument("frequency grid must contain s = 0");
  }
  s_.assign(s_grid.begin() + static_cast<std::ptrdiff_t>(offset_), s_grid.end());
  s_.front() = 0.0;
  if (s_.size() < 2) throw std::invalid_argument("frequency grid has no positive part");
  for (std::size_t k = 1; k < s_.size(); ++k) {
    if (!(s_[k] > s_[k - 1])) throw std::invalid_argument("frequency grid must be increasing");
  }
  cos_.resize(x_.size() * s_.size());
  for (std::size_t i = 0; i < x_.size(); ++i) {
    double* row = cos_.data() + i * s_.size();
    for (std::size_t k = 0; k < s_.size(); ++k) row[k] = std::cos(s_[k] * x_[i]);
  }
}

std::vector<double> FourierInverter::weights(const KernelSpec& kernel) const {
  kernel.validate();
  const double support = kernel.support();
  const double smax = s_.back();
  std::vector<double> w(s_.size(), 0.0);
  if (kernel.family == KernelFamily::Sinc) {
    if (support > smax * (1.0 + 1e-9)) {
      throw std::invalid_argument("frequency grid does not cover the sinc support 1/h");
    }
    const double cut = std::min(support, smax);
    std::size_t a = 0;
    while (a + 1 < s_.size() && s_[a + 1] <= cut) ++a;
    for (std::size_t k = 1; k <= a; ++k) {
      const double half = 0.5 * (s_[k] - s_[k - 1]);
      w[k - 1] += half;
      w[k] += half;
    }
    if (a + 1 < s_.size() && cut > s_[a]) {
      // Partial panel [s_a, cut]: integrand at cut interpolated linearly.
      const double len = cut - s_[a];
      const double lam = len / (s_[a + 1] - s_[a]);
      w[a] += 0.5 * len * (2.0 - lam);
      w[a + 1] += 0.5 * len * lam;
    }
  } else {
    if (support > smax * (1.0 + 1e-9)) {
      throw std::invalid_argument("frequency grid does not cover the gaussian support 8/h");
    }
    for (std::size_t k = 1; k < s_.size(); ++k) {
      const double half = 0.5 * (s_[k] - s_[k - 1]);
      w[k - 1] += half;
      w[k] += half;
    }
    for (std::size_t k = 0; k < s_.size(); ++k) w[k] *= kernel.ft(s_[k]);
  }
  for (auto& v : w) v /= std::numbers::pi;
  return w;
}

std::vector<double> FourierInverter::apply(std::span<const double> phi,
                                           std::span<const double> weights) const {
  if (phi.size() != offset_ + s_.size()) {
    throw std::invalid_argument("characteristic function length differs from its frequency grid");
  }
  if (weights.size() != s_.size()) throw std::invalid_argument("weight vector has wrong length");
  const double* p = phi.data() + offset_;
  std::vector<double> wp(s_.size());
  std::size_t last = 0;
  for (std::size_t k = 0; k < s_.size(); ++k) {
    wp[k] = weights[k] * p[k];
    if (wp[k] != 0.0) last = k + 1;
  }
  std::vector<double> out(x_.size());
  for (std::size_t i = 0; i < x_.size(); ++i) {
    const double* row = cos_.data() + i * s_.size();
    double acc = 0.0;
    for (std::size_t k = 0; k < last; ++k) acc += row[k] * wp[k];
    out[i] = acc;
  }
  return out;
}

DensityEstimate invert_density(const CharFnEstimate& charfn, const KernelSpec& kernel,
                               std::span<const double> x_grid) {
  if (charfn.kind != CharFnKind::ErrorFU1) {
    throw std::invalid_argument("invert_density expects an error characteristic function");
  }
  if (charfn.values.size() != charfn.s_grid.size()) {
    throw std::invalid_argument("characteristic function values and grid differ in length");
  }
  FourierInverter inv(charfn.s_grid, x_grid);
  DensityEstimate est;
  est.x_grid.assign(x_grid.begin(), x_grid.end());
  est.values = inv.apply(charfn.values, kernel);
  est.kernel = kernel;
  est.xi = charfn.xi;
  est.truncated = false;
  return est;
}

DensityEstimate truncate_negative(const DensityEstimate& est) {
  DensityEstimate out = est;
  for (auto& v : out.values) v = std::max(v, 0.0);
  out.truncated = true;
  return out;
}

double ise(const DensityEstimate& est, const std::function<double(double)>& truth) {
  std::vector<double> sq(est.x_grid.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double d = est.values[i] - truth(est.x_grid[i]);
    sq[i] = d * d;
  }
  return trapezoid(est.x_grid, sq);
}

DensityEstimate estimate_error_density(const TickSeries& series, const KernelSpec& kernel, double xi,
                                       std::span<const double> x_grid, bool truncate,
                                       std::size_t s_points) {
  const auto nbhd = build_neighborhoods(series.grid, xi);
  const auto s = default_s_grid(kernel, s_points);
  auto est = invert_density(ecf_error(series, nbhd, s), kernel, x_grid);
  return truncate ? truncate_negative(est) : est;
}

}  // namespace hfdecon
