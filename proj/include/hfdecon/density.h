#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hfdecon/ecf.h"

namespace hfdecon {

enum class KernelFamily { Sinc, Gaussian };

std::string to_string(KernelFamily k);
KernelFamily parse_kernel_family(const std::string& s);

struct KernelSpec {
  KernelFamily family = KernelFamily::Sinc;
  double bandwidth = 1.0;

  void validate() const;
  /// K^ft(s h).
  double ft(double s) const;
  /// Largest |s| the inversion integrates to: 1/h (sinc) or 8/h (gaussian,
  /// where exp(-s^2 h^2 / 2) < 1.3e-14).
  double support() const;
};

struct DensityEstimate {
  std::vector<double> x_grid;
  std::vector<double> values;
  KernelSpec kernel;
  double xi = 0.0;
  bool truncated = false;
};

/// Uniform frequency grid on [0, kernel.support()].
std::vector<double> default_s_grid(const KernelSpec& kernel, std::size_t count = 2048);

/// Uniform abscissae on [-6 scale, 6 scale].
std::vector<double> default_x_grid(double scale, std::size_t count = 512);

/// Trapezoid evaluation of pi^-1 int_0^S cos(s x) phi(s) K^ft(s h) ds for a
/// fixed frequency grid and x grid, reusable across characteristic functions
/// and bandwidths. Only the s >= 0 part of the grid is used (the integrand is
/// even) and it must start at s = 0. For the sinc kernel a cut-off 1/h that
/// falls between grid points is handled by linear interpolation on the last
/// partial panel.
class FourierInverter {
 public:
  FourierInverter(std::span<const double> s_grid, std::span<const double> x_grid);

  /// Quadrature weights (including K^ft and the 1/pi factor) for `kernel`;
  /// throws std::invalid_argument when the grid does not reach the kernel support.
  std::vector<double> weights(const KernelSpec& kernel) const;

  /// Density values on the x grid; `phi` is indexed like the full s grid.
  std::vector<double> apply(std::span<const double> phi, std::span<const double> weights) const;
  std::vector<double> apply(std::span<const double> phi, const KernelSpec& kernel) const {
    return apply(phi, weights(kernel));
  }

  const std::vector<double>& x_grid() const { return x_; }

 private:
  std::vector<double> s_;     // nonnegative part of the grid
  std::size_t offset_ = 0;    // index of s = 0 in the caller's grid
  std::vector<double> x_;
  std::vector<double> cos_;   // x-major table cos(s_k x_i)
};

/// Error-density estimate f_U(x; xi) by Fourier inversion of the damped
/// characteristic function; negative lobes are retained.
DensityEstimate invert_density(const CharFnEstimate& charfn, const KernelSpec& kernel,
                               std::span<const double> x_grid);

/// Clamp negative values to zero (no renormalisation).
DensityEstimate truncate_negative(const DensityEstimate& est);

/// Trapezoid integral of (fhat - truth)^2 over the estimate's x grid.
double ise(const DensityEstimate& est, const std::function<double(double)>& truth);

/// Error-density estimate at fixed (kernel, xi) on x_grid with the default
/// 2048-point frequency grid; optionally truncated at zero.
DensityEstimate estimate_error_density(const TickSeries& series, const KernelSpec& kernel, double xi,
                                       std::span<const double> x_grid, bool truncate = true,
                                       std::size_t s_points = 2048);

}  // namespace hfdecon
