#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hfdecon {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values);
double mean(std::span<const double> values);
/// Unbiased sample variance (n - 1 denominator).
double variance(std::span<const double> values);
double stddev(std::span<const double> values);

/// Sample quantile, linear interpolation between order statistics (R type 7).
double quantile(std::span<const double> values, double p);
double median(std::span<const double> values);
double iqr(std::span<const double> values);
/// Median absolute deviation scaled by 1.4826 (consistent for the normal sd).
double mad_scale(std::span<const double> values);

/// Scale used for grid sizing: MAD scale, falling back to IQR/1.349 and then
/// to the sample sd when the data are too tied for the MAD to be positive.
double robust_scale(std::span<const double> values);

std::vector<double> linspace(double lo, double hi, std::size_t count);
std::vector<double> logspace(double lo, double hi, std::size_t count);

/// Trapezoid integral of `values` sampled on the ordered abscissae `grid`.
double trapezoid(std::span<const double> grid, std::span<const double> values);

/// Least-squares slope of y on x (with intercept).
double ols_slope(std::span<const double> x, std::span<const double> y);

}  // namespace hfdecon
