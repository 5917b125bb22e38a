#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hfdecon {

/// Streams difference values d and accumulates, for every frequency s_k of a
/// fixed grid, the compensated sums of cos(s_k d) and (optionally) sin(s_k d).
///
/// On uniformly spaced grids the phases are advanced by complex rotation and
/// re-synchronised with exact cos/sin every few steps, which keeps the
/// per-term error at a few ulps while avoiding one libm call per (s, d).
/// Arbitrary grids fall back to direct evaluation.
class TrigSums {
 public:
  explicit TrigSums(std::span<const double> s_grid, bool with_sine = false);

  void add(std::span<const double> diffs);
  void add(double diff) { add(std::span<const double>(&diff, 1)); }

  std::size_t count() const { return count_; }
  std::vector<double> cos_sums() const;
  std::vector<double> sin_sums() const;
  bool uniform_grid() const { return uniform_; }

 private:
  void add_direct(std::span<const double> diffs);
  void add_block(const double* d);

  std::vector<double> s_;
  bool with_sine_;
  bool uniform_ = false;
  double step_ = 0.0;
  std::vector<double> cos_sum_, cos_comp_;
  std::vector<double> sin_sum_, sin_comp_;
  std::size_t count_ = 0;
};

}  // namespace hfdecon
