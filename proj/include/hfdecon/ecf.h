#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "hfdecon/model_sim.h"

namespace hfdecon {

/// Relative slack applied to the window test |t_l - t_j| <= xi, so that a
/// window equal to one grid spacing captures every adjacent pair despite
/// rounding in the stored times.
inline constexpr double kWindowSlack = 1e-9;

/// Neighbourhood sets S_j = { t_l : |t_l - t_j| <= xi, l != j }.
///
/// Because the grid is sorted each S_j is a contiguous index range, so only
/// the range bounds are stored; ordered pairs are materialised on request.
class NeighborhoodIndex {
 public:
  NeighborhoodIndex(std::vector<std::size_t> lo, std::vector<std::size_t> hi, double xi);

  double xi() const { return xi_; }
  std::size_t points() const { return lo_.size(); }
  /// N_j.
  std::size_t count(std::size_t j) const { return hi_[j] - lo_[j]; }
  std::vector<std::size_t> counts() const;
  /// N(xi) = sum_j N_j.
  std::size_t total() const { return total_; }
  bool empty() const { return total_ == 0; }
  /// Inclusive index range of points within xi of t_j (contains j itself).
  std::pair<std::size_t, std::size_t> range(std::size_t j) const { return {lo_[j], hi_[j]}; }

  /// Every ordered pair (j, l) with t_l in S_j.
  std::vector<std::pair<std::size_t, std::size_t>> pairs() const;

  /// Calls fn(span of differences Y_l - Y_j) over each unordered pair j < l
  /// exactly once, in chunks of at most `chunk` values.
  template <class Fn>
  void for_each_difference_chunk(std::span<const double> y, Fn&& fn,
                                 std::size_t chunk = 1 << 16) const;

 private:
  std::vector<std::size_t> lo_, hi_;
  double xi_;
  std::size_t total_ = 0;
};

/// Two-pointer sweep over the sorted grid. Throws EstimationError when xi is
/// below every spacing (the index would be empty).
NeighborhoodIndex build_neighborhoods(const TimeGrid& grid, double xi);

enum class CharFnKind { ErrorFU1, DiffFUtilde };

struct CharFnEstimate {
  std::vector<double> s_grid;
  std::vector<double> values;
  double xi = 0.0;
  CharFnKind kind = CharFnKind::ErrorFU1;
};

/// Mean of cos(s * d) over the differences, for every s of the grid.
std::vector<double> mean_cosine(std::span<const double> diffs, std::span<const double> s_grid);

/// |mean cos(s d)|^(1/2) over an arbitrary set of difference values; shared
/// by the observation-level estimator and the bandwidth surrogates.
CharFnEstimate ecf_from_differences(std::span<const double> diffs, std::span<const double> s_grid,
                                    double xi);

/// Localised error characteristic function
/// |N(xi)^-1 sum_j sum_{l in S_j} cos{s (Y_l - Y_j)}|^(1/2).
CharFnEstimate ecf_error(const TickSeries& series, const NeighborhoodIndex& nbhd,
                         std::span<const double> s_grid);

/// Square of ecf_error: estimate of the characteristic function of U - U'.
CharFnEstimate ecf_diff(const TickSeries& series, const NeighborhoodIndex& nbhd,
                        std::span<const double> s_grid);

CharFnEstimate square(const CharFnEstimate& error_cf);

// ---------------------------------------------------------------------------

template <class Fn>
void NeighborhoodIndex::for_each_difference_chunk(std::span<const double> y, Fn&& fn,
                                                  std::size_t chunk) const {
  std::vector<double> buf;
  buf.reserve(chunk);
  for (std::size_t j = 0; j < lo_.size(); ++j) {
    const double yj = y[j];
    for (std::size_t l = j + 1; l <= hi_[j]; ++l) {
      buf.push_back(y[l] - yj);
      if (buf.size() == chunk) {
        fn(std::span<const double>(buf));
        buf.clear();
      }
    }
  }
  if (!buf.empty()) fn(std::span<const double>(buf));
}

}  // namespace hfdecon
