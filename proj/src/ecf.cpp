#include "hfdecon/ecf.h"

#include <cmath>
#include <stdexcept>

#include "hfdecon/errors.h"
#include "hfdecon/trig_sums.h"

namespace hfdecon {

NeighborhoodIndex::NeighborhoodIndex(std::vector<std::size_t> lo, std::vector<std::size_t> hi,
                                     double xi)
    : lo_(std::move(lo)), hi_(std::move(hi)), xi_(xi) {
  if (lo_.size() != hi_.size()) throw std::invalid_argument("NeighborhoodIndex: range size mismatch");
  for (std::size_t j = 0; j < lo_.size(); ++j) {
    if (lo_[j] > j || hi_[j] < j) throw std::invalid_argument("NeighborhoodIndex: range excludes j");
    total_ += hi_[j] - lo_[j];
  }
}

std::vector<std::size_t> NeighborhoodIndex::counts() const {
  std::vector<std::size_t> c(lo_.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = count(j);
  return c;
}

std::vector<std::pair<std::size_t, std::size_t>> NeighborhoodIndex::pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(total_);
  for (std::size_t j = 0; j < lo_.size(); ++j) {
    for (std::size_t l = lo_[j]; l <= hi_[j]; ++l) {
      if (l != j) out.emplace_back(j, l);
    }
  }
  return out;
}

NeighborhoodIndex build_neighborhoods(const TimeGrid& grid, double xi) {
  if (!(xi > 0.0) || !std::isfinite(xi)) throw std::invalid_argument("xi must be positive and finite");
  const auto& t = grid.points();
  const std::size_t n = t.size();
  const double window = xi * (1.0 + kWindowSlack);
  std::vector<std::size_t> lo(n), hi(n);
  std::size_t a = 0, b = 0;
  for (std::size_t j = 0; j < n; ++j) {
    while (t[j] - t[a] > window) ++a;
    if (b < j) b = j;
    while (b + 1 < n && t[b + 1] - t[j] <= window) ++b;
    lo[j] = a;
    hi[j] = b;
  }
  NeighborhoodIndex idx(std::move(lo), std::move(hi), xi);
  if (idx.empty()) {
    throw EstimationError("neighbourhood window xi is below every grid spacing; no pairs");
  }
  return idx;
}

std::vector<double> mean_cosine(std::span<const double> diffs, std::span<const double> s_grid) {
  if (diffs.empty()) throw EstimationError("no difference values to average");
  TrigSums sums(s_grid);
  sums.add(diffs);
  auto out = sums.cos_sums();
  for (auto& v : out) v /= static_cast<double>(diffs.size());
  return out;
}

namespace {

CharFnEstimate finish_error(std::vector<double> means, std::span<const double> s_grid, double xi) {
  CharFnEstimate est;
  est.s_grid.assign(s_grid.begin(), s_grid.end());
  est.xi = xi;
  est.kind = CharFnKind::ErrorFU1;
  est.values.resize(means.size());
  for (std::size_t k = 0; k < means.size(); ++k) {
    // Guard the last ulp so the [0, 1] bound holds exactly.
    est.values[k] = std::min(1.0, std::sqrt(std::fabs(means[k])));
  }
  return est;
}

}  // namespace

CharFnEstimate ecf_from_differences(std::span<const double> diffs, std::span<const double> s_grid,
                                    double xi) {
  return finish_error(mean_cosine(diffs, s_grid), s_grid, xi);
}

CharFnEstimate ecf_error(const TickSeries& series, const NeighborhoodIndex& nbhd,
                         std::span<const double> s_grid) {
  if (nbhd.empty()) throw EstimationError("empty neighbourhood index");
  if (nbhd.points() != series.size()) {
    throw std::invalid_argument("neighbourhood index was built for a different grid");
  }
  std::vector<double> abs_s(s_grid.begin(), s_grid.end());
  for (auto& v : abs_s) v = std::fabs(v);
  TrigSums sums(abs_s);
  nbhd.for_each_difference_chunk(series.y, [&](std::span<const double> d) { sums.add(d); });
  // Each unordered pair stands for the two ordered pairs of the double sum.
  auto means = sums.cos_sums();
  const double half_total = static_cast<double>(nbhd.total()) / 2.0;
  for (auto& v : means) v /= half_total;
  return finish_error(std::move(means), s_grid, nbhd.xi());
}

CharFnEstimate square(const CharFnEstimate& error_cf) {
  if (error_cf.kind != CharFnKind::ErrorFU1) {
    throw std::invalid_argument("square expects an error characteristic function");
  }
  CharFnEstimate out = error_cf;
  out.kind = CharFnKind::DiffFUtilde;
  for (auto& v : out.values) v *= v;
  return out;
}

CharFnEstimate ecf_diff(const TickSeries& series, const NeighborhoodIndex& nbhd,
                        std::span<const double> s_grid) {
  return square(ecf_error(series, nbhd, s_grid));
}

}  // namespace hfdecon
