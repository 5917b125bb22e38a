#include "hfdecon/trig_sums.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hfdecon {

namespace {

constexpr std::size_t kBlock = 8;  // the pairwise sums below assume 8 lanes
constexpr std::size_t kResync = 32;

inline void neumaier(double& sum, double& comp, double v) {
  const double t = sum + v;
  comp += std::fabs(sum) >= std::fabs(v) ? (sum - t) + v : (v - t) + sum;
  sum = t;
}

// Neumaier-adds v[0..len) to sum[0..len) element-wise.
inline void neumaier_rows(double* __restrict sum, double* __restrict comp, const double* __restrict v,
                          std::size_t len) {
  for (std::size_t k = 0; k < len; ++k) neumaier(sum[k], comp[k], v[k]);
}

}  // namespace

TrigSums::TrigSums(std::span<const double> s_grid, bool with_sine)
    : s_(s_grid.begin(), s_grid.end()), with_sine_(with_sine) {
  for (double s : s_) {
    if (!std::isfinite(s)) throw std::invalid_argument("frequency grid contains non-finite values");
  }
  cos_sum_.assign(s_.size(), 0.0);
  cos_comp_.assign(s_.size(), 0.0);
  if (with_sine_) {
    sin_sum_.assign(s_.size(), 0.0);
    sin_comp_.assign(s_.size(), 0.0);
  }
  if (s_.size() >= 3) {
    step_ = (s_.back() - s_.front()) / static_cast<double>(s_.size() - 1);
    double scale = 0.0;
    for (double s : s_) scale = std::max(scale, std::fabs(s));
    uniform_ = step_ > 0.0;
    for (std::size_t k = 0; k < s_.size() && uniform_; ++k) {
      const double expect = s_.front() + step_ * static_cast<double>(k);
      if (std::fabs(s_[k] - expect) > 1e-12 * scale) uniform_ = false;
    }
  }
}

void TrigSums::add(std::span<const double> diffs) {
  count_ += diffs.size();
  if (!uniform_) {
    add_direct(diffs);
    return;
  }
  std::size_t i = 0;
  for (; i + kBlock <= diffs.size(); i += kBlock) add_block(diffs.data() + i);
  add_direct(diffs.subspan(i));
}

void TrigSums::add_direct(std::span<const double> diffs) {
  for (std::size_t k = 0; k < s_.size(); ++k) {
    double c = 0.0, sn = 0.0;
    for (double d : diffs) {
      const double a = s_[k] * d;
      c += std::cos(a);
      if (with_sine_) sn += std::sin(a);
    }
    neumaier(cos_sum_[k], cos_comp_[k], c);
    if (with_sine_) neumaier(sin_sum_[k], sin_comp_[k], sn);
  }
}

void TrigSums::add_block(const double* d) {
  double c[kBlock], sn[kBlock], wc[kBlock], ws[kBlock];
  for (std::size_t b = 0; b < kBlock; ++b) {
    wc[b] = std::cos(step_ * d[b]);
    ws[b] = std::sin(step_ * d[b]);
  }
  const std::size_t K = s_.size();
  for (std::size_t k0 = 0; k0 < K; k0 += kResync) {
    const std::size_t k1 = std::min(K, k0 + kResync);
    for (std::size_t b = 0; b < kBlock; ++b) {
      const double a = s_[k0] * d[b];
      c[b] = std::cos(a);
      sn[b] = std::sin(a);
    }
    double bc[kResync], bs[kResync];
    for (std::size_t k = 0; k < k1 - k0; ++k) {
      bc[k] = ((c[0] + c[1]) + (c[2] + c[3])) + ((c[4] + c[5]) + (c[6] + c[7]));
      bs[k] = ((sn[0] + sn[1]) + (sn[2] + sn[3])) + ((sn[4] + sn[5]) + (sn[6] + sn[7]));
      for (std::size_t b = 0; b < kBlock; ++b) {
        const double nc = c[b] * wc[b] - sn[b] * ws[b];
        sn[b] = sn[b] * wc[b] + c[b] * ws[b];
        c[b] = nc;
      }
    }
    neumaier_rows(cos_sum_.data() + k0, cos_comp_.data() + k0, bc, k1 - k0);
    if (with_sine_) neumaier_rows(sin_sum_.data() + k0, sin_comp_.data() + k0, bs, k1 - k0);
  }
}

std::vector<double> TrigSums::cos_sums() const {
  std::vector<double> out(s_.size());
  for (std::size_t k = 0; k < s_.size(); ++k) out[k] = cos_sum_[k] + cos_comp_[k];
  return out;
}

std::vector<double> TrigSums::sin_sums() const {
  if (!with_sine_) throw std::logic_error("TrigSums built without sine accumulation");
  std::vector<double> out(s_.size());
  for (std::size_t k = 0; k < s_.size(); ++k) out[k] = sin_sum_[k] + sin_comp_[k];
  return out;
}

}  // namespace hfdecon
