#pragma once

#include <cstdint>
#include <random>

namespace hfdecon {

/// SplitMix64 finalizer. Stable across platforms and compilers.
std::uint64_t splitmix64(std::uint64_t x);

/// Child seed for replication (or stream) `index` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Random source used by every simulator in the library.
///
/// Built on std::mt19937_64, whose output sequence is fixed by the standard;
/// the variate transforms are implemented here rather than taken from
/// <random> distributions so that draws do not depend on the standard
/// library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on {0, ..., n - 1}; n > 0.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal (Marsaglia polar method).
  double normal();

  /// Standard Student-t with `dof` degrees of freedom, built as Z / sqrt(chi2 / dof).
  double student_t(int dof);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hfdecon
