#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "hfdecon/density.h"
#include "hfdecon/model_sim.h"

namespace hfdecon {

struct BenchmarkConfig {
  std::vector<std::string> models{"i"};
  std::vector<NoiseFamily> noises{NoiseFamily::Normal};
  std::vector<double> sigma_u{0.005};
  std::vector<double> delta_s{30.0};
  std::size_t replications = 1;
  std::uint64_t master_seed = 1;
  KernelFamily kernel = KernelFamily::Sinc;
  bool density = true;
  bool moments = true;
  bool ivol = true;
  std::size_t threads = 1;
  int substeps = 10;
  double jitter = 0.0;
  /// Price and noise scale factor for the moment estimator.
  double moment_rescale = 100.0;
  int kmax = 2;
  /// Fraction of failed replications per cell above which the run is reported as failed.
  double max_failure_fraction = 0.5;

  void validate() const;
};

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double median_abs = 0.0;
};

Summary summarize(std::span<const double> values);

struct CellReport {
  std::string model;
  NoiseFamily noise = NoiseFamily::Normal;
  double sigma_u = 0.0;
  double delta_s = 0.0;
  std::size_t n = 0;
  std::size_t replications = 0;

  std::vector<double> ise;                     ///< per successful replication
  std::vector<std::vector<double>> moment_dev; ///< [k-1][rep]: (M_hat - M) / M
  std::vector<double> ivol_dev;                ///< (beta_hat - beta) / beta
  std::vector<double> rv_dev;                  ///< (RV - beta) / beta

  std::size_t density_failures = 0;
  std::size_t moment_failures = 0;
  std::size_t ivol_failures = 0;
  std::vector<std::string> failure_messages;
};

struct BenchmarkReport {
  BenchmarkConfig config;
  std::vector<CellReport> cells;
  /// True when some estimator failed in more than max_failure_fraction of a cell's replications.
  bool failed = false;
};

/// Optional progress sink: (cells done, total cells).
using ProgressFn = std::function<void(std::size_t, std::size_t)>;

/// Simulates every (model, noise, sigma_u, delta_s) cell. Replication r of
/// every cell uses child seed derive_seed(master_seed, r), so results do not
/// depend on the thread count.
BenchmarkReport run_benchmark(const BenchmarkConfig& config, const ProgressFn& progress = {});

nlohmann::json to_json(const BenchmarkReport& report);
/// One row per cell and estimator statistic.
void write_report_csv(std::ostream& os, const BenchmarkReport& report);

}  // namespace hfdecon
