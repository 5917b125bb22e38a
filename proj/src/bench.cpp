#include "hfdecon/bench.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "hfdecon/bandwidth.h"
#include "hfdecon/ivol.h"
#include "hfdecon/moments.h"
#include "hfdecon/rng.h"
#include "hfdecon/stats.h"

namespace hfdecon {

namespace {

constexpr std::uint64_t kStreamPath = 1;
constexpr std::uint64_t kStreamNoise = 2;
constexpr std::uint64_t kStreamSelect = 3;
constexpr std::uint64_t kStreamGrid = 4;

struct RepOutcome {
  bool density_ok = false;
  double ise = 0.0;
  bool moments_ok = false;
  std::vector<double> moment_dev;
  bool ivol_ok = false;
  double ivol_dev = 0.0;
  double rv_dev = 0.0;
  std::vector<std::string> errors;
};

struct CellSpec {
  HestonParams params;
  NoiseSpec noise;
  std::string model;
  double delta_s = 0.0;
};

RepOutcome run_replication(const BenchmarkConfig& config, const CellSpec& cell, std::size_t rep) {
  RepOutcome out;
  const std::uint64_t child = derive_seed(config.master_seed, rep);
  const TimeGrid grid = make_time_grid(cell.delta_s, config.jitter, derive_seed(child, kStreamGrid));

  auto record = [&](const char* what, const std::exception& e) {
    out.errors.push_back(std::string(what) + " rep " + std::to_string(rep) + ": " + e.what());
  };

  if (config.density || config.ivol) {
    const auto path = simulate_heston(cell.params, grid, config.substeps, derive_seed(child, kStreamPath));
    const auto noise = generate_noise(cell.noise, grid.size(), derive_seed(child, kStreamNoise));
    const auto series = make_observations(path, noise);
    if (config.density) {
      try {
        BandwidthConfig bc;
        bc.kernel = config.kernel;
        bc.seed = derive_seed(child, kStreamSelect);
        const auto sel = select_h_xi(series, bc);
        const auto x_grid = default_x_grid(std::sqrt(cell.noise.variance()), 1024);
        const auto est =
            estimate_error_density(series, KernelSpec{config.kernel, sel.h_hat}, sel.xi_hat, x_grid, true);
        const NoiseSpec truth = cell.noise;
        out.ise = ise(est, [&](double x) { return truth.pdf(x); });
        out.density_ok = std::isfinite(out.ise);
      } catch (const std::exception& e) {
        record("density", e);
      }
    }
    if (config.ivol) {
      try {
        const auto res = estimate_iv(series);
        out.ivol_dev = (res.beta_hat - path.integrated_vol) / path.integrated_vol;
        out.rv_dev = (res.rv_baseline - path.integrated_vol) / path.integrated_vol;
        out.ivol_ok = std::isfinite(out.ivol_dev);
      } catch (const std::exception& e) {
        record("ivol", e);
      }
    }
  }
  if (config.moments) {
    try {
      const auto [p, s] = rescale_model(cell.params, cell.noise, config.moment_rescale);
      const auto path = simulate_heston(p, grid, config.substeps, derive_seed(child, kStreamPath));
      const auto noise = generate_noise(s, grid.size(), derive_seed(child, kStreamNoise));
      const auto series = make_observations(path, noise);
      const auto est = estimate_moments(series, grid[2] - grid[1], config.kmax);
      out.moment_dev.resize(est.m_u.size());
      for (std::size_t k = 0; k < est.m_u.size(); ++k) {
        const double truth = s.even_moment(static_cast<int>(k) + 1);
        out.moment_dev[k] = (est.m_u[k] - truth) / truth;
      }
      out.moments_ok = std::all_of(out.moment_dev.begin(), out.moment_dev.end(),
                                   [](double v) { return std::isfinite(v); });
    } catch (const std::exception& e) {
      record("moments", e);
    }
  }
  return out;
}

nlohmann::json summary_json(std::span<const double> v) {
  if (v.empty()) return nullptr;
  const auto s = summarize(v);
  return {{"count", s.count}, {"mean", s.mean}, {"sd", s.sd},    {"median", s.median},
          {"q1", s.q1},       {"q3", s.q3},     {"median_abs", s.median_abs}};
}

}  // namespace

void BenchmarkConfig::validate() const {
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (models.empty() || noises.empty() || sigma_u.empty() || delta_s.empty()) {
    throw std::invalid_argument("every benchmark dimension needs at least one value");
  }
  if (!density && !moments && !ivol) throw std::invalid_argument("no estimator selected");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
  if (substeps < 1) throw std::invalid_argument("substeps must be at least 1");
  if (kmax < 1 || kmax > kMaxMomentOrder) throw std::invalid_argument("kmax out of range");
  if (!(moment_rescale > 0.0)) throw std::invalid_argument("moment rescale factor must be positive");
  for (const auto& m : models) HestonParams::named(m);
  for (double s : sigma_u) NoiseSpec{NoiseFamily::Normal, s}.validate();
  if (!(max_failure_fraction >= 0.0 && max_failure_fraction <= 1.0)) {
    throw std::invalid_argument("max failure fraction must lie in [0, 1]");
  }
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = mean(values);
  s.sd = values.size() > 1 ? stddev(values) : 0.0;
  s.median = median(values);
  s.q1 = quantile(values, 0.25);
  s.q3 = quantile(values, 0.75);
  std::vector<double> a(values.size());
  std::transform(values.begin(), values.end(), a.begin(), [](double v) { return std::fabs(v); });
  s.median_abs = median(a);
  return s;
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config, const ProgressFn& progress) {
  config.validate();
  std::vector<CellSpec> specs;
  for (const auto& m : config.models) {
    for (auto nf : config.noises) {
      for (double su : config.sigma_u) {
        for (double ds : config.delta_s) {
          specs.push_back({HestonParams::named(m), NoiseSpec{nf, su}, m, ds});
        }
      }
    }
  }

  BenchmarkReport report;
  report.config = config;
  for (std::size_t c = 0; c < specs.size(); ++c) {
    const auto& spec = specs[c];
    std::vector<RepOutcome> outcomes(config.replications);
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr fatal;
    auto worker = [&] {
      for (std::size_t r = next++; r < config.replications; r = next++) {
        try {
          outcomes[r] = run_replication(config, spec, r);
        } catch (...) {
          std::lock_guard lock(err_mutex);
          if (!fatal) fatal = std::current_exception();
        }
      }
    };
    const std::size_t nthreads = std::min(config.threads, config.replications);
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < nthreads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (fatal) std::rethrow_exception(fatal);

    CellReport cell;
    cell.model = spec.model;
    cell.noise = spec.noise.family;
    cell.sigma_u = spec.noise.sigma_u;
    cell.delta_s = spec.delta_s;
    cell.n = make_time_grid(spec.delta_s).intervals();
    cell.replications = config.replications;
    cell.moment_dev.assign(static_cast<std::size_t>(config.kmax), {});
    for (const auto& o : outcomes) {
      if (config.density) {
        if (o.density_ok) cell.ise.push_back(o.ise);
        else ++cell.density_failures;
      }
      if (config.moments) {
        if (o.moments_ok) {
          for (std::size_t k = 0; k < o.moment_dev.size(); ++k) cell.moment_dev[k].push_back(o.moment_dev[k]);
        } else {
          ++cell.moment_failures;
        }
      }
      if (config.ivol) {
        if (o.ivol_ok) {
          cell.ivol_dev.push_back(o.ivol_dev);
          cell.rv_dev.push_back(o.rv_dev);
        } else {
          ++cell.ivol_failures;
        }
      }
      cell.failure_messages.insert(cell.failure_messages.end(), o.errors.begin(), o.errors.end());
    }
    const double limit = config.max_failure_fraction * static_cast<double>(config.replications);
    for (std::size_t f : {cell.density_failures, cell.moment_failures, cell.ivol_failures}) {
      if (static_cast<double>(f) > limit) report.failed = true;
    }
    report.cells.push_back(std::move(cell));
    if (progress) progress(c + 1, specs.size());
  }
  return report;
}

nlohmann::json to_json(const BenchmarkReport& report) {
  const auto& cfg = report.config;
  nlohmann::json noises = nlohmann::json::array();
  for (auto nf : cfg.noises) noises.push_back(to_string(nf));
  nlohmann::json j;
  j["config"] = {{"models", cfg.models},
                 {"noises", noises},
                 {"sigma_u", cfg.sigma_u},
                 {"delta_s", cfg.delta_s},
                 {"replications", cfg.replications},
                 {"master_seed", cfg.master_seed},
                 {"kernel", to_string(cfg.kernel)},
                 {"substeps", cfg.substeps},
                 {"jitter", cfg.jitter},
                 {"moment_rescale", cfg.moment_rescale},
                 {"kmax", cfg.kmax}};
  j["failed"] = report.failed;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : report.cells) {
    nlohmann::json cj = {{"model", c.model},
                         {"noise", to_string(c.noise)},
                         {"sigma_u", c.sigma_u},
                         {"delta_s", c.delta_s},
                         {"n", c.n},
                         {"replications", c.replications}};
    if (cfg.density) {
      cj["density"] = {{"ise", summary_json(c.ise)}, {"failures", c.density_failures}};
    }
    if (cfg.moments) {
      nlohmann::json mk = nlohmann::json::array();
      for (const auto& d : c.moment_dev) mk.push_back(summary_json(d));
      cj["moments"] = {{"relative_deviation", mk}, {"failures", c.moment_failures}};
    }
    if (cfg.ivol) {
      cj["ivol"] = {{"relative_deviation", summary_json(c.ivol_dev)},
                    {"rv_relative_deviation", summary_json(c.rv_dev)},
                    {"failures", c.ivol_failures}};
    }
    cj["failure_messages"] = c.failure_messages;
    j["cells"].push_back(std::move(cj));
  }
  return j;
}

void write_report_csv(std::ostream& os, const BenchmarkReport& report) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << "model,noise,sigma_u,delta_s,n,estimator,statistic,count,failures,mean,sd,median,q1,q3,median_abs\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  auto row = [&](const CellReport& c, const std::string& est, const std::string& stat,
                 std::span<const double> v, std::size_t failures) {
    const auto s = summarize(v);
    os << c.model << ',' << to_string(c.noise) << ',' << c.sigma_u << ',' << c.delta_s << ',' << c.n << ','
       << est << ',' << stat << ',' << s.count << ',' << failures << ',' << s.mean << ',' << s.sd << ','
       << s.median << ',' << s.q1 << ',' << s.q3 << ',' << s.median_abs << '\n';
  };
  for (const auto& c : report.cells) {
    if (report.config.density) row(c, "density", "ise", c.ise, c.density_failures);
    if (report.config.moments) {
      for (std::size_t k = 0; k < c.moment_dev.size(); ++k) {
        row(c, "moments", "relative_deviation_k" + std::to_string(k + 1), c.moment_dev[k], c.moment_failures);
      }
    }
    if (report.config.ivol) {
      row(c, "ivol", "relative_deviation", c.ivol_dev, c.ivol_failures);
      row(c, "ivol", "rv_relative_deviation", c.rv_dev, c.ivol_failures);
    }
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace hfdecon
