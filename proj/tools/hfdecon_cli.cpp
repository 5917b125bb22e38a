#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "hfdecon/bandwidth.h"
#include "hfdecon/bench.h"
#include "hfdecon/density.h"
#include "hfdecon/errors.h"
#include "hfdecon/io.h"
#include "hfdecon/ivol.h"
#include "hfdecon/model_sim.h"
#include "hfdecon/moments.h"
#include "hfdecon/rng.h"
#include "hfdecon/stats.h"
#include "hfdecon/ticks.h"

using namespace hfdecon;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitEstimation = 3;

struct Globals {
  std::uint64_t seed = 1;
  std::string out = "-";
  std::string format = "csv";
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::invalid_argument("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

TickSeries load_series(const std::string& path) {
  if (path == "-") return read_series_csv(std::cin);
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input file " + path);
  return read_series_csv(in);
}

std::vector<double> first_differences(const TickSeries& s) {
  std::vector<double> d(s.intervals());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = s.y[j + 1] - s.y[j];
  return d;
}

bool has_ties(const TickSeries& s) {
  const auto d = first_differences(s);
  return std::set<double>(d.begin(), d.end()).size() < d.size();
}

void emit_json(const Globals& g, const nlohmann::json& j) {
  Output out(g.out);
  out.stream() << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noise density, moment and integrated-volatility estimation from high-frequency prices"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master random seed")->capture_default_str();
  app.add_option("--out", g.out, "Output file ('-' for stdout)")->capture_default_str();
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate a noisy Heston log-price series");
  std::string model = "i", noise = "normal";
  double sigma_u = 0.005, delta_s = 30.0, jitter = 0.0;
  int substeps = 10;
  sim->add_option("--model", model, "Heston parameter set")->check(CLI::IsMember({"i", "ii"}))->capture_default_str();
  sim->add_option("--noise", noise, "Noise family")->check(CLI::IsMember({"normal", "t8"}))->capture_default_str();
  sim->add_option("--sigma-u", sigma_u, "Noise scale")->capture_default_str();
  sim->add_option("--delta-s", delta_s, "Sampling interval in seconds")->capture_default_str();
  sim->add_option("--jitter", jitter, "Interior grid jitter as a fraction of the spacing")->capture_default_str();
  sim->add_option("--substeps", substeps, "Euler sub-steps per interval")->capture_default_str();

  // density
  auto* den = app.add_subcommand("density", "Estimate the noise density");
  std::string input = "-", kernel = "auto", surface_out;
  std::optional<double> bandwidth, xi;
  std::size_t x_points = 512;
  bool no_truncate = false;
  den->add_option("--input", input, "Series CSV (time,value)")->capture_default_str();
  den->add_option("--kernel", kernel, "Kernel; auto picks gaussian for tied data, sinc otherwise")
      ->check(CLI::IsMember({"auto", "sinc", "gaussian"}))
      ->capture_default_str();
  den->add_option("--bandwidth", bandwidth, "Bandwidth (selected from the data when omitted)");
  den->add_option("--xi", xi, "Neighbourhood radius in year units (selected when omitted)");
  den->add_option("--x-points", x_points, "Evaluation grid size")->capture_default_str();
  den->add_flag("--no-truncate", no_truncate, "Keep negative density values");

  // moments
  auto* mom = app.add_subcommand("moments", "Estimate even noise moments");
  int kmax = 2;
  mom->add_option("--input", input, "Series CSV (time,value)")->capture_default_str();
  mom->add_option("--xi", xi, "Neighbourhood radius (default t2 - t1)");
  mom->add_option("--kmax", kmax, "Highest moment order k (moments 2..2k)")->check(CLI::Range(1, kMaxMomentOrder))
      ->capture_default_str();

  // ivol
  auto* iv = app.add_subcommand("ivol", "Estimate integrated volatility");
  IvolConfig ivc;
  iv->add_option("--input", input, "Series CSV (time,value)")->capture_default_str();
  iv->add_option("--xi", xi, "Neighbourhood radius (default t2 - t1)");
  iv->add_option("--m", ivc.m, "Number of regression frequencies")->capture_default_str();
  iv->add_option("--threshold", ivc.threshold, "Frequency cut-off level of the difference ECF")
      ->capture_default_str();

  // bandwidth
  auto* bw = app.add_subcommand("bandwidth", "Select (h, xi) by the two-level surrogate search");
  bool break_ties_flag = false;
  bw->add_option("--input", input, "Series CSV (time,value)")->capture_default_str();
  bw->add_option("--kernel", kernel, "Kernel; auto picks gaussian for tied data, sinc otherwise")
      ->check(CLI::IsMember({"auto", "sinc", "gaussian"}))
      ->capture_default_str();
  bw->add_flag("--break-ties", break_ties_flag, "Perturb tied pilot samples before the pilot bandwidth");
  bw->add_option("--ise-surface", surface_out, "Optional CSV dump of the level-1 ISE surface");

  // ingest
  auto* ing = app.add_subcommand("ingest", "Clean raw ticks (timestamp,price[,cond,corr]) into a series");
  ing->add_option("--input", input, "Tick CSV")->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "Monte Carlo benchmark over simulation cells");
  BenchmarkConfig bc;
  std::vector<std::string> noises{"normal"};
  std::vector<std::string> estimators{"density", "moments", "ivol"};
  std::string bench_kernel = "sinc", csv_out;
  bench->add_option("--models", bc.models, "Heston parameter sets")->check(CLI::IsMember({"i", "ii"}))
      ->capture_default_str();
  bench->add_option("--noises", noises, "Noise families")->check(CLI::IsMember({"normal", "t8"}))
      ->capture_default_str();
  bench->add_option("--sigma-u", bc.sigma_u, "Noise scales")->capture_default_str();
  bench->add_option("--delta-s", bc.delta_s, "Sampling intervals in seconds")->capture_default_str();
  bench->add_option("--replications", bc.replications, "Replications per cell")->capture_default_str();
  bench->add_option("--kernel", bench_kernel, "Kernel")->check(CLI::IsMember({"sinc", "gaussian"}))
      ->capture_default_str();
  bench->add_option("--estimators", estimators, "Estimators to run")
      ->check(CLI::IsMember({"density", "moments", "ivol"}))
      ->capture_default_str();
  bench->add_option("--threads", bc.threads, "Worker threads")->capture_default_str();
  bench->add_option("--substeps", bc.substeps, "Euler sub-steps per interval")->capture_default_str();
  bench->add_option("--jitter", bc.jitter, "Interior grid jitter")->capture_default_str();
  bench->add_option("--kmax", bc.kmax, "Highest moment order")->capture_default_str();
  bench->add_option("--max-failure-fraction", bc.max_failure_fraction, "Failure fraction treated as a run failure")
      ->capture_default_str();
  bench->add_option("--csv-out", csv_out, "Also write the CSV report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*sim) {
      const auto params = HestonParams::named(model);
      const NoiseSpec ns{parse_noise_family(noise), sigma_u};
      ns.validate();
      const auto grid = make_time_grid(delta_s, jitter, derive_seed(g.seed, 4));
      const auto path = simulate_heston(params, grid, substeps, derive_seed(g.seed, 1));
      const auto series = make_observations(path, generate_noise(ns, grid.size(), derive_seed(g.seed, 2)));
      if (g.format == "json") {
        emit_json(g, {{"time", series.grid.points()}, {"value", series.y}, {"integrated_vol", path.integrated_vol}});
      } else {
        Output out(g.out);
        write_series_csv(out.stream(), series);
      }
    } else if (*den) {
      const auto series = load_series(input);
      const auto family =
          kernel == "auto" ? (has_ties(series) ? KernelFamily::Gaussian : KernelFamily::Sinc) : parse_kernel_family(kernel);
      double h = 0.0, radius = 0.0;
      if (bandwidth && xi) {
        h = *bandwidth;
        radius = *xi;
      } else {
        BandwidthConfig cfg;
        cfg.kernel = family;
        cfg.seed = g.seed;
        const auto sel = select_h_xi(series, cfg);
        h = bandwidth.value_or(sel.h_hat);
        radius = xi.value_or(sel.xi_hat);
      }
      const auto x_grid = default_x_grid(robust_scale(first_differences(series)) / std::sqrt(2.0), x_points);
      const auto est = estimate_error_density(series, KernelSpec{family, h}, radius, x_grid, !no_truncate);
      if (g.format == "json") {
        emit_json(g, {{"kernel", to_string(family)}, {"h", h}, {"xi", radius}, {"truncated", est.truncated},
                      {"x", est.x_grid}, {"fhat", est.values}});
      } else {
        Output out(g.out);
        write_density_csv(out.stream(), est);
      }
    } else if (*mom) {
      const auto series = load_series(input);
      const auto est = estimate_moments(series, xi.value_or(series.grid[2] - series.grid[1]), kmax);
      if (g.format == "json") {
        emit_json(g, to_json(est));
      } else {
        Output out(g.out);
        out.stream() << std::setprecision(17) << "k,m_tilde,m_u\n";
        for (std::size_t k = 0; k < est.m_u.size(); ++k) {
          out.stream() << k + 1 << ',' << est.m_tilde[k] << ',' << est.m_u[k] << '\n';
        }
      }
    } else if (*iv) {
      const auto series = load_series(input);
      ivc.xi = xi;
      const auto res = estimate_iv(series, ivc);
      if (g.format == "json") {
        emit_json(g, to_json(res));
      } else {
        Output out(g.out);
        out.stream() << std::setprecision(17) << "beta_hat,rv_baseline,xi,m,S,flagged_negative\n"
                     << res.beta_hat << ',' << res.rv_baseline << ',' << res.xi << ',' << res.m << ',' << res.S
                     << ',' << (res.flagged_negative ? 1 : 0) << '\n';
      }
    } else if (*bw) {
      const auto series = load_series(input);
      BandwidthConfig cfg;
      cfg.kernel =
          kernel == "auto" ? (has_ties(series) ? KernelFamily::Gaussian : KernelFamily::Sinc) : parse_kernel_family(kernel);
      cfg.break_ties = break_ties_flag;
      cfg.seed = g.seed;
      const auto sel = select_h_xi(series, cfg);
      if (!surface_out.empty()) {
        Output s(surface_out);
        write_ise_surface_csv(s.stream(), sel);
      }
      if (g.format == "json") {
        emit_json(g, to_json(sel));
      } else {
        Output out(g.out);
        out.stream() << std::setprecision(17) << "h1,xi1,h2,h_hat,xi_hat\n"
                     << sel.h1 << ',' << sel.xi1 << ',' << sel.h2 << ',' << sel.h_hat << ',' << sel.xi_hat << '\n';
      }
    } else if (*ing) {
      std::vector<RawTickRecord> records;
      if (input == "-") {
        records = read_ticks_csv(std::cin);
      } else {
        std::ifstream in(input);
        if (!in) throw std::invalid_argument("cannot open input file " + input);
        records = read_ticks_csv(in);
      }
      const auto series = preprocess_ticks(std::move(records));
      if (g.format == "json") {
        emit_json(g, series ? nlohmann::json{{"time", series->grid.points()}, {"value", series->y}}
                            : nlohmann::json{{"time", nlohmann::json::array()}, {"value", nlohmann::json::array()}});
      } else {
        Output out(g.out);
        if (series) write_series_csv(out.stream(), *series);
        else out.stream() << "time,value\n";
      }
    } else if (*bench) {
      bc.master_seed = g.seed;
      bc.kernel = parse_kernel_family(bench_kernel);
      bc.noises.clear();
      for (const auto& nf : noises) bc.noises.push_back(parse_noise_family(nf));
      const std::set<std::string> est(estimators.begin(), estimators.end());
      bc.density = est.count("density") > 0;
      bc.moments = est.count("moments") > 0;
      bc.ivol = est.count("ivol") > 0;
      const auto report = run_benchmark(bc, [](std::size_t done, std::size_t total) {
        std::cerr << "cell " << done << "/" << total << " done\n";
      });
      {
        Output out(g.out);
        if (g.format == "json") out.stream() << to_json(report).dump(2) << '\n';
        else write_report_csv(out.stream(), report);
      }
      if (!csv_out.empty()) {
        Output c(csv_out);
        write_report_csv(c.stream(), report);
      }
      if (report.failed) {
        std::cerr << "estimator failures exceeded the configured fraction\n";
        return kExitEstimation;
      }
    }
  } catch (const EstimationError& e) {
    std::cerr << "estimation failed: " << e.what() << '\n';
    return kExitEstimation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
