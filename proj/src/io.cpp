#include "hfdecon/io.h"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>

namespace hfdecon {

namespace {

constexpr int kDigits = std::numeric_limits<double>::max_digits10;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, std::size_t line) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw FormatError("line " + std::to_string(line) + ": not a number: '" + t + "'");
  }
  return v;
}

template <typename Row>
void write_rows(std::ostream& os, const char* header, std::size_t count, Row row) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << header << '\n' << std::setprecision(kDigits);
  for (std::size_t i = 0; i < count; ++i) row(i);
  os.flags(flags);
  os.precision(prec);
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void write_series_csv(std::ostream& os, const TickSeries& series) {
  write_rows(os, "time,value", series.size(),
             [&](std::size_t i) { os << series.grid[i] << ',' << series.y[i] << '\n'; });
}

TickSeries read_series_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != "time,value") throw FormatError("expected header 'time,value'");
  std::vector<double> t, y;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 2) throw FormatError("line " + std::to_string(lineno) + ": expected two fields");
    t.push_back(parse_double(f[0], lineno));
    y.push_back(parse_double(f[1], lineno));
  }
  try {
    return TickSeries(TimeGrid(std::move(t)), std::move(y));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

void write_charfn_csv(std::ostream& os, const CharFnEstimate& cf) {
  write_rows(os, "s,value", cf.s_grid.size(),
             [&](std::size_t i) { os << cf.s_grid[i] << ',' << cf.values[i] << '\n'; });
}

void write_density_csv(std::ostream& os, const DensityEstimate& est) {
  write_rows(os, "x,fhat", est.x_grid.size(),
             [&](std::size_t i) { os << est.x_grid[i] << ',' << est.values[i] << '\n'; });
}

void write_ise_surface_csv(std::ostream& os, const BandwidthSelection& sel) {
  write_rows(os, "xi,h,ise", sel.xi_grid.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < sel.h_grid.size(); ++j) {
      const double e = sel.ise_surface[i][j];
      if (std::isfinite(e)) os << sel.xi_grid[i] << ',' << sel.h_grid[j] << ',' << e << '\n';
    }
  });
}

std::vector<RawTickRecord> read_ticks_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) return {};
  const auto header = split_csv_line(line);
  int c_ts = -1, c_price = -1, c_cond = -1, c_corr = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto& h = header[i];
    const int idx = static_cast<int>(i);
    if (h == "timestamp") c_ts = idx;
    else if (h == "price") c_price = idx;
    else if (h == "cond") c_cond = idx;
    else if (h == "corr") c_corr = idx;
  }
  if (c_ts < 0 || c_price < 0) throw FormatError("tick CSV needs 'timestamp' and 'price' columns");
  std::vector<RawTickRecord> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    auto field = [&](int c) -> std::string { return c >= 0 && static_cast<std::size_t>(c) < f.size() ? f[c] : ""; };
    RawTickRecord r;
    try {
      r.timestamp = parse_timestamp(field(c_ts));
    } catch (const std::exception&) {
      throw FormatError("line " + std::to_string(lineno) + ": bad timestamp '" + field(c_ts) + "'");
    }
    r.price = parse_double(field(c_price), lineno);
    r.condition_code = field(c_cond);
    const std::string corr = field(c_corr);
    if (!corr.empty()) {
      int v = 0;
      const auto res = std::from_chars(corr.data(), corr.data() + corr.size(), v);
      if (res.ec != std::errc() || res.ptr != corr.data() + corr.size()) {
        throw FormatError("line " + std::to_string(lineno) + ": bad corr '" + corr + "'");
      }
      r.correlation_indicator = v;
    }
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::json to_json(const MomentSet& m) {
  return {{"xi", m.xi}, {"k", m.m_u.size()}, {"m_tilde", m.m_tilde}, {"m_u", m.m_u}};
}

nlohmann::json to_json(const VolatilityResult& v) {
  return {{"beta_hat", v.beta_hat}, {"rv_baseline", v.rv_baseline},      {"xi", v.xi},
          {"m", v.m},               {"S", v.S},                          {"flagged_negative", v.flagged_negative},
          {"degenerate_sgrid", v.degenerate_sgrid}};
}

nlohmann::json to_json(const BandwidthSelection& b) {
  nlohmann::json surface = nlohmann::json::array();
  for (const auto& row : b.ise_surface) {
    nlohmann::json r = nlohmann::json::array();
    for (double e : row) r.push_back(finite_or_null(e));
    surface.push_back(r);
  }
  return {{"h1", b.h1},
          {"xi1", b.xi1},
          {"h2", b.h2},
          {"h_hat", b.h_hat},
          {"xi_hat", b.xi_hat},
          {"h_grid", b.h_grid},
          {"xi_grid", b.xi_grid},
          {"ise_surface", surface},
          {"ise_level2", b.ise_level2},
          {"pilot_h1", b.pilot_h1},
          {"pilot_h2", b.pilot_h2},
          {"pilot_fallback", b.pilot_fallback}};
}

nlohmann::json to_json(const IseRecord& r) {
  return {{"delta_s", r.delta_s}, {"model", r.model}, {"noise", r.noise}, {"kernel", r.kernel}, {"ise", r.ise}};
}

}  // namespace hfdecon
