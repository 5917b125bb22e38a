#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "hfdecon/bandwidth.h"
#include "hfdecon/density.h"
#include "hfdecon/ecf.h"
#include "hfdecon/ivol.h"
#include "hfdecon/moments.h"
#include "hfdecon/ticks.h"

namespace hfdecon {

/// Thrown for malformed input files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `time,value` with 17 significant digits.
void write_series_csv(std::ostream& os, const TickSeries& series);
TickSeries read_series_csv(std::istream& is);

/// `s,value`.
void write_charfn_csv(std::ostream& os, const CharFnEstimate& cf);

/// `x,fhat`.
void write_density_csv(std::ostream& os, const DensityEstimate& est);

/// `xi,h,ise` rows of the level-1 search surface (infeasible cells omitted).
void write_ise_surface_csv(std::ostream& os, const BandwidthSelection& sel);

/// Tick CSV `timestamp,price[,cond,corr]`; columns are matched by header
/// name and unknown columns are ignored. Empty cond/corr fields are absent.
std::vector<RawTickRecord> read_ticks_csv(std::istream& is);

nlohmann::json to_json(const MomentSet& m);
nlohmann::json to_json(const VolatilityResult& v);
nlohmann::json to_json(const BandwidthSelection& b);

struct IseRecord {
  double delta_s = 0.0;
  std::string model;
  std::string noise;
  std::string kernel;
  double ise = 0.0;
};
nlohmann::json to_json(const IseRecord& r);

/// Splits one CSV line on commas (no quoting).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace hfdecon
