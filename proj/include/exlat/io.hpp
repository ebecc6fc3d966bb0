#pragma once

// File formats: CSV for curves, JSON for catalogs and scalars. Both carry a
// schema version. Doubles are written in shortest round-trip form.

#include <chrono>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "exlat/dispersion.hpp"
#include "exlat/dos.hpp"
#include "exlat/return_prob.hpp"
#include "exlat/van_hove.hpp"
#include "exlat/walks.hpp"

namespace exlat::io {

inline constexpr int kSchemaVersion = 1;

std::string format_double(double x);

/// bin_lo,bin_hi,density,stderr
void write_dos_csv(std::ostream& os, const DosHistogram& hist, const std::string& lattice);
/// Two columns, midpoint and density, separated by a space.
void write_dos_gnuplot(std::ostream& os, const DosHistogram& hist);
DosHistogram read_dos_csv(std::istream& is);

nlohmann::json to_json(const BigInt& n);
nlohmann::json to_json(const RootSystem& rs);
nlohmann::json band_json(const Dispersion& disp, const Eigen::VectorXd& u);
nlohmann::json to_json(const VanHoveCatalog& catalog);
nlohmann::json to_json(const WalkTable& table);
nlohmann::json to_json(const ReturnEstimate& estimate);

struct RunManifest {
  std::string subcommand;
  nlohmann::json config;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;
};

nlohmann::json to_json(const RunManifest& manifest);

/// Writes text to path, throwing std::runtime_error on failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace exlat::io
