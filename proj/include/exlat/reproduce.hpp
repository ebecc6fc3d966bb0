#pragma once

// Recomputes the reference tables and compares them with the embedded
// reference values at fixed tolerances.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "exlat/dos.hpp"
#include "exlat/greens.hpp"
#include "exlat/return_prob.hpp"
#include "exlat/van_hove.hpp"
#include "exlat/walks.hpp"

namespace exlat {

struct CheckResult {
  std::string name;
  std::string expected;
  std::string actual;
  std::string tolerance;
  bool pass = false;
};

struct Report {
  std::string target;
  std::vector<CheckResult> checks;

  bool passed() const;
  std::size_t n_passed() const;
  void add(CheckResult check) { checks.push_back(std::move(check)); }
  void append(const Report& other);
};

void print_report(std::ostream& os, const Report& report);

struct Budget {
  std::uint64_t samples = 1'000'000'000;
  std::size_t critical_starts = 100'000;
  std::size_t extremum_starts = 16'384;
  std::uint64_t seed = 1;
  int threads = 0;
};

/// Window of distances from a band edge used for tail exponent fits.
struct TailWindow {
  double lo = 1e-3;
  double hi = 1e-1;
};

/// Least-squares slope of log density against log distance to the lower or
/// upper band edge over the bins inside the window.
double tail_slope(const DosHistogram& hist, bool lower, TailWindow window = {});

struct ExtremaMeasurement {
  ExtremumSearch max;
  ExtremumSearch min;
  double tail_min = 0.0;
  double tail_max = 0.0;
};

ExtremaMeasurement measure_extrema(const Dispersion& disp, const Budget& budget);

Report check_walks(const LatticeSpec& spec, const WalkTable& table);
Report check_catalog(const LatticeSpec& spec, const VanHoveCatalog& catalog);
Report check_extrema(const LatticeSpec& spec, const ExtremaMeasurement& m);
Report check_return(const LatticeSpec& spec, const ReturnEstimate& estimate);
Report check_return_paths(const LatticeSpec& spec, const ReturnEstimate& direct,
                          const GreensFunction& gf);
Report check_dos(const LatticeSpec& spec, const DosHistogram& hist,
                 const std::vector<BigInt>& walks);

/// Sampler settings used for the density-of-states reproduction.
SamplerConfig figure_config(const LatticeSpec& spec, const Budget& budget);

Report reproduce_table1(const Budget& budget);
Report reproduce_table2(const Budget& budget);
Report reproduce_table3(const Budget& budget);
Report reproduce_fig_dos(const Budget& budget);
/// Dispatches on "table1", "table2", "table3" or "fig_dos"; throws
/// std::invalid_argument for anything else.
Report reproduce(std::string_view target, const Budget& budget);

}  // namespace exlat
