#pragma once

// On-site lattice Green's function from a density of states:
//   Im G(eps) = pi rho(eps),
//   Re G(eps) = (1/pi) PV int Im G(eps') / (eps - eps') deps'.

#include <iosfwd>
#include <string>
#include <vector>

#include "exlat/dos.hpp"

namespace exlat {

struct GreensFunction {
  std::string lattice;
  int tau = 0;
  /// Band edges, then bin midpoints: energy.front() = eps_min and
  /// energy.back() = eps_max.
  std::vector<double> energy;
  std::vector<double> re;
  std::vector<double> im;
  /// Batch standard error of Re G at eps_min; 0 when the source histogram
  /// carries no batches.
  double re_min_stderr = 0.0;
  /// Van Hove energies written as marker rows on export.
  std::vector<double> markers;
};

/// pi * density at the bin midpoints.
std::vector<double> im_from_dos(const DosHistogram& hist);

/// Principal value for piecewise-constant density: bin b contributes
/// rho_b ln|(eps - lo_b) / (eps - hi_b)|. A point exactly on a bin edge is
/// moved down by 0.5e-9 of that bin's width.
std::vector<double> kramers_kronig(const Binning& binning, const std::vector<double>& density,
                                   const std::vector<double>& eval);
std::vector<double> kramers_kronig(const DosHistogram& hist, const std::vector<double>& eval);

GreensFunction greens_from_dos(const DosHistogram& hist, const std::string& lattice, int tau);

/// CSV with columns energy,re,im; '#' lines carry metadata and markers.
void write_greens(std::ostream& os, const GreensFunction& gf);
void export_greens(const GreensFunction& gf, const std::string& path);
GreensFunction read_greens(std::istream& is);

/// P = 1 + 1 / (tau Re G(eps_min)).
double return_from_greens(const GreensFunction& gf);
/// Standard error of return_from_greens propagated from re_min_stderr.
double return_from_greens_stderr(const GreensFunction& gf);

}  // namespace exlat
