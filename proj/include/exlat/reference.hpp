#pragma once

// Reference values for the exceptional lattices, held as exact data.

#include <string>
#include <vector>

#include "exlat/lattice.hpp"
#include "exlat/van_hove.hpp"
#include "exlat/walks.hpp"

namespace exlat::reference {

struct SingularityRow {
  Rational energy;
  int n_down = 0;
  int n_up = 0;
  int n_zero = 0;  // 5 for the two degenerate rows
};

struct ExtremaRow {
  int gamma = 0;
  Rational epsilon_max;
  int n_max = 0;
  double tail_min = 0.0;  // lim rho / (eps - eps_min)^(d/2 - 1)
  double tail_max = 0.0;  // lim rho / (eps_max - eps)^(d/2 - 1)
  double return_lo = 0.0;
  double return_hi = 0.0;
  double return_mid() const { return 0.5 * (return_lo + return_hi); }
};

/// The three exceptional lattices in order E6, E7, E8.
const std::vector<LatticeSpec>& exceptional();

const std::vector<SingularityRow>& singularities(const LatticeSpec& spec);
const ExtremaRow& extrema(const LatticeSpec& spec);
/// W_0 .. W_8.
std::vector<BigInt> walk_counts(const LatticeSpec& spec);

/// Return probability of A_3 (Watson's integral).
double watson_a3();

/// Energies of every tabulated singularity including the band edges.
std::vector<double> marker_energies(const LatticeSpec& spec);

}  // namespace exlat::reference
