#pragma once

// Exact closed-walk counts W_n: the number of n-step walks along roots that
// return to the origin. They are the signed moments of the density of states.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "exlat/dos.hpp"
#include "exlat/lattice.hpp"

namespace exlat {

using BigInt = boost::multiprecision::cpp_int;

struct WalkTable {
  LatticeSpec lattice{Family::E, 8};
  std::vector<BigInt> counts;  // W_0 .. W_nmax
  /// Number of lattice points reachable in m steps, m = 0 .. ceil(nmax/2).
  std::vector<std::size_t> support;

  int n_max() const { return static_cast<int>(counts.size()) - 1; }
};

/// Dynamic programming over walk endpoints in lattice-basis coordinates,
/// closed by meet-in the middle: W_{a+b} = sum_v N_a(v) N_b(v). Endpoint
/// counts are held in 64 bits, which bounds n_max by tau^ceil(n_max/2) < 2^64;
/// beyond that a DomainError is thrown.
WalkTable walk_counts(const RootSystem& rs, int n_max, int threads = 0);

/// Independent count for n <= 4: sums multinomial coefficients over
/// multisets of n roots with zero sum. Throws std::invalid_argument for n > 4.
BigInt walk_counts_multinomial(const RootSystem& rs, int n);

/// Signed errors of the histogram moments against (-1)^n W_n, relative to
/// W_n; for n = 1 (W_1 = 0) the error is scaled by sqrt(W_2) instead.
std::vector<double> moments_check(const WalkTable& table, const DosHistogram& hist);

/// OEIS b-file: one "n W_n" line per count.
void write_bfile(std::ostream& os, const WalkTable& table);

}  // namespace exlat
