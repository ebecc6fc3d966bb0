#include <doctest.h>

#include <sstream>
#include <stdexcept>

#include "exlat/reference.hpp"
#include "exlat/walks.hpp"

using namespace exlat;

namespace {

std::vector<BigInt> big(std::initializer_list<const char*> xs) {
  std::vector<BigInt> out;
  for (const char* x : xs) out.emplace_back(x);
  return out;
}

}  // namespace

TEST_CASE("E6 closed walks through n = 8") {
  const WalkTable t = walk_counts(RootSystem({Family::E, 6}), 8);
  CHECK(t.counts == reference::walk_counts(LatticeSpec(Family::E, 6)));
  CHECK(t.support.front() == 1);
  CHECK(t.support[1] == 72);
}

TEST_CASE("triangular and face-centred cubic lattices") {
  // Known sequences for the hexagonal and fcc nearest-neighbour walks.
  CHECK(walk_counts(RootSystem({Family::A, 2}), 8).counts ==
        big({"1", "0", "6", "12", "90", "360", "2040", "10080", "54810"}));
  CHECK(walk_counts(RootSystem({Family::A, 3}), 8).counts ==
        big({"1", "0", "12", "48", "540", "4320", "42240", "403200", "4038300"}));
}

TEST_CASE("walk table invariants") {
  for (const LatticeSpec spec : {LatticeSpec(Family::D, 4), LatticeSpec(Family::E, 7)}) {
    CAPTURE(spec.name());
    const RootSystem rs(spec);
    const WalkTable t = walk_counts(rs, 8);
    REQUIRE(t.n_max() == 8);
    CHECK(t.counts[0] == 1);
    CHECK(t.counts[1] == 0);
    CHECK(t.counts[2] == rs.tau());
    for (int n = 2; n <= 8; ++n) CHECK(t.counts[static_cast<std::size_t>(n)] % 2 == 0);
    for (int m = 0; 2 * m + 2 <= 8; ++m)
      CHECK(t.counts[static_cast<std::size_t>(2 * m + 2)] >=
            rs.tau() * t.counts[static_cast<std::size_t>(2 * m)]);
  }
  CHECK(walk_counts(RootSystem({Family::E, 8}), 0).counts == big({"1"}));
  CHECK_THROWS_AS(walk_counts(RootSystem({Family::E, 8}), -1), std::invalid_argument);
}

TEST_CASE("multinomial oracle agrees with dynamic programming for n <= 4") {
  for (const LatticeSpec spec : {LatticeSpec(Family::A, 3), LatticeSpec(Family::D, 5),
                                 LatticeSpec(Family::E, 6), LatticeSpec(Family::E, 7)}) {
    CAPTURE(spec.name());
    const RootSystem rs(spec);
    const WalkTable t = walk_counts(rs, 4);
    for (int n = 0; n <= 4; ++n) CHECK(walk_counts_multinomial(rs, n) == t.counts[static_cast<std::size_t>(n)]);
  }
  const RootSystem e6({Family::E, 6});
  CHECK(walk_counts_multinomial(e6, 2) == 72);
  CHECK(walk_counts_multinomial(e6, 3) == 1440);
  CHECK(walk_counts_multinomial(e6, 4) == 54216);
  CHECK_THROWS_AS(walk_counts_multinomial(e6, 5), std::invalid_argument);
}

TEST_CASE("ordered-map fallback for wide lattices") {
  // Nine coordinates do not fit the packed 64-bit key.
  const RootSystem a9({Family::A, 9});
  const WalkTable t = walk_counts(a9, 4);
  for (int n = 0; n <= 4; ++n) CHECK(walk_counts_multinomial(a9, n) == t.counts[static_cast<std::size_t>(n)]);
}

TEST_CASE("b-file output") {
  const WalkTable t = walk_counts(RootSystem({Family::E, 8}), 3);
  std::ostringstream os;
  write_bfile(os, t);
  CHECK(os.str() == "0 1\n1 0\n2 240\n3 13440\n");
}

TEST_CASE("moments check against an exact two-point density") {
  // rho = (delta(-1) + delta(1)) / 2 has moments 1, 0, 1, 0, 1.
  DosHistogram h;
  h.binning = Binning({-1.5, -0.5, 0.5, 1.5});
  h.density = {0.5, 0.0, 0.5};
  WalkTable t;
  t.lattice = LatticeSpec(Family::A, 1);
  t.counts = big({"1", "0", "1", "0", "1"});
  const auto err = moments_check(t, h);
  REQUIRE(err.size() == 5);
  CHECK(err[0] == 0.0);
  for (double e : err) CHECK(std::fabs(e) < 1e-15);
}
