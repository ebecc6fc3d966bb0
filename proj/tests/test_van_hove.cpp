#include <doctest.h>

#include <cmath>
#include <numbers>

#include "exlat/errors.hpp"
#include "exlat/reference.hpp"
#include "exlat/van_hove.hpp"

using namespace exlat;

namespace {

// Grid oracle: largest energy on (1/q) Z^d and the number of grid points that
// attain it.
std::pair<double, int> grid_max(const Dispersion& disp, int q) {
  const int d = disp.rank();
  std::vector<int> digits(static_cast<std::size_t>(d), 0);
  Eigen::VectorXd u(d);
  double best = -1e300;
  int count = 0;
  while (true) {
    for (int i = 0; i < d; ++i) u(i) = static_cast<double>(digits[static_cast<std::size_t>(i)]) / q;
    const double e = disp.energy(u);
    if (e > best + 1e-9) {
      best = e;
      count = 1;
    } else if (std::fabs(e - best) <= 1e-9) {
      ++count;
    }
    int i = 0;
    while (i < d && ++digits[static_cast<std::size_t>(i)] == q) digits[static_cast<std::size_t>(i++)] = 0;
    if (i == d) break;
  }
  return {best, count};
}

CriticalSearchOptions quick(std::size_t starts) {
  CriticalSearchOptions o;
  o.n_starts = starts;
  o.seed = 3;
  return o;
}

}  // namespace

TEST_CASE("rationalize recovers small-denominator energies") {
  CHECK(rationalize(11.5625) == Rational{185, 16});
  CHECK(rationalize(320.0 / 27.0) == Rational{320, 27});
  CHECK(rationalize(3.6) == Rational{18, 5});
  CHECK(rationalize(-72.0) == Rational{-72, 1});
  CHECK(rationalize(-0.0) == Rational{0, 1});
  CHECK(rationalize(12.0 + 3e-9) == Rational{12, 1});
  CHECK_FALSE(rationalize(std::numbers::pi).has_value());
  CHECK(Rational{185, 16}.str() == "185/16");
  CHECK(Rational{-8, 1}.str() == "-8");
}

TEST_CASE("E6 catalog contains every tabulated singularity") {
  const Dispersion disp{RootSystem({Family::E, 6})};
  const VanHoveCatalog cat = find_critical_points(disp, quick(2000));
  CHECK(cat.epsilon_min == -72.0);
  CHECK(cat.epsilon_max == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(cat.gamma == doctest::Approx(8.0).epsilon(1e-12));
  for (const auto& row : reference::singularities(LatticeSpec(Family::E, 6))) {
    CAPTURE(row.energy.str());
    bool found = false;
    for (const auto* c : cat.find(row.energy.value(), row.n_down, row.n_up))
      found = found || c->signature.n_zero == row.n_zero;
    CHECK(found);
  }
  for (const auto& c : cat.classes) {
    CHECK(c.signature.n_down + c.signature.n_up + c.signature.n_zero == 6);
    CHECK(c.multiplicity >= 1);
    CHECK(c.degenerate() == (c.signature.n_zero > 0));
    CHECK(disp.gradient(c.example_u).norm() <= 1e-10);
  }
  // The lattice holes: 80 maxima, 36 degenerate points at half-integers.
  CHECK(cat.find(9.0, 6, 0).front()->multiplicity == 80);
  CHECK(cat.find(8.0, 1, 0).front()->multiplicity == 36);
}

TEST_CASE("until-stable search reports stability") {
  const Dispersion disp{RootSystem({Family::E, 6})};
  const VanHoveCatalog cat = find_critical_points_until_stable(disp, quick(500), 8000);
  CHECK(cat.stable);
  CHECK(cat.starts >= 1000);
}

TEST_CASE("refinement converges from a perturbed critical point") {
  const Dispersion disp{RootSystem({Family::E, 8})};
  const Eigen::VectorXd u0 = Eigen::VectorXd::Constant(8, 1e-3);
  const auto cp = refine_critical_point(disp, u0, quick(1));
  REQUIRE(cp.has_value());
  CHECK(cp->energy == doctest::Approx(-240.0).epsilon(1e-14));
  CHECK(cp->signature == Signature{0, 8, 0});
  CHECK_FALSE(cp->degenerate());
}

TEST_CASE("dedup counts distinct positions modulo the unit cell") {
  CriticalPoint a;
  a.u = Eigen::VectorXd::Zero(2);
  a.energy = 1.0;
  a.signature = {1, 1, 0};
  CriticalPoint b = a;
  b.u(0) = 1.0 - 1e-12;  // same point across the cell boundary
  CriticalPoint c = a;
  c.u(1) = 0.5;
  CriticalPoint other = a;
  other.signature = {2, 0, 0};
  const auto classes = dedup({a, b, c, other}, 1e-8, 1e-6);
  REQUIRE(classes.size() == 2);
  CHECK(classes[0].signature == Signature{1, 1, 0});
  CHECK(classes[0].multiplicity == 2);
  CHECK(classes[0].hits == 3);
  CHECK(classes[1].multiplicity == 1);
}

TEST_CASE("no survivors is a domain error") {
  const Dispersion disp{RootSystem({Family::A, 2})};
  CriticalSearchOptions o = quick(4);
  o.seed_denominators = {};
  o.max_iterations = 0;
  o.polish_steps = 0;
  CHECK_THROWS_AS(find_critical_points(disp, o), DomainError);
}

TEST_CASE("maxima multiplicities match the rational grid oracle") {
  struct Case {
    LatticeSpec spec;
    int q;
    double eps_max;
    int n_max;
  };
  for (const auto& c : {Case{{Family::E, 6}, 3, 9.0, 80}, Case{{Family::E, 7}, 2, 14.0, 36},
                        Case{{Family::E, 8}, 2, 16.0, 135}}) {
    CAPTURE(c.spec.name());
    const Dispersion disp{RootSystem(c.spec)};
    const auto [grid_e, grid_n] = grid_max(disp, c.q);
    CHECK(grid_e == doctest::Approx(c.eps_max).epsilon(1e-12));
    CHECK(grid_n == c.n_max);
    const ExtremumSearch s = epsilon_max(disp, 8192, 1);
    CHECK(s.energy == doctest::Approx(c.eps_max).epsilon(1e-12));
    CHECK(s.multiplicity == grid_n);
  }
}

TEST_CASE("skewness of small A and D lattices from a grid scan") {
  struct Case {
    LatticeSpec spec;
    double gamma;
  };
  for (const auto& c : {Case{{Family::A, 1}, 1.0}, Case{{Family::A, 2}, 2.0},
                        Case{{Family::A, 3}, 3.0}, Case{{Family::D, 4}, 3.0},
                        Case{{Family::D, 5}, 5.0}}) {
    CAPTURE(c.spec.name());
    const Dispersion disp{RootSystem(c.spec)};
    const double grid_gamma = disp.tau() / grid_max(disp, 12).first;
    CHECK(grid_gamma == doctest::Approx(c.gamma).epsilon(1e-12));
    // The A3 top is a degenerate line, so use the raw search.
    const ExtremumSearch s = extremum_search(disp, true, 512, 2);
    CHECK(disp.tau() / s.energy == doctest::Approx(c.gamma).epsilon(1e-10));
  }
}

TEST_CASE("tail coefficients") {
  for (const auto& spec : reference::exceptional()) {
    CAPTURE(spec.name());
    const RootSystem rs(spec);
    const Dispersion disp{rs};
    const auto& ref = reference::extrema(spec);
    CriticalPoint bottom;
    bottom.u = Eigen::VectorXd::Zero(rs.rank());
    bottom.signature = {0, rs.rank(), 0};
    CHECK(tail_coefficient(disp, bottom, 1) == doctest::Approx(ref.tail_min).epsilon(1e-12));
    CHECK(minimum_tail_coefficient_closed_form(rs) ==
          doctest::Approx(ref.tail_min).epsilon(1e-12));
  }
  CriticalPoint flat;
  flat.u = Eigen::VectorXd::Zero(6);
  flat.signature = {1, 0, 5};
  CHECK_THROWS_AS(tail_coefficient(Dispersion{RootSystem({Family::E, 6})}, flat, 1), DomainError);
}

TEST_CASE("a degenerate band top is rejected as epsilon_max") {
  const Dispersion fcc{RootSystem({Family::A, 3})};
  CHECK(extremum_search(fcc, true, 256, 1).energy == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(epsilon_max(fcc, 256, 1), DomainError);
}
