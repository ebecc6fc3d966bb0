#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "exlat/return_prob.hpp"

using namespace exlat;

TEST_CASE("closed form for the face-centred cubic lattice") {
  CHECK(watson_a3() == doctest::Approx(0.2563182).epsilon(1e-6));
}

TEST_CASE("A3 estimate agrees with the closed form") {
  const Dispersion disp{RootSystem({Family::A, 3})};
  const ReturnEstimate r = estimate_return(disp, 4'000'000, 21);
  CAPTURE(r.P);
  CAPTURE(r.stderr_);
  CHECK(r.stderr_ > 0.0);
  CHECK(r.stderr_ < 0.01);
  CHECK(std::fabs(r.P - watson_a3()) < 4.0 * r.stderr_);
  CHECK(r.ci_lo < r.P);
  CHECK(r.ci_hi > r.P);
  CHECK(r.ci_hi - r.ci_lo == doctest::Approx(2 * 1.96 * r.stderr_));
  CHECK(r.ess > 0.0);
}

TEST_CASE("estimates are reproducible and thread-count independent") {
  const Dispersion disp{RootSystem({Family::E, 6})};
  ReturnOptions o;
  o.threads = 1;
  const ReturnEstimate a = estimate_return(disp, 300'000, 3, o);
  const ReturnEstimate b = estimate_return(disp, 300'000, 3, o);
  o.threads = 2;
  const ReturnEstimate c = estimate_return(disp, 300'000, 3, o);
  CHECK(a.P == b.P);
  CHECK(a.P == c.P);
  CHECK(a.stderr_ == c.stderr_);
  CHECK(estimate_return(disp, 300'000, 4, o).P != a.P);
}

TEST_CASE("budget and option validation") {
  const Dispersion disp{RootSystem({Family::E, 6})};
  CHECK_THROWS_AS(estimate_return(disp, 1000, 1), std::invalid_argument);
  ReturnOptions o;
  o.n_chains = 0;
  CHECK_THROWS_AS(estimate_return(disp, 1'000'000, 1, o), std::invalid_argument);
}
