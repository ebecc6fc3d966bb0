#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "exlat/lattice.hpp"

using namespace exlat;

namespace {

const std::vector<LatticeSpec>& all_specs() {
  static const std::vector<LatticeSpec> specs{
      {Family::A, 1}, {Family::A, 2}, {Family::A, 3}, {Family::A, 5}, {Family::D, 4},
      {Family::D, 5}, {Family::D, 6}, {Family::E, 6}, {Family::E, 7}, {Family::E, 8}};
  return specs;
}

}  // namespace

TEST_CASE("lattice tokens parse and rank limits are enforced") {
  CHECK(LatticeSpec::parse("E8") == LatticeSpec(Family::E, 8));
  CHECK(LatticeSpec::parse("a3") == LatticeSpec(Family::A, 3));
  CHECK(LatticeSpec::parse("D5").name() == "D5");
  CHECK_THROWS_AS(LatticeSpec::parse("E9"), std::invalid_argument);
  CHECK_THROWS_AS(LatticeSpec::parse("D3"), std::invalid_argument);
  CHECK_THROWS_AS(LatticeSpec::parse("A0"), std::invalid_argument);
  CHECK_THROWS_AS(LatticeSpec::parse("F4"), std::invalid_argument);
  CHECK_THROWS_AS(LatticeSpec::parse("E"), std::invalid_argument);
  CHECK_THROWS_AS(LatticeSpec::parse("E8x"), std::invalid_argument);
  try {
    LatticeSpec::parse("E9");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("E9") != std::string::npos);
  }
}

TEST_CASE("kissing numbers") {
  CHECK(RootSystem({Family::E, 8}).tau() == 240);
  CHECK(RootSystem({Family::E, 7}).tau() == 126);
  CHECK(RootSystem({Family::E, 6}).tau() == 72);
  CHECK(RootSystem({Family::D, 4}).tau() == 24);
  for (const auto& spec : all_specs()) CHECK(RootSystem(spec).tau() == spec.expected_tau());
}

TEST_CASE("E8 roots split into 112 integer and 128 half-spin roots") {
  const RootSystem rs({Family::E, 8});
  int twos = 0, ones = 0;
  for (int j = 0; j < rs.tau(); ++j) {
    if (std::abs(rs.roots()(j, 0)) == 1) ++ones;
    else ++twos;
  }
  CHECK(twos == 112);
  CHECK(ones == 128);
}

TEST_CASE("A1 roots, basis, Gram and reciprocal vector") {
  const RootSystem rs({Family::A, 1});
  REQUIRE(rs.tau() == 2);
  CHECK(rs.roots()(0, 0) == -2);
  CHECK(rs.roots()(0, 1) == 2);
  CHECK(rs.roots()(1, 0) == 2);
  CHECK(rs.roots()(1, 1) == -2);
  CHECK(rs.gram()(0, 0) == 8);
  const Eigen::MatrixXd& b = rs.reciprocal_basis();
  const double sign = rs.basis()(0, 0) < 0 ? 1.0 : -1.0;
  CHECK(b(0, 0) == doctest::Approx(-sign * std::numbers::pi / 2).epsilon(1e-14));
  CHECK(b(0, 1) == doctest::Approx(sign * std::numbers::pi / 2).epsilon(1e-14));
}

TEST_CASE("root system invariants hold for every family") {
  for (const auto& spec : all_specs()) {
    CAPTURE(spec.name());
    const RootSystem rs(spec);
    const IntMatrix& r = rs.roots();
    const int tau = rs.tau();
    CHECK(tau % 2 == 0);

    std::set<std::vector<std::int64_t>> set;
    Eigen::VectorX<std::int64_t> total = Eigen::VectorX<std::int64_t>::Zero(r.cols());
    for (int j = 0; j < tau; ++j) {
      CHECK(r.row(j).squaredNorm() == 8);
      set.insert(std::vector<std::int64_t>(r.row(j).data(), r.row(j).data() + r.cols()));
      total += r.row(j).transpose();
    }
    CHECK(total.isZero());
    std::set<std::int64_t> products;
    for (int i = 0; i < tau; ++i) {
      std::vector<std::int64_t> neg(r.row(i).data(), r.row(i).data() + r.cols());
      for (auto& x : neg) x = -x;
      CHECK(set.count(neg) == 1);
      for (int j = 0; j < tau; ++j) products.insert(r.row(i).dot(r.row(j)));
    }
    // A1 and A2 are too small to realise every angle.
    const std::set<std::int64_t> allowed{-8, -4, 0, 4, 8};
    for (auto p : products) CHECK(allowed.count(p) == 1);
    if (rs.rank() >= 3) CHECK(products == allowed);

    // Sorted lexicographically.
    for (int j = 1; j < tau; ++j) {
      std::vector<std::int64_t> a(r.row(j - 1).data(), r.row(j - 1).data() + r.cols());
      std::vector<std::int64_t> b(r.row(j).data(), r.row(j).data() + r.cols());
      CHECK(a < b);
    }

    // Integer coordinates reproduce every root exactly.
    const IntMatrix rebuilt = rs.root_coords() * rs.basis();
    CHECK(rebuilt == r);
  }
}

TEST_CASE("Gram determinants and covolumes") {
  auto det = [](const LatticeSpec& s) {
    const RootSystem rs(s);
    return std::llround(rs.gram().cast<double>().determinant());
  };
  CHECK(det({Family::E, 6}) == 12288);
  CHECK(det({Family::E, 7}) == 32768);
  CHECK(det({Family::E, 8}) == 65536);
  CHECK(det({Family::A, 3}) == 256);
  CHECK(det({Family::D, 4}) == 1024);

  const RootSystem e8({Family::E, 8});
  CHECK(std::fabs(e8.basis().cast<double>().determinant()) == doctest::Approx(256.0));
  CHECK(e8.covolume() == doctest::Approx(256.0));
  CHECK(e8.bz_volume() == doctest::Approx(std::pow(2 * std::numbers::pi, 8) / 256.0));
}

TEST_CASE("reciprocal basis is biorthogonal and lies in the span") {
  for (const auto& spec : all_specs()) {
    CAPTURE(spec.name());
    const RootSystem rs(spec);
    const Eigen::MatrixXd a = rs.basis().cast<double>();
    const Eigen::MatrixXd prod = a * rs.reciprocal_basis().transpose();
    const Eigen::MatrixXd target =
        2 * std::numbers::pi * Eigen::MatrixXd::Identity(rs.rank(), rs.rank());
    CHECK((prod - target).cwiseAbs().maxCoeff() < 1e-12);
    // Orthogonal complement of the span annihilates every reciprocal vector.
    const Eigen::MatrixXd frame = rs.span_frame();
    const Eigen::MatrixXd proj = frame * frame.transpose();
    const Eigen::MatrixXd b = rs.reciprocal_basis().transpose();
    CHECK((proj * b - b).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((frame.transpose() * frame - Eigen::MatrixXd::Identity(rs.rank(), rs.rank()))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("sum of root outer products is isotropic on the span") {
  for (const auto& spec : all_specs()) {
    CAPTURE(spec.name());
    const RootSystem rs(spec);
    const Eigen::MatrixXd r = rs.roots().cast<double>();
    const Eigen::MatrixXd s = r.transpose() * r;
    const Eigen::MatrixXd f = rs.span_frame();
    const Eigen::MatrixXd in_frame = f.transpose() * s * f;
    const double c = 8.0 * rs.tau() / rs.rank();
    CHECK((in_frame - c * Eigen::MatrixXd::Identity(rs.rank(), rs.rank())).cwiseAbs().maxCoeff() <
          1e-9);
  }
}

TEST_CASE("fractional and Cartesian momenta") {
  const RootSystem rs({Family::E, 7});
  const int d = rs.rank();
  CHECK(rs.frac_to_cartesian(Eigen::VectorXd::Zero(d)).isZero());
  for (int i = 0; i < d; ++i) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(d, i);
    CHECK((rs.frac_to_cartesian(e) - rs.reciprocal_basis().row(i).transpose()).norm() < 1e-14);
  }
  Eigen::VectorXd u(d);
  for (int i = 0; i < d; ++i) u(i) = 0.1 * (i + 1) - 0.03 * i * i;
  const Eigen::VectorXd k = rs.frac_to_cartesian(u);
  CHECK((rs.cartesian_to_frac(k) - u).norm() < 1e-12);
  for (int j = 0; j < rs.tau(); ++j) {
    const double lhs = rs.roots().row(j).cast<double>().dot(k);
    const double rhs = 2 * std::numbers::pi * rs.root_coords().row(j).cast<double>().dot(u);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("simple roots are roots and integer coordinates reject non-members") {
  const RootSystem rs({Family::E, 6});
  const IntMatrix simple = simple_roots(rs.roots());
  CHECK(simple.rows() == 6);
  CHECK(simple == rs.basis());
  Eigen::MatrixXd half = rs.basis().cast<double>().row(0) * 0.5;
  CHECK_THROWS_AS(integer_coordinates(half, rs.basis().cast<double>()), std::runtime_error);
}
