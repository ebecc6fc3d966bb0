#include <doctest.h>

#include <cmath>
#include <random>

#include "exlat/dispersion.hpp"
#include "exlat/rng.hpp"

using namespace exlat;

namespace {

Eigen::VectorXd random_u(std::mt19937_64& rng, int d) {
  Eigen::VectorXd u(d);
  for (int i = 0; i < d; ++i) u(i) = uniform01(rng);
  return u;
}

const std::vector<LatticeSpec>& exceptional() {
  static const std::vector<LatticeSpec> specs{{Family::E, 6}, {Family::E, 7}, {Family::E, 8}};
  return specs;
}

}  // namespace

TEST_CASE("momentum reduces components to the unit interval") {
  Eigen::VectorXd raw(3);
  raw << 1.25, -0.25, 3.0;
  const Momentum m(raw);
  CHECK(m.frac()(0) == doctest::Approx(0.25));
  CHECK(m.frac()(1) == doctest::Approx(0.75));
  CHECK(m.frac()(2) == 0.0);
  CHECK(wrap_unit(-1e-300) < 1.0);
  CHECK(wrap_unit(-1e-17) < 1.0);
  CHECK(wrap_unit(-1e-17) >= 0.0);
}

TEST_CASE("band minimum and bounds") {
  for (const auto& spec : exceptional()) {
    const Dispersion disp{RootSystem(spec)};
    const int d = disp.rank();
    CHECK(disp.pair_count() == disp.tau() / 2);
    CHECK(disp.energy(Eigen::VectorXd::Zero(d)) == -disp.tau());
    CHECK(disp.gradient(Eigen::VectorXd::Zero(d)).isZero());
    CHECK(disp.hessian(Eigen::VectorXd::Zero(d)).trace() > 0.0);
    auto rng = stream_rng(5, 0);
    for (int i = 0; i < 2000; ++i) {
      const Eigen::VectorXd u = random_u(rng, d);
      const double e = disp.energy(u);
      CHECK(std::fabs(e) <= disp.tau());
      CHECK(disp.energy(Eigen::VectorXd(-u)) == doctest::Approx(e).epsilon(1e-12));
    }
  }
}

TEST_CASE("energy is periodic and gradient is odd") {
  const Dispersion disp{RootSystem({Family::E, 7})};
  auto rng = stream_rng(6, 0);
  for (int n = 0; n < 50; ++n) {
    const Eigen::VectorXd u = random_u(rng, 7);
    for (int i = 0; i < 7; ++i) {
      const Eigen::VectorXd v = u + Eigen::VectorXd::Unit(7, i);
      CHECK(disp.energy(v) == doctest::Approx(disp.energy(u)).epsilon(1e-12));
    }
    CHECK((disp.gradient(-u) + disp.gradient(u)).norm() < 1e-9);
  }
}

TEST_CASE("gradient and Hessian match central differences") {
  for (const auto& spec : exceptional()) {
    CAPTURE(spec.name());
    const Dispersion disp{RootSystem(spec)};
    const int d = disp.rank();
    auto rng = stream_rng(7, 0);
    const double h = 1e-6;
    for (int n = 0; n < 100; ++n) {
      const Eigen::VectorXd u = random_u(rng, d);
      const Eigen::VectorXd g = disp.gradient(u);
      const Eigen::MatrixXd H = disp.hessian(u);
      Eigen::VectorXd fd_g(d);
      Eigen::MatrixXd fd_h(d, d);
      for (int i = 0; i < d; ++i) {
        const Eigen::VectorXd step = h * Eigen::VectorXd::Unit(d, i);
        fd_g(i) = (disp.energy(Eigen::VectorXd(u + step)) -
                   disp.energy(Eigen::VectorXd(u - step))) / (2 * h);
        fd_h.col(i) = (disp.gradient(u + step) - disp.gradient(u - step)) / (2 * h);
      }
      CHECK((fd_g - g).norm() <= 1e-5 * std::max(1.0, g.norm()));
      CHECK((fd_h - H).norm() <= 1e-4 * std::max(1.0, H.norm()));

      double e = 0.0;
      Eigen::VectorXd g2;
      Eigen::MatrixXd h2;
      disp.evaluate(u, e, g2, h2);
      CHECK(e == doctest::Approx(disp.energy(u)).epsilon(1e-13));
      CHECK((g2 - g).norm() < 1e-9);
      CHECK((h2 - H).norm() < 1e-8);
    }
  }
}

TEST_CASE("Cartesian Hessian at the minimum is (8 tau / d) I") {
  struct Case {
    LatticeSpec spec;
    double c;
  };
  for (const auto& [spec, c] : {Case{{Family::E, 8}, 240.0}, Case{{Family::E, 7}, 144.0},
                                Case{{Family::E, 6}, 96.0}, Case{{Family::A, 3}, 32.0}}) {
    const Dispersion disp{RootSystem(spec)};
    const int d = disp.rank();
    const Eigen::MatrixXd H = disp.cartesian_hessian(Eigen::VectorXd::Zero(d));
    CHECK((H - c * Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(H.determinant() == doctest::Approx(std::pow(c, d)).epsilon(1e-12));
  }
}

TEST_CASE("Hessian signature agrees between frames") {
  const Dispersion disp{RootSystem({Family::E, 8})};
  auto rng = stream_rng(8, 0);
  for (int n = 0; n < 100; ++n) {
    const Eigen::VectorXd u = random_u(rng, 8);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a(disp.hessian(u), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> b(disp.cartesian_hessian(u),
                                                     Eigen::EigenvaluesOnly);
    CHECK(signature_of(a.eigenvalues(), 1e-9) == signature_of(b.eigenvalues(), 1e-9));
  }
}

TEST_CASE("signature counts with relative zero tolerance") {
  Eigen::VectorXd ev(4);
  ev << -3.0, 1e-9, 0.0, 5.0;
  const Signature s = signature_of(ev, 1e-6);
  CHECK(s.n_down == 1);
  CHECK(s.n_up == 1);
  CHECK(s.n_zero == 2);
}

TEST_CASE("fast batched energies agree with the reference evaluation") {
  for (const auto& spec : exceptional()) {
    const Dispersion disp{RootSystem(spec)};
    const int d = disp.rank();
    auto rng = stream_rng(9, 0);
    const std::size_t n = 5000;
    std::vector<double> us(n * static_cast<std::size_t>(d)), es(n);
    for (auto& x : us) x = uniform01(rng);
    disp.energies(us, es);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::VectorXd u = Eigen::Map<Eigen::VectorXd>(&us[i * d], d);
      worst = std::max(worst, std::fabs(es[i] - disp.energy(u)));
    }
    CHECK(worst < 1e-12);
    EnergyKernel k(disp);
    CHECK(k(std::span<const double>(us.data(), d)) == es[0]);
  }
}

TEST_CASE("uniform moments of the band: mean 0 and variance tau") {
  const Dispersion disp{RootSystem({Family::E, 6})};
  auto rng = stream_rng(10, 0);
  const int n = 200'000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = disp.energy(random_u(rng, 6));
    s1 += e;
    s2 += e * e;
    s4 += e * e * e * e;
  }
  const double mean = s1 / n, m2 = s2 / n;
  const double se1 = std::sqrt(m2 / n);
  const double se2 = std::sqrt((s4 / n - m2 * m2) / n);
  CHECK(std::fabs(mean) < 5 * se1);
  CHECK(std::fabs(m2 - 72.0) < 5 * se2);
}
