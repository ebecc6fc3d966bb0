#include "exlat/dispersion.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fast_trig.hpp"

namespace exlat {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool lex_positive_row(const IntMatrix& m, Eigen::Index r) {
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    if (m(r, c) != 0) return m(r, c) > 0;
  return false;
}

}  // namespace

double wrap_unit(double x) {
  double r = x - std::floor(x);
  // x slightly below an integer can round up to exactly 1.
  return r >= 1.0 ? 0.0 : r;
}

Momentum::Momentum(Eigen::VectorXd u) : u_(std::move(u)) {
  for (Eigen::Index i = 0; i < u_.size(); ++i) u_(i) = wrap_unit(u_(i));
}

Signature signature_of(const Eigen::VectorXd& eigenvalues, double zero_tol) {
  const double scale = eigenvalues.cwiseAbs().maxCoeff();
  Signature s;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double lam = eigenvalues(i);
    if (std::fabs(lam) <= zero_tol * scale)
      ++s.n_zero;
    else if (lam < 0)
      ++s.n_down;
    else
      ++s.n_up;
  }
  return s;
}

Dispersion::Dispersion(RootSystem rs) : rs_(std::move(rs)) {
  const IntMatrix& coords = rs_.root_coords();
  const int d = rs_.rank();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index r = 0; r < coords.rows(); ++r)
    if (lex_positive_row(coords, r)) keep.push_back(r);
  if (static_cast<int>(keep.size()) * 2 != rs_.tau())
    throw std::logic_error("root coordinates are not closed under negation");

  freq_.resize(static_cast<Eigen::Index>(keep.size()), d);
  for (std::size_t j = 0; j < keep.size(); ++j)
    freq_.row(static_cast<Eigen::Index>(j)) = coords.row(keep[j]);

  const auto pairs = static_cast<std::size_t>(freq_.rows());
  freq_by_axis_.resize(pairs * static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i)
    for (std::size_t j = 0; j < pairs; ++j)
      freq_by_axis_[static_cast<std::size_t>(i) * pairs + j] =
          static_cast<double>(freq_(static_cast<Eigen::Index>(j), i));

  // k' = Q^T k = Q^T R^T u.
  const Eigen::MatrixXd frame_map =
      rs_.span_frame().transpose() * rs_.reciprocal_basis().transpose();
  frame_map_inv_ = frame_map.inverse();
}

double Dispersion::energy(const Eigen::VectorXd& u) const {
  double e = 0.0;
  for (Eigen::Index j = 0; j < freq_.rows(); ++j) {
    const double phase = freq_.row(j).cast<double>().dot(u);
    e -= 2.0 * std::cos(kTwoPi * phase);
  }
  return e;
}

Eigen::VectorXd Dispersion::gradient(const Eigen::VectorXd& u) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(rank());
  for (Eigen::Index j = 0; j < freq_.rows(); ++j) {
    const Eigen::VectorXd c = freq_.row(j).cast<double>().transpose();
    g += (2.0 * kTwoPi * std::sin(kTwoPi * c.dot(u))) * c;
  }
  return g;
}

Eigen::MatrixXd Dispersion::hessian(const Eigen::VectorXd& u) const {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(rank(), rank());
  for (Eigen::Index j = 0; j < freq_.rows(); ++j) {
    const Eigen::VectorXd c = freq_.row(j).cast<double>().transpose();
    h += (2.0 * kTwoPi * kTwoPi * std::cos(kTwoPi * c.dot(u))) * (c * c.transpose());
  }
  return h;
}

void Dispersion::evaluate(const Eigen::VectorXd& u, double& energy, Eigen::VectorXd& gradient,
                          Eigen::MatrixXd& hessian) const {
  const int d = rank();
  energy = 0.0;
  gradient.setZero(d);
  hessian.setZero(d, d);
  Eigen::VectorXd c(d);
  for (Eigen::Index j = 0; j < freq_.rows(); ++j) {
    c = freq_.row(j).cast<double>().transpose();
    const double phase = kTwoPi * c.dot(u);
    const double cs = std::cos(phase);
    const double sn = std::sin(phase);
    energy -= 2.0 * cs;
    gradient += (2.0 * kTwoPi * sn) * c;
    hessian.selfadjointView<Eigen::Lower>().rankUpdate(c, 2.0 * kTwoPi * kTwoPi * cs);
  }
  hessian.triangularView<Eigen::StrictlyUpper>() = hessian.transpose();
}

Eigen::MatrixXd Dispersion::to_cartesian(const Eigen::MatrixXd& frac_hessian) const {
  Eigen::MatrixXd h = frame_map_inv_.transpose() * frac_hessian * frame_map_inv_;
  return 0.5 * (h + h.transpose());
}

Eigen::MatrixXd Dispersion::cartesian_hessian(const Eigen::VectorXd& u) const {
  return to_cartesian(hessian(u));
}

void Dispersion::energies(std::span<const double> us, std::span<double> out) const {
  const auto d = static_cast<std::size_t>(rank());
  if (us.size() != out.size() * d)
    throw std::invalid_argument("energies: momentum buffer size mismatch");
  EnergyKernel kernel(*this);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = kernel(us.subspan(n * d, d));
}

EnergyKernel::EnergyKernel(const Dispersion& disp)
    : disp_(&disp), phase_(static_cast<std::size_t>(disp.pair_count())) {}

double EnergyKernel::operator()(std::span<const double> u) {
  const std::size_t pairs = phase_.size();
  const double* freq = disp_->freq_by_axis_.data();
  double* phase = phase_.data();
  const double u0 = u[0];
  for (std::size_t j = 0; j < pairs; ++j) phase[j] = freq[j] * u0;
  for (std::size_t i = 1; i < u.size(); ++i) {
    const double ui = u[i];
    const double* row = freq + i * pairs;
    for (std::size_t j = 0; j < pairs; ++j) phase[j] += row[j] * ui;
  }
  for (std::size_t j = 0; j < pairs; ++j) phase[j] = detail::cos_turns(phase[j]);
  // Four interleaved partial sums in a fixed order.
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t j = 0;
  for (; j + 4 <= pairs; j += 4)
    for (std::size_t k = 0; k < 4; ++k) acc[k] += phase[j + k];
  for (; j < pairs; ++j) acc[0] += phase[j];
  return -2.0 * ((acc[0] + acc[1]) + (acc[2] + acc[3]));
}

}  // namespace exlat
