#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "exlat/lattice.hpp"

namespace exlat {

/// Crystal momentum in fractional coordinates of the reciprocal basis, each
/// component reduced to [0, 1).
class Momentum {
 public:
  explicit Momentum(Eigen::VectorXd u);
  const Eigen::VectorXd& frac() const { return u_; }
  int dim() const { return static_cast<int>(u_.size()); }

 private:
  Eigen::VectorXd u_;
};

/// Reduces x to [0, 1).
double wrap_unit(double x);

/// Eigenvalue counts of a symmetric matrix: negative, positive, and zero to
/// within a relative tolerance.
struct Signature {
  int n_down = 0;
  int n_up = 0;
  int n_zero = 0;
  friend bool operator==(const Signature&, const Signature&) = default;
  friend auto operator<=>(const Signature&, const Signature&) = default;
};

Signature signature_of(const Eigen::VectorXd& eigenvalues, double zero_tol);

/// Nearest-neighbour tight-binding band eps(u) = -2 sum_pairs cos(2 pi c . u),
/// one integer frequency c per +- root pair.
///
/// energy/gradient/hessian are derivatives with respect to fractional
/// coordinates. cartesian_hessian expresses the Hessian in an orthonormal frame
/// of the lattice span, which is what determinants and eigenvalue signatures
/// are reported in.
class Dispersion {
 public:
  explicit Dispersion(RootSystem rs);

  const RootSystem& root_system() const { return rs_; }
  int rank() const { return rs_.rank(); }
  int tau() const { return rs_.tau(); }
  int pair_count() const { return static_cast<int>(freq_.rows()); }
  const IntMatrix& frequencies() const { return freq_; }

  double energy(const Momentum& u) const { return energy(u.frac()); }
  double energy(const Eigen::VectorXd& u) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& u) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& u) const;
  Eigen::MatrixXd cartesian_hessian(const Eigen::VectorXd& u) const;

  /// Energy, gradient and Hessian in one pass over the frequency table.
  void evaluate(const Eigen::VectorXd& u, double& energy, Eigen::VectorXd& gradient,
                Eigen::MatrixXd& hessian) const;

  /// Converts a fractional-coordinate Hessian to the orthonormal frame.
  Eigen::MatrixXd to_cartesian(const Eigen::MatrixXd& frac_hessian) const;

  /// Batched energies for samplers. `us` holds count = out.size() momenta,
  /// d consecutive components each. Uses a polynomial cosine; agrees with
  /// energy() to ~1e-13 absolute.
  void energies(std::span<const double> us, std::span<double> out) const;

 private:
  friend class EnergyKernel;
  RootSystem rs_;
  IntMatrix freq_;
  // Frequency table transposed to d rows of pair_count doubles.
  std::vector<double> freq_by_axis_;
  // Maps fractional to orthonormal-frame momentum: k' = frame_map_ * u.
  Eigen::MatrixXd frame_map_inv_;
};

/// Single-momentum fast energy evaluation with reusable scratch space. Not
/// thread-safe; give each chain its own kernel.
class EnergyKernel {
 public:
  explicit EnergyKernel(const Dispersion& disp);
  double operator()(std::span<const double> u);

 private:
  const Dispersion* disp_;
  std::vector<double> phase_;
};

}  // namespace exlat
