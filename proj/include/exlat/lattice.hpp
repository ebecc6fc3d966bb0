#pragma once

// Root systems of the simply laced (ADE) lattices, scaled so that every root
// has squared length 8.

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace exlat {

enum class Family { A, D, E };

/// A lattice family together with its rank. Rank restrictions are checked on
/// construction: A_d needs d >= 1, D_d needs d >= 4, E_d needs d in {6, 7, 8}.
class LatticeSpec {
 public:
  LatticeSpec(Family family, int rank);

  /// Parses tokens such as "E8", "a3" or "D5". Throws std::invalid_argument
  /// naming the offending token.
  static LatticeSpec parse(std::string_view token);

  Family family() const { return family_; }
  int rank() const { return rank_; }
  std::string name() const;

  /// Kissing number predicted by the family formula.
  int expected_tau() const;

  friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;

 private:
  Family family_;
  int rank_;
};

using IntMatrix =
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Immutable description of one ADE lattice.
///
/// Rows of `roots()` are the tau minimal vectors in ambient coordinates, sorted
/// lexicographically. `basis()` holds d simple roots (rows) and `root_coords()`
/// expresses every root as an integer combination of them. Reciprocal vectors
/// satisfy a_i . b_j = 2 pi delta_ij and lie in the span of the lattice.
class RootSystem {
 public:
  explicit RootSystem(LatticeSpec spec);

  const LatticeSpec& spec() const { return spec_; }
  int rank() const { return spec_.rank(); }
  int ambient_dim() const { return static_cast<int>(roots_.cols()); }
  int tau() const { return static_cast<int>(roots_.rows()); }

  const IntMatrix& roots() const { return roots_; }
  const IntMatrix& basis() const { return basis_; }
  const IntMatrix& gram() const { return gram_; }
  const IntMatrix& root_coords() const { return root_coords_; }
  const Eigen::MatrixXd& reciprocal_basis() const { return reciprocal_; }

  /// Orthonormal basis of the lattice span, one column per direction (N x d).
  const Eigen::MatrixXd& span_frame() const { return span_frame_; }

  /// sqrt(det Gram): volume of a fundamental cell inside the lattice span.
  double covolume() const { return covolume_; }
  /// (2 pi)^d / covolume: volume of one Brillouin-zone period.
  double bz_volume() const;

  /// k = sum_i u_i b_i in ambient coordinates.
  Eigen::VectorXd frac_to_cartesian(const Eigen::VectorXd& u) const;
  /// Inverse of frac_to_cartesian for k in the lattice span.
  Eigen::VectorXd cartesian_to_frac(const Eigen::VectorXd& k) const;

 private:
  LatticeSpec spec_;
  IntMatrix roots_;
  IntMatrix basis_;
  IntMatrix gram_;
  IntMatrix root_coords_;
  Eigen::MatrixXd reciprocal_;
  Eigen::MatrixXd span_frame_;
  double covolume_ = 0.0;
};

RootSystem build_roots(LatticeSpec spec);

/// Enumerates the tau roots of a lattice family in ambient coordinates,
/// sorted lexicographically.
IntMatrix enumerate_roots(const LatticeSpec& spec);

/// Simple roots with respect to the lexicographic positivity order: positive
/// roots that are not the sum of two positive roots. Returned as rows in
/// lexicographic order.
IntMatrix simple_roots(const IntMatrix& roots);

/// Reciprocal vectors b_j (rows) with a_i . b_j = 2 pi delta_ij, b_j in the
/// span of the a_i.
Eigen::MatrixXd reciprocal_of(const Eigen::MatrixXd& basis);

/// Expresses each row of `vectors` as an integer combination of the rows of
/// `basis`. Throws std::runtime_error if some vector is not an integer
/// combination to within `tol`.
IntMatrix integer_coordinates(const Eigen::MatrixXd& vectors,
                              const Eigen::MatrixXd& basis, double tol = 1e-9);

}  // namespace exlat
