#pragma once

// Critical points of the band (Van Hove singularities): search, signature
// classification, deduplication, extrema and their asymptotic tails.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "exlat/dispersion.hpp"

namespace exlat {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Best continued-fraction convergent p/q with q <= max_den and
/// |x - p/q| <= tol, if any.
std::optional<Rational> rationalize(double x, std::int64_t max_den = 64, double tol = 1e-8);

struct CriticalPoint {
  Eigen::VectorXd u;  // fractional, reduced to [0, 1)
  double energy = 0.0;
  double residual = 0.0;  // |grad eps|
  Signature signature;
  bool degenerate() const { return signature.n_zero > 0; }
};

/// Critical points sharing energy (to energy_tol) and signature.
struct CriticalClass {
  double energy = 0.0;
  Signature signature;
  std::optional<Rational> rational;
  /// Distinct positions per reciprocal-basis unit cell among the points found.
  int multiplicity = 0;
  std::size_t hits = 0;
  Eigen::VectorXd example_u;
  bool degenerate() const { return signature.n_zero > 0; }
};

struct VanHoveCatalog {
  std::string lattice;
  int rank = 0;
  std::vector<CriticalClass> classes;  // sorted by energy, then signature
  double epsilon_min = 0.0;
  double epsilon_max = 0.0;
  double gamma = 0.0;
  std::size_t starts = 0;
  std::size_t survivors = 0;
  bool stable = false;

  /// Classes at `energy` (within tol) with the given (n_down, n_up).
  std::vector<const CriticalClass*> find(double energy, int n_down, int n_up,
                                         double tol = 1e-6) const;
};

struct CriticalSearchOptions {
  std::size_t n_starts = 10'000;
  double grad_tol = 1e-10;
  double zero_tol = 1e-6;
  double energy_tol = 1e-8;
  double position_tol = 1e-6;
  std::uint64_t seed = 1;
  /// Points of (1/q) Z^d checked directly for vanishing gradient; catches
  /// critical points at lattice holes that sit where critical families meet.
  std::vector<int> seed_denominators{2, 3, 4};
  int max_iterations = 200;
  int polish_steps = 5;
  int threads = 0;
};

/// Signature of the orthonormal-frame Hessian at u, zeros counted relative to
/// the largest |eigenvalue|. Throws DomainError if every eigenvalue is zero.
Signature classify(const Dispersion& disp, const Eigen::VectorXd& u, double zero_tol = 1e-6);

/// Levenberg-Marquardt minimisation of |grad eps|^2 from u0 followed by
/// pseudo-inverse Newton polishing. Returns the point if |grad eps| <= grad_tol.
std::optional<CriticalPoint> refine_critical_point(const Dispersion& disp,
                                                   const Eigen::VectorXd& u0,
                                                   const CriticalSearchOptions& options);

/// Groups classified points into classes and counts distinct positions.
std::vector<CriticalClass> dedup(const std::vector<CriticalPoint>& points, double energy_tol,
                                 double position_tol);

VanHoveCatalog find_critical_points(const Dispersion& disp, const CriticalSearchOptions& options);

/// Doubles the number of multistarts until two successive catalogs list the
/// same (energy, signature) classes, or `max_starts` is reached.
VanHoveCatalog find_critical_points_until_stable(const Dispersion& disp,
                                                 const CriticalSearchOptions& options,
                                                 std::size_t max_starts);

struct ExtremumSearch {
  double energy = 0.0;
  CriticalPoint point;
  /// Distinct global extremizers per unit cell found by the multistart.
  int multiplicity = 0;
  std::vector<Eigen::VectorXd> positions;
};

/// Multistart damped-Newton ascent (or descent) to local extrema; keeps the
/// global best and counts its distinct positions.
ExtremumSearch extremum_search(const Dispersion& disp, bool maximize, std::size_t n_starts = 4096,
                               std::uint64_t seed = 1, int threads = 0);

/// Global maximum of the band. Throws DomainError if the best point is not a
/// nondegenerate maximum.
ExtremumSearch epsilon_max(const Dispersion& disp, std::size_t n_starts = 4096,
                           std::uint64_t seed = 1, int threads = 0);

/// Coefficient C in rho(eps) ~ C |eps - eps_ext|^(d/2 - 1) near a quadratic
/// extremum with `multiplicity` copies per unit cell. Throws DomainError for
/// degenerate points.
double tail_coefficient(const Dispersion& disp, const CriticalPoint& extremum, int multiplicity);

/// Same coefficient at the band minimum from the isotropic Hessian
/// (8 tau / d) I, without evaluating the band.
double minimum_tail_coefficient_closed_form(const RootSystem& rs);

}  // namespace exlat
