#include "exlat/lattice.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numbers>
#include <set>
#include <stdexcept>
#include <vector>

namespace exlat {
namespace {

using Row = std::vector<std::int64_t>;

IntMatrix to_matrix(std::vector<Row> rows, int cols) {
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  IntMatrix m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (int c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), c) = rows[r][c];
  return m;
}

Row row_of(const IntMatrix& m, Eigen::Index r) {
  Row v(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) v[static_cast<std::size_t>(c)] = m(r, c);
  return v;
}

// All permutations of (+-2, +-2, 0, ..., 0) in R^n.
std::vector<Row> d_type_roots(int n) {
  std::vector<Row> out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int si : {-2, 2})
        for (int sj : {-2, 2}) {
          Row v(static_cast<std::size_t>(n), 0);
          v[static_cast<std::size_t>(i)] = si;
          v[static_cast<std::size_t>(j)] = sj;
          out.push_back(std::move(v));
        }
  return out;
}

std::vector<Row> e8_roots() {
  std::vector<Row> out = d_type_roots(8);
  for (unsigned mask = 0; mask < 256; ++mask) {
    if (std::popcount(mask) % 2 != 0) continue;
    Row v(8);
    for (int i = 0; i < 8; ++i) v[static_cast<std::size_t>(i)] = (mask >> i) & 1u ? -1 : 1;
    out.push_back(std::move(v));
  }
  return out;
}

bool lex_positive(const Row& v) {
  for (auto x : v)
    if (x != 0) return x > 0;
  return false;
}

}  // namespace

LatticeSpec::LatticeSpec(Family family, int rank) : family_(family), rank_(rank) {
  switch (family) {
    case Family::A:
      if (rank < 1) throw std::invalid_argument("A_d requires rank d >= 1");
      break;
    case Family::D:
      if (rank < 4) throw std::invalid_argument("D_d requires rank d >= 4");
      break;
    case Family::E:
      if (rank < 6 || rank > 8)
        throw std::invalid_argument("E_d requires rank d in {6, 7, 8}");
      break;
  }
}

LatticeSpec LatticeSpec::parse(std::string_view token) {
  if (token.size() < 2)
    throw std::invalid_argument("malformed lattice token '" + std::string(token) + "'");
  Family family;
  switch (std::toupper(static_cast<unsigned char>(token.front()))) {
    case 'A': family = Family::A; break;
    case 'D': family = Family::D; break;
    case 'E': family = Family::E; break;
    default:
      throw std::invalid_argument("unknown lattice family in '" + std::string(token) + "'");
  }
  int rank = 0;
  const char* first = token.data() + 1;
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, rank);
  if (ec != std::errc() || ptr != last)
    throw std::invalid_argument("malformed lattice rank in '" + std::string(token) + "'");
  try {
    return LatticeSpec(family, rank);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("lattice '" + std::string(token) + "': " + e.what());
  }
}

std::string LatticeSpec::name() const {
  const char letter = family_ == Family::A ? 'A' : family_ == Family::D ? 'D' : 'E';
  return std::string(1, letter) + std::to_string(rank_);
}

int LatticeSpec::expected_tau() const {
  const int d = rank_;
  switch (family_) {
    case Family::A: return d * d + d;
    case Family::D: return 2 * d * d - 2 * d;
    case Family::E: return d == 6 ? 72 : d == 7 ? 126 : 240;
  }
  return 0;
}

IntMatrix enumerate_roots(const LatticeSpec& spec) {
  const int d = spec.rank();
  switch (spec.family()) {
    case Family::A: {
      std::vector<Row> rows;
      for (int i = 0; i <= d; ++i)
        for (int j = 0; j <= d; ++j) {
          if (i == j) continue;
          Row v(static_cast<std::size_t>(d + 1), 0);
          v[static_cast<std::size_t>(i)] = -2;
          v[static_cast<std::size_t>(j)] = 2;
          rows.push_back(std::move(v));
        }
      return to_matrix(std::move(rows), d + 1);
    }
    case Family::D:
      return to_matrix(d_type_roots(d), d);
    case Family::E: {
      std::vector<Row> rows = e8_roots();
      if (d == 6) {
        // Sublattice with the last three coordinates equal.
        std::erase_if(rows, [](const Row& v) { return !(v[5] == v[6] && v[6] == v[7]); });
      } else if (d == 7) {
        // Sublattice with coordinates summing to zero.
        std::erase_if(rows, [](const Row& v) {
          std::int64_t s = 0;
          for (auto x : v) s += x;
          return s != 0;
        });
      }
      return to_matrix(std::move(rows), 8);
    }
  }
  throw std::logic_error("unreachable lattice family");
}

IntMatrix simple_roots(const IntMatrix& roots) {
  std::vector<Row> positive;
  for (Eigen::Index r = 0; r < roots.rows(); ++r) {
    Row v = row_of(roots, r);
    if (lex_positive(v)) positive.push_back(std::move(v));
  }
  const std::set<Row> positive_set(positive.begin(), positive.end());
  std::vector<Row> simple;
  for (const Row& p : positive) {
    bool decomposable = false;
    for (const Row& q : positive) {
      Row diff(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) diff[i] = p[i] - q[i];
      if (positive_set.contains(diff)) {
        decomposable = true;
        break;
      }
    }
    if (!decomposable) simple.push_back(p);
  }
  return to_matrix(std::move(simple), static_cast<int>(roots.cols()));
}

Eigen::MatrixXd reciprocal_of(const Eigen::MatrixXd& basis) {
  const Eigen::MatrixXd gram = basis * basis.transpose();
  return 2.0 * std::numbers::pi * gram.ldlt().solve(basis);
}

IntMatrix integer_coordinates(const Eigen::MatrixXd& vectors, const Eigen::MatrixXd& basis,
                              double tol) {
  const Eigen::MatrixXd gram = basis * basis.transpose();
  const Eigen::MatrixXd coords =
      gram.ldlt().solve(basis * vectors.transpose()).transpose();
  IntMatrix out(coords.rows(), coords.cols());
  for (Eigen::Index r = 0; r < coords.rows(); ++r)
    for (Eigen::Index c = 0; c < coords.cols(); ++c)
      out(r, c) = static_cast<std::int64_t>(std::llround(coords(r, c)));
  const Eigen::MatrixXd rebuilt = out.cast<double>() * basis;
  if ((rebuilt - vectors).cwiseAbs().maxCoeff() > tol)
    throw std::runtime_error("vectors are not integer combinations of the basis");
  return out;
}

RootSystem::RootSystem(LatticeSpec spec) : spec_(spec) {
  roots_ = enumerate_roots(spec_);
  if (tau() != spec_.expected_tau())
    throw std::logic_error("root enumeration produced the wrong kissing number");

  basis_ = simple_roots(roots_);
  if (basis_.rows() != rank())
    throw std::logic_error("simple-root selection did not produce rank many roots");
  gram_ = basis_ * basis_.transpose();

  const Eigen::MatrixXd basis_d = basis_.cast<double>();
  root_coords_ = integer_coordinates(roots_.cast<double>(), basis_d);
  if (root_coords_ * basis_ != roots_)
    throw std::logic_error("root coordinates do not reproduce the roots exactly");

  reciprocal_ = reciprocal_of(basis_d);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis_d.transpose());
  span_frame_ = qr.householderQ() * Eigen::MatrixXd::Identity(ambient_dim(), rank());
  covolume_ = std::sqrt(gram_.cast<double>().determinant());
}

double RootSystem::bz_volume() const {
  return std::pow(2.0 * std::numbers::pi, rank()) / covolume_;
}

Eigen::VectorXd RootSystem::frac_to_cartesian(const Eigen::VectorXd& u) const {
  return reciprocal_.transpose() * u;
}

Eigen::VectorXd RootSystem::cartesian_to_frac(const Eigen::VectorXd& k) const {
  return basis_.cast<double>() * k / (2.0 * std::numbers::pi);
}

RootSystem build_roots(LatticeSpec spec) { return RootSystem(spec); }

}  // namespace exlat
