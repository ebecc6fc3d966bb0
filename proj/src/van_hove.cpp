#include "exlat/van_hove.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>
#include <tuple>

#include "exlat/errors.hpp"
#include "exlat/rng.hpp"
#include "parallel.hpp"

namespace exlat {
namespace {

Eigen::VectorXd wrapped(Eigen::VectorXd u) {
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = wrap_unit(u(i));
  return u;
}

std::vector<std::int64_t> position_key(const Eigen::VectorXd& u, double position_tol) {
  const auto cells = static_cast<std::int64_t>(std::llround(1.0 / position_tol));
  std::vector<std::int64_t> key(static_cast<std::size_t>(u.size()));
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    std::int64_t k = std::llround(wrap_unit(u(i)) * static_cast<double>(cells));
    key[static_cast<std::size_t>(i)] = ((k % cells) + cells) % cells;
  }
  return key;
}

Eigen::VectorXd random_point(std::mt19937_64& rng, int d) {
  Eigen::VectorXd u(d);
  for (int i = 0; i < d; ++i) u(i) = uniform01(rng);
  return u;
}

// Solves H x = g through the eigendecomposition, ignoring directions whose
// eigenvalue is below zero_tol relative to the largest.
Eigen::VectorXd pseudo_solve(const Eigen::MatrixXd& h, const Eigen::VectorXd& g, double zero_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const double cutoff = zero_tol * lam.cwiseAbs().maxCoeff();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(g.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k) {
    if (std::fabs(lam(k)) <= cutoff) continue;
    const auto v = eig.eigenvectors().col(k);
    x += (v.dot(g) / lam(k)) * v;
  }
  return x;
}

std::set<std::tuple<std::int64_t, int, int, int>> class_keys(const VanHoveCatalog& cat) {
  std::set<std::tuple<std::int64_t, int, int, int>> keys;
  for (const auto& c : cat.classes)
    keys.emplace(std::llround(c.energy * 1e6), c.signature.n_down, c.signature.n_up,
                 c.signature.n_zero);
  return keys;
}

VanHoveCatalog assemble(const Dispersion& disp, const CriticalSearchOptions& options,
                        const std::vector<CriticalPoint>& points, std::size_t starts) {
  if (points.empty())
    throw DomainError("no critical points survived; increase the number of multistarts");
  VanHoveCatalog cat;
  cat.lattice = disp.root_system().spec().name();
  cat.rank = disp.rank();
  cat.starts = starts;
  cat.survivors = points.size();
  cat.classes = dedup(points, options.energy_tol, options.position_tol);
  cat.epsilon_min = -static_cast<double>(disp.tau());
  cat.epsilon_max = cat.epsilon_min;
  for (const auto& c : cat.classes)
    if (c.signature.n_down == disp.rank()) cat.epsilon_max = std::max(cat.epsilon_max, c.energy);
  cat.gamma = cat.epsilon_max > 0.0 ? -cat.epsilon_min / cat.epsilon_max : 0.0;
  return cat;
}

std::vector<CriticalPoint> rational_seed_points(const Dispersion& disp,
                                                const CriticalSearchOptions& options) {
  constexpr double kMaxGrid = 1 << 20;
  const int d = disp.rank();
  std::vector<CriticalPoint> out;
  for (int q : options.seed_denominators) {
    if (q < 1 || std::pow(static_cast<double>(q), d) > kMaxGrid) continue;
    std::vector<int> digits(static_cast<std::size_t>(d), 0);
    Eigen::VectorXd u(d);
    while (true) {
      for (int i = 0; i < d; ++i) u(i) = static_cast<double>(digits[static_cast<std::size_t>(i)]) / q;
      const Eigen::VectorXd g = disp.gradient(u);
      if (g.norm() <= options.grad_tol) {
        CriticalPoint cp;
        cp.u = u;
        cp.energy = disp.energy(u);
        cp.residual = g.norm();
        cp.signature = classify(disp, u, options.zero_tol);
        out.push_back(std::move(cp));
      }
      int i = 0;
      while (i < d && ++digits[static_cast<std::size_t>(i)] == q) digits[static_cast<std::size_t>(i++)] = 0;
      if (i == d) break;
    }
  }
  return out;
}

void run_starts(const Dispersion& disp, const CriticalSearchOptions& options, std::size_t begin,
                std::size_t end, std::vector<CriticalPoint>& points) {
  std::vector<std::optional<CriticalPoint>> found(end - begin);
  const int threads = options.threads > 0 ? options.threads : detail::default_threads();
  detail::parallel_for(end - begin, threads, [&](std::size_t i) {
    auto rng = stream_rng(options.seed, begin + i);
    found[i] = refine_critical_point(disp, random_point(rng, disp.rank()), options);
  });
  for (auto& f : found)
    if (f) points.push_back(std::move(*f));
}

}  // namespace

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

std::optional<Rational> rationalize(double x, std::int64_t max_den, double tol) {
  if (!std::isfinite(x)) return std::nullopt;
  std::int64_t h_prev = 1, h = static_cast<std::int64_t>(std::floor(x));
  std::int64_t k_prev = 0, k = 1;
  double frac = x - std::floor(x);
  while (true) {
    if (std::fabs(x - static_cast<double>(h) / static_cast<double>(k)) <= tol)
      return Rational{h, k};
    if (frac < 1e-15) return std::nullopt;
    const double inv = 1.0 / frac;
    const auto a = static_cast<std::int64_t>(std::floor(inv));
    frac = inv - std::floor(inv);
    const std::int64_t h_next = a * h + h_prev;
    const std::int64_t k_next = a * k + k_prev;
    if (k_next > max_den) return std::nullopt;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
}

std::vector<const CriticalClass*> VanHoveCatalog::find(double energy, int n_down, int n_up,
                                                        double tol) const {
  std::vector<const CriticalClass*> out;
  for (const auto& c : classes)
    if (std::fabs(c.energy - energy) <= tol && c.signature.n_down == n_down &&
        c.signature.n_up == n_up)
      out.push_back(&c);
  return out;
}

Signature classify(const Dispersion& disp, const Eigen::VectorXd& u, double zero_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(disp.cartesian_hessian(u),
                                                     Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().cwiseAbs().maxCoeff() == 0.0)
    throw DomainError("Hessian vanishes identically; flat point");
  return signature_of(eig.eigenvalues(), zero_tol);
}

std::optional<CriticalPoint> refine_critical_point(const Dispersion& disp,
                                                   const Eigen::VectorXd& u0,
                                                   const CriticalSearchOptions& options) {
  const int d = disp.rank();
  Eigen::VectorXd u = u0;
  double e = 0.0;
  Eigen::VectorXd g(d), g_try(d);
  Eigen::MatrixXd h(d, d), h_try(d, d);
  disp.evaluate(u, e, g, h);
  double f = g.squaredNorm();
  double lambda = 1e-3;
  const double target = 1e-4 * options.grad_tol * options.grad_tol;

  // Gauss-Newton on the residual grad eps with Jacobian H: the gradient of
  // the objective |grad eps|^2 is 2 H grad eps.
  for (int it = 0; it < options.max_iterations && f > target; ++it) {
    const Eigen::MatrixXd hh = h * h;
    const double scale = hh.trace() / d + 1e-300;
    Eigen::MatrixXd a = hh;
    a.diagonal().array() += lambda * scale;
    const Eigen::VectorXd step = -a.ldlt().solve(h * g);
    const Eigen::VectorXd u_try = u + step;
    double e_try = 0.0;
    disp.evaluate(u_try, e_try, g_try, h_try);
    const double f_try = g_try.squaredNorm();
    if (f_try < f) {
      u = u_try;
      e = e_try;
      g.swap(g_try);
      h.swap(h_try);
      f = f_try;
      lambda = std::max(lambda / 3.0, 1e-15);
    } else {
      lambda *= 4.0;
      if (lambda > 1e10) break;
    }
  }

  for (int it = 0; it < options.polish_steps; ++it) {
    const Eigen::VectorXd u_try = u - pseudo_solve(h, g, options.zero_tol);
    double e_try = 0.0;
    disp.evaluate(u_try, e_try, g_try, h_try);
    if (g_try.squaredNorm() >= g.squaredNorm()) break;
    u = u_try;
    e = e_try;
    g.swap(g_try);
    h.swap(h_try);
  }

  if (!(g.norm() <= options.grad_tol)) return std::nullopt;
  CriticalPoint cp;
  cp.u = wrapped(u);
  cp.energy = disp.energy(cp.u);
  cp.residual = disp.gradient(cp.u).norm();
  if (!(cp.residual <= options.grad_tol)) return std::nullopt;
  cp.signature = classify(disp, cp.u, options.zero_tol);
  return cp;
}

std::vector<CriticalClass> dedup(const std::vector<CriticalPoint>& points, double energy_tol,
                                 double position_tol) {
  std::vector<const CriticalPoint*> sorted;
  for (const auto& p : points) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(), [](const CriticalPoint* a, const CriticalPoint* b) {
    if (a->signature != b->signature) return a->signature < b->signature;
    return a->energy < b->energy;
  });

  std::vector<CriticalClass> classes;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j]->signature == sorted[i]->signature &&
           sorted[j]->energy - sorted[j - 1]->energy <= energy_tol)
      ++j;
    const CriticalPoint* best = sorted[i];
    std::set<std::vector<std::int64_t>> positions;
    for (std::size_t k = i; k < j; ++k) {
      if (sorted[k]->residual < best->residual) best = sorted[k];
      positions.insert(position_key(sorted[k]->u, position_tol));
    }
    CriticalClass c;
    c.energy = best->energy;
    c.signature = best->signature;
    c.rational = rationalize(c.energy);
    c.multiplicity = static_cast<int>(positions.size());
    c.hits = j - i;
    c.example_u = best->u;
    classes.push_back(std::move(c));
    i = j;
  }
  std::sort(classes.begin(), classes.end(), [](const CriticalClass& a, const CriticalClass& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.signature < b.signature;
  });
  return classes;
}

VanHoveCatalog find_critical_points(const Dispersion& disp, const CriticalSearchOptions& options) {
  std::vector<CriticalPoint> points = rational_seed_points(disp, options);
  run_starts(disp, options, 0, options.n_starts, points);
  return assemble(disp, options, points, options.n_starts);
}

VanHoveCatalog find_critical_points_until_stable(const Dispersion& disp,
                                                 const CriticalSearchOptions& options,
                                                 std::size_t max_starts) {
  std::vector<CriticalPoint> points = rational_seed_points(disp, options);
  std::size_t done = std::max<std::size_t>(options.n_starts, 1);
  run_starts(disp, options, 0, done, points);
  VanHoveCatalog previous = assemble(disp, options, points, done);
  while (done * 2 <= max_starts) {
    run_starts(disp, options, done, done * 2, points);
    done *= 2;
    VanHoveCatalog next = assemble(disp, options, points, done);
    if (class_keys(next) == class_keys(previous)) {
      next.stable = true;
      return next;
    }
    previous = std::move(next);
  }
  return previous;
}

ExtremumSearch extremum_search(const Dispersion& disp, bool maximize, std::size_t n_starts,
                               std::uint64_t seed, int threads) {
  constexpr int kMaxIterations = 400;
  constexpr double kMaxStep = 0.1;
  constexpr double kGradTol = 1e-11;
  constexpr double kEnergyTol = 1e-8;
  constexpr double kPositionTol = 1e-6;
  const int d = disp.rank();
  const double sign = maximize ? 1.0 : -1.0;
  std::vector<std::optional<CriticalPoint>> found(n_starts);

  const int workers = threads > 0 ? threads : detail::default_threads();
  detail::parallel_for(n_starts, workers, [&](std::size_t s) {
    auto rng = stream_rng(seed ^ 0x6578747265ULL, s);
    Eigen::VectorXd u = random_point(rng, d);
    double e = 0.0;
    Eigen::VectorXd g(d);
    Eigen::MatrixXd h(d, d);
    for (int it = 0; it < kMaxIterations; ++it) {
      disp.evaluate(u, e, g, h);
      if (g.norm() <= kGradTol) break;
      // Ascend f = sign * eps with the Hessian's eigenvalues replaced by
      // their magnitudes; this is Newton's step near a maximum of f.
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sign * h);
      const Eigen::VectorXd& lam = eig.eigenvalues();
      const double floor_lam = 1e-8 * lam.cwiseAbs().maxCoeff() + 1e-12;
      Eigen::VectorXd step = Eigen::VectorXd::Zero(d);
      for (int k = 0; k < d; ++k) {
        const auto v = eig.eigenvectors().col(k);
        step += (v.dot(sign * g) / std::max(std::fabs(lam(k)), floor_lam)) * v;
      }
      if (step.norm() > kMaxStep) step *= kMaxStep / step.norm();
      const double slope = sign * g.dot(step);
      double t = 1.0;
      while (t > 1e-12 && sign * disp.energy(Eigen::VectorXd(u + t * step)) <
                              sign * e + 1e-4 * t * slope)
        t *= 0.5;
      if (t <= 1e-12) break;
      u += t * step;
    }
    CriticalPoint cp;
    cp.u = wrapped(u);
    cp.energy = disp.energy(cp.u);
    cp.residual = disp.gradient(cp.u).norm();
    if (cp.residual > 1e-9) return;
    cp.signature = classify(disp, cp.u);
    found[s] = std::move(cp);
  });

  const CriticalPoint* best = nullptr;
  for (const auto& f : found)
    if (f && (!best || sign * f->energy > sign * best->energy)) best = &*f;
  if (!best) throw DomainError("extremum search did not converge from any start");

  ExtremumSearch out;
  out.energy = best->energy;
  out.point = *best;
  std::set<std::vector<std::int64_t>> seen;
  for (const auto& f : found) {
    if (!f || std::fabs(f->energy - best->energy) > kEnergyTol) continue;
    if (seen.insert(position_key(f->u, kPositionTol)).second) out.positions.push_back(f->u);
  }
  out.multiplicity = static_cast<int>(out.positions.size());
  return out;
}

ExtremumSearch epsilon_max(const Dispersion& disp, std::size_t n_starts, std::uint64_t seed,
                           int threads) {
  ExtremumSearch best = extremum_search(disp, true, n_starts, seed, threads);
  if (best.point.signature.n_down != disp.rank())
    throw DomainError("highest point found is not a nondegenerate maximum");
  return best;
}

double tail_coefficient(const Dispersion& disp, const CriticalPoint& extremum, int multiplicity) {
  if (extremum.degenerate())
    throw DomainError("tail coefficient is only defined for quadratic extrema");
  const int d = disp.rank();
  const double det = std::fabs(disp.cartesian_hessian(extremum.u).determinant());
  const double density = multiplicity / disp.root_system().bz_volume();
  return density * std::pow(2.0 * std::numbers::pi, 0.5 * d) /
         (std::tgamma(0.5 * d) * std::sqrt(det));
}

double minimum_tail_coefficient_closed_form(const RootSystem& rs) {
  const int d = rs.rank();
  const double curvature = 8.0 * rs.tau() / d;
  return std::pow(2.0 * std::numbers::pi, 0.5 * d) /
         (rs.bz_volume() * std::tgamma(0.5 * d) * std::pow(curvature, 0.5 * d));
}

}  // namespace exlat
