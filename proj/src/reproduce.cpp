#include "exlat/reproduce.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "exlat/errors.hpp"
#include "exlat/io.hpp"
#include "exlat/reference.hpp"

namespace exlat {
namespace {

constexpr double kZ95 = 1.959963984540054;

std::string str(double x) { return io::format_double(x); }

std::string str(const BigInt& n) { return n.str(); }

CheckResult relative(std::string name, double expected, double actual, double tol) {
  const double err = std::fabs(actual - expected) / std::fabs(expected);
  std::ostringstream t;
  t << "rel " << tol << " (err " << std::setprecision(3) << err << ")";
  return {std::move(name), str(expected), str(actual), t.str(), err <= tol};
}

CheckResult absolute(std::string name, double expected, double actual, double tol) {
  const double err = std::fabs(actual - expected);
  std::ostringstream t;
  t << "abs " << tol << " (err " << std::setprecision(3) << err << ")";
  return {std::move(name), str(expected), str(actual), t.str(), err <= tol};
}

std::string signature_str(int n_down, int n_up, int n_zero) {
  return "(" + std::to_string(n_down) + "," + std::to_string(n_up) + "," +
         std::to_string(n_zero) + ")";
}

}  // namespace

bool Report::passed() const { return n_passed() == checks.size(); }

std::size_t Report::n_passed() const {
  std::size_t n = 0;
  for (const auto& c : checks) n += c.pass ? 1 : 0;
  return n;
}

void Report::append(const Report& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

void print_report(std::ostream& os, const Report& report) {
  for (const auto& c : report.checks)
    os << (c.pass ? "  ok    " : "  FAIL  ") << c.name << ": expected " << c.expected
       << ", got " << c.actual << " [" << c.tolerance << "]\n";
  os << report.target << ": " << report.n_passed() << "/" << report.checks.size()
     << " passed\n";
}

double tail_slope(const DosHistogram& hist, bool lower, TailWindow window) {
  const Binning& b = hist.binning;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (int i = 0; i < b.size(); ++i) {
    const double gap = lower ? b.mid(i) - b.min() : b.max() - b.mid(i);
    const double rho = hist.density[static_cast<std::size_t>(i)];
    if (gap < window.lo || gap > window.hi || !(rho > 0.0)) continue;
    const double x = std::log(gap), y = std::log(rho);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 3) throw DomainError("too few populated bins in the tail window");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ExtremaMeasurement measure_extrema(const Dispersion& disp, const Budget& budget) {
  ExtremaMeasurement m;
  m.max = epsilon_max(disp, budget.extremum_starts, budget.seed, budget.threads);
  m.min = extremum_search(disp, false, budget.extremum_starts, budget.seed, budget.threads);
  m.tail_max = tail_coefficient(disp, m.max.point, m.max.multiplicity);
  m.tail_min = tail_coefficient(disp, m.min.point, m.min.multiplicity);
  return m;
}

Report check_walks(const LatticeSpec& spec, const WalkTable& table) {
  Report r{spec.name() + " walk counts", {}};
  const auto expected = reference::walk_counts(spec);
  for (std::size_t n = 0; n < expected.size(); ++n) {
    const std::string name = spec.name() + " W_" + std::to_string(n);
    if (static_cast<int>(n) > table.n_max()) {
      r.add({name, str(expected[n]), "missing", "exact", false});
      continue;
    }
    r.add({name, str(expected[n]), str(table.counts[n]), "exact", table.counts[n] == expected[n]});
  }
  return r;
}

Report check_catalog(const LatticeSpec& spec, const VanHoveCatalog& catalog) {
  Report r{spec.name() + " singularities", {}};
  for (const auto& row : reference::singularities(spec)) {
    const double e = row.energy.value();
    const std::string name = spec.name() + " eps=" + row.energy.str() + " " +
                             signature_str(row.n_down, row.n_up, row.n_zero);
    const CriticalClass* hit = nullptr;
    for (const CriticalClass* c : catalog.find(e, row.n_down, row.n_up, 1e-6))
      if (c->signature.n_zero == row.n_zero) hit = c;
    if (!hit) {
      r.add({name, "present", "absent", "energy 1e-6, signature exact", false});
      continue;
    }
    const bool rational_ok = hit->rational && *hit->rational == row.energy;
    std::ostringstream actual;
    actual << str(hit->energy) << " (" << (hit->rational ? hit->rational->str() : "?")
           << ", multiplicity " << hit->multiplicity << ")";
    r.add({name, row.energy.str(), actual.str(), "energy 1e-6, signature exact",
           std::fabs(hit->energy - e) <= 1e-6 && rational_ok});
  }
  return r;
}

Report check_extrema(const LatticeSpec& spec, const ExtremaMeasurement& m) {
  const auto& ref = reference::extrema(spec);
  const double tau = RootSystem(spec).tau();
  Report r{spec.name() + " extrema", {}};
  r.add(absolute(spec.name() + " eps_max", ref.epsilon_max.value(), m.max.energy, 1e-9));
  r.add(absolute(spec.name() + " eps_min", -tau, m.min.energy, 1e-9));
  const auto gamma = rationalize(tau / m.max.energy);
  r.add({spec.name() + " gamma", std::to_string(ref.gamma), gamma ? gamma->str() : str(tau / m.max.energy),
         "exact after rationalization", gamma && *gamma == Rational{ref.gamma, 1}});
  r.add({spec.name() + " N_max", std::to_string(ref.n_max), std::to_string(m.max.multiplicity),
         "exact", m.max.multiplicity == ref.n_max});
  r.add({spec.name() + " N_min", "1", std::to_string(m.min.multiplicity), "exact",
         m.min.multiplicity == 1});
  r.add(relative(spec.name() + " tail_min", ref.tail_min, m.tail_min, 1e-9));
  r.add(relative(spec.name() + " tail_max", ref.tail_max, m.tail_max, 1e-9));
  return r;
}

Report check_return(const LatticeSpec& spec, const ReturnEstimate& estimate) {
  Report r{spec.name() + " return probability", {}};
  const auto& ref = reference::extrema(spec);
  r.add(relative(spec.name() + " P", ref.return_mid(), estimate.P, 5e-3));
  return r;
}

Report check_return_paths(const LatticeSpec& spec, const ReturnEstimate& direct,
                          const GreensFunction& gf) {
  Report r{spec.name() + " return paths", {}};
  const double via_g = return_from_greens(gf);
  const double se = std::hypot(direct.stderr_, return_from_greens_stderr(gf));
  std::ostringstream tol;
  tol << "combined 95% " << std::setprecision(3) << kZ95 * se;
  r.add({spec.name() + " P direct vs Re G(eps_min)", str(direct.P), str(via_g), tol.str(),
         std::fabs(via_g - direct.P) <= kZ95 * se});
  return r;
}

Report check_dos(const LatticeSpec& spec, const DosHistogram& hist,
                 const std::vector<BigInt>& walks) {
  Report r{spec.name() + " density of states", {}};
  if (hist.pilot_samples > 0) {
    const double dist = pilot_cdf_distance(hist);
    r.add({spec.name() + " normalization (CDF vs uniform pilot)", "0", str(dist), "abs 0.002",
           dist <= 2e-3});
  }
  const double w2 = walks.size() > 2 ? walks[2].convert_to<double>() : 1.0;
  for (std::size_t n = 1; n < walks.size(); ++n) {
    const double w = walks[n].convert_to<double>();
    const double expected = n % 2 == 0 ? w : -w;
    const double m = moment(hist, static_cast<int>(n));
    const double tol = n <= 4 ? 0.02 : 0.05;
    const std::string name = spec.name() + " moment " + std::to_string(n);
    if (w == 0.0)
      r.add(absolute(name + " / W_2^(n/2)", 0.0, m / std::pow(w2, 0.5 * n), tol));
    else
      r.add(relative(name, expected, m, tol));
  }
  const double k = 0.5 * spec.rank() - 1.0;
  r.add(absolute(spec.name() + " lower tail exponent", k, tail_slope(hist, true), 0.05));
  r.add(absolute(spec.name() + " upper tail exponent", k, tail_slope(hist, false), 0.05));
  return r;
}

SamplerConfig figure_config(const LatticeSpec& spec, const Budget& budget) {
  SamplerConfig cfg;
  cfg.lattice = spec;
  cfg.n_samples = budget.samples;
  cfg.seed = budget.seed;
  cfg.threads = budget.threads;
  cfg.epsilon_max = reference::extrema(spec).epsilon_max.value();
  return cfg;
}

Report reproduce_table1(const Budget& budget) {
  Report r{"table1", {}};
  for (const auto& spec : reference::exceptional()) {
    const Dispersion disp{RootSystem(spec)};
    CriticalSearchOptions opts;
    opts.n_starts = budget.critical_starts;
    opts.seed = budget.seed;
    opts.threads = budget.threads;
    r.append(check_catalog(spec, find_critical_points(disp, opts)));
  }
  return r;
}

Report reproduce_table2(const Budget& budget) {
  Report r{"table2", {}};
  for (const auto& spec : reference::exceptional()) {
    const Dispersion disp{RootSystem(spec)};
    r.append(check_extrema(spec, measure_extrema(disp, budget)));
    ReturnOptions opts;
    opts.threads = budget.threads;
    r.append(check_return(spec, estimate_return(disp, budget.samples, budget.seed, opts)));
  }
  return r;
}

Report reproduce_table3(const Budget& budget) {
  Report r{"table3", {}};
  for (const auto& spec : reference::exceptional())
    r.append(check_walks(spec, walk_counts(RootSystem(spec), 8, budget.threads)));
  return r;
}

Report reproduce_fig_dos(const Budget& budget) {
  Report r{"fig_dos", {}};
  for (const auto& spec : reference::exceptional())
    r.append(check_dos(spec, sample_dos(figure_config(spec, budget)),
                       reference::walk_counts(spec)));
  return r;
}

Report reproduce(std::string_view target, const Budget& budget) {
  if (target == "table1") return reproduce_table1(budget);
  if (target == "table2") return reproduce_table2(budget);
  if (target == "table3") return reproduce_table3(budget);
  if (target == "fig_dos") return reproduce_fig_dos(budget);
  throw std::invalid_argument("unknown reproduce target '" + std::string(target) +
                              "' (expected table1, table2, table3 or fig_dos)");
}

}  // namespace exlat
