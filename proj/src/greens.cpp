#include "exlat/greens.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "exlat/errors.hpp"

namespace exlat {
namespace {

constexpr double kEdgeNudge = 0.5e-9;

double bin_kernel(double e, double lo, double hi) {
  return std::log(std::fabs((e - lo) / (e - hi)));
}

// Nudges e below any bin edge it lands on exactly.
double off_edge(const Binning& binning, double e) {
  const auto& edges = binning.edges();
  auto it = std::lower_bound(edges.begin(), edges.end(), e);
  if (it == edges.end() || *it != e) return e;
  const int b = static_cast<int>(it - edges.begin());
  const double width = b < binning.size() ? binning.width(b) : binning.width(b - 1);
  return e - kEdgeNudge * width;
}

std::string format(double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

double parse(const std::string& s) {
  double x = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw std::runtime_error("malformed number '" + s + "' in Green's function file");
  return x;
}

}  // namespace

std::vector<double> im_from_dos(const DosHistogram& hist) {
  std::vector<double> im;
  for (double rho : hist.density) im.push_back(std::numbers::pi * rho);
  return im;
}

std::vector<double> kramers_kronig(const Binning& binning, const std::vector<double>& density,
                                   const std::vector<double>& eval) {
  if (density.size() != static_cast<std::size_t>(binning.size()))
    throw std::invalid_argument("density and binning sizes differ");
  std::vector<double> re;
  re.reserve(eval.size());
  for (double e0 : eval) {
    const double e = off_edge(binning, e0);
    double s = 0.0;
    for (int b = 0; b < binning.size(); ++b) {
      const double rho = density[static_cast<std::size_t>(b)];
      if (rho != 0.0) s += rho * bin_kernel(e, binning.lo(b), binning.hi(b));
    }
    re.push_back(s);
  }
  return re;
}

std::vector<double> kramers_kronig(const DosHistogram& hist, const std::vector<double>& eval) {
  return kramers_kronig(hist.binning, hist.density, eval);
}

GreensFunction greens_from_dos(const DosHistogram& hist, const std::string& lattice, int tau) {
  GreensFunction gf;
  gf.lattice = lattice;
  gf.tau = tau;
  const Binning& bins = hist.binning;
  gf.energy.push_back(bins.min());
  for (int b = 0; b < bins.size(); ++b) gf.energy.push_back(bins.mid(b));
  gf.energy.push_back(bins.max());
  gf.re = kramers_kronig(hist, gf.energy);
  gf.im.push_back(0.0);
  for (double v : im_from_dos(hist)) gf.im.push_back(v);
  gf.im.push_back(0.0);

  if (hist.batch_density.size() >= 2) {
    const double e = off_edge(bins, bins.min());
    std::vector<double> coeff;
    for (int b = 0; b < bins.size(); ++b)
      coeff.push_back(bin_kernel(e, bins.lo(b), bins.hi(b)) / bins.width(b));
    gf.re_min_stderr = batch_stderr(hist, coeff);
  }
  return gf;
}

void write_greens(std::ostream& os, const GreensFunction& gf) {
  os << "# schema_version,1\n";
  os << "# lattice," << gf.lattice << "\n";
  os << "# tau," << gf.tau << "\n";
  os << "# re_min_stderr," << format(gf.re_min_stderr) << "\n";
  for (double m : gf.markers) os << "# marker," << format(m) << "\n";
  os << "energy,re,im\n";
  for (std::size_t i = 0; i < gf.energy.size(); ++i)
    os << format(gf.energy[i]) << ',' << format(gf.re[i]) << ',' << format(gf.im[i]) << '\n';
}

void export_greens(const GreensFunction& gf, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_greens(out, gf);
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

GreensFunction read_greens(std::istream& is) {
  GreensFunction gf;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      const std::string key = line.substr(2, comma - 2);
      const std::string value = line.substr(comma + 1);
      if (key == "lattice") gf.lattice = value;
      else if (key == "tau") gf.tau = std::stoi(value);
      else if (key == "re_min_stderr") gf.re_min_stderr = parse(value);
      else if (key == "marker") gf.markers.push_back(parse(value));
      continue;
    }
    if (!header) {
      if (line != "energy,re,im") throw std::runtime_error("unexpected header '" + line + "'");
      header = true;
      continue;
    }
    std::stringstream row(line);
    std::string a, b, c;
    std::getline(row, a, ',');
    std::getline(row, b, ',');
    std::getline(row, c, ',');
    gf.energy.push_back(parse(a));
    gf.re.push_back(parse(b));
    gf.im.push_back(parse(c));
  }
  if (!header) throw std::runtime_error("Green's function file has no header row");
  return gf;
}

double return_from_greens(const GreensFunction& gf) {
  if (gf.re.empty() || gf.tau <= 0) throw DomainError("empty Green's function");
  const double re_min = gf.re.front();
  if (re_min == 0.0 || !std::isfinite(re_min))
    throw DomainError("Re G(eps_min) is zero or not finite; the input density is broken");
  return 1.0 + 1.0 / (gf.tau * re_min);
}

double return_from_greens_stderr(const GreensFunction& gf) {
  const double re_min = gf.re.front();
  return gf.re_min_stderr / (gf.tau * re_min * re_min);
}

}  // namespace exlat
