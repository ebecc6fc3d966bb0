#include "exlat/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "exlat/version.hpp"

namespace exlat::io {
namespace {

double parse_double(const std::string& s) {
  double x = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw std::runtime_error("malformed number '" + s + "'");
  return x;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  auto a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

nlohmann::json matrix_json(const IntMatrix& m) {
  auto a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(std::move(row));
  }
  return a;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void write_dos_csv(std::ostream& os, const DosHistogram& hist, const std::string& lattice) {
  os << "# schema_version," << kSchemaVersion << '\n';
  os << "# lattice," << lattice << '\n';
  os << "# samples," << hist.total_samples << '\n';
  os << "# ess," << format_double(hist.ess) << '\n';
  os << "bin_lo,bin_hi,density,stderr\n";
  const Binning& b = hist.binning;
  for (int i = 0; i < b.size(); ++i)
    os << format_double(b.lo(i)) << ',' << format_double(b.hi(i)) << ','
       << format_double(hist.density[static_cast<std::size_t>(i)]) << ','
       << format_double(hist.stderr_[static_cast<std::size_t>(i)]) << '\n';
}

void write_dos_gnuplot(std::ostream& os, const DosHistogram& hist) {
  os << "# midpoint density\n";
  for (int i = 0; i < hist.binning.size(); ++i)
    os << format_double(hist.binning.mid(i)) << ' '
       << format_double(hist.density[static_cast<std::size_t>(i)]) << '\n';
}

DosHistogram read_dos_csv(std::istream& is) {
  std::string line;
  bool header = false;
  std::vector<double> edges, density, err;
  DosHistogram h;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# samples,", 0) == 0) h.total_samples = std::stoull(line.substr(10));
      if (line.rfind("# ess,", 0) == 0) h.ess = parse_double(line.substr(6));
      continue;
    }
    if (!header) {
      if (line != "bin_lo,bin_hi,density,stderr")
        throw std::runtime_error("unexpected DOS header '" + line + "'");
      header = true;
      continue;
    }
    std::stringstream row(line);
    std::string f[4];
    for (auto& s : f) std::getline(row, s, ',');
    const double lo = parse_double(f[0]);
    if (!edges.empty() && edges.back() != lo)
      throw std::runtime_error("DOS bins are not contiguous at " + f[0]);
    if (edges.empty()) edges.push_back(lo);
    edges.push_back(parse_double(f[1]));
    density.push_back(parse_double(f[2]));
    err.push_back(parse_double(f[3]));
  }
  if (!header || density.empty()) throw std::runtime_error("DOS file has no data rows");
  h.binning = Binning(std::move(edges));
  h.density = std::move(density);
  h.stderr_ = std::move(err);
  return h;
}

nlohmann::json to_json(const BigInt& n) {
  if (n >= 0 && n <= std::numeric_limits<std::uint64_t>::max())
    return n.convert_to<std::uint64_t>();
  return n.str();
}

nlohmann::json to_json(const RootSystem& rs) {
  return {{"schema_version", kSchemaVersion},
          {"lattice", rs.spec().name()},
          {"rank", rs.rank()},
          {"tau", rs.tau()},
          {"roots", matrix_json(rs.roots())},
          {"basis", matrix_json(rs.basis())},
          {"gram", matrix_json(rs.gram())}};
}

nlohmann::json band_json(const Dispersion& disp, const Eigen::VectorXd& u) {
  double e = 0.0;
  Eigen::VectorXd g;
  Eigen::MatrixXd h;
  disp.evaluate(u, e, g, h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(disp.to_cartesian(h),
                                                     Eigen::EigenvaluesOnly);
  return {{"schema_version", kSchemaVersion},
          {"lattice", disp.root_system().spec().name()},
          {"u", vector_json(u)},
          {"energy", e},
          {"gradient", vector_json(g)},
          {"hessian_eigenvalues", vector_json(eig.eigenvalues())}};
}

nlohmann::json to_json(const VanHoveCatalog& catalog) {
  auto rows = nlohmann::json::array();
  for (const auto& c : catalog.classes) {
    rows.push_back({{"energy", c.energy},
                    {"rational", c.rational ? nlohmann::json(c.rational->str()) : nullptr},
                    {"n_down", c.signature.n_down},
                    {"n_up", c.signature.n_up},
                    {"n_zero", c.signature.n_zero},
                    {"multiplicity", c.multiplicity},
                    {"example_u", vector_json(c.example_u)}});
  }
  return {{"schema_version", kSchemaVersion},
          {"lattice", catalog.lattice},
          {"epsilon_min", catalog.epsilon_min},
          {"epsilon_max", catalog.epsilon_max},
          {"gamma", catalog.gamma},
          {"starts", catalog.starts},
          {"survivors", catalog.survivors},
          {"stable", catalog.stable},
          {"singularities", std::move(rows)}};
}

nlohmann::json to_json(const WalkTable& table) {
  auto counts = nlohmann::json::array();
  for (const auto& w : table.counts) counts.push_back(to_json(w));
  return {{"schema_version", kSchemaVersion},
          {"lattice", table.lattice.name()},
          {"n_max", table.n_max()},
          {"counts", std::move(counts)},
          {"support", table.support}};
}

nlohmann::json to_json(const ReturnEstimate& r) {
  return {{"schema_version", kSchemaVersion},
          {"P", r.P},
          {"ci_lo", r.ci_lo},
          {"ci_hi", r.ci_hi},
          {"stderr", r.stderr_},
          {"n", r.n},
          {"ess", r.ess}};
}

nlohmann::json to_json(const RunManifest& m) {
  return {{"schema_version", kSchemaVersion},
          {"subcommand", m.subcommand},
          {"config", m.config},
          {"seed", m.seed},
          {"version", kVersion},
          {"wall_seconds", m.wall_seconds},
          {"outputs", m.outputs}};
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace exlat::io
