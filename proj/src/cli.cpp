#include "exlat/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "exlat/errors.hpp"
#include "exlat/greens.hpp"
#include "exlat/io.hpp"
#include "exlat/reference.hpp"
#include "exlat/reproduce.hpp"

namespace exlat::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

LatticeSpec lattice_arg(const std::string& token) {
  try {
    return LatticeSpec::parse(token);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::uint64_t count_arg(const std::string& flag, double value) {
  if (!(value >= 1.0) || value != std::floor(value) || value > 1.8e19)
    throw UsageError(flag + " must be a positive integer, got " + io::format_double(value));
  return static_cast<std::uint64_t>(value);
}

Eigen::VectorXd momentum_arg(const std::string& token, int d) {
  std::vector<double> xs;
  std::stringstream ss(token);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size() || part.empty())
      throw UsageError("malformed momentum component '" + part + "' in --at " + token);
    xs.push_back(x);
  }
  if (static_cast<int>(xs.size()) != d)
    throw UsageError("--at needs " + std::to_string(d) + " components, got " +
                     std::to_string(xs.size()) + " in '" + token + "'");
  return Eigen::Map<Eigen::VectorXd>(xs.data(), d);
}

struct Common {
  std::string lattice = "E8";
  double samples = 1e9;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
  std::string format;
};

// Writes `text` to --out (plus a manifest) or to stdout.
void emit(const Common& c, const std::string& sub, const nlohmann::json& config,
          const std::string& text, std::ostream& out,
          std::chrono::steady_clock::time_point start) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  io::write_file(c.out, text);
  io::RunManifest m;
  m.subcommand = sub;
  m.config = config;
  m.seed = c.seed;
  m.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  m.outputs = {c.out};
  io::write_file(c.out + ".manifest.json", io::to_json(m).dump(2) + "\n");
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral toolkit for tight-binding bands on root lattices", "exlat"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  Common c;
  int nmax = 8;
  bool oeis = false;
  double starts = 1e5;
  bool until_stable = false;
  int chains = 4;
  std::string at, dos_path, target;
  std::function<void()> run;
  const auto start = std::chrono::steady_clock::now();

  auto lattice_opt = [&](CLI::App* s) {
    s->add_option("--lattice", c.lattice, "Lattice such as E8, A3 or D4")->required();
  };
  auto out_opt = [&](CLI::App* s) { s->add_option("--out", c.out, "Output file"); };
  auto sampling_opts = [&](CLI::App* s) {
    s->add_option("--samples", c.samples, "Energy evaluations (accepts 1e9)");
    s->add_option("--seed", c.seed, "Random seed");
    s->add_option("--threads", c.threads, "Worker thread cap (0 = automatic)");
    s->add_option("--chains", chains, "Markov chains")->check(CLI::PositiveNumber);
  };

  auto* roots = app.add_subcommand("roots", "Root list, simple roots, Gram matrix and tau");
  lattice_opt(roots);
  out_opt(roots);
  roots->callback([&] {
    run = [&] {
      const RootSystem rs(lattice_arg(c.lattice));
      emit(c, "roots", {{"lattice", c.lattice}}, io::to_json(rs).dump(2) + "\n", out, start);
    };
  });

  auto* band = app.add_subcommand("band", "Energy, gradient and Hessian eigenvalues at u");
  lattice_opt(band);
  band->add_option("--at", at, "Fractional momentum u1,...,ud")->required();
  out_opt(band);
  band->callback([&] {
    run = [&] {
      const Dispersion disp{RootSystem(lattice_arg(c.lattice))};
      const auto u = momentum_arg(at, disp.rank());
      emit(c, "band", {{"lattice", c.lattice}, {"at", at}},
           io::band_json(disp, u).dump(2) + "\n", out, start);
    };
  });

  auto* dos = app.add_subcommand("dos", "Density of states histogram");
  lattice_opt(dos);
  sampling_opts(dos);
  out_opt(dos);
  dos->add_option("--format", c.format, "csv or gnuplot")
      ->check(CLI::IsMember({"csv", "gnuplot"}));
  dos->callback([&] {
    run = [&] {
      SamplerConfig cfg;
      cfg.lattice = lattice_arg(c.lattice);
      cfg.n_samples = count_arg("--samples", c.samples);
      cfg.seed = c.seed;
      cfg.threads = c.threads;
      cfg.n_chains = chains;
      try {
        cfg.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      const DosHistogram h = sample_dos(cfg);
      std::ostringstream text;
      if (c.format == "gnuplot")
        io::write_dos_gnuplot(text, h);
      else
        io::write_dos_csv(text, h, cfg.lattice.name());
      err << "dos: " << h.total_samples << " production samples, ess "
          << io::format_double(h.ess) << "\n";
      emit(c, "dos",
           {{"lattice", cfg.lattice.name()}, {"samples", cfg.n_samples}, {"chains", chains},
            {"bins", cfg.bins}, {"tail_bins", cfg.tail_bins}, {"burn_in", cfg.burn_in},
            {"format", c.format.empty() ? "csv" : c.format}},
           text.str(), out, start);
    };
  });

  auto* greens = app.add_subcommand("greens", "Green's function from a DOS file");
  lattice_opt(greens);
  greens->add_option("--dos", dos_path, "DOS CSV written by the dos subcommand")->required();
  out_opt(greens);
  greens->callback([&] {
    run = [&] {
      const LatticeSpec spec = lattice_arg(c.lattice);
      std::ifstream in(dos_path);
      if (!in) throw UsageError("cannot read --dos " + dos_path);
      const DosHistogram h = io::read_dos_csv(in);
      const RootSystem rs(spec);
      GreensFunction gf = greens_from_dos(h, spec.name(), rs.tau());
      if (spec.family() == Family::E) gf.markers = reference::marker_energies(spec);
      std::ostringstream text;
      write_greens(text, gf);
      emit(c, "greens", {{"lattice", spec.name()}, {"dos", dos_path}}, text.str(), out, start);
    };
  });

  auto* vanhove = app.add_subcommand("vanhove", "Critical point catalog");
  lattice_opt(vanhove);
  vanhove->add_option("--starts", starts, "Random multistarts");
  vanhove->add_option("--seed", c.seed, "Random seed");
  vanhove->add_option("--threads", c.threads, "Worker thread cap (0 = automatic)");
  vanhove->add_flag("--until-stable", until_stable,
                    "Double the starts (up to 16x) until the catalog stops changing");
  out_opt(vanhove);
  vanhove->callback([&] {
    run = [&] {
      const Dispersion disp{RootSystem(lattice_arg(c.lattice))};
      CriticalSearchOptions opts;
      opts.n_starts = count_arg("--starts", starts);
      opts.seed = c.seed;
      opts.threads = c.threads;
      const VanHoveCatalog cat =
          until_stable ? find_critical_points_until_stable(disp, opts, 16 * opts.n_starts)
                       : find_critical_points(disp, opts);
      emit(c, "vanhove",
           {{"lattice", cat.lattice}, {"starts", opts.n_starts}, {"until_stable", until_stable}},
           io::to_json(cat).dump(2) + "\n", out, start);
    };
  });

  auto* walks = app.add_subcommand("walks", "Exact closed walk counts");
  lattice_opt(walks);
  walks->add_option("--nmax", nmax, "Largest walk length")->check(CLI::NonNegativeNumber);
  walks->add_flag("--oeis", oeis, "Write an OEIS b-file instead of JSON");
  walks->add_option("--threads", c.threads, "Worker thread cap (0 = automatic)");
  out_opt(walks);
  walks->callback([&] {
    run = [&] {
      const RootSystem rs(lattice_arg(c.lattice));
      const WalkTable table = walk_counts(rs, nmax, c.threads);
      std::ostringstream text;
      if (oeis)
        write_bfile(text, table);
      else
        text << io::to_json(table).dump(2) << "\n";
      emit(c, "walks", {{"lattice", rs.spec().name()}, {"nmax", nmax}, {"oeis", oeis}},
           text.str(), out, start);
    };
  });

  auto* ret = app.add_subcommand("returnprob", "Return probability estimate");
  lattice_opt(ret);
  sampling_opts(ret);
  out_opt(ret);
  ret->callback([&] {
    run = [&] {
      const Dispersion disp{RootSystem(lattice_arg(c.lattice))};
      ReturnOptions opts;
      opts.n_chains = chains;
      opts.threads = c.threads;
      const auto n = count_arg("--samples", c.samples);
      ReturnEstimate r;
      try {
        r = estimate_return(disp, n, c.seed, opts);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      emit(c, "returnprob",
           {{"lattice", disp.root_system().spec().name()}, {"samples", n}, {"chains", chains}},
           io::to_json(r).dump(2) + "\n", out, start);
    };
  });

  auto* repro = app.add_subcommand("reproduce", "Recompute a reference table and compare");
  repro->add_option("target", target, "table1, table2, table3 or fig_dos")
      ->required()
      ->check(CLI::IsMember({"table1", "table2", "table3", "fig_dos"}));
  repro->add_option("--samples", c.samples, "Energy evaluations per sampled quantity");
  repro->add_option("--starts", starts, "Critical point multistarts per lattice");
  repro->add_option("--seed", c.seed, "Random seed");
  repro->add_option("--threads", c.threads, "Worker thread cap (0 = automatic)");
  out_opt(repro);
  int repro_status = kExitOk;
  repro->callback([&] {
    run = [&] {
      Budget budget;
      budget.samples = count_arg("--samples", c.samples);
      budget.critical_starts = count_arg("--starts", starts);
      budget.seed = c.seed;
      budget.threads = c.threads;
      const Report report = reproduce(target, budget);
      std::ostringstream text;
      print_report(text, report);
      emit(c, "reproduce", {{"target", target}, {"samples", budget.samples},
                            {"starts", budget.critical_starts}},
           text.str(), out, start);
      if (!report.passed()) repro_status = kExitDomain;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "exlat: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    run();
  } catch (const UsageError& e) {
    err << "exlat: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "exlat: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "exlat: " << e.what() << "\n";
    return kExitDomain;
  }
  return repro_status;
}

}  // namespace exlat::cli
