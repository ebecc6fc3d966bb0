#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "exlat/cli.hpp"
#include "exlat/io.hpp"

using namespace exlat;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "exlat");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("roots and band") {
  const Run r = run({"roots", "--lattice", "E8"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["tau"] == 240);
  CHECK(j["schema_version"] == io::kSchemaVersion);

  const Run b = run({"band", "--lattice", "E6", "--at", "0,0,0,0,0,0"});
  REQUIRE(b.code == 0);
  CHECK(nlohmann::json::parse(b.out)["energy"] == -72.0);
}

TEST_CASE("usage errors exit with status 2") {
  const Run bad = run({"roots", "--lattice", "E9"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("E9") != std::string::npos);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  const Run s = run({"dos", "--lattice", "E6", "--samples", "lots"});
  CHECK(s.code == 2);
  CHECK(s.err.find("lots") != std::string::npos);
  CHECK(run({"band", "--lattice", "E6", "--at", "0,0"}).code == 2);
  CHECK(run({"band", "--lattice", "E6", "--at", "0,x,0,0,0,0"}).code == 2);
  CHECK(run({"dos", "--lattice", "E6", "--samples", "10"}).code == 2);
  CHECK(run({"reproduce", "table9"}).code == 2);
  CHECK(run({"greens", "--lattice", "E6", "--dos", "/nonexistent/dos.csv"}).code == 2);
}

TEST_CASE("help exits cleanly") {
  const Run h = run({"--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("returnprob") != std::string::npos);
}

TEST_CASE("walks as JSON and as a b-file") {
  const Run j = run({"walks", "--lattice", "E8", "--nmax", "8"});
  REQUIRE(j.code == 0);
  CHECK(j.out.find("341350907713200") != std::string::npos);
  const Run b = run({"walks", "--lattice", "E6", "--nmax", "2", "--oeis"});
  REQUIRE(b.code == 0);
  CHECK(b.out == "0 1\n1 0\n2 72\n");
}

TEST_CASE("dos then greens through files, with manifests") {
  const auto dir = std::filesystem::temp_directory_path() / "exlat_cli_test";
  std::filesystem::create_directories(dir);
  const std::string dos = (dir / "e6.csv").string();
  const std::string gf = (dir / "e6_greens.csv").string();
  const Run d = run({"dos", "--lattice", "E6", "--samples", "4e5", "--seed", "2", "--out", dos});
  REQUIRE(d.code == 0);
  CHECK(std::filesystem::exists(dos + ".manifest.json"));
  const auto m = nlohmann::json::parse(slurp(dos + ".manifest.json"));
  CHECK(m["subcommand"] == "dos");
  CHECK(m["seed"] == 2);

  // Same seed, same bytes.
  const std::string again = (dir / "e6b.csv").string();
  REQUIRE(run({"dos", "--lattice", "E6", "--samples", "4e5", "--seed", "2", "--out", again}).code == 0);
  CHECK(slurp(dos) == slurp(again));

  std::ifstream in(dos);
  const DosHistogram h = io::read_dos_csv(in);
  CHECK(h.binning.size() == 2400);

  const Run g = run({"greens", "--lattice", "E6", "--dos", dos, "--out", gf});
  REQUIRE(g.code == 0);
  CHECK(slurp(gf).find("energy,re,im") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("vanhove and returnprob emit JSON") {
  const Run v = run({"vanhove", "--lattice", "A2", "--starts", "200"});
  REQUIRE(v.code == 0);
  const auto cat = nlohmann::json::parse(v.out);
  CHECK(cat["singularities"].size() >= 3);

  const Run r = run({"returnprob", "--lattice", "A3", "--samples", "5e5"});
  REQUIRE(r.code == 0);
  const double p = nlohmann::json::parse(r.out)["P"];
  CHECK(p > 0.2);
  CHECK(p < 0.32);
}

TEST_CASE("reproduce table3 passes") {
  const Run r = run({"reproduce", "table3"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
}
