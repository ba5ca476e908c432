#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qfield/cli.hpp"
#include "reference_configs.hpp"

using qfield::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("qnum prints a header and one row", "[cli]") {
  const auto r = call({"qnum", "--q", "2", "--n", "3"});
  CHECK(r.code == 0);
  CHECK(r.out == "q,n,basic_number\n2,3,7\n");
  CHECK(r.err.empty());
}

TEST_CASE("scalar propagator value at the reference point", "[cli]") {
  const auto r = call({"propagator", "scalar", "--q", "1", "--m", "1", "--k0", "0", "--kvec", "1,0,0"});
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 2);
  CHECK(l[0] == "k0,k1,k2,k3,q,m,re,im,onshell_distance");
  CHECK(l[1] == "0,1,0,0,1,1,-0.5,0,2");
}

TEST_CASE("wick verify summary", "[cli]") {
  const auto r = call({"wick", "verify", "--max-len", "6", "--q", "0.7"});
  CHECK(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 2);
  CHECK(l[0] == "q,modes,max_len,strings,failures,max_abs_diff");
  std::vector<std::string> cells;
  std::stringstream row(l[1]);
  std::string cell;
  while (std::getline(row, cell, ',')) cells.push_back(cell);
  REQUIRE(cells.size() == 6);
  CHECK(cells[4] == "0");
  CHECK(std::stod(cells[5]) <= 1e-9);
}

TEST_CASE("floats use 17 significant digits and complex values use two columns", "[cli]") {
  const auto r = call({"propagator", "position", "--t", "2", "--r", "1", "--m", "1", "--q", "0.5"});
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  CHECK(l[0] == "t,r,m,q,re,im,quad_error");
  CHECK(l[1].find("-0.00608671157") != std::string::npos);
  const auto qn = call({"qnum", "--q", "0.1", "--n", "3"});
  CHECK(lines(qn.out)[1] == "0.10000000000000001,3,1.1100000000000001");
}

TEST_CASE("grids expand in input order", "[cli]") {
  const auto r = call({"propagator", "scalar", "--q", "0.5", "--m", "1", "--k0", "-2:2:5", "--kvec", "1,0,0"});
  REQUIRE(r.code == 0);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 6);
  CHECK(l[1].rfind("-2,", 0) == 0);
  CHECK(l[3].rfind("0,", 0) == 0);
  CHECK(l[5].rfind("2,", 0) == 0);
}

TEST_CASE("json output wraps rows as objects", "[cli]") {
  const auto r = call({"qnum", "--q", "2", "--n", "3", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j.is_array());
  CHECK(j[0]["basic_number"] == 7.0);
  CHECK(j[0]["n"] == 3);
}

TEST_CASE("every subcommand runs", "[cli]") {
  const std::vector<std::vector<std::string>> cmds = {
      {"planck", "--x", "1", "--q", "0.5"},
      {"fock", "vev", "--ops", "a0 a0 A0 A0", "--q", "0.5"},
      {"wick", "normal", "--ops", "a A", "--q", "0.5"},
      {"wick", "expand", "--ops", "a a A A", "--q", "0.5"},
      {"wick", "verify", "--max-len", "4", "--q", "-1", "--modes", "2", "--all"},
      {"dirac", "check"},
      {"propagator", "spinor", "--q", "0.5", "--m", "1", "--k0", "0", "--kvec", "1,0,0"},
      {"propagator", "photon", "--q", "0.5", "--m", "1", "--k0", "0", "--kvec", "1,0,0"},
      {"propagator", "residues", "--kvec", "0,0,0", "--m", "1", "--q", "0.5"},
      {"propagator", "spacelike", "--r", "1", "--m", "1", "--q", "0.5"},
      {"scatter", "moller", "--q", "0.5"},
      {"scatter", "annihilate", "--q", "0.5"},
      {"scatter", "frame-scan", "--q", "0.5"},
  };
  for (const auto& c : cmds) {
    const auto r = call(c);
    INFO(reference::join(c) << "\n" << r.err);
    CHECK(r.code == 0);
    CHECK(lines(r.out).size() >= 2);
  }
}

TEST_CASE("annihilation factors in the centre-of-mass frame", "[cli]") {
  const auto r = call({"scatter", "annihilate", "--q", "0.5"});
  CHECK(lines(r.out)[1] == "0.5,0.25,0.25");
}

TEST_CASE("strict mode changes only the exchange denominator", "[cli]") {
  const auto normal = call({"scatter", "moller", "--q", "0.5"});
  const auto strict = call({"--strict-paper-mode", "scatter", "moller", "--q", "0.5"});
  const auto trailing = call({"scatter", "moller", "--q", "0.5", "--strict-paper-mode"});
  REQUIRE(normal.code == 0);
  REQUIRE(strict.code == 0);
  CHECK(strict.out == trailing.out);
  CHECK(normal.out != strict.out);
  // spinor propagator output is unaffected
  const std::vector<std::string> spinor = {"propagator", "spinor", "--q", "0.5", "--m", "1", "--k0", "0.5", "--kvec", "1,0,0"};
  auto with_flag = spinor;
  with_flag.push_back("--strict-paper-mode");
  CHECK(call(spinor).out == call(with_flag).out);
}

TEST_CASE("usage errors exit with code 2 and one line", "[cli]") {
  const std::vector<std::vector<std::string>> bad = {
      {},
      {"nosuch"},
      {"qnum", "--q", "2"},
      {"qnum", "--q", "x", "--n", "1"},
      {"qnum", "--q", "2", "--n", "-1"},
      {"propagator", "scalar", "--q", "1", "--m", "-1", "--k0", "0", "--kvec", "1,0,0"},
      {"propagator", "scalar", "--q", "1", "--m", "1", "--k0", "0:1", "--kvec", "1,0,0"},
      {"propagator", "scalar", "--q", "1", "--m", "1", "--k0", "0", "--kvec", "1,0"},
      {"fock", "vev", "--ops", "a9 A9", "--q", "0.5"},
      {"fock", "vev", "--ops", "x", "--q", "0.5"},
      {"scatter", "moller", "--q", "0.5", "--beta", "0,0,1"},
      {"scatter", "moller", "--q", "0.5", "--spins", "1,1,1,3"},
      {"qnum", "--q", "2", "--n", "3", "--format", "xml"},
  };
  for (const auto& args : bad) {
    const auto r = call(args);
    INFO(reference::join(args) << " -> " << r.err);
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK(lines(r.err).size() == 1);
  }
}

TEST_CASE("computation errors exit with code 1 and name the error kind", "[cli]") {
  const auto pole = call({"planck", "--x", "0", "--q", "1"});
  CHECK(pole.code == 1);
  CHECK(pole.err.rfind("error: PoleError: ", 0) == 0);
  const auto onshell = call({"propagator", "scalar", "--q", "0.5", "--m", "1", "--k0", "1", "--kvec", "0,0,0"});
  CHECK(onshell.code == 1);
  CHECK(onshell.err.rfind("error: PoleError", 0) == 0);
  const auto degenerate = call({"scatter", "moller", "--q", "0.5", "--theta", "0"});
  CHECK(degenerate.code == 1);
  CHECK(degenerate.err.rfind("error: DegenerateTransferError", 0) == 0);
  const auto norm = call({"fock", "vev", "--ops", "a a A A", "--q", "-2"});
  CHECK(norm.code == 1);
  CHECK(norm.err.rfind("error: NegativeNormError", 0) == 0);
}

TEST_CASE("output file and golden round trip", "[cli]") {
  const auto dir = std::filesystem::temp_directory_path() / "qfield_cli_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto file = (dir / "out.csv").string();
  REQUIRE(call({"qnum", "--q", "2", "--n", "3", "--out", file}).out.empty());
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "q,n,basic_number\n2,3,7\n");

  ::setenv("QFIELD_GOLDEN_DIR", (dir / "golden").c_str(), 1);
  CHECK(call({"qnum", "--q", "3", "--n", "2", "--golden", "check"}).code == 1);
  CHECK(call({"qnum", "--q", "3", "--n", "2", "--golden", "write"}).code == 0);
  CHECK(call({"qnum", "--q", "3", "--n", "2", "--golden", "check"}).code == 0);
  // --out does not change the golden key
  CHECK(call({"qnum", "--q", "3", "--n", "2", "--golden", "check", "--out", file}).code == 0);
  // a different flag set has its own file
  CHECK(call({"qnum", "--q", "3", "--n", "3", "--golden", "check"}).code == 1);
  ::unsetenv("QFIELD_GOLDEN_DIR");
  std::filesystem::remove_all(dir);
}

TEST_CASE("committed golden files match", "[cli][golden]") {
  ::setenv("QFIELD_GOLDEN_DIR", QFIELD_GOLDEN_SOURCE_DIR, 1);
  for (auto args : reference::load_configs(QFIELD_GOLDEN_SOURCE_DIR "/configs.txt")) {
    args.push_back("--golden");
    args.push_back("check");
    const auto r = call(args);
    INFO(reference::join(args) << "\n" << r.err);
    CHECK(r.code == 0);
  }
  ::unsetenv("QFIELD_GOLDEN_DIR");
}

TEST_CASE("the installed binary follows the exit-code contract", "[cli]") {
  const std::string bin = QFIELD_CLI_BINARY;
  auto status = [&](const std::string& args) {
    const int raw = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("qnum --q 2 --n 3") == 0);
  CHECK(status("planck --x 0 --q 1") == 1);
  CHECK(status("qnum --bogus") == 2);
}
