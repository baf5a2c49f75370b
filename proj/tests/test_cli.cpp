#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hillgap/cli.hpp"
#include "hillgap/exactcomb.hpp"
#include "hillgap/potential.hpp"

using namespace hillgap;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("gaps of the zero potential") {
  auto r = run({"gaps", "--zero", "--nmax", "5"});
  REQUIRE(r.code == 0);
  auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0][3] == "gamma");
  for (int i = 1; i <= 5; ++i) CHECK(std::stod(rows[i][3]) == 0.0);
}

TEST_CASE("matrix and series agree through the CLI") {
  auto r = run({"gaps", "--mathieu", "0.05", "--nmax", "3", "--method", "both"});
  REQUIRE(r.code == 0);
  auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0].back() == "cross_rel_diff");
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i].back()) <= 1e-6);
}

TEST_CASE("two-term gaps follow the leading polynomial") {
  auto r = run({"--format", "json", "gaps", "--two-term", "0.1", "1.5", "--nmax", "6"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  REQUIRE(j.size() == 6);
  for (int n = 1; n <= 6; ++n) {
    const mpq_class p = p_polynomial_exact(n).evaluate({mpq_class(3, 2)});
    const double lead = std::abs(p.get_d()) * std::pow(0.1, n);
    const double gamma = std::stod(j[n - 1]["gamma"].get<std::string>());
    CHECK(std::abs(gamma / lead - 1) < 0.1);
  }
}

TEST_CASE("poly and identity") {
  auto r = run({"poly", "--n", "4"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "power,coefficient\n0,1/8\n2,-5/36\n4,1/72\n");
  r = run({"--format", "json", "poly", "--n", "4"});
  auto j = json::parse(r.out);
  CHECK(j["expanded"] == "1/72*t^4 - 5/36*t^2 + 1/8");
  r = run({"poly", "--n", "3", "--K", "3"});
  CHECK(r.out.rfind("t1_power,t2_power,coefficient\n", 0) == 0);

  r = run({"identity", "--even", "--m", "12"});
  REQUIRE(r.code == 0);
  auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 13);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][5] == "true");
  r = run({"--format", "json", "identity", "--odd", "--m", "5"});
  CHECK(json::parse(r.out).size() == 4);
}

TEST_CASE("closed-zone scan") {
  auto r = run({"qes", "--alpha", "0.1", "--t", "3", "--nmax", "12"});
  REQUIRE(r.code == 0);
  auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 13);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const int n = std::stoi(rows[i][0]);
    CHECK(rows[i][3] == (n >= 4 ? "closed" : "open"));
  }
}

TEST_CASE("predict and ratio") {
  auto r = run({"predict", "--alpha", "0.1", "--t", "1.5", "--nmax", "2"});
  REQUIRE(r.code == 0);
  auto rows = csv_rows(r.out);
  CHECK(std::stod(rows[1][2]) == doctest::Approx(0.6));
  CHECK(std::stod(rows[2][2]) == doctest::Approx(0.025));
  r = run({"predict", "--regime", "n_to_infty", "--alpha", "0.5", "--t", "3", "--nmin", "4", "--nmax", "4"});
  CHECK(std::stod(csv_rows(r.out)[1][2]) < 1e-40);
  r = run({"predict", "--regime", "n_to_infty", "--alpha", "0.5", "--t", "3", "--nmin", "2", "--nmax", "4"});
  CHECK(r.code == 1);
  r = run({"predict", "--regime", "coeff_form", "--a1", "0.3"});
  CHECK(r.code == 1);

  r = run({"ratio", "--family", "mathieu", "--n", "1", "--ladder", "0.04,0.02,0.01"});
  REQUIRE(r.code == 0);
  rows = csv_rows(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(std::stod(rows[3][6]) == doctest::Approx(4).epsilon(0.01));
}

TEST_CASE("determinism") {
  const std::vector<std::string> args = {"gaps", "--two-term", "0.2", "0.7", "--nmax", "4", "--method", "both",
                                         "--allow-outside-validity"};
  auto a = run(args), b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(run({"qes", "--alpha", "0.1", "--t", "2", "--nmax", "7"}).out ==
        run({"qes", "--alpha", "0.1", "--t", "2", "--nmax", "7"}).out);
}

TEST_CASE("potential JSON round trip") {
  const auto path = (std::filesystem::temp_directory_path() / "hillgap_cli_roundtrip.json").string();
  auto a = run({"--precision-bits", "160", "gaps", "--two-term", "0.1", "1.5", "--nmax", "4", "--export-potential", path});
  REQUIRE(a.code == 0);
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  const Potential back = Potential::from_json(ss.str());
  const Potential orig =
      from_two_term({Complex(Real::parse("0.1", 160)), Complex(Real::parse("1.5", 160)), Regime::BothReal}, 160);
  CHECK(back == orig);
  auto b = run({"--precision-bits", "160", "gaps", "--potential-json", path, "--nmax", "4"});
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);
  std::remove(path.c_str());
}

TEST_CASE("errors and exit codes") {
  auto r = run({"frobnicate"});
  CHECK(r.code == 1);
  CHECK(json::parse(r.err)["error"] == "argument");
  CHECK(run({"--precision-bits", "32", "poly", "--n", "3"}).code == 1);
  CHECK(run({"--rel-tol", "0.5", "poly", "--n", "3"}).code == 1);
  CHECK(run({"gaps", "--zero", "--mathieu", "0.1"}).code == 1);
  CHECK(run({"identity", "--m", "3"}).code == 1);
  CHECK(run({"gaps", "--mathieu", "abc"}).code == 1);

  r = run({"gaps", "--two-term", "0.1", "1.5", "--nmax", "2", "--method", "series"});
  CHECK(r.code == 2);
  auto e = json::parse(r.err);
  CHECK(e.contains("message"));
  CHECK(e.contains("diagnostics"));
  CHECK(r.out.empty());
}

TEST_CASE("precision from the environment") {
  setenv("HILLGAP_PRECISION", "96", 1);
  auto r = run({"gaps", "--mathieu", "0.1", "--nmax", "2"});
  unsetenv("HILLGAP_PRECISION");
  REQUIRE(r.code == 0);
  auto rows = csv_rows(r.out);
  CHECK(rows[1][6] == "96");
  r = run({"gaps", "--mathieu", "0.1", "--nmax", "2"});
  CHECK(csv_rows(r.out)[1][6] == "192");  // the CLI builds potentials at 192 bits by default
}
