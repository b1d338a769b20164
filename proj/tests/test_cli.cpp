#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "erlang/cli.hpp"

using namespace erlang;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "erlang_stein");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> v;
  std::stringstream in(line);
  for (std::string f; std::getline(in, f, ',');) v.push_back(f);
  if (!line.empty() && line.back() == ',') v.push_back("");
  return v;
}

}  // namespace

TEST_CASE("table rounding") {
  CHECK(cli::table_round(3.3542) == "3.35");
  CHECK(cli::table_round(946.666) == "946.67");
  CHECK(cli::table_round(1.1294e30) == "1.13e+30");
  CHECK(cli::table_round(4.55e-15) == "4.55e-15");
  CHECK(cli::table_round(0.0) == "0.00");
  CHECK(cli::table_round(0.01) == "0.01");
  CHECK(cli::table_round(1000.0) == "1.00e+03");
}

TEST_CASE("json numbers: 17 significant digits, nonfinite to null") {
  cli::Json j;
  j["a"] = 0.1;
  j["b"] = std::nan("");
  j["c"] = 3;
  j["d"] = {1.0, -2.5e-300};
  CHECK(cli::dump_json(j) ==
        R"({"a":1.0000000000000001e-01,"b":null,"c":3,"d":[1.0000000000000000e+00,-2.5000000000000000e-300]})");
  // Round trip is exact.
  auto back = cli::Json::parse(cli::dump_json(j));
  CHECK(back["a"].get<double>() == 0.1);
  CHECK(back["d"][1].get<double>() == -2.5e-300);
}

TEST_CASE("table1: header, ten rows, LF endings, printed rounding") {
  Run r = run({"table1"});
  REQUIRE(r.code == 0);
  CHECK(r.err.empty());
  CHECK(r.out.find('\r') == std::string::npos);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 11);
  CHECK(ls[0] == "n,R,mean_x,error,mean_x_full,error_full");
  auto first = fields(ls[1]);
  CHECK(first[0] == "5");
  CHECK(first[1] == "3");
  CHECK(first[2] == "3.35");
  CHECK(first[3] == "0.10");
  CHECK(fields(ls[5])[2] == "501.49");
  CHECK(fields(ls[7])[3] == "2e-06");
}

TEST_CASE("table2 and table3 row counts and json keys") {
  Run t2 = run({"table2", "--format", "json"});
  REQUIRE(t2.code == 0);
  auto j2 = cli::Json::parse(t2.out);
  CHECK(j2["rows"].size() == 6);
  for (const char* k : {"R", "m2", "m2_err", "m10", "m10_err"}) CHECK(j2["rows"][0].contains(k));
  Run t3 = run({"table3"});
  REQUIRE(t3.code == 0);
  CHECK(lines(t3.out).size() == 5);
}

TEST_CASE("json document schema") {
  Run r = run({"verify", "--lambda", "4.9", "--n", "5", "--format", "json"});
  REQUIRE(r.code == 0);
  auto j = cli::Json::parse(r.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["command"] == "verify");
  for (const char* k : {"config", "rows", "suites", "tolerances"}) CHECK(j.contains(k));
  CHECK(j["config"]["lambda"].get<double>() == 4.9);
  CHECK(j["config"]["mu"].get<double>() == 1.0);
  CHECK(j["config"]["format"] == "json");
  CHECK(j["tolerances"]["tail_tol"].get<double>() == 1e-14);
  CHECK(j["tolerances"]["stein_residual"].get<double>() == 1e-8);
  for (const auto& s : j["suites"]) {
    CHECK(s["passed"] == true);
    for (const auto& row : s["rows"]) {
      if (row["satisfied"].is_null()) CHECK(row["bound"].is_null());
      else CHECK(row["bound"].is_number());
    }
  }
  // Every float is written in scientific form with 17 significant digits.
  std::regex num(R"(-?\d\.\d{16}e[+-]\d+)");
  std::regex any_float(R"([:,\[]-?\d+\.\d+(e[+-]\d+)?)");
  for (std::sregex_iterator it(r.out.begin(), r.out.end(), any_float), end; it != end; ++it) {
    std::string s = it->str().substr(1);
    CHECK(std::regex_match(s, num));
  }
}

TEST_CASE("output is byte-stable across runs") {
  for (auto args : {std::vector<std::string>{"table1", "--format", "json"},
                    std::vector<std::string>{"distance", "--lambda", "10", "--n", "5", "--alpha", "2"},
                    std::vector<std::string>{"sweep", "--regime", "qed", "--sizes", "4,25", "--format", "json"}}) {
    Run a = run(args), b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("verify: Erlang-C and Erlang-A examples pass; suites cover each module") {
  Run c = run({"verify", "--lambda", "4.9", "--mu", "1", "--n", "5"});
  CHECK(c.code == 0);
  auto ls = lines(c.out);
  CHECK(ls[0] == "suite,name,observed,bound,satisfied");
  std::vector<std::string> suites;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    auto f = fields(ls[i]);
    REQUIRE(f.size() == 5);
    CHECK(f[4] != "false");
    if (suites.empty() || suites.back() != f[0]) suites.push_back(f[0]);
  }
  for (const char* s : {"distance", "moment_bounds", "density_sup", "stein_identity", "generator_identity",
                        "wasserstein_decomposition", "kolmogorov_decomposition"})
    CHECK(std::find(suites.begin(), suites.end(), s) != suites.end());
  CHECK(std::find_if(suites.begin(), suites.end(), [](const std::string& s) {
          return s.rfind("gradient_", 0) == 0;
        }) != suites.end());

  Run a = run({"verify", "--lambda", "10", "--n", "5", "--alpha", "2"});
  CHECK(a.code == 0);
}

TEST_CASE("validation errors exit 1 with no partial output") {
  for (auto args : {std::vector<std::string>{"verify", "--lambda", "5", "--n", "5"},
                    std::vector<std::string>{"verify", "--lambda", "6", "--n", "5", "--alpha", "0"},
                    std::vector<std::string>{"distance", "--lambda", "-1", "--n", "5"},
                    std::vector<std::string>{"distance", "--lambda", "1", "--n", "0"},
                    std::vector<std::string>{"distance", "--lambda", "1", "--n", "2", "--mu", "0"},
                    std::vector<std::string>{"table1", "--tail-tol", "0"},
                    std::vector<std::string>{"table1", "--format", "xml"},
                    std::vector<std::string>{"sweep", "--regime", "qed", "--sizes", "4,-1"},
                    std::vector<std::string>{"sweep", "--regime", "fast", "--sizes", "4"},
                    std::vector<std::string>{"verify", "--n", "5"},
                    std::vector<std::string>{},
                    std::vector<std::string>{"table1", "table2"}}) {
    Run r = run(args);
    INFO((args.empty() ? std::string("<none>") : args[0]));
    CHECK(r.code == 1);
    CHECK(r.out.empty());
    CHECK_FALSE(r.err.empty());
  }
}

TEST_CASE("--out writes the document to a file") {
  const std::string path = "cli_out_test.csv";
  std::remove(path.c_str());
  Run r = run({"distance", "--lambda", "4.9", "--n", "5", "--out", path});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  auto ls = lines(ss.str());
  REQUIRE(ls.size() == 2);
  CHECK(ls[0] == "d_w,d_k,delta,ratio_w,ratio_k,bound_w,bound_k,density_sup,dw_dk_consistent");
  auto v = fields(ls[1]);
  CHECK(std::stod(v[0]) <= std::stod(v[5]));
  CHECK(v[8] == "true");
  std::remove(path.c_str());
}

TEST_CASE("sweep: sorted rows within bounds") {
  Run r = run({"sweep", "--regime", "nds", "--sizes", "100,4,25"});
  REQUIRE(r.code == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 4);
  double prev = 0.0;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    auto f = fields(ls[i]);
    CHECK(f[0] == "nds");
    CHECK(std::stod(f[1]) > prev);
    prev = std::stod(f[1]);
    CHECK(f.back() == "true");
  }
}
