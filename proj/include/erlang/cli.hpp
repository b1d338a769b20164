#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "erlang/metrics.hpp"
#include "erlang/model.hpp"
#include "erlang/report.hpp"

namespace erlang::cli {

using Json = nlohmann::ordered_json;

enum class Format { csv, json };

struct RunConfig {
  std::string command;
  ModelParams params{0.0, 1.0, 0, 0.0};
  double tail_tol = 1e-14;
  Format format = Format::csv;
  std::string out;  // empty: standard output
  SweepRegime regime = SweepRegime::qed;
  double beta = 1.0;
  std::vector<double> sizes;
};

struct Table1Row {
  int n = 0;
  double R = 0.0;
  double mean_x = 0.0;  // E X(inf), unscaled
  double error = 0.0;   // |E X - (R + sqrt(R) E Y)|
};

struct Table2Row {
  double R = 0.0;
  double m2 = 0.0, m2_err = 0.0;
  double m10 = 0.0, m10_err = 0.0;
};

struct Table3Row {
  double R = 0.0;
  double abs_zeta = 0.0;
  double m2 = 0.0;
  double err = 0.0;
  double zeta_err = 0.0;
  double zeta_half_err = 0.0;
  double zeta_three_half_err = 0.0;
};

std::vector<Table1Row> run_table1(double tail_tol = 1e-14);
std::vector<Table2Row> run_table2(double tail_tol = 1e-14);
std::vector<Table3Row> run_table3(double tail_tol = 1e-14);

struct Suite {
  std::string name;
  std::vector<BoundCheck> rows;
};

struct VerifyReport {
  DistanceReport distance;
  std::vector<Suite> suites;
  bool passed() const;
};

// Every suite that applies to the parameter set. Throws std::invalid_argument
// on invalid parameters before doing any work.
VerifyReport run_verify(const ModelParams& p, double tail_tol = 1e-14);

// Tolerances used by the verify suites.
constexpr double kStein = 1e-8;
constexpr double kIdentity = 1e-8;

// The whole document for a run; exit_code is 0, or 2 on a failed bound.
struct Output {
  Json doc;
  std::string csv;
  int exit_code = 0;
};

Output execute(const RunConfig& cfg);

// Scientific notation with 17 significant digits; nonfinite values become null.
std::string dump_json(const Json& j);

// Rounding used in the printed tables: two decimals, or three significant
// digits in scientific form for values outside [1e-2, 1e3).
std::string table_round(double x);

// Parses argv, runs, writes the output. Returns the exit code.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace erlang::cli
