// Acceptance run: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion number]. Exit status 1 if any selected one fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "erlang/cli.hpp"
#include "erlang/ctmc.hpp"
#include "erlang/diffusion.hpp"
#include "erlang/metrics.hpp"
#include "erlang/poisson.hpp"
#include "erlang/stein_verify.hpp"
#include "oracles.hpp"

using namespace erlang;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

// Collects failures; the first few are kept for the summary line.
struct Tally {
  int checks = 0, failed = 0;
  std::string first;
  void expect(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    if (failed < 3) first += (first.empty() ? "" : "; ") + what;
    ++failed;
  }
  Verdict verdict(const std::string& extra = "") const {
    std::string d = std::to_string(checks - failed) + "/" + std::to_string(checks) + " checks";
    if (!extra.empty()) d += ", " + extra;
    if (failed) d += "; failures: " + first;
    return {failed == 0, d};
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool rel_within(double x, double ref, double rel) { return std::abs(x - ref) <= rel * std::abs(ref); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// n in {2,5,50,500} x rho in {0.5,0.9,0.99,0.999}, mu = 1, R >= 1.
std::vector<ModelParams> erlang_c_grid() {
  std::vector<ModelParams> g;
  for (int n : {2, 5, 50, 500})
    for (double rho : {0.5, 0.9, 0.99, 0.999})
      if (rho * n >= 1.0) g.push_back({rho * n, 1.0, n, 0.0});
  return g;
}

// The Erlang-C grid plus abandonment cases on both sides of critical load.
std::vector<ModelParams> standard_grid() {
  auto g = erlang_c_grid();
  for (int n : {2, 5, 50, 500})
    for (double rho : {0.5, 0.9, 1.0, 1.1, 2.0})
      for (double a : {0.1, 1.0, 10.0})
        if (rho * n >= 1.0) g.push_back({rho * n, 1.0, n, a});
  return g;
}

const ModelParams kSpot[] = {{4.9, 1, 5, 0}, {45, 1, 50, 0}, {10, 1, 5, 2}, {3, 1, 5, 4}, {1.5, 1, 2, 0}};

std::string where(const ModelParams& p) {
  return fmt("(lambda=%g, n=%g, alpha=%g)", p.lambda, p.n, p.alpha);
}

std::vector<PoissonSolution> poisson_family(const DiffusionDensity& d) {
  std::vector<PoissonSolution> s;
  s.emplace_back(d, TestFunction::identity());
  for (double a : indicator_anchors(d.zeta())) s.emplace_back(d, TestFunction::indicator(a));
  return s;
}

Verdict table1() {
  auto t0 = std::chrono::steady_clock::now();
  auto rows = cli::run_table1();
  const double secs = seconds_since(t0);
  // (n, R, printed mean, printed error); error < 0 marks the rows with a hard bound instead.
  const double ref[][4] = {{5, 3, 3.35, 0.10},      {5, 4, 6.22, 0.20},        {5, 4.9, 51.47, 0.28},
                           {5, 4.95, 101.48, 0.29}, {5, 4.99, 501.49, 0.29},   {500, 300, 300.00, -1e-12},
                           {500, 400, 400.00, -1e-5}, {500, 490, 516.79, 0.24}, {500, 495, 569.15, 0.28},
                           {500, 499, 970.89, 0.32}};
  Tally t;
  t.expect(rows.size() == 10, "row count");
  for (std::size_t i = 0; i < rows.size() && i < 10; ++i) {
    const auto& r = rows[i];
    const auto* e = ref[i];
    t.expect(r.n == e[0] && r.R == e[1], "row order");
    t.expect(std::abs(r.mean_x - e[2]) <= 0.01 + 1e-9,
             fmt("R=%g mean %.4f vs %.2f", r.R, r.mean_x, e[2]));
    if (e[3] > 0)
      t.expect(std::abs(r.error - e[3]) <= 0.01 + 1e-9, fmt("R=%g error %.4f vs %.2f", r.R, r.error, e[3]));
    else
      t.expect(r.error < -e[3], fmt("R=%g error %.3e vs < %.0e", r.R, r.error, -e[3]));
  }
  t.expect(secs < 5.0, fmt("runtime %.2fs", secs));
  return t.verdict(fmt("%.2fs", secs));
}

Verdict table2() {
  auto t0 = std::chrono::steady_clock::now();
  auto rows = cli::run_table2();
  const double secs = seconds_since(t0);
  // R, m2, m2_err, m10, m10_err as printed.
  const double ref[][5] = {{300, 1, 4.55e-15, 9.77e2, 31.58},       {400, 1, 5.95e-7, 9.70e2, 24.44},
                           {490, 6.96, 0.11, 7.51e9, 7.01e8},        {495, 31.56, 0.27, 9.10e12, 4.34e11},
                           {499, 9.47e2, 1.59, 1.07e20, 1.03e18},    {499.9, 9.94e4, 16.50, 1.13e30, 1.09e27}};
  Tally t;
  t.expect(rows.size() == 6, "row count");
  for (std::size_t i = 0; i < rows.size() && i < 6; ++i) {
    const auto& r = rows[i];
    const auto* e = ref[i];
    t.expect(r.R == e[0], "row order");
    t.expect(rel_within(r.m2, e[1], 0.01), fmt("R=%g m2 %.4g vs %.4g", r.R, r.m2, e[1]));
    // At R = 300 the printed error is rounding noise; assert its order only.
    if (r.R == 300)
      t.expect(r.m2_err < 1e-12, fmt("R=300 m2_err %.3e", r.m2_err));
    else
      t.expect(rel_within(r.m2_err, e[2], 0.02),
               fmt("R=%g m2_err %.4g vs %.4g", r.R, r.m2_err, e[2]) + " (prints as " +
                   cli::table_round(r.m2_err) + ")");
    t.expect(rel_within(r.m10, e[3], 0.05), fmt("R=%g m10 %.4g vs %.4g", r.R, r.m10, e[3]));
    t.expect(rel_within(r.m10_err, e[4], 0.05), fmt("R=%g m10_err %.4g vs %.4g", r.R, r.m10_err, e[4]));
  }
  t.expect(secs < 10.0, fmt("runtime %.2fs", secs));
  return t.verdict(fmt("%.2fs", secs));
}

Verdict table3() {
  auto t0 = std::chrono::steady_clock::now();
  auto rows = cli::run_table3();
  const double secs = seconds_since(t0);
  // R, printed |zeta|, printed err, printed |zeta| x err.
  const double ref[][4] = {{499, 4.48e-2, 1.59, 7.10e-2},
                           {499.9, 4.50e-3, 16.50, 7.38e-2},
                           {499.95, 2.20e-3, 33.08, 7.40e-2},
                           {499.99, 4.47e-4, 165.67, 7.41e-2}};
  Tally t;
  std::string notes;
  t.expect(rows.size() == 4, "row count");
  for (std::size_t i = 0; i < rows.size() && i < 4; ++i) {
    const auto& r = rows[i];
    const auto* e = ref[i];
    t.expect(r.R == e[0], "row order");
    // Two printed |zeta| entries disagree with the table's own |zeta| x err / err
    // ratio; there the ratio is the reference.
    double zref = e[1];
    if (!rel_within(r.abs_zeta, e[1], 0.005)) {
      zref = e[3] / e[2];
      notes += fmt(" R=%g |zeta| %.4e vs printed %.2e,", r.R, r.abs_zeta, e[1]) +
               fmt(" column ratio %.4e;", zref);
    }
    t.expect(rel_within(r.abs_zeta, zref, 0.005), fmt("R=%g |zeta| %.4e vs %.4e", r.R, r.abs_zeta, zref));
    t.expect(rel_within(r.zeta_err, e[3], 0.02), fmt("R=%g |zeta|err %.4e vs %.2e", r.R, r.zeta_err, e[3]));
  }
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    t.expect(rows[i + 1].err > rows[i].err, "err increasing");
    t.expect(rows[i + 1].zeta_half_err > rows[i].zeta_half_err, "|zeta|^0.5 err increasing");
    t.expect(rows[i + 1].zeta_three_half_err < rows[i].zeta_three_half_err, "|zeta|^1.5 err decreasing");
  }
  // |zeta| x err roughly constant: within 5% of its mean.
  double mean = 0.0;
  for (const auto& r : rows) mean += r.zeta_err / rows.size();
  for (const auto& r : rows) t.expect(rel_within(r.zeta_err, mean, 0.05), "|zeta| err constant");
  t.expect(secs < 10.0, fmt("runtime %.2fs", secs));
  return t.verdict(fmt("%.2fs;", secs) + notes);
}

Verdict universal_bound(bool wasserstein) {
  auto t0 = std::chrono::steady_clock::now();
  Tally t;
  double worst = 0.0;
  for (const auto& p : erlang_c_grid()) {
    DiscreteStationary pmf(p);
    DistanceReport r = distance_report(pmf, build_density(p, pmf.derived()));
    const double v = wasserstein ? r.d_w : r.d_k;
    const double c = wasserstein ? 205.0 : 188.0;
    worst = std::max(worst, v / r.delta);
    t.expect(v <= c * r.delta, where(p) + fmt(" ratio %.4g", v / r.delta));
  }
  const double secs = seconds_since(t0);
  if (wasserstein) t.expect(secs < 30.0, fmt("runtime %.2fs", secs));
  return t.verdict(fmt("max d/delta %.4f, %.2fs", worst, secs));
}

Verdict erlang_a_monotone() {
  Tally t;
  std::string d;
  double prev_w = 0.0, prev_k = 0.0;
  for (double a : {0.1, 1.0, 10.0}) {
    SweepSpec s;
    s.regime = SweepRegime::qed;
    s.beta = 1.0;
    s.alpha = a;
    s.sizes = {1, 10, 100, 1000};
    double sw = 0.0, sk = 0.0;
    for (const auto& row : universality_sweep(s)) {
      sw = std::max(sw, row.report.ratio_w);
      sk = std::max(sk, row.report.ratio_k);
    }
    t.expect(std::isfinite(sw) && std::isfinite(sk), fmt("alpha=%g sup not finite", a));
    t.expect(sw >= prev_w, fmt("sup d_W/delta drops to %.4f at alpha=%g (was %.4f)", sw, a, prev_w));
    t.expect(sk >= prev_k, fmt("sup d_K/delta drops to %.4f at alpha=%g (was %.4f)", sk, a, prev_k));
    if (!d.empty()) d += ";";
    d += fmt(" alpha=%g: W %.4f K %.4f", a, sw, sk);
    prev_w = sw;
    prev_k = sk;
  }
  return t.verdict("sups" + d);
}

Verdict stein_residuals() {
  Tally t;
  double worst = 0.0;
  for (const auto& p : standard_grid()) {
    DiscreteStationary pmf(p);
    DiffusionDensity d = build_density(p, pmf.derived());
    auto note = [&](double v, const std::string& what) {
      worst = std::max(worst, std::abs(v));
      t.expect(std::abs(v) <= 1e-8, where(p) + " " + what + fmt(" %.3e", v));
    };
    note(stein_identity_residual(pmf, [](double x) { return x; }).value, "f=x");
    note(stein_identity_residual(pmf, [](double x) { return x * x; }).value, "f=x^2");
    for (const auto& s : poisson_family(d))
      note(stein_identity_residual_derivative(
               pmf, [&](double x) { return s.f_prime(x); }, s.breaks())
               .value,
           "f_h " + s.h().label());
  }
  return t.verdict(fmt("max |residual| %.3e", worst));
}

Verdict generator_identities() {
  Tally t;
  double worst = 0.0;
  for (const auto& p : kSpot) {
    DiscreteStationary pmf(p);
    DiffusionDensity d = build_density(p, pmf.derived());
    for (const auto& s : poisson_family(d)) {
      GeneratorIdentity g = generator_identity(pmf, s);
      // The lhs straight from sums, independent of the Poisson solution.
      const double direct = std::abs(chain_mean_h(pmf, s.h()) - mean_h(d, s.h()));
      const double gap = std::max(std::abs(direct - g.mean_generator), std::abs(g.lhs - g.mean_generator));
      worst = std::max(worst, gap);
      t.expect(gap <= 1e-8, where(p) + " " + s.h().label() + fmt(" gap %.3e", gap));
    }
  }
  return t.verdict(fmt("max gap %.3e", worst));
}

Verdict moment_suites() {
  Tally t;
  int rows = 0;
  for (const auto& p : standard_grid()) {
    DiscreteStationary pmf(p);
    for (const auto& r : moment_bound_report(pmf)) {
      ++rows;
      t.expect(r.satisfied.value_or(true), where(p) + " " + r.name + fmt(" %.4g > %.4g", r.observed, r.bound));
    }
  }
  return t.verdict(std::to_string(rows) + " rows");
}

Verdict gradient_suites() {
  Tally t;
  int rows = 0, empirical = 0;
  for (const auto& p : standard_grid()) {
    DiscreteStationary pmf(p);
    const bool c = pmf.derived().regime == Regime::erlang_c;
    for (auto s : c ? std::vector{GradientSuite::wasserstein_C, GradientSuite::kolmogorov_C}
                    : std::vector{GradientSuite::wasserstein_A, GradientSuite::kolmogorov_A}) {
      for (const auto& r : gradient_bound_report(pmf, s, 2001)) {
        ++rows;
        if (!r.satisfied) {
          ++empirical;
          t.expect(std::isfinite(r.observed), where(p) + " " + r.name + " not finite");
          continue;
        }
        t.expect(*r.satisfied, where(p) + " " + suite_name(s) + " " + r.name +
                                   fmt(" %.4g > %.4g", r.observed, r.bound));
      }
    }
  }
  return t.verdict(std::to_string(rows) + " rows, " + std::to_string(empirical) + " empirical-only");
}

Verdict decompositions() {
  Tally t;
  double worst_w = 0.0, worst_k = 0.0;
  for (const auto& p : erlang_c_grid()) {
    DiscreteStationary pmf(p);
    DiffusionDensity d = build_density(p, pmf.derived());
    const double dl = pmf.derived().delta;
    auto w = wasserstein_decomposition(pmf, PoissonSolution(d, TestFunction::identity()));
    worst_w = std::max(worst_w, w.total / dl);
    t.expect(w.lhs <= w.total + w.tolerance, where(p) + " W lhs > total");
    t.expect(w.total <= 205 * dl, where(p) + fmt(" W total/delta %.4g", w.total / dl));
    for (double a : indicator_anchors(d.zeta())) {
      auto k = kolmogorov_decomposition(pmf, PoissonSolution(d, TestFunction::indicator(a)));
      const double rhs = 0.5 * k.extra("straddle") + 75 * dl;
      worst_k = std::max(worst_k, k.lhs / rhs);
      t.expect(k.lhs <= k.total + k.tolerance, where(p) + fmt(" K a=%g lhs > total", a));
      t.expect(k.lhs <= rhs, where(p) + fmt(" K a=%g lhs %.4g > %.4g", a, k.lhs, rhs));
    }
  }
  return t.verdict(fmt("max W total/delta %.4f, max K lhs/rhs %.3e", worst_w, worst_k));
}

Verdict zeta_limit() {
  Tally t;
  std::string d;
  for (int m = 1; m <= 4; ++m) {
    const double v = zeta_scaling_limit(1.0, m, {-1e-3})[0];
    const double f = std::tgamma(m + 1.0);
    d += fmt(" m=%g: %.5f;", m, v);
    t.expect(rel_within(v, f, 0.01), fmt("m=%g %.5f vs %g", m, v, f));
  }
  return t.verdict(d);
}

Verdict oracle_equivalence() {
  Tally t;
  double gw = 0.0, gk = 0.0;
  for (const auto& p : kSpot) {
    DiscreteStationary pmf(p);
    DiffusionDensity d = build_density(p, pmf.derived());
    const double ew = std::abs(wasserstein_distance(pmf, d) - oracle::wasserstein_quad(pmf, d));
    const double ek = std::abs(kolmogorov_distance(pmf, d) - oracle::kolmogorov_brute(pmf, d));
    gw = std::max(gw, ew);
    gk = std::max(gk, ek);
    t.expect(ew <= 1e-8, where(p) + fmt(" d_W gap %.3e", ew));
    t.expect(ek <= 1e-9, where(p) + fmt(" d_K gap %.3e", ek));
  }
  return t.verdict(fmt("max gaps W %.3e, K %.3e", gw, gk));
}

Verdict idle_monotone() {
  Tally t;
  auto v = idle_probability_monotone(5, 1.0, 1.0, {4, 6, 8, 12});
  t.expect(v.size() == 4, "size");
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    t.expect(v[i + 1] < v[i], fmt("P(X<=n) %.6f then %.6f", v[i], v[i + 1]));
  std::string d = "P(X<=5):";
  for (double x : v) d += fmt(" %.6f", x);
  return t.verdict(d);
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "table 1 reproduction", table1},
      {2, "table 2 reproduction", table2},
      {3, "table 3 reproduction", table3},
      {4, "universal Wasserstein bound 205 delta", [] { return universal_bound(true); }},
      {5, "universal Kolmogorov bound 188 delta", [] { return universal_bound(false); }},
      {6, "Erlang-A sups finite and nondecreasing in alpha/mu", erlang_a_monotone},
      {7, "Stein identity residuals <= 1e-8", stein_residuals},
      {8, "generator identity within 1e-8", generator_identities},
      {9, "moment bound suites", moment_suites},
      {10, "gradient bound suites at 2001 points", gradient_suites},
      {11, "proof-path decompositions", decompositions},
      {12, "zeta scaling limit m!", zeta_limit},
      {13, "distance oracles", oracle_equivalence},
      {14, "P(X <= n) decreasing in lambda", idle_monotone},
  };
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  bool ok = true;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s c%02d %s: %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str());
    std::fflush(stdout);
    ok = ok && v.pass;
  }
  return ok ? 0 : 1;
}
