#include "erlang/stein_verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "erlang/metrics.hpp"
#include "erlang/numeric.hpp"

namespace erlang {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMinLogPdf = -1250.0;
// Atoms lighter than this are left out of the expectations.
constexpr double kMinMass = 1e-16;
constexpr double kQuadTol = 1e-10;
// Absolute floor per unit length, in units of 1/mu. Far in the tails the
// derivatives are differences of O(1) terms and carry only rounding noise,
// which a purely relative tolerance keeps bisecting forever.
constexpr double kQuadFloor = 1e-12;

double lookup(const std::vector<Term>& v, const std::string& name) {
  for (const auto& t : v)
    if (t.name == name) return t.value;
  throw std::out_of_range("no term named " + name);
}

// Atoms whose neighbourhood [x - delta, x + delta] stays inside the range
// where the Poisson solution can be evaluated.
struct Atoms {
  std::vector<long> used;
  double skipped_mass = 0.0;
};

Atoms select_atoms(const DiscreteStationary& pmf, const DiffusionDensity& d) {
  Atoms a;
  const double dl = pmf.derived().delta;
  for (long k = 0; k < pmf.size(); ++k) {
    double x = pmf.x(k);
    bool ok = pmf.prob(k) >= kMinMass && d.log_pdf(x - dl) >= kMinLogPdf &&
              d.log_pdf(x + dl) >= kMinLogPdf;
    if (ok)
      a.used.push_back(k);
    else
      a.skipped_mass += pmf.prob(k);
  }
  a.skipped_mass += pmf.tail_bound();
  return a;
}

double sum_terms(std::vector<double> v) { return num::ordered_sum(std::move(v)); }

}  // namespace

double ErrorDecomposition::term(const std::string& name) const { return lookup(terms, name); }
double ErrorDecomposition::extra(const std::string& name) const { return lookup(extras, name); }

double chain_mean_h(const DiscreteStationary& pmf, const TestFunction& h) {
  if (h.kind == TestFunction::Kind::identity) return scaled_mean(pmf);
  if (h.kind == TestFunction::Kind::constant) return h.param;
  if (h.kind == TestFunction::Kind::indicator) {
    long last = -1;
    while (last + 1 < pmf.size() && pmf.x(last + 1) <= h.param) ++last;
    return pmf.cdf(last);
  }
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(pmf.size()));
  for (long k = 0; k < pmf.size(); ++k) v.push_back(pmf.prob(k) * h(pmf.x(k)));
  return sum_terms(std::move(v));
}

namespace {

double lhs_of(const DiscreteStationary& pmf, const PoissonSolution& sol) {
  const auto& h = sol.h();
  if (h.kind == TestFunction::Kind::identity)
    return mean_error(pmf, sol.density()) / std::sqrt(pmf.derived().R);
  if (h.kind == TestFunction::Kind::indicator) {
    long last = -1;
    while (last + 1 < pmf.size() && pmf.x(last + 1) <= h.param) ++last;
    double c = pmf.cdf(last), s = pmf.sf(last);
    double F = sol.density().cdf(h.param);
    if (F <= 0.5) return std::abs(c - F);
    return std::abs(s - sol.density().sf(h.param));
  }
  return std::abs(chain_mean_h(pmf, h) - sol.h_mean());
}

}  // namespace

ErrorDecomposition wasserstein_decomposition(const DiscreteStationary& pmf,
                                             const PoissonSolution& sol) {
  if (!sol.h().lipschitz())
    throw std::invalid_argument("the Wasserstein decomposition needs a Lipschitz test function");
  const auto& p = pmf.params();
  const auto& q = pmf.derived();
  const auto& d = sol.density();
  const double dl = q.delta;
  const long K = pmf.k_max();
  const std::vector<double> br = sol.breaks();
  auto f3abs = [&sol, &br](double y) {
    // Nodes land on a break only inside a rounding-width panel.
    if (std::find(br.begin(), br.end(), y) != br.end())
      y = std::nextafter(y, -std::numeric_limits<double>::infinity());
    return std::abs(sol.f_third(y));
  };

  // cell[j + 1] = integral of |f'''| over [x_j, x_j + delta], j = -1..K.
  std::vector<double> cell(static_cast<std::size_t>(K) + 2, kNaN);
  auto cell_at = [&](long j) {
    double& c = cell[static_cast<std::size_t>(j + 1)];
    if (std::isnan(c)) {
      double u = j >= 0 ? pmf.x(j) : pmf.x(0) - dl;
      double v = j < K ? pmf.x(j + 1) : pmf.x(K) + dl;
      c = num::integrate(f3abs, u, v, br, kQuadTol, kQuadFloor * (v - u) / p.mu);
    }
    return c;
  };

  Atoms atoms = select_atoms(pmf, d);
  std::vector<double> t1, t2, t3, t4;
  double worst = 0.0;
  for (long k : atoms.used) {
    const double w = pmf.prob(k), x = pmf.x(k), b = d.drift(x);
    const double up = cell_at(k), down = cell_at(k - 1);
    t1.push_back(w * std::abs(sol.f_second(x) * b));
    t2.push_back(w * up);
    t3.push_back(w * down);
    t4.push_back(w * std::abs(b) * down);
    worst = std::max({worst, std::abs(sol.f_second(x) * b), up * p.mu, std::abs(b) * down});
  }
  ErrorDecomposition e;
  e.metric = ErrorDecomposition::Metric::wasserstein;
  e.terms = {{"drift_f2", 0.5 * dl * sum_terms(t1)},
             {"forward_f3", 0.5 * p.mu * sum_terms(t2)},
             {"backward_f3", 0.5 * p.mu * sum_terms(t3)},
             {"drift_f3", 0.5 * dl * sum_terms(t4)}};
  for (const auto& t : e.terms) e.total += t.value;
  e.lhs = lhs_of(pmf, sol);
  e.tolerance = 1e-8 * e.total + atoms.skipped_mass * worst + 1e-14;
  e.extras = {{"expected_drift_f2", 2.0 * e.term("drift_f2") / dl}};

  e.checks.push_back(check("decomposition_valid", e.lhs, e.total + e.tolerance));
  if (q.regime == Regime::erlang_c && dl <= 1.0) {
    e.checks.push_back(check("total_over_delta", e.total / dl, 205.0));
    e.checks.push_back(check("expected_drift_f2", e.extra("expected_drift_f2"), 111.0));
    e.checks.push_back(check("forward_f3_over_delta", e.term("forward_f3") / dl, 31.0));
    e.checks.push_back(check("backward_f3_over_delta", e.term("backward_f3") / dl, 31.0));
    e.checks.push_back(check("drift_f3_over_delta2", e.term("drift_f3") / (dl * dl), 32.0));
  }
  return e;
}

Smooth as_smooth(const PoissonSolution& sol) {
  return {[&sol](double x) { return sol.f_prime(x); },
          [&sol](double x) { return sol.f_second(x); }, sol.breaks()};
}

double eps_forward(const Smooth& f, double x, double delta) {
  const double base = f.fsecond(x);
  const double floor = kQuadFloor * delta * delta * (1.0 + std::abs(base));
  return num::integrate([&](double y) { return (x + delta - y) * (f.fsecond(y) - base); }, x,
                        x + delta, f.breaks, kQuadTol, floor);
}

double eps_backward(const Smooth& f, double x, double delta) {
  const double base = f.fsecond(x);
  const double floor = kQuadFloor * delta * delta * (1.0 + std::abs(base));
  return num::integrate([&](double y) { return (y - x + delta) * (f.fsecond(y) - base); },
                        x - delta, x, f.breaks, kQuadTol, floor);
}

ErrorDecomposition kolmogorov_decomposition(const DiscreteStationary& pmf,
                                            const PoissonSolution& sol) {
  if (sol.h().kind != TestFunction::Kind::indicator)
    throw std::invalid_argument("the Kolmogorov decomposition needs an indicator test function");
  const auto& p = pmf.params();
  const auto& q = pmf.derived();
  const auto& d = sol.density();
  const double dl = q.delta;
  const double a = sol.h().param;
  Smooth f = as_smooth(sol);

  Atoms atoms = select_atoms(pmf, d);
  std::vector<double> t1, t2, t3, t4;
  double worst = 0.0;
  for (long k : atoms.used) {
    const double w = pmf.prob(k), x = pmf.x(k), b = d.drift(x);
    const double e1 = eps_forward(f, x, dl);
    const double e2 = eps_backward(f, x, dl);
    const double f2 = f.fsecond(x);
    t1.push_back(w * std::abs(f2 * b));
    t2.push_back(w * std::abs(e1));
    t3.push_back(w * std::abs(e2));
    t4.push_back(w * std::abs(b * e2));
    worst = std::max({worst, std::abs(f2 * b), p.lambda * (std::abs(e1) + std::abs(e2)),
                      std::abs(b * e2) / dl});
  }
  ErrorDecomposition e;
  e.metric = ErrorDecomposition::Metric::kolmogorov;
  e.terms = {{"drift_f2", 0.5 * dl * sum_terms(t1)},
             {"eps1", p.lambda * sum_terms(t2)},
             {"eps2", p.lambda * sum_terms(t3)},
             {"drift_eps2", sum_terms(t4) / dl}};
  for (const auto& t : e.terms) e.total += t.value;
  e.lhs = lhs_of(pmf, sol);
  e.tolerance = 1e-8 * e.total + atoms.skipped_mass * worst + 1e-14;

  std::vector<double> mass;
  for (long k = 0; k < pmf.size(); ++k) {
    double x = pmf.x(k);
    if (x > a - dl && x <= a + dl) mass.push_back(pmf.prob(k));
  }
  const double straddle = sum_terms(mass);
  const double dk = kolmogorov_distance(pmf, d);
  const double g = std::max(p.alpha / p.mu, 1.0);
  const double majorant =
      d.sup() * 2.0 * dl + dk + 9.0 * g * dl * dl + 8.0 * g * g * std::pow(dl, 4);
  e.extras = {{"straddle", straddle},
              {"straddle_majorant", majorant},
              {"d_k", dk},
              {"straddle_rhs", 0.5 * straddle + 75.0 * dl}};

  e.checks.push_back(check("decomposition_valid", e.lhs, e.total + e.tolerance));
  e.checks.push_back(check("straddle_majorant", straddle, majorant));
  if (q.regime == Regime::erlang_c && dl <= 1.0)
    e.checks.push_back(check("lhs_vs_straddle", e.lhs, e.extra("straddle_rhs")));
  return e;
}

TaylorAudit taylor_remainder_audit(const DiscreteStationary& pmf, const Smooth& f, long k) {
  if (k < 0 || k > pmf.k_max()) throw std::out_of_range("state index outside the pmf support");
  const auto& p = pmf.params();
  const auto& q = pmf.derived();
  const double x = pmf.x(k), dl = q.delta;
  const double b = drift(p, q, x);
  const double f2 = f.fsecond(x);
  TaylorAudit t;
  t.exact_gen = apply_generator_derivative(p, q, f.fprime, k, f.breaks);
  const double gy = b * f.fprime(x) + p.mu * f2;
  const double e1 = eps_forward(f, x, dl);
  const double e2 = eps_backward(f, x, dl);
  t.reconstructed_gen = gy - 0.5 * dl * f2 * b + p.lambda * (e1 + e2) - b * e2 / dl;
  t.gap = std::abs(t.exact_gen - t.reconstructed_gen);
  return t;
}

TaylorAudit taylor_remainder_audit(const DiscreteStationary& pmf, const PoissonSolution& sol,
                                   long k) {
  return taylor_remainder_audit(pmf, as_smooth(sol), k);
}

GeneratorIdentity generator_identity(const DiscreteStationary& pmf, const PoissonSolution& sol) {
  const auto& p = pmf.params();
  const auto& q = pmf.derived();
  const auto& d = sol.density();
  Smooth f = as_smooth(sol);
  Atoms atoms = select_atoms(pmf, d);
  std::vector<double> gy, gap;
  for (long k : atoms.used) {
    const double w = pmf.prob(k), x = pmf.x(k);
    const double y = d.drift(x) * sol.f_prime(x) + p.mu * sol.f_second(x);
    const double xg = apply_generator_derivative(p, q, f.fprime, k, f.breaks);
    gy.push_back(w * y);
    gap.push_back(w * (y - xg));
  }
  GeneratorIdentity g;
  g.lhs = lhs_of(pmf, sol);
  g.mean_generator = std::abs(sum_terms(gy));
  g.coupling = std::abs(sum_terms(gap));
  return g;
}

}  // namespace erlang
