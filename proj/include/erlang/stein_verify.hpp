#pragma once

#include <functional>
#include <string>
#include <vector>

#include "erlang/ctmc.hpp"
#include "erlang/poisson.hpp"
#include "erlang/report.hpp"

namespace erlang {

struct Term {
  std::string name;
  double value = 0.0;
};

// Upper bound on |E h(X~) - E h(Y)| split into the Taylor-remainder terms.
struct ErrorDecomposition {
  enum class Metric { wasserstein, kolmogorov };
  Metric metric = Metric::wasserstein;
  std::vector<Term> terms;
  double total = 0.0;
  double lhs = 0.0;        // |E h(X~) - E h(Y)|, computed directly
  double tolerance = 0.0;  // quadrature and truncation allowance
  std::vector<Term> extras;
  std::vector<BoundCheck> checks;

  double term(const std::string& name) const;
  double extra(const std::string& name) const;
};

// Terms: drift_f2 = (delta/2) E|f''b|, forward_f3 and backward_f3 =
// (mu/2) E int |f'''| over the up and down cells, drift_f3 = (delta/2)
// E[|b| int |f'''|] over the down cell.
ErrorDecomposition wasserstein_decomposition(const DiscreteStationary& pmf,
                                             const PoissonSolution& sol);

// Terms: drift_f2 = (delta/2) E|f''(X~-) b|, eps1 = lambda E|eps1|,
// eps2 = lambda E|eps2|, drift_eps2 = (1/delta) E|b eps2|. Extras carry the
// straddle probability P(a - delta < X~ <= a + delta) and its majorant.
ErrorDecomposition kolmogorov_decomposition(const DiscreteStationary& pmf,
                                            const PoissonSolution& sol);

// A function through its first two derivatives; f'' is the left derivative.
struct Smooth {
  std::function<double(double)> fprime;
  std::function<double(double)> fsecond;
  std::vector<double> breaks;
};

Smooth as_smooth(const PoissonSolution& sol);

// eps_1(x), eps_2(x): Taylor remainders against f''(x-) over [x, x+delta]
// and [x-delta, x].
double eps_forward(const Smooth& f, double x, double delta);
double eps_backward(const Smooth& f, double x, double delta);

struct TaylorAudit {
  double exact_gen = 0.0;
  double reconstructed_gen = 0.0;
  double gap = 0.0;
};

// Compares the chain generator at x_k against
// G_Y f - (delta/2) f''(x-) b + lambda (eps1 + eps2) - b eps2 / delta.
TaylorAudit taylor_remainder_audit(const DiscreteStationary& pmf, const Smooth& f, long k);
TaylorAudit taylor_remainder_audit(const DiscreteStationary& pmf, const PoissonSolution& sol,
                                   long k);

struct GeneratorIdentity {
  double lhs = 0.0;            // |E h(X~) - E h(Y)|
  double mean_generator = 0.0;  // |E G_Y f(X~)| from b f' + mu f''
  double coupling = 0.0;        // |E[G_Y f(X~) - G_X~ f(X~)]|
};

GeneratorIdentity generator_identity(const DiscreteStationary& pmf, const PoissonSolution& sol);

// E h(X~) over the truncated pmf.
double chain_mean_h(const DiscreteStationary& pmf, const TestFunction& h);

}  // namespace erlang
