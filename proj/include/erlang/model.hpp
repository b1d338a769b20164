#pragma once

namespace erlang {

enum class Regime { erlang_c, erlang_a_under, erlang_a_over };

const char* regime_name(Regime r);

// Region relative to the point -zeta (grid state k = n).
enum class Region { all, at_or_below, below, at_or_above, above };
// g(x) = x or x + zeta inside moments.
enum class Shift { none, plus_zeta };

struct ModelParams {
  double lambda = 0.0;
  double mu = 0.0;
  int n = 1;
  double alpha = 0.0;
};

struct DerivedQuantities {
  double R = 0.0;
  double delta = 0.0;
  double rho = 0.0;
  double x_inf = 0.0;
  double zeta = 0.0;
  Regime regime = Regime::erlang_c;
};

// Throws std::invalid_argument for nonpositive rates, n < 1, negative alpha,
// or an unstable Erlang-C system.
void validate(const ModelParams& p);

DerivedQuantities derive(const ModelParams& p);

// mu * min(k, n) + alpha * (k - n)^+
double departure_rate(const ModelParams& p, long k);

// b(x) = [(x+zeta)^- - zeta^-] mu - [(x+zeta)^+ - zeta^+] alpha
double drift(const ModelParams& p, const DerivedQuantities& d, double x);
double drift(double mu, double alpha, double zeta, double x);

// One-sided derivative of the drift; at the kink the left slope is returned.
double drift_slope(double mu, double alpha, double zeta, double x);

// delta * (k - x_inf)
double scaled_state(const DerivedQuantities& d, long k);

}  // namespace erlang
