#include "erlang/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace erlang {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::erlang_c: return "erlang_c";
    case Regime::erlang_a_under: return "erlang_a_under";
    case Regime::erlang_a_over: return "erlang_a_over";
  }
  return "unknown";
}

void validate(const ModelParams& p) {
  if (!(p.lambda > 0.0) || !std::isfinite(p.lambda))
    throw std::invalid_argument("lambda must be positive and finite");
  if (!(p.mu > 0.0) || !std::isfinite(p.mu))
    throw std::invalid_argument("mu must be positive and finite");
  if (p.n < 1) throw std::invalid_argument("n must be at least 1");
  if (!(p.alpha >= 0.0) || !std::isfinite(p.alpha))
    throw std::invalid_argument("alpha must be nonnegative and finite");
  if (p.alpha == 0.0 && !(p.lambda / p.mu < p.n))
    throw std::invalid_argument("Erlang-C requires lambda/mu < n (got R = " +
                                std::to_string(p.lambda / p.mu) + ", n = " +
                                std::to_string(p.n) + ")");
}

DerivedQuantities derive(const ModelParams& p) {
  validate(p);
  DerivedQuantities d;
  d.R = p.lambda / p.mu;
  d.delta = 1.0 / std::sqrt(d.R);
  d.rho = d.R / p.n;
  if (d.R < p.n) {
    d.x_inf = d.R;
    d.regime = p.alpha == 0.0 ? Regime::erlang_c : Regime::erlang_a_under;
  } else {
    d.x_inf = p.n + (p.lambda - p.n * p.mu) / p.alpha;
    d.regime = d.R == p.n ? Regime::erlang_a_under : Regime::erlang_a_over;
  }
  d.zeta = d.delta * (d.x_inf - p.n);
  return d;
}

double departure_rate(const ModelParams& p, long k) {
  return p.mu * static_cast<double>(std::min<long>(k, p.n)) +
         p.alpha * static_cast<double>(std::max<long>(k - p.n, 0));
}

double drift(double mu, double alpha, double zeta, double x) {
  auto pos = [](double v) { return v > 0.0 ? v : 0.0; };
  auto neg = [](double v) { return v < 0.0 ? -v : 0.0; };
  return (neg(x + zeta) - neg(zeta)) * mu - (pos(x + zeta) - pos(zeta)) * alpha;
}

double drift(const ModelParams& p, const DerivedQuantities& d, double x) {
  return drift(p.mu, p.alpha, d.zeta, x);
}

double drift_slope(double mu, double alpha, double zeta, double x) {
  return x <= -zeta ? -mu : -alpha;
}

double scaled_state(const DerivedQuantities& d, long k) {
  return d.delta * (static_cast<double>(k) - d.x_inf);
}

}  // namespace erlang
