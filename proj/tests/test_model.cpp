#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "erlang/model.hpp"

using namespace erlang;

namespace {
// Random valid parameter sets covering all three regimes.
ModelParams random_params(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> ni(1, 60);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ModelParams p;
  p.n = ni(rng);
  p.mu = 0.2 + 3.0 * u(rng);
  const int kind = static_cast<int>(u(rng) * 3);
  if (kind == 0) {
    p.alpha = 0.0;
    p.lambda = p.mu * p.n * (0.05 + 0.949 * u(rng));
  } else {
    p.alpha = std::pow(10.0, -1.5 + 3.0 * u(rng));
    p.lambda = p.mu * p.n * (kind == 1 ? 0.05 + 0.95 * u(rng) : 1.0 + 3.0 * u(rng));
  }
  return p;
}
}  // namespace

TEST_CASE("validate rejects bad parameters") {
  CHECK_THROWS_AS(validate({0.0, 1.0, 5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate({1.0, -1.0, 5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate({1.0, 1.0, 0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate({1.0, 1.0, 5, -0.5}), std::invalid_argument);
  CHECK_THROWS_AS(validate({5.0, 1.0, 5, 0.0}), std::invalid_argument);  // R = n, Erlang-C
  CHECK_THROWS_AS(validate({NAN, 1.0, 5, 0.0}), std::invalid_argument);
  CHECK_NOTHROW(validate({5.0, 1.0, 5, 0.1}));
  CHECK_THROWS_AS(derive({6.0, 1.0, 5, 0.0}), std::invalid_argument);
}

TEST_CASE("derive: worked examples") {
  auto d = derive({3.0, 1.0, 5, 0.0});
  CHECK(d.R == 3.0);
  CHECK(d.x_inf == 3.0);
  CHECK(d.zeta == doctest::Approx((3.0 - 5.0) / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(d.rho == doctest::Approx(0.6));
  CHECK(d.regime == Regime::erlang_c);

  auto c = derive({5.0, 1.0, 5, 1.0});
  CHECK(c.x_inf == 5.0);
  CHECK(c.zeta == 0.0);
  CHECK(c.regime == Regime::erlang_a_under);  // the critical load takes the underloaded branch

  auto t = derive({499.0, 1.0, 500, 0.0});
  CHECK(std::abs(t.zeta) == doctest::Approx(4.48e-2).epsilon(5e-3));

  auto o = derive({12.0, 1.0, 5, 2.0});
  CHECK(o.x_inf == doctest::Approx(5.0 + 7.0 / 2.0));
  CHECK(o.regime == Regime::erlang_a_over);
  CHECK(o.zeta > 0.0);
}

TEST_CASE("departure_rate examples and monotonicity") {
  CHECK(departure_rate({3, 1, 5, 0}, 0) == 0.0);
  CHECK(departure_rate({3, 1, 5, 0}, 7) == 5.0);
  CHECK(departure_rate({3, 1, 5, 2}, 7) == 9.0);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    auto p = random_params(rng);
    for (long k = 0; k < 3L * p.n; ++k)
      CHECK(departure_rate(p, k + 1) >= departure_rate(p, k));
  }
}

TEST_CASE("property: fluid equilibrium balances flow and zeta has both forms") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 300; ++i) {
    auto p = random_params(rng);
    auto d = derive(p);
    const double xi = d.x_inf;
    const double out = std::min(xi, double(p.n)) * p.mu + std::max(xi - p.n, 0.0) * p.alpha;
    CHECK(out == doctest::Approx(p.lambda).epsilon(1e-12));
    // lambda - n mu = (x - n)^+ alpha - (x - n)^- mu
    const double lhs = p.lambda - p.n * p.mu;
    const double rhs = std::max(xi - p.n, 0.0) * p.alpha - std::max(p.n - xi, 0.0) * p.mu;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12).scale(p.lambda));
    CHECK(d.zeta == doctest::Approx(d.delta * (xi - p.n)).epsilon(1e-14));
    if (d.R < p.n) {
      CHECK(d.zeta < 0.0);
      CHECK(d.zeta == doctest::Approx((d.R - p.n) / std::sqrt(d.R)).epsilon(1e-13));
    } else {
      CHECK(d.zeta >= 0.0);
    }
  }
}

TEST_CASE("drift examples") {
  ModelParams p{4.0, 1.0, 5, 0.0};
  auto d = derive(p);
  CHECK(drift(p, d, 0.0) == 0.0);
  // Erlang-C: mu zeta to the right of -zeta, -mu x to the left.
  CHECK(drift(p, d, 2.0) == doctest::Approx(p.mu * d.zeta));
  CHECK(drift(p, d, -1.0) == doctest::Approx(1.0));
  CHECK(drift(p, d, 0.25) == doctest::Approx(-0.25));
}

TEST_CASE("property: b(x_k) = delta (lambda - d(k)) on every state up to 10 n") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 100; ++i) {
    auto p = random_params(rng);
    auto d = derive(p);
    for (long k = 0; k <= 10L * p.n; ++k) {
      double b = drift(p, d, scaled_state(d, k));
      double ref = d.delta * (p.lambda - departure_rate(p, k));
      CHECK(b == doctest::Approx(ref).epsilon(1e-12).scale(d.delta * p.lambda));
    }
  }
}

TEST_CASE("property: drift is Lipschitz with alpha v mu, continuous, linear off the kink") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 100; ++i) {
    auto p = random_params(rng);
    auto d = derive(p);
    const double L = std::max(p.alpha, p.mu);
    for (int j = 0; j < 50; ++j) {
      double x = u(rng), y = u(rng);
      CHECK(std::abs(drift(p, d, x) - drift(p, d, y)) <= L * std::abs(x - y) * (1 + 1e-12) + 1e-12);
    }
    const double J = -d.zeta;
    const double eps = 1e-9;
    CHECK(drift(p, d, J - eps) == doctest::Approx(drift(p, d, J + eps)).epsilon(1e-7).scale(1.0));
    // Second differences vanish away from the kink.
    for (double x : {J - 3.0, J + 3.0}) {
      double s2 = drift(p, d, x + 0.5) - 2 * drift(p, d, x) + drift(p, d, x - 0.5);
      CHECK(std::abs(s2) < 1e-10 * (1 + std::abs(drift(p, d, x))));
    }
    CHECK(drift_slope(p.mu, p.alpha, d.zeta, J - 1.0) == -p.mu);
    CHECK(drift_slope(p.mu, p.alpha, d.zeta, J + 1.0) == -p.alpha);
  }
}

TEST_CASE("scaled_state: centring, spacing, and k = n lands on -zeta") {
  auto d = derive({4.0, 1.0, 5, 0.0});
  CHECK(scaled_state(d, 5) == 0.5);
  CHECK(scaled_state(d, 4) == 0.0);
  std::mt19937_64 rng(15);
  for (int i = 0; i < 100; ++i) {
    auto p = random_params(rng);
    auto q = derive(p);
    CHECK(scaled_state(q, p.n) == -q.zeta);
    for (long k = 0; k < 20; ++k) {
      CHECK(scaled_state(q, k + 1) - scaled_state(q, k) == doctest::Approx(q.delta).epsilon(1e-10));
      CHECK(scaled_state(q, k + 1) > scaled_state(q, k));
    }
  }
}

TEST_CASE("regime names") {
  CHECK(std::string(regime_name(Regime::erlang_c)) != std::string(regime_name(Regime::erlang_a_over)));
}
