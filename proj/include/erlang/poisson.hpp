#pragma once

#include <string>
#include <vector>

#include "erlang/ctmc.hpp"
#include "erlang/diffusion.hpp"
#include "erlang/report.hpp"

namespace erlang {

struct TestFunction {
  enum class Kind { identity, abs_shift, indicator, constant };
  Kind kind = Kind::identity;
  double param = 0.0;  // c for |x - c|, a for 1(x <= a)

  static TestFunction identity() { return {Kind::identity, 0.0}; }
  static TestFunction abs_shift(double c) { return {Kind::abs_shift, c}; }
  static TestFunction indicator(double a) { return {Kind::indicator, a}; }
  static TestFunction constant(double v = 0.0) { return {Kind::constant, v}; }

  double operator()(double x) const;
  // h'(x) away from kinks; zero for indicators.
  double slope(double x) const;
  bool lipschitz() const { return kind != Kind::indicator; }
  // Points where h is not differentiable.
  std::vector<double> kinks() const;
  std::string label() const;
};

// E h(Y) in closed form.
double mean_h(const DiffusionDensity& d, const TestFunction& h);

// Solution of b f' + mu f'' = E h(Y) - h with a_2 = 0. Derivatives only;
// f itself is a quadrature antiderivative with f(0) = 0.
class PoissonSolution {
 public:
  PoissonSolution(DiffusionDensity d, TestFunction h);

  const DiffusionDensity& density() const { return d_; }
  const TestFunction& h() const { return h_; }
  double h_mean() const { return h_mean_; }
  double switch_point() const { return switch_; }

  // Integral from -inf, resp. to +inf. Both are exact; each is stable on its
  // own side of the density mode.
  double f_prime_left(double x) const;
  double f_prime_right(double x) const;
  double f_prime(double x) const;
  // Left limit at the jump of an indicator.
  double f_second(double x) const;
  // Throws std::domain_error at -zeta or at a kink of h, and for indicators.
  double f_third(double x) const;
  double f(double x) const;
  // Where f'' or f''' may fail to be smooth.
  std::vector<double> breaks() const;

 private:
  void check_range(double x) const;
  // integral over [lo, hi] of (E h - h(y)) nu(y) dy / nu(ref).
  double weighted(double lo, double hi, double ref) const;

  DiffusionDensity d_;
  TestFunction h_;
  double h_mean_ = 0.0;
  double switch_ = 0.0;
};

enum class GradientSuite { wasserstein_C, kolmogorov_C, kolmogorov_A, wasserstein_A };

const char* suite_name(GradientSuite s);

// 2001 points spanning [-zeta - 10, -zeta + 10] plus every pmf atom whose
// density is within the supported range.
std::vector<double> gradient_sample_points(const DiscreteStationary& pmf,
                                           const DiffusionDensity& d, int count = 2001);

// Anchors used for indicator test functions: -zeta - 1, -zeta, 0, -zeta + 1.
std::vector<double> indicator_anchors(double zeta);

// Checks the derivative bounds of the chosen suite on the sample points.
// Rows with an unstated constant report the implied constant with no verdict.
std::vector<BoundCheck> gradient_bound_report(const DiscreteStationary& pmf, GradientSuite suite,
                                              int count = 2001);

}  // namespace erlang
