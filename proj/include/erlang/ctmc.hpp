#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <functional>
#include <vector>

#include "erlang/model.hpp"
#include "erlang/report.hpp"

namespace erlang {

struct StationaryOptions {
  double tail_tol = 1e-14;
  // Extend the support until the tail of E|X|^m is below 1e-12 relative.
  int certify_order = 0;
  std::size_t max_states = 100000000;
};

// Truncated stationary pmf of the scaled birth-death chain.
class DiscreteStationary {
 public:
  DiscreteStationary(const ModelParams& p, const StationaryOptions& opt = {});

  const ModelParams& params() const { return params_; }
  const DerivedQuantities& derived() const { return derived_; }
  long k_max() const { return static_cast<long>(pmf_.size()) - 1; }
  long size() const { return static_cast<long>(pmf_.size()); }
  double x(long k) const { return scaled_state(derived_, k); }
  double prob(long k) const { return pmf_[k]; }
  double log_prob(long k) const { return log_pmf_[k]; }
  const Eigen::ArrayXd& pmf() const { return pmf_; }
  const Eigen::ArrayXd& log_pmf() const { return log_pmf_; }
  // Certified bound on the mass beyond k_max.
  double tail_bound() const { return tail_bound_; }
  // Upper bound on lambda / d(k) for every k > k_max.
  double tail_ratio() const { return tail_ratio_; }
  // P(X <= k) and P(X > k), each summed from its own small end.
  double cdf(long k) const;
  double sf(long k) const;
  long mode_index() const;

 private:
  ModelParams params_;
  DerivedQuantities derived_;
  Eigen::ArrayXd log_pmf_;
  Eigen::ArrayXd pmf_;
  std::vector<double> cum_;
  std::vector<double> tail_;
  double tail_bound_ = 0.0;
  double tail_ratio_ = 0.0;
};

DiscreteStationary stationary_pmf(const ModelParams& p, double tail_tol = 1e-14);

bool in_region(const DiscreteStationary& d, long k, Region r);

struct MomentEstimate {
  double value = 0.0;
  double tail = 0.0;   // certified bound on the truncated contribution
  double scale = 0.0;  // sum of |terms|, the absolute moment over the region
};

MomentEstimate moment_estimate(const DiscreteStationary& d, int m, Region r = Region::all,
                               Shift s = Shift::none);

// E[|g(X)|^m 1(region)] with g(x) = x or x + zeta. Throws std::runtime_error
// when the truncated tail could move the value by more than 1e-8 relative.
double moment(const DiscreteStationary& d, int m, Region r = Region::all,
              Shift s = Shift::none);
// Signed E[X^m].
double raw_moment(const DiscreteStationary& d, int m);
double probability(const DiscreteStationary& d, Region r);

// Majorant of sum_{k > k_max} nu_k (|x_k| + extra)^m.
double tail_moment_bound(const DiscreteStationary& d, int m, double extra = 0.0);

using GridFunction = std::function<double(double)>;

// lambda (f(x+delta) - f(x)) + d(k) (f(x-delta) - f(x)) at x = x_k.
double apply_generator(const ModelParams& p, const DerivedQuantities& dq,
                       const GridFunction& f, long k);

// Same generator with f given through its derivative; the differences of f
// are integrals of f' over the neighbouring cells.
double apply_generator_derivative(const ModelParams& p, const DerivedQuantities& dq,
                                  const GridFunction& fprime, long k,
                                  const std::vector<double>& breaks = {});

struct Residual {
  double value = 0.0;
  double tolerance = 0.0;
};

Residual stein_identity_residual(const DiscreteStationary& d, const GridFunction& f);
Residual stein_identity_residual_derivative(const DiscreteStationary& d,
                                            const GridFunction& fprime,
                                            const std::vector<double>& breaks = {});

std::vector<BoundCheck> moment_bound_report(const DiscreteStationary& d);

// P(X <= n) for each lambda.
std::vector<double> idle_probability_monotone(int n, double mu, double alpha,
                                              const std::vector<double>& lambdas);

}  // namespace erlang
