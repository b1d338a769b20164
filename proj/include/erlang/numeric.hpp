#pragma once

#include <functional>
#include <vector>

namespace erlang::num {

// exp(x^2) * erfc(x), finite for all x where the product is representable.
double erfcx(double x);

// log of the standard normal cdf, accurate in both tails.
double log_ndtr(double z);

// log(Phi(zhi) - Phi(zlo)) for zlo <= zhi; infinities allowed.
double log_ndtr_diff(double zlo, double zhi);

// log of integral_{-inf}^{z} exp(-(t^2 - z^2)/2) dt.
double log_mills_below(double z);

// z with log Phi(z) = logp.
double ndtri_log(double logp);

double log1mexp(double a);  // log(1 - exp(a)), a <= 0
double logaddexp(double a, double b);

// Neumaier summation.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Sorts by magnitude and sums smallest first with compensation.
double ordered_sum(std::vector<double> terms);

// Globally adaptive Gauss-Kronrod on a finite [a, b], split at any interior
// breakpoints; stops at tol times the L1 norm, at abs_tol, or at rounding
// level.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const std::vector<double>& breaks = {}, double tol = 1e-12,
                 double abs_tol = 0.0);

}  // namespace erlang::num
