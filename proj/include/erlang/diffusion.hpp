#pragma once

#include <vector>

#include "erlang/model.hpp"
#include "erlang/report.hpp"

namespace erlang {

// One piece of the density, on a half-line ending at the junction J = -zeta.
// Its log-shape phi is normalized so that phi(J) = 0.
struct Piece {
  enum class Kind { gaussian, exponential };
  Kind kind = Kind::gaussian;
  double lo = 0.0;
  double hi = 0.0;
  double junction = 0.0;
  double mean = 0.0;  // gaussian
  double sd = 1.0;    // gaussian
  double rate = 0.0;  // exponential, exp(-rate (x - J))

  bool contains(double x) const { return x >= lo && x <= hi; }
  double phi(double x) const;
  double log_mass() const;
  // integral_a^b (y + shift)^k exp(phi(y) - phi(ref)) dy for k = 0..K,
  // with [a, b] inside the domain.
  std::vector<double> moments(double a, double b, double ref, int K, double shift) const;
};

class DiffusionDensity {
 public:
  DiffusionDensity(double mu, double alpha, double zeta);

  Regime regime() const { return regime_; }
  double mu() const { return mu_; }
  double alpha() const { return alpha_; }
  double zeta() const { return zeta_; }
  double switch_point() const { return -zeta_; }
  const Piece& left() const { return left_; }
  const Piece& right() const { return right_; }

  // One-sided normalizers: nu = a_- * left shape, a_+ * right shape, with
  // the shapes written as functions of x (not relative to the junction).
  double log_a_minus() const;
  double log_a_plus() const;
  double a_minus() const;
  double a_plus() const;
  double left_mass() const;   // P(Y <= -zeta)
  double right_mass() const;  // P(Y >= -zeta)

  double drift(double x) const;
  double drift_slope(double x) const;

  double log_pdf(double x) const;
  double pdf(double x) const;
  double cdf(double x) const;
  double sf(double x) const;
  double log_cdf(double x) const;
  double log_sf(double x) const;
  double inverse_cdf(double c) const;
  double inverse_sf(double s) const;
  double mode() const;
  double sup() const { return pdf(mode()); }

  // integral_lo^hi (y + shift)^k nu(y) dy / nu(ref) for k = 0..K.
  std::vector<double> ratio_moments(double lo, double hi, double ref, int K,
                                    double shift = 0.0) const;
  // integral_lo^hi (y + shift)^k nu(y) dy.
  double integral(double lo, double hi, int k, double shift = 0.0) const;

 private:
  Regime regime_;
  double mu_, alpha_, zeta_;
  Piece left_, right_;
  double log_nu_j_ = 0.0;
  double log_left_mass_ = 0.0;
  double log_right_mass_ = 0.0;
};

DiffusionDensity build_density(const ModelParams& p, const DerivedQuantities& d);
DiffusionDensity build_density(const ModelParams& p);

// E[|g(Y)|^m 1(region)], g(y) = y or y + zeta.
double moment(const DiffusionDensity& d, int m, Region r = Region::all,
              Shift s = Shift::none);
// Signed E[Y^m].
double raw_moment(const DiffusionDensity& d, int m);
double probability(const DiffusionDensity& d, Region r);

BoundCheck density_sup_check(const DiffusionDensity& d);

// |zeta|^m E Y^m for Erlang-C densities at each zeta < 0.
std::vector<double> zeta_scaling_limit(double mu, int m, const std::vector<double>& zetas);

}  // namespace erlang
