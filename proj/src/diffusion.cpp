#include "erlang/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "erlang/numeric.hpp"

namespace erlang {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;


double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}
}  // namespace

double Piece::phi(double x) const {
  if (kind == Kind::exponential) return -rate * (x - junction);
  return -(x - junction) * (x + junction - 2.0 * mean) / (2.0 * sd * sd);
}

double Piece::log_mass() const {
  if (kind == Kind::exponential) return -std::log(rate);
  double zj = (junction - mean) / sd;
  if (std::isinf(lo)) return std::log(sd) + num::log_mills_below(zj);
  return std::log(sd) + num::log_mills_below(-zj);
}

std::vector<double> Piece::moments(double a, double b, double ref, int K, double shift) const {
  std::vector<double> P(static_cast<std::size_t>(K) + 1, 0.0);
  const double phi_ref = phi(ref);
  const double Ea = std::isinf(a) ? 0.0 : std::exp(phi(a) - phi_ref);
  const double Eb = std::isinf(b) ? 0.0 : std::exp(phi(b) - phi_ref);
  const double as = a + shift;
  const double bs = b + shift;
  if (kind == Kind::exponential) {
    const double th = rate;
    P[0] = std::isinf(b) ? Ea / th : Ea * (-std::expm1(-th * (b - a))) / th;
    for (int k = 1; k <= K; ++k) {
      double ba = std::isinf(a) ? 0.0 : ipow(as, k) * Ea;
      double bb = std::isinf(b) ? 0.0 : ipow(bs, k) * Eb;
      P[k] = (ba - bb) / th + k / th * P[k - 1];
    }
    return P;
  }
  const double s2 = sd * sd;
  const double za = (a - mean) / sd;
  const double zb = (b - mean) / sd;
  const double zr = (ref - mean) / sd;
  P[0] = std::exp(std::log(sd) + kLogSqrt2Pi + 0.5 * zr * zr + num::log_ndtr_diff(za, zb));
  const double ms = mean + shift;
  for (int k = 1; k <= K; ++k) {
    double ba = std::isinf(a) ? 0.0 : ipow(as, k - 1) * Ea;
    double bb = std::isinf(b) ? 0.0 : ipow(bs, k - 1) * Eb;
    double v = ms * P[k - 1] - s2 * (bb - ba);
    if (k >= 2) v += s2 * (k - 1) * P[k - 2];
    P[k] = v;
  }
  return P;
}

DiffusionDensity::DiffusionDensity(double mu, double alpha, double zeta)
    : mu_(mu), alpha_(alpha), zeta_(zeta) {
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
  if (!std::isfinite(zeta)) throw std::invalid_argument("zeta must be finite");
  const double J = -zeta;
  if (alpha == 0.0) {
    if (!(zeta < 0.0))
      throw std::invalid_argument("Erlang-C diffusion density needs zeta < 0");
    regime_ = Regime::erlang_c;
  } else {
    regime_ = zeta <= 0.0 ? Regime::erlang_a_under : Regime::erlang_a_over;
  }
  left_.kind = Piece::Kind::gaussian;
  left_.lo = -kInf;
  left_.hi = J;
  left_.junction = J;
  left_.mean = zeta <= 0.0 ? 0.0 : -zeta + alpha / mu * zeta;
  left_.sd = 1.0;

  right_.lo = J;
  right_.hi = kInf;
  right_.junction = J;
  if (alpha == 0.0) {
    right_.kind = Piece::Kind::exponential;
    right_.rate = -zeta;
  } else {
    right_.kind = Piece::Kind::gaussian;
    right_.mean = zeta <= 0.0 ? -zeta + mu / alpha * zeta : 0.0;
    right_.sd = std::sqrt(mu / alpha);
  }
  const double lm = left_.log_mass();
  const double rm = right_.log_mass();
  log_nu_j_ = -num::logaddexp(lm, rm);
  log_left_mass_ = log_nu_j_ + lm;
  log_right_mass_ = log_nu_j_ + rm;
}

double DiffusionDensity::log_a_minus() const {
  double u = left_.junction - left_.mean;
  return log_nu_j_ + 0.5 * u * u;
}

double DiffusionDensity::log_a_plus() const {
  if (right_.kind == Piece::Kind::exponential) return log_nu_j_ + right_.rate * right_.junction;
  double u = (right_.junction - right_.mean) / right_.sd;
  return log_nu_j_ + 0.5 * u * u;
}

double DiffusionDensity::a_minus() const { return std::exp(log_a_minus()); }
double DiffusionDensity::a_plus() const { return std::exp(log_a_plus()); }
double DiffusionDensity::left_mass() const { return std::exp(log_left_mass_); }
double DiffusionDensity::right_mass() const { return std::exp(log_right_mass_); }

double DiffusionDensity::drift(double x) const { return erlang::drift(mu_, alpha_, zeta_, x); }

double DiffusionDensity::drift_slope(double x) const {
  return erlang::drift_slope(mu_, alpha_, zeta_, x);
}

double DiffusionDensity::log_pdf(double x) const {
  return log_nu_j_ + (x <= -zeta_ ? left_.phi(x) : right_.phi(x));
}

double DiffusionDensity::pdf(double x) const { return std::exp(log_pdf(x)); }

double DiffusionDensity::mode() const {
  if (left_.mean <= left_.junction) return left_.mean;
  if (right_.kind == Piece::Kind::gaussian && right_.mean >= right_.junction)
    return right_.mean;
  return -zeta_;
}

std::vector<double> DiffusionDensity::ratio_moments(double lo, double hi, double ref, int K,
                                                    double shift) const {
  std::vector<double> acc(static_cast<std::size_t>(K) + 1, 0.0);
  const Piece& home = ref <= -zeta_ ? left_ : right_;
  for (const Piece* p : {&left_, &right_}) {
    double a = std::max(lo, p->lo);
    double b = std::min(hi, p->hi);
    if (!(a < b)) continue;
    std::vector<double> v;
    double factor = 1.0;
    if (p == &home || p->contains(ref)) {
      v = p->moments(a, b, ref, K, shift);
    } else {
      v = p->moments(a, b, p->junction, K, shift);
      factor = std::exp(-home.phi(ref));
    }
    for (int k = 0; k <= K; ++k) acc[k] += factor * v[k];
  }
  return acc;
}

double DiffusionDensity::integral(double lo, double hi, int k, double shift) const {
  if (!(lo < hi)) return 0.0;
  double m = mode();
  return sup() * ratio_moments(lo, hi, m, k, shift)[k];
}

double DiffusionDensity::cdf(double x) const {
  if (x == -kInf) return 0.0;
  if (x == kInf) return 1.0;
  if (x <= mode()) return pdf(x) * ratio_moments(-kInf, x, x, 0)[0];
  return 1.0 - sf(x);
}

double DiffusionDensity::sf(double x) const {
  if (x == -kInf) return 1.0;
  if (x == kInf) return 0.0;
  if (x >= mode()) return pdf(x) * ratio_moments(x, kInf, x, 0)[0];
  return 1.0 - cdf(x);
}

double DiffusionDensity::log_cdf(double x) const {
  if (x <= mode()) return log_pdf(x) + std::log(ratio_moments(-kInf, x, x, 0)[0]);
  return std::log1p(-sf(x));
}

double DiffusionDensity::log_sf(double x) const {
  if (x >= mode()) return log_pdf(x) + std::log(ratio_moments(x, kInf, x, 0)[0]);
  return std::log1p(-cdf(x));
}

double DiffusionDensity::inverse_cdf(double c) const {
  if (c <= 0.0) return -kInf;
  if (c >= 1.0) return kInf;
  if (c <= left_mass()) {
    double zj = left_.junction - left_.mean;
    double lp = std::log(c) - log_left_mass_ + num::log_ndtr(zj);
    return std::min(left_.mean + num::ndtri_log(std::min(lp, 0.0)), left_.junction);
  }
  return inverse_sf(1.0 - c);
}

double DiffusionDensity::inverse_sf(double s) const {
  if (s <= 0.0) return kInf;
  if (s >= 1.0) return -kInf;
  if (s <= right_mass()) {
    if (right_.kind == Piece::Kind::exponential)
      return right_.junction + (log_right_mass_ - std::log(s)) / right_.rate;
    double zj = (right_.junction - right_.mean) / right_.sd;
    double lq = std::log(s) - log_right_mass_ + num::log_ndtr(-zj);
    return std::max(right_.mean - right_.sd * num::ndtri_log(std::min(lq, 0.0)),
                    right_.junction);
  }
  return inverse_cdf(1.0 - s);
}

DiffusionDensity build_density(const ModelParams& p, const DerivedQuantities& d) {
  return DiffusionDensity(p.mu, p.alpha, d.zeta);
}

DiffusionDensity build_density(const ModelParams& p) { return build_density(p, derive(p)); }

double moment(const DiffusionDensity& d, int m, Region r, Shift s) {
  if (m < 0 || m > 20) throw std::invalid_argument("moment order must lie in [0, 20]");
  const double sh = s == Shift::plus_zeta ? d.zeta() : 0.0;
  double lo = -kInf, hi = kInf;
  if (r == Region::at_or_below || r == Region::below) hi = d.switch_point();
  if (r == Region::at_or_above || r == Region::above) lo = d.switch_point();
  const double root = -sh;
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  if (root > lo && root < hi)
    return sign * d.integral(lo, root, m, sh) + d.integral(root, hi, m, sh);
  if (root >= hi) return sign * d.integral(lo, hi, m, sh);
  return d.integral(lo, hi, m, sh);
}

double raw_moment(const DiffusionDensity& d, int m) {
  if (m < 0 || m > 20) throw std::invalid_argument("moment order must lie in [0, 20]");
  return d.integral(-kInf, kInf, m);
}

double probability(const DiffusionDensity& d, Region r) { return moment(d, 0, r); }

BoundCheck density_sup_check(const DiffusionDensity& d) {
  double bound = std::sqrt(2.0 / M_PI);
  if (d.regime() == Regime::erlang_a_over) bound *= std::sqrt(d.alpha() / d.mu());
  return check("density_sup", d.sup(), bound);
}

std::vector<double> zeta_scaling_limit(double mu, int m, const std::vector<double>& zetas) {
  std::vector<double> out;
  out.reserve(zetas.size());
  for (double z : zetas) {
    DiffusionDensity d(mu, 0.0, z);
    out.push_back(std::pow(std::abs(z), m) * raw_moment(d, m));
  }
  return out;
}

}  // namespace erlang
