#include "erlang/numeric.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace erlang::num {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kSqrtHalfPi = 1.25331413731550025121;
constexpr double kInvSqrtPi = 0.56418958354775628695;
}  // namespace

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) {
    if (x < -26.6) return kInf;
    return 2.0 * std::exp(x * x) - erfcx(-x);
  }
  if (x <= 50.0) {
    long double lx = x;
    return static_cast<double>(std::exp(lx * lx) * std::erfc(lx));
  }
  if (std::isinf(x)) return 0.0;
  // Continued fraction, converges fast for large x.
  double t = x;
  for (int k = 40; k >= 1; --k) t = x + 0.5 * k / t;
  return kInvSqrtPi / t;
}

double log_ndtr(double z) {
  if (z > 0.0) return std::log1p(-0.5 * std::erfc(z / std::sqrt(2.0)));
  if (std::isinf(z)) return -kInf;
  return std::log(0.5 * erfcx(-z / std::sqrt(2.0))) - 0.5 * z * z;
}

double log1mexp(double a) {
  if (a > -0.6931471805599453) return std::log(-std::expm1(a));
  return std::log1p(-std::exp(a));
}

double logaddexp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_ndtr_diff(double zlo, double zhi) {
  if (!(zlo < zhi)) return -kInf;
  if (zhi <= 0.0) {
    double a = log_ndtr(zhi);
    return a + log1mexp(log_ndtr(zlo) - a);
  }
  if (zlo >= 0.0) {
    double a = log_ndtr(-zlo);
    return a + log1mexp(log_ndtr(-zhi) - a);
  }
  const double r = std::sqrt(0.5);
  return std::log(0.5 * (std::erf(zhi * r) - std::erf(zlo * r)));
}

double log_mills_below(double z) {
  if (z <= 0.0) return std::log(kSqrtHalfPi * erfcx(-z / std::sqrt(2.0)));
  return 0.5 * z * z + log_ndtr(z) + kLogSqrt2Pi;
}

double ndtri_log(double logp) {
  if (logp >= 0.0) return kInf;
  if (logp == -kInf) return -kInf;
  double z;
  if (logp > -700.0) {
    double p = std::exp(logp);
    if (p > 0.5) {
      double q = -std::expm1(logp);
      z = std::sqrt(2.0) * boost::math::erfc_inv(2.0 * q);
    } else {
      z = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
    }
  } else {
    double t = -2.0 * logp;
    z = -std::sqrt(t - std::log(t * 2.0 * M_PI));
  }
  // Newton polish on log Phi.
  for (int it = 0; it < 4; ++it) {
    double lp = log_ndtr(z);
    double dlog = std::exp(-0.5 * z * z - kLogSqrt2Pi - lp);
    if (!(dlog > 0.0) || !std::isfinite(dlog)) break;
    double step = (lp - logp) / dlog;
    z -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
  }
  return z;
}

void CompensatedSum::add(double v) {
  double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v))
    comp_ += (sum_ - t) + v;
  else
    comp_ += (v - t) + sum_;
  sum_ = t;
}

double ordered_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end(),
            [](double a, double b) { return std::abs(a) < std::abs(b); });
  CompensatedSum s;
  for (double v : terms) s.add(v);
  return s.value();
}

namespace {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk_panel(const std::function<double(double)>& f, double a, double b) {
  double err = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 0, 0.0, &err);
  return {a, b, v, err};
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const std::vector<double>& breaks, double tol, double abs_tol) {
  if (a == b) return 0.0;
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("integrate needs finite limits");
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::vector<double> pts{a};
  for (double c : breaks)
    if (c > a && c < b) pts.push_back(c);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());

  // Globally adaptive: bisect the panel with the largest error estimate until
  // the summed estimate is below tol times the L1 norm, abs_tol, or rounding
  // level.
  std::priority_queue<Panel> heap;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (pts[i + 1] > pts[i]) heap.push(gk_panel(f, pts[i], pts[i + 1]));
  constexpr int kMaxPanels = 4000;
  constexpr double kRounding = 50.0 * std::numeric_limits<double>::epsilon();
  auto totals = [&heap](double& err, double& l1) {
    err = 0.0;
    l1 = 0.0;
    auto copy = heap;
    while (!copy.empty()) {
      err += copy.top().error;
      l1 += std::abs(copy.top().value);
      copy.pop();
    }
  };
  double err = 0.0, l1 = 0.0;
  totals(err, l1);
  while (!heap.empty() && static_cast<int>(heap.size()) < kMaxPanels &&
         err > std::max(std::max(tol, kRounding) * l1, abs_tol)) {
    Panel worst = heap.top();
    double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    Panel left = gk_panel(f, worst.a, mid);
    Panel right = gk_panel(f, mid, worst.b);
    err += left.error + right.error - worst.error;
    l1 += std::abs(left.value) + std::abs(right.value) - std::abs(worst.value);
    heap.push(left);
    heap.push(right);
    if (heap.size() % 64 == 0) totals(err, l1);  // refresh running sums
  }
  CompensatedSum total;
  while (!heap.empty()) {
    total.add(heap.top().value);
    heap.pop();
  }
  return sign * total.value();
}

}  // namespace erlang::num
