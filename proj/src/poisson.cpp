#include "erlang/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "erlang/numeric.hpp"

namespace erlang {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Beyond about 50 standard deviations 1/nu no longer fits in a double.
constexpr double kMinLogPdf = -1250.0;
}  // namespace

double TestFunction::operator()(double x) const {
  switch (kind) {
    case Kind::identity: return x;
    case Kind::abs_shift: return std::abs(x - param);
    case Kind::indicator: return x <= param ? 1.0 : 0.0;
    case Kind::constant: return param;
  }
  return 0.0;
}

double TestFunction::slope(double x) const {
  switch (kind) {
    case Kind::identity: return 1.0;
    case Kind::abs_shift: return x < param ? -1.0 : 1.0;
    case Kind::indicator:
    case Kind::constant: return 0.0;
  }
  return 0.0;
}

std::vector<double> TestFunction::kinks() const {
  if (kind == Kind::abs_shift || kind == Kind::indicator) return {param};
  return {};
}

std::string TestFunction::label() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::identity: os << "identity"; break;
    case Kind::abs_shift: os << "abs(x-" << param << ")"; break;
    case Kind::indicator: os << "indicator(x<=" << param << ")"; break;
    case Kind::constant: os << "constant(" << param << ")"; break;
  }
  return os.str();
}

double mean_h(const DiffusionDensity& d, const TestFunction& h) {
  switch (h.kind) {
    case TestFunction::Kind::identity: return raw_moment(d, 1);
    case TestFunction::Kind::abs_shift: {
      double c = h.param;
      return -d.integral(-kInf, c, 1, -c) + d.integral(c, kInf, 1, -c);
    }
    case TestFunction::Kind::indicator: return d.cdf(h.param);
    case TestFunction::Kind::constant: return h.param;
  }
  return 0.0;
}

PoissonSolution::PoissonSolution(DiffusionDensity d, TestFunction h)
    : d_(std::move(d)), h_(h), h_mean_(mean_h(d_, h_)), switch_(d_.mode()) {}

void PoissonSolution::check_range(double x) const {
  if (!std::isfinite(x) || d_.log_pdf(x) < kMinLogPdf)
    throw std::range_error("Poisson solution evaluated outside the supported range");
}

double PoissonSolution::weighted(double lo, double hi, double ref) const {
  // On each linear piece E h - h(y) = s (y + shift).
  auto piece = [&](double a, double b, double s, double shift) {
    if (!(a < b) || s == 0.0) return 0.0;
    return s * d_.ratio_moments(a, b, ref, 1, shift)[1];
  };
  switch (h_.kind) {
    case TestFunction::Kind::identity: return piece(lo, hi, -1.0, -h_mean_);
    case TestFunction::Kind::abs_shift: {
      double c = h_.param;
      return piece(lo, std::min(hi, c), 1.0, -(c - h_mean_)) +
             piece(std::max(lo, c), hi, -1.0, -(c + h_mean_));
    }
    case TestFunction::Kind::constant: return 0.0;
    case TestFunction::Kind::indicator: {
      double a = h_.param;
      double below = std::min(hi, a) > lo ? d_.ratio_moments(lo, std::min(hi, a), ref, 0)[0] : 0.0;
      double above = hi > std::max(lo, a) ? d_.ratio_moments(std::max(lo, a), hi, ref, 0)[0] : 0.0;
      return (h_mean_ - 1.0) * below + h_mean_ * above;
    }
  }
  return 0.0;
}

namespace {
// -F(min(x, a)) S(max(x, a)) / (mu nu(x)), in logs.
double indicator_fprime(const DiffusionDensity& d, double a, double x) {
  double lo = std::min(x, a), hi = std::max(x, a);
  double l = d.log_cdf(lo) + d.log_sf(hi) - d.log_pdf(x);
  return -std::exp(l) / d.mu();
}
}  // namespace

double PoissonSolution::f_prime_left(double x) const {
  check_range(x);
  if (h_.kind == TestFunction::Kind::indicator) return indicator_fprime(d_, h_.param, x);
  return weighted(-kInf, x, x) / d_.mu();
}

double PoissonSolution::f_prime_right(double x) const {
  check_range(x);
  if (h_.kind == TestFunction::Kind::indicator) return indicator_fprime(d_, h_.param, x);
  return -weighted(x, kInf, x) / d_.mu();
}

double PoissonSolution::f_prime(double x) const {
  return x <= switch_ ? f_prime_left(x) : f_prime_right(x);
}

double PoissonSolution::f_second(double x) const {
  double fp = f_prime(x);
  return (h_mean_ - h_(x) - d_.drift(x) * fp) / d_.mu();
}

double PoissonSolution::f_third(double x) const {
  if (!h_.lipschitz()) throw std::domain_error("f''' needs a Lipschitz test function");
  if (x == -d_.zeta()) throw std::domain_error("f''' is undefined at the drift kink");
  for (double k : h_.kinks())
    if (x == k) throw std::domain_error("f''' is undefined at a kink of h");
  double fp = f_prime(x);
  double fs = (h_mean_ - h_(x) - d_.drift(x) * fp) / d_.mu();
  return (-h_.slope(x) - fs * d_.drift(x) - fp * d_.drift_slope(x)) / d_.mu();
}

std::vector<double> PoissonSolution::breaks() const {
  std::vector<double> out{-d_.zeta()};
  for (double k : h_.kinks()) out.push_back(k);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double PoissonSolution::f(double x) const {
  if (x == 0.0) return 0.0;
  std::vector<double> br = breaks();
  br.push_back(switch_);
  double lo = std::min(0.0, x), hi = std::max(0.0, x);
  double v = num::integrate([this](double y) { return f_prime(y); }, lo, hi, br);
  return x > 0.0 ? v : -v;
}

const char* suite_name(GradientSuite s) {
  switch (s) {
    case GradientSuite::wasserstein_C: return "wasserstein_C";
    case GradientSuite::kolmogorov_C: return "kolmogorov_C";
    case GradientSuite::kolmogorov_A: return "kolmogorov_A";
    case GradientSuite::wasserstein_A: return "wasserstein_A";
  }
  return "unknown";
}

std::vector<double> indicator_anchors(double zeta) {
  return {-zeta - 1.0, -zeta, 0.0, -zeta + 1.0};
}

std::vector<double> gradient_sample_points(const DiscreteStationary& pmf,
                                           const DiffusionDensity& d, int count) {
  const double j = -d.zeta();
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(count) + static_cast<std::size_t>(pmf.size()) + 8);
  for (int i = 0; i < count; ++i) {
    double t = count > 1 ? static_cast<double>(i) / (count - 1) : 0.5;
    xs.push_back(j - 10.0 + 20.0 * t);
  }
  xs.push_back(j);
  xs.push_back(0.0);
  for (long k = 0; k < pmf.size(); ++k) xs.push_back(pmf.x(k));
  for (double a : indicator_anchors(d.zeta())) xs.push_back(a);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  xs.erase(std::remove_if(xs.begin(), xs.end(),
                          [&d](double x) { return d.log_pdf(x) < kMinLogPdf; }),
           xs.end());
  return xs;
}

namespace {

// Running maximum of lhs/bound or of lhs against a fixed bound.
struct Row {
  std::string name;
  double bound = 1.0;
  bool ratio = false;     // observed is max lhs / bound(x)
  bool verdict = true;    // false: implied constant only
  double observed = 0.0;
  bool seen = false;

  void add(double lhs, double b) {
    seen = true;
    double v = ratio ? (b == kInf ? 0.0 : std::abs(lhs) / b) : std::abs(lhs);
    if (std::isnan(v)) v = kInf;
    observed = std::max(observed, v);
  }
  BoundCheck result() const {
    if (!verdict) return {name, observed, 0.0, std::nullopt};
    return check(name, observed, bound);
  }
};

struct Table {
  std::vector<Row> rows;
  Row& fixed(const std::string& n, double b) { return find(n, b, false, true); }
  Row& ratio(const std::string& n) { return find(n, 1.0, true, true); }
  Row& implied(const std::string& n) { return find(n, 0.0, true, false); }
  Row& find(const std::string& n, double b, bool r, bool v) {
    for (auto& row : rows)
      if (row.name == n) return row;
    rows.push_back({n, b, r, v});
    return rows.back();
  }
  std::vector<BoundCheck> out() const {
    std::vector<BoundCheck> v;
    for (const auto& r : rows)
      if (r.seen) v.push_back(r.result());
    return v;
  }
};

// Density-only integrals, each relative to nu(x).
struct Ratios {
  const DiffusionDensity& d;
  double below(double x) const { return d.ratio_moments(-kInf, x, x, 0)[0]; }
  double above(double x) const { return d.ratio_moments(x, kInf, x, 0)[0]; }
  double abs_below(double x) const {
    if (x <= 0.0) return -d.ratio_moments(-kInf, x, x, 1)[1];
    return -d.ratio_moments(-kInf, 0.0, x, 1)[1] + d.ratio_moments(0.0, x, x, 1)[1];
  }
  double abs_above(double x) const {
    if (x >= 0.0) return d.ratio_moments(x, kInf, x, 1)[1];
    return -d.ratio_moments(x, 0.0, x, 1)[1] + d.ratio_moments(0.0, kInf, x, 1)[1];
  }
  double abs_mean() const { return moment(d, 1); }
};

void lipschitz_suite(const std::vector<double>& xs, const DiffusionDensity& d,
                     const std::vector<TestFunction>& hs, bool erlang_c, Table& t) {
  const double mu = d.mu(), al = d.alpha(), z = d.zeta(), J = -z;
  const double az = std::abs(z);
  const double inv_az = az > 0.0 ? 1.0 / az : kInf;
  for (const auto& h : hs) {
    PoissonSolution sol(d, h);
    for (double x : xs) {
      double f1 = sol.f_prime(x);
      double f2 = sol.f_second(x);
      bool smooth = x != J;
      for (double k : h.kinks()) smooth = smooth && x != k;
      double f3 = smooth ? sol.f_third(x) : 0.0;
      if (erlang_c) {
        if (x <= J) {
          t.fixed("wc_fprime_left", (6.5 + 4.2 * inv_az) / mu).add(f1, 0);
          t.fixed("wc_fsecond_left", 32.0 * (1.0 + inv_az) / mu).add(f2, 0);
          if (smooth) t.fixed("wc_fthird_left", (23.0 + 13.0 * inv_az) / mu).add(f3, 0);
        }
        if (x >= J) {
          t.ratio("wc_fprime_right").add(f1, (x + 1.0 + 2.0 * inv_az) / (mu * az));
          t.fixed("wc_fsecond_right", 1.0 / (mu * az)).add(f2, 0);
          if (smooth) t.fixed("wc_fthird_right", 2.0 / mu).add(f3, 0);
        }
        continue;
      }
      // Shapes with an unstated constant: report max mu |f^(j)| / shape.
      const double ma = mu / al, am = al / mu;
      const double g = am + std::sqrt(am) + 1.0;
      if (z <= 0.0) {
        const double w = std::min(std::sqrt(ma), inv_az);
        if (x <= J) t.implied("gwu1_left").add(mu * f1, w + 1.0);
        if (x >= J) t.implied("gwu1_right").add(mu * f1, ma + w + 1.0);
        if (x <= 0.0) t.implied("gwu2_below_zero").add(mu * f2, w + 1.0);
        if (x >= 0.0 && x <= J) t.implied("gwu2_middle").add(mu * f2, g * w + 1.0);
        if (x >= J) t.implied("gwu2_right").add(mu * f2, g * w);
        if (smooth) {
          if (x <= 0.0) t.implied("gwu3_below_zero").add(mu * f3, w + 1.0);
          if (x >= 0.0 && x <= J) t.implied("gwu3_middle").add(mu * f3, w + g);
          if (x >= J) t.implied("gwu3_right").add(mu * f3, g);
        }
      } else {
        const double zm = std::min(z, ma);
        const double base = 1.0 + std::sqrt(ma);
        if (x <= J) {
          t.implied("gwo1_left").add(mu * f1, base + zm);
          t.implied("gwo2_left").add(mu * f2, base + zm);
          if (smooth) t.implied("gwo3").add(mu * f3, base + zm);
        }
        if (x >= J) {
          t.implied("gwo1_right").add(mu * f1, base + ma);
          t.implied("gwo2_right").add(mu * f2, g * std::abs(x) + base);
          if (smooth) {
            t.implied("gwo41").add(mu * f3, g * (1.0 + am * x * x) + (am + std::sqrt(am)) * std::abs(x));
            t.implied("gwo42").add(mu * f3, g + g * g * std::abs(x));
          }
        }
      }
    }
  }
}

void indicator_suite(const std::vector<double>& xs, const DiffusionDensity& d, Table& t) {
  const double mu = d.mu(), al = d.alpha(), z = d.zeta(), J = -z;
  const double az = std::abs(z);
  const double inv_az = az > 0.0 ? 1.0 / az : kInf;
  const double sqpi2 = std::sqrt(M_PI / 2.0);
  for (double a : indicator_anchors(z)) {
    PoissonSolution sol(d, TestFunction::indicator(a));
    for (double x : xs) {
      double f1 = sol.f_prime(x);
      double f2 = sol.f_second(x);
      if (d.regime() == Regime::erlang_c) {
        if (x <= J) t.fixed("kc_fprime_left", 5.0 / mu).add(f1, 0);
        if (x >= J) t.fixed("kc_fprime_right", 1.0 / (mu * az)).add(f1, 0);
        t.fixed("kc_fsecond", 3.0 / mu).add(f2, 0);
      } else if (d.regime() == Regime::erlang_a_under) {
        if (x <= J) t.fixed("ka_under_fprime_left", std::sqrt(2.0 * M_PI) * std::exp(0.5) / mu).add(f1, 0);
        if (x >= J)
          t.fixed("ka_under_fprime_right", std::min(std::sqrt(M_PI / 2.0 * mu / al), inv_az) / mu)
              .add(f1, 0);
        t.fixed("ka_fsecond", 3.0 / mu).add(f2, 0);
      } else {
        if (x <= J) t.fixed("ka_over_fprime_left", sqpi2 / mu).add(f1, 0);
        if (x >= J)
          t.fixed("ka_over_fprime_right", sqpi2 * (1.0 + std::sqrt(mu / al)) / mu).add(f1, 0);
        t.fixed("ka_fsecond", 3.0 / mu).add(f2, 0);
      }
    }
  }
}

// Auxiliary integral bounds of the Erlang-C density.
void erlang_c_aux(const std::vector<double>& xs, const DiffusionDensity& d, Table& t) {
  Ratios r{d};
  const double mu = d.mu(), z = d.zeta(), J = -z, az = std::abs(z);
  const double ez = std::exp(0.5 * z * z);
  for (double x : xs) {
    double b = std::abs(d.drift(x)) / mu;
    if (x <= 0.0) {
      t.fixed("fbound1_nonpositive", std::sqrt(M_PI / 2.0)).add(r.below(x), 0);
      t.fixed("fbound3_nonpositive", 1.0).add(r.abs_below(x), 0);
      t.fixed("fbound5", 1.0).add(b * r.below(x), 0);
    }
    if (x >= 0.0 && x <= J) {
      t.ratio("fbound1_middle").add(r.below(x), std::sqrt(2.0 * M_PI) * ez);
      t.fixed("fbound2_middle", std::sqrt(M_PI / 2.0) + 1.0 / az).add(r.above(x), 0);
      t.ratio("fbound3_middle").add(r.abs_below(x), 2.0 * ez - 1.0);
      t.fixed("fbound4_middle", 2.0 + 1.0 / (z * z)).add(r.abs_above(x), 0);
    }
    if (x >= J) {
      t.fixed("fbound2_right", 1.0 / az).add(r.above(x), 0);
      t.ratio("fbound4_right").add(r.abs_above(x), x / az + 1.0 / (z * z));
    }
    if (x >= 0.0) t.fixed("fbound6", 2.0).add(b * r.above(x), 0);
  }
  t.fixed("fbound7", 1.0 / az + 1.0).add(r.abs_mean(), 0);
}

void erlang_a_aux(const std::vector<double>& xs, const DiffusionDensity& d, Table& t) {
  Ratios r{d};
  const double mu = d.mu(), al = d.alpha(), z = d.zeta(), J = -z, az = std::abs(z);
  const double ma = mu / al;
  const double sqpi2 = std::sqrt(M_PI / 2.0);
  const double inv_az = az > 0.0 ? 1.0 / az : kInf;
  for (double x : xs) {
    double b = std::abs(d.drift(x)) / mu;
    if (z <= 0.0) {
      const double ez = std::exp(0.5 * z * z);
      const double w = std::min(std::sqrt(M_PI / 2.0 * ma), inv_az);
      if (x <= 0.0) {
        t.fixed("ingredient1_nonpositive", sqpi2).add(r.below(x), 0);
        t.fixed("ingredient3_nonpositive", 1.0).add(r.abs_below(x), 0);
        t.fixed("ingredient6", 1.0).add(b * r.below(x), 0);
      }
      if (x >= 0.0 && x <= J) {
        t.ratio("ingredient1_middle").add(r.below(x), std::sqrt(2.0 * M_PI) * ez);
        t.fixed("ingredient2_middle", sqpi2 + w).add(r.above(x), 0);
        t.ratio("ingredient3_middle").add(r.abs_below(x), 2.0 * ez - 1.0);
        t.ratio("ingredient4_middle").add(r.abs_above(x), 2.0 + 1.0 / (z * z));
      }
      if (x >= J) {
        t.fixed("ingredient2_right", w).add(r.above(x), 0);
        t.fixed("ingredient4_right", 1.0 + ma).add(r.abs_above(x), 0);
      }
      if (x >= 0.0) t.fixed("ingredient7", 2.0).add(b * r.above(x), 0);
    } else {
      const double e = std::exp(al * z * z / (2.0 * mu));
      if (x <= J) {
        t.fixed("oingredient1_left", std::min(sqpi2, ma / z)).add(r.below(x), 0);
        t.fixed("oingredient3_left", 1.0 + std::min(sqpi2 * z, ma)).add(r.abs_below(x), 0);
      }
      if (x >= J && x <= 0.0) {
        t.fixed("oingredient1_middle", sqpi2 + std::min(std::sqrt(M_PI / 2.0 * ma), z))
            .add(r.below(x), 0);
        t.ratio("oingredient2_middle").add(r.above(x), std::sqrt(2.0 * M_PI * ma) * e);
        t.fixed("oingredient3_middle", ma + 1.0).add(r.abs_below(x), 0);
        t.ratio("oingredient4_middle").add(r.abs_above(x), 2.0 * ma * e);
      }
      if (x >= 0.0) {
        t.fixed("oingredient2_right", std::sqrt(M_PI / 2.0 * ma)).add(r.above(x), 0);
        t.fixed("oingredient4_right", ma).add(r.abs_above(x), 0);
        t.fixed("oingredient7", 1.0).add(b * r.above(x), 0);
      }
      if (x <= 0.0) t.fixed("oingredient6", 2.0).add(b * r.below(x), 0);
    }
  }
  if (z <= 0.0)
    t.fixed("ingredient5", 1.0 + std::min(std::sqrt(ma), inv_az)).add(r.abs_mean(), 0);
  else
    t.fixed("oingredient5", std::sqrt(ma) + 1.0).add(r.abs_mean(), 0);
}

}  // namespace

std::vector<BoundCheck> gradient_bound_report(const DiscreteStationary& pmf, GradientSuite suite,
                                              int count) {
  const auto& p = pmf.params();
  DiffusionDensity d = build_density(p, pmf.derived());
  const bool c = d.regime() == Regime::erlang_c;
  if ((suite == GradientSuite::wasserstein_C || suite == GradientSuite::kolmogorov_C) && !c)
    throw std::invalid_argument(std::string(suite_name(suite)) + " needs an Erlang-C model");
  if ((suite == GradientSuite::wasserstein_A || suite == GradientSuite::kolmogorov_A) && c)
    throw std::invalid_argument(std::string(suite_name(suite)) + " needs an Erlang-A model");

  std::vector<double> xs = gradient_sample_points(pmf, d, count);
  Table t;
  std::vector<TestFunction> hs{TestFunction::identity()};
  for (double a : indicator_anchors(d.zeta())) hs.push_back(TestFunction::abs_shift(a));
  switch (suite) {
    case GradientSuite::wasserstein_C:
      lipschitz_suite(xs, d, hs, true, t);
      erlang_c_aux(xs, d, t);
      break;
    case GradientSuite::wasserstein_A:
      lipschitz_suite(xs, d, hs, false, t);
      erlang_a_aux(xs, d, t);
      break;
    case GradientSuite::kolmogorov_C:
    case GradientSuite::kolmogorov_A:
      indicator_suite(xs, d, t);
      break;
  }
  return t.out();
}

}  // namespace erlang
