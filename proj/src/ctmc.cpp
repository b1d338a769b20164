#include "erlang/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "erlang/numeric.hpp"

namespace erlang {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log of sum_{i>=1} r^i (a + i delta)^m, r = exp(-c): integral plus peak term
// of the unimodal summand.
double log_geometric_power_tail(double a, double delta, double c, int m) {
  long double beta = static_cast<long double>(delta) / c;
  long double la = a > 0.0 ? std::log(static_cast<long double>(a)) : -INFINITY;
  long double lbeta = std::log(beta);
  long double acc = -INFINITY;
  long double lfact_ratio = 0.0L;  // log(m!/j!) for j = m downwards
  for (int j = m; j >= 0; --j) {
    if (j < m) lfact_ratio += std::log(static_cast<long double>(j + 1));
    long double term = lfact_ratio + (m + 1 - j) * lbeta + (j == 0 ? 0.0L : j * la);
    if (j > 0 && a <= 0.0) continue;
    acc = acc == -INFINITY ? term
                           : std::max(acc, term) +
                                 std::log1p(std::exp(-std::fabs(acc - term)));
  }
  long double lint = acc - std::log(static_cast<long double>(delta));
  long double lpeak;
  if (m == 0) {
    lpeak = 0.0L;
  } else if (m * beta <= a) {
    lpeak = m * la;
  } else {
    lpeak = m * std::log(m * beta) - (m * beta - a) / beta;
  }
  long double hi = std::max(lint, lpeak);
  return static_cast<double>(hi + std::log1p(std::exp(-std::fabs(lint - lpeak))));
}

}  // namespace

DiscreteStationary::DiscreteStationary(const ModelParams& p, const StationaryOptions& opt)
    : params_(p), derived_(derive(p)) {
  if (!(opt.tail_tol > 0.0 && opt.tail_tol < 1.0))
    throw std::invalid_argument("tail_tol must lie in (0, 1)");
  const double log_tol = std::log(opt.tail_tol);
  const int m = opt.certify_order;

  // Anchor the log weights at the pmf mode k*, d(k*) <= lambda <= d(k*+1), so
  // the accumulated values stay small where the mass is.
  long k_star = 0;
  while (departure_rate(p, k_star + 1) < p.lambda) ++k_star;
  std::vector<double> lw(static_cast<std::size_t>(k_star) + 1, 0.0);
  for (long k = k_star; k > 0; --k)
    lw[k - 1] = lw[k] - std::log(p.lambda / departure_rate(p, k));
  double log_z = kNegInf;
  double log_mom = kNegInf;
  for (long k = 0; k <= k_star; ++k) {
    log_z = num::logaddexp(log_z, lw[k]);
    double ax = std::abs(x(k));
    if (m > 0 && ax > 0.0) log_mom = num::logaddexp(log_mom, lw[k] + m * std::log(ax));
  }
  for (long k = k_star;; ++k) {
    double d_next = departure_rate(p, k + 1);
    double r = p.lambda / d_next;
    if (r < 1.0) {
      double log_tail = lw[k] + std::log(r / (1.0 - r)) - log_z;
      bool done = log_tail <= log_tol;
      if (done && m > 0) {
        double a = std::abs(x(k)) + std::abs(derived_.zeta);
        double lt = lw[k] + log_geometric_power_tail(a, derived_.delta, -std::log(r), m);
        done = lt - log_mom <= std::log(1e-12);
      }
      if (done) {
        tail_ratio_ = r;
        break;
      }
    }
    if (lw.size() >= opt.max_states)
      throw std::runtime_error("stationary pmf needs more than max_states states");
    double next = lw[k] + std::log(r);
    lw.push_back(next);
    log_z = num::logaddexp(log_z, next);
    if (m > 0) {
      double ax = std::abs(x(k + 1));
      if (ax > 0.0) log_mom = num::logaddexp(log_mom, next + m * std::log(ax));
    }
  }

  const std::size_t size = lw.size();
  double top = *std::max_element(lw.begin(), lw.end());
  std::vector<double> w(size);
  for (std::size_t k = 0; k < size; ++k) w[k] = std::exp(lw[k] - top);
  double z = num::ordered_sum(w);
  double log_norm = top + std::log(z);
  log_pmf_.resize(size);
  pmf_.resize(size);
  for (std::size_t k = 0; k < size; ++k) {
    log_pmf_[k] = lw[k] - log_norm;
    pmf_[k] = w[k] / z;
  }
  tail_bound_ = std::exp(lw[size - 1] - log_norm) * tail_ratio_ / (1.0 - tail_ratio_);

  cum_.resize(size);
  tail_.resize(size);
  num::CompensatedSum s;
  for (std::size_t k = 0; k < size; ++k) {
    s.add(pmf_[k]);
    cum_[k] = s.value();
  }
  num::CompensatedSum t;
  for (std::size_t k = size; k-- > 0;) {
    tail_[k] = t.value();
    t.add(pmf_[k]);
  }
}

double DiscreteStationary::cdf(long k) const {
  if (k < 0) return 0.0;
  if (k >= size()) return 1.0;
  return cum_[k];
}

double DiscreteStationary::sf(long k) const {
  if (k < 0) return 1.0;
  if (k >= size()) return 0.0;
  return tail_[k];
}

long DiscreteStationary::mode_index() const {
  Eigen::Index idx = 0;
  log_pmf_.maxCoeff(&idx);
  return static_cast<long>(idx);
}

DiscreteStationary stationary_pmf(const ModelParams& p, double tail_tol) {
  StationaryOptions opt;
  opt.tail_tol = tail_tol;
  return DiscreteStationary(p, opt);
}

bool in_region(const DiscreteStationary& d, long k, Region r) {
  const long n = d.params().n;
  switch (r) {
    case Region::all: return true;
    case Region::at_or_below: return k <= n;
    case Region::below: return k < n;
    case Region::at_or_above: return k >= n;
    case Region::above: return k > n;
  }
  return false;
}

double tail_moment_bound(const DiscreteStationary& d, int m, double extra) {
  long K = d.k_max();
  double a = std::abs(d.x(K)) + extra;
  double c = -std::log(d.tail_ratio());
  return std::exp(d.log_prob(K) + log_geometric_power_tail(a, d.derived().delta, c, m));
}

namespace {

MomentEstimate accumulate(const DiscreteStationary& d, int m, Region r, Shift s,
                          bool absolute) {
  if (m < 0 || m > 20) throw std::invalid_argument("moment order must lie in [0, 20]");
  const double shift = s == Shift::plus_zeta ? d.derived().zeta : 0.0;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(d.size()));
  double scale = 0.0;
  for (long k = 0; k < d.size(); ++k) {
    if (!in_region(d, k, r)) continue;
    double g = d.x(k) + shift;
    if (k == d.params().n && s == Shift::plus_zeta) g = 0.0;
    double v = m == 0 ? 1.0 : std::pow(absolute ? std::abs(g) : g, m);
    terms.push_back(d.prob(k) * v);
    scale += std::abs(terms.back());
  }
  MomentEstimate out;
  out.value = num::ordered_sum(std::move(terms));
  out.scale = scale;
  bool has_tail = r == Region::all || r == Region::at_or_above || r == Region::above ||
                  d.k_max() < d.params().n;
  if (has_tail) out.tail = tail_moment_bound(d, m, std::abs(shift));
  return out;
}

double certified(const MomentEstimate& e) {
  // Signed moments can cancel; measure against the absolute moment.
  if (e.tail > 1e-8 * e.scale && e.tail > 1e-300)
    throw std::runtime_error("truncated tail may perturb the moment beyond 1e-8 relative; "
                             "rebuild the pmf with a higher certify_order");
  return e.value;
}

}  // namespace

MomentEstimate moment_estimate(const DiscreteStationary& d, int m, Region r, Shift s) {
  return accumulate(d, m, r, s, true);
}

double moment(const DiscreteStationary& d, int m, Region r, Shift s) {
  return certified(accumulate(d, m, r, s, true));
}

double raw_moment(const DiscreteStationary& d, int m) {
  return certified(accumulate(d, m, Region::all, Shift::none, false));
}

double probability(const DiscreteStationary& d, Region r) {
  return certified(accumulate(d, 0, r, Shift::none, true));
}

double apply_generator(const ModelParams& p, const DerivedQuantities& dq,
                       const GridFunction& f, long k) {
  double x = scaled_state(dq, k);
  double fx = f(x);
  double out = p.lambda * (f(x + dq.delta) - fx);
  double dk = departure_rate(p, k);
  if (dk != 0.0) out += dk * (f(x - dq.delta) - fx);
  return out;
}

double apply_generator_derivative(const ModelParams& p, const DerivedQuantities& dq,
                                  const GridFunction& fprime, long k,
                                  const std::vector<double>& breaks) {
  double x = scaled_state(dq, k);
  double up = num::integrate(fprime, x, x + dq.delta, breaks);
  double out = p.lambda * up;
  double dk = departure_rate(p, k);
  if (dk != 0.0) out -= dk * num::integrate(fprime, x - dq.delta, x, breaks);
  return out;
}

namespace {

Residual summed_generator(const DiscreteStationary& d, const std::function<double(long)>& gen,
                          double last_jump) {
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(d.size()));
  double abs_sum = 0.0;
  for (long k = 0; k < d.size(); ++k) {
    // Underflowed states add nothing, and f may not be evaluable out there.
    if (d.prob(k) == 0.0) continue;
    double v = d.prob(k) * gen(k);
    terms.push_back(v);
    abs_sum += std::abs(v);
  }
  Residual res;
  res.value = std::abs(num::ordered_sum(std::move(terms)));
  // The last state's upward flow has no partner inside the truncation.
  res.tolerance = d.params().lambda * d.prob(d.k_max()) * std::abs(last_jump) +
                  1e-14 * abs_sum;
  return res;
}

}  // namespace

Residual stein_identity_residual(const DiscreteStationary& d, const GridFunction& f) {
  const auto& p = d.params();
  const auto& dq = d.derived();
  double xk = d.x(d.k_max());
  return summed_generator(
      d, [&](long k) { return apply_generator(p, dq, f, k); }, f(xk + dq.delta) - f(xk));
}

Residual stein_identity_residual_derivative(const DiscreteStationary& d,
                                            const GridFunction& fprime,
                                            const std::vector<double>& breaks) {
  const auto& p = d.params();
  const auto& dq = d.derived();
  double xk = d.x(d.k_max());
  return summed_generator(
      d, [&](long k) { return apply_generator_derivative(p, dq, fprime, k, breaks); },
      num::integrate(fprime, xk, xk + dq.delta, breaks));
}

std::vector<BoundCheck> moment_bound_report(const DiscreteStationary& d) {
  const auto& p = d.params();
  const auto& q = d.derived();
  const double dl = q.delta;
  const double dl2 = dl * dl;
  const double z = std::abs(q.zeta);
  const double inv_z = z > 0.0 ? 1.0 / z : std::numeric_limits<double>::infinity();
  std::vector<BoundCheck> rows;
  // Left sides are upper estimates: truncated sum plus its certified tail.
  auto moment = [&d](int m, Region r, Shift s = Shift::none) {
    auto e = moment_estimate(d, m, r, s);
    return e.value + e.tail;
  };
  auto probability = [&moment](Region r) { return moment(0, r); };

  const double below1 = moment(1, Region::at_or_below);
  const double below2 = moment(2, Region::at_or_below);
  const double above1 = moment(1, Region::at_or_above);
  const double idle = probability(Region::at_or_below);

  if (q.regime == Regime::erlang_c) {
    const double k2 = 4.0 / 3.0 + 2.0 * dl2 / 3.0;
    rows.push_back(check("xsquaredelta", below2, k2));
    rows.push_back(check("xminusdelta", below1, std::sqrt(k2)));
    rows.push_back(check("xminuszeta", below1, 2.0 * z));
    rows.push_back(check("xplus", above1, 1.0 / z + dl2 / (4.0 * z) + dl / 2.0));
    rows.push_back(check("idle_prob", idle, (2.0 + dl) * z));
    if (dl <= 1.0)
      rows.push_back(check("xplusbound", z * probability(Region::at_or_above), 1.75));
    double idle_expect = moment(1, Region::at_or_below, Shift::plus_zeta);
    rows.push_back(check("idle_expect_identity", std::abs(idle_expect - z),
                         1e-9 * std::max(1.0, z)));
    return rows;
  }

  const double am = p.alpha / p.mu;
  const double ma = p.mu / p.alpha;
  if (q.regime == Regime::erlang_a_under) {
    const double A = (am * dl2 + dl2 + 4.0) / 3.0;
    const double B = (ma * dl2 + 4.0 * ma + dl2) / 3.0;
    rows.push_back(check("mwuK1", below2, A));
    rows.push_back(check("mwu1", below1, std::sqrt(A)));
    rows.push_back(check("mwu2", below1, 2.0 * z + am * std::sqrt(B)));
    rows.push_back(check("mwu3", above1,
                         (1.0 + dl2 / 4.0 + dl / 2.0 * std::sqrt(A)) *
                             std::min(p.mu / std::min(p.mu, p.alpha), inv_z)));
    const double sh1 = moment(1, Region::at_or_above, Shift::plus_zeta);
    rows.push_back(check("mwuK2", moment(2, Region::at_or_above, Shift::plus_zeta), B));
    rows.push_back(check("mwu4", sh1, std::sqrt(B)));
    rows.push_back(check("mwu5", sh1, inv_z * (dl2 / 4.0 * am + dl2 / 4.0 + 1.0)));
    rows.push_back(check("mwu6", idle, (2.0 + dl) * (z + am * std::sqrt(B))));
    return rows;
  }

  const double C = (dl2 + 4.0 * ma) / 3.0;
  const double sh1 = moment(1, Region::at_or_below, Shift::plus_zeta);
  rows.push_back(check("mwo7", below1,
                       std::sqrt((p.alpha * dl2 / 4.0 + p.mu) / std::min(p.alpha, p.mu))));
  rows.push_back(check("mwo8", below1, inv_z * (dl2 / 4.0 + ma)));
  rows.push_back(check("mwo2", moment(2, Region::at_or_above), C));
  rows.push_back(check("mwo1", above1, std::sqrt(C)));
  rows.push_back(check("mwo3", sh1, inv_z * (dl2 / 4.0 + 1.0)));
  rows.push_back(check("mwoK1", moment(2, Region::at_or_below, Shift::plus_zeta),
                       dl2 / 4.0 * am + 1.0));
  rows.push_back(check("mwo4", sh1, std::sqrt(dl2 / 4.0 * am + 1.0)));
  rows.push_back(check("mwo5", sh1, am * std::sqrt(C)));
  rows.push_back(check("mwo10", idle,
                       (3.0 + dl) * 16.0 / std::sqrt(2.0) * (dl2 / 4.0 + 1.0) *
                           std::min(std::max(inv_z, am), std::sqrt(am))));
  return rows;
}

std::vector<double> idle_probability_monotone(int n, double mu, double alpha,
                                              const std::vector<double>& lambdas) {
  std::vector<double> out;
  out.reserve(lambdas.size());
  for (double lam : lambdas) {
    DiscreteStationary d(ModelParams{lam, mu, n, alpha});
    out.push_back(d.cdf(n));
  }
  return out;
}

}  // namespace erlang
