#include "erlang/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>

#include "erlang/numeric.hpp"

namespace erlang {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Distribution functions of Y at x, kept in whichever form is accurate.
struct Level {
  double F = 0.0;
  double S = 1.0;
};

Level level(const DiffusionDensity& d, double x) {
  Level l;
  if (x <= d.mode()) {
    l.F = d.cdf(x);
    l.S = 1.0 - l.F;
  } else {
    l.S = d.sf(x);
    l.F = 1.0 - l.S;
  }
  return l;
}

// c - F(x) with c = 1 - s, choosing the form with small operands.
double gap(double c, double s, const Level& y) { return c <= 0.5 ? c - y.F : y.S - s; }
}  // namespace

double kolmogorov_distance(const DiscreteStationary& pmf, const DiffusionDensity& d) {
  const long K = pmf.k_max();
  std::vector<Level> at(static_cast<std::size_t>(K) + 1);
  for (long k = 0; k <= K; ++k) at[k] = level(d, pmf.x(k));
  // Left of x_0 the chain cdf is 0.
  double best = at[0].F;
  for (long k = 0; k <= K; ++k) {
    double c = pmf.cdf(k), s = pmf.sf(k);
    best = std::max(best, std::abs(gap(c, s, at[k])));
    if (k < K) best = std::max(best, std::abs(gap(c, s, at[k + 1])));
  }
  // Beyond x_K the chain cdf is 1 and F_Y climbs from F(x_K) to 1.
  best = std::max(best, pmf.sf(K));
  return std::min(best, 1.0);
}

double wasserstein_distance(const DiscreteStationary& pmf, const DiffusionDensity& d) {
  const long K = pmf.k_max();
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(K) + 2);
  // integral over (-inf, x_0) of F_Y, and over (x_K, inf) of S_Y.
  const double x0 = pmf.x(0), xK = pmf.x(K);
  terms.push_back(-d.integral(-kInf, x0, 1, -x0));
  terms.push_back(d.integral(xK, kInf, 1, -xK));
  Level lu = level(d, x0);
  for (long k = 0; k < K; ++k) {
    const double u = pmf.x(k), v = pmf.x(k + 1);
    const double c = pmf.cdf(k), s = pmf.sf(k);
    Level lv = level(d, v);
    double above_u = -gap(c, s, lu);  // F(u) - c
    double below_v = gap(c, s, lv);   // c - F(v)
    double cell;
    if (above_u >= 0.0) {
      cell = (v - u) * above_u - d.integral(u, v, 1, -v);
    } else if (below_v >= 0.0) {
      cell = (v - u) * below_v + d.integral(u, v, 1, -u);
    } else {
      double t = c <= 0.5 ? d.inverse_cdf(c) : d.inverse_sf(s);
      t = std::clamp(t, u, v);
      cell = d.integral(u, t, 1, -u) - d.integral(t, v, 1, -v);
    }
    terms.push_back(cell);
    lu = lv;
  }
  return num::ordered_sum(std::move(terms));
}

DistanceReport distance_report(const DiscreteStationary& pmf, const DiffusionDensity& d) {
  DistanceReport r;
  r.d_w = wasserstein_distance(pmf, d);
  r.d_k = kolmogorov_distance(pmf, d);
  r.delta = pmf.derived().delta;
  if (d.regime() == Regime::erlang_c) {
    r.bound_w = 205.0 * r.delta;
    r.bound_k = 188.0 * r.delta;
  }
  r.ratio_w = r.d_w / r.delta;
  r.ratio_k = r.d_k / r.delta;
  r.density_sup = d.sup();
  r.dw_dk_consistent = within_bound(r.d_k, std::sqrt(2.0 * r.density_sup * r.d_w));
  return r;
}

namespace {
// E X~ = factor * E(X~ + zeta)^{+/-}; the factor is shared with the diffusion.
double mean_factor(double mu, double alpha, double zeta) {
  return zeta <= 0.0 ? 1.0 - alpha / mu : mu / alpha - 1.0;
}
}  // namespace

double scaled_mean(const DiscreteStationary& pmf) {
  const auto& p = pmf.params();
  const double z = pmf.derived().zeta;
  const double f = mean_factor(p.mu, p.alpha, z);
  if (f == 0.0) return 0.0;
  Region r = z <= 0.0 ? Region::above : Region::below;
  return f * moment_estimate(pmf, 1, r, Shift::plus_zeta).value;
}

double scaled_mean(const DiffusionDensity& d) {
  const double z = d.zeta();
  const double f = mean_factor(d.mu(), d.alpha(), z);
  if (f == 0.0) return 0.0;
  Region r = z <= 0.0 ? Region::above : Region::below;
  return f * moment(d, 1, r, Shift::plus_zeta);
}

double mean_error(const DiscreteStationary& pmf, const DiffusionDensity& d) {
  const auto& p = pmf.params();
  const double z = pmf.derived().zeta;
  const double f = mean_factor(p.mu, p.alpha, z);
  Region r = z <= 0.0 ? Region::above : Region::below;
  double gx = moment_estimate(pmf, 1, r, Shift::plus_zeta).value;
  double gy = moment(d, 1, r, Shift::plus_zeta);
  return std::sqrt(pmf.derived().R) * std::abs(f) * std::abs(gx - gy);
}

MomentError moment_error(const DiscreteStationary& pmf, const DiffusionDensity& d, int m) {
  if (m < 1) throw std::invalid_argument("moment order must be positive");
  MomentError e;
  if (m == 1) {
    e.exact_m = scaled_mean(pmf);
    e.diffusion_m = scaled_mean(d);
    e.diff_m = mean_error(pmf, d) / std::sqrt(pmf.derived().R);
  } else {
    e.exact_m = raw_moment(pmf, m);
    e.diffusion_m = raw_moment(d, m);
    e.diff_m = std::abs(e.exact_m - e.diffusion_m);
  }
  e.zeta_scaled = std::pow(std::abs(pmf.derived().zeta), m - 1) * e.diff_m;
  return e;
}

const char* sweep_regime_name(SweepRegime r) {
  switch (r) {
    case SweepRegime::qd: return "qd";
    case SweepRegime::qed: return "qed";
    case SweepRegime::nds: return "nds";
    case SweepRegime::custom: return "custom";
  }
  return "unknown";
}

int staffing(SweepRegime r, double R, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  switch (r) {
    case SweepRegime::qd: return static_cast<int>(std::ceil(R + beta * R));
    case SweepRegime::qed: return static_cast<int>(std::ceil(R + beta * std::sqrt(R)));
    case SweepRegime::nds: return static_cast<int>(std::ceil(R + beta));
    case SweepRegime::custom: break;
  }
  throw std::invalid_argument("custom sweeps list (R, n) pairs explicitly");
}

std::vector<SweepRow> universality_sweep(const SweepSpec& spec) {
  std::vector<std::pair<double, int>> cells;
  if (spec.regime == SweepRegime::custom) {
    cells = spec.grid;
  } else {
    for (double R : spec.sizes) cells.emplace_back(R, staffing(spec.regime, R, spec.beta));
  }
  for (const auto& [R, n] : cells) {
    if (spec.alpha == 0.0 && !(n > R))
      throw std::invalid_argument("Erlang-C sweep row has n <= R (R = " + std::to_string(R) +
                                  ", n = " + std::to_string(n) + ")");
    validate({R * spec.mu, spec.mu, n, spec.alpha});
  }
  std::sort(cells.begin(), cells.end());

  auto run = [&spec](double R, int n) {
    ModelParams p{R * spec.mu, spec.mu, n, spec.alpha};
    StationaryOptions opt;
    opt.tail_tol = spec.tail_tol;
    DiscreteStationary pmf(p, opt);
    DiffusionDensity d = build_density(p, pmf.derived());
    return SweepRow{R, n, spec.alpha, distance_report(pmf, d)};
  };

  std::vector<SweepRow> rows(cells.size());
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < cells.size(); start += width) {
    std::vector<std::future<SweepRow>> batch;
    for (std::size_t i = start; i < std::min(cells.size(), start + width); ++i)
      batch.push_back(std::async(std::launch::async, run, cells[i].first, cells[i].second));
    for (std::size_t i = 0; i < batch.size(); ++i) rows[start + i] = batch[i].get();
  }
  return rows;
}

}  // namespace erlang
