#pragma once

#include <optional>
#include <string>
#include <vector>

#include "erlang/ctmc.hpp"
#include "erlang/diffusion.hpp"

namespace erlang {

// sup_x |P(X~ <= x) - P(Y <= x)|, exact: the discrepancy is monotone inside
// every grid cell, so only cell endpoints matter.
double kolmogorov_distance(const DiscreteStationary& pmf, const DiffusionDensity& d);

// Area between the two cdfs, cell by cell in closed form.
double wasserstein_distance(const DiscreteStationary& pmf, const DiffusionDensity& d);

struct DistanceReport {
  double d_w = 0.0;
  double d_k = 0.0;
  double delta = 0.0;
  std::optional<double> bound_w;  // 205 delta, Erlang-C only
  std::optional<double> bound_k;  // 188 delta, Erlang-C only
  double ratio_w = 0.0;
  double ratio_k = 0.0;
  double density_sup = 0.0;
  // d_k <= sqrt(2 sup(nu) d_w)
  bool dw_dk_consistent = true;
};

DistanceReport distance_report(const DiscreteStationary& pmf, const DiffusionDensity& d);

// E X~ computed from flow balance as a multiple of E(X~ + zeta)^+ or ^-,
// which keeps tiny differences free of cancellation. Same for E Y.
double scaled_mean(const DiscreteStationary& pmf);
double scaled_mean(const DiffusionDensity& d);

// |E X - (x_inf + sqrt(R) E Y)|, unscaled.
double mean_error(const DiscreteStationary& pmf, const DiffusionDensity& d);

struct MomentError {
  double exact_m = 0.0;      // E X~^m
  double diffusion_m = 0.0;  // E Y^m
  double diff_m = 0.0;       // |E X~^m - E Y^m|
  double zeta_scaled = 0.0;  // |zeta|^(m-1) diff_m
};

MomentError moment_error(const DiscreteStationary& pmf, const DiffusionDensity& d, int m);

enum class SweepRegime { qd, qed, nds, custom };

const char* sweep_regime_name(SweepRegime r);

struct SweepSpec {
  SweepRegime regime = SweepRegime::qed;
  double beta = 1.0;
  double mu = 1.0;
  double alpha = 0.0;
  std::vector<double> sizes;  // offered loads R
  // custom grid: explicit (R, n) pairs
  std::vector<std::pair<double, int>> grid;
  double tail_tol = 1e-14;
};

struct SweepRow {
  double R = 0.0;
  int n = 0;
  double alpha = 0.0;
  DistanceReport report;
};

// Server count for the staffing rule: ceil(R + beta R), ceil(R + beta sqrt R)
// or ceil(R + beta).
int staffing(SweepRegime r, double R, double beta);

// Rows sorted by R then n. Erlang-C rows are evaluated only when n > R.
std::vector<SweepRow> universality_sweep(const SweepSpec& spec);

}  // namespace erlang
