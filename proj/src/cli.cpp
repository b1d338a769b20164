#include "erlang/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "erlang/ctmc.hpp"
#include "erlang/diffusion.hpp"
#include "erlang/poisson.hpp"
#include "erlang/stein_verify.hpp"

namespace erlang::cli {

namespace {

std::string printf_str(const char* fmt, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

std::string full(double x) {
  if (!std::isfinite(x)) return "";
  return printf_str("%.17g", x);
}

std::string short_g(double x) { return printf_str("%g", x); }

DiscreteStationary chain(const ModelParams& p, double tail_tol, int certify = 0) {
  StationaryOptions o;
  o.tail_tol = tail_tol;
  o.certify_order = certify;
  return DiscreteStationary(p, o);
}

}  // namespace

std::string table_round(double x) {
  if (!std::isfinite(x)) return "";
  double a = std::abs(x);
  if (a != 0.0 && (a >= 1e3 || a < 1e-2)) return printf_str("%.2e", x);
  return printf_str("%.2f", x);
}

std::vector<Table1Row> run_table1(double tail_tol) {
  const std::pair<int, double> cells[] = {{5, 3},     {5, 4},     {5, 4.9},   {5, 4.95},
                                          {5, 4.99},  {500, 300}, {500, 400}, {500, 490},
                                          {500, 495}, {500, 499}};
  std::vector<Table1Row> rows;
  for (auto [n, R] : cells) {
    ModelParams p{R, 1.0, n, 0.0};
    DiscreteStationary pmf = chain(p, tail_tol);
    DiffusionDensity d = build_density(p, pmf.derived());
    const double s = std::sqrt(R);
    rows.push_back({n, R, pmf.derived().x_inf + s * scaled_mean(pmf), mean_error(pmf, d)});
  }
  return rows;
}

std::vector<Table2Row> run_table2(double tail_tol) {
  std::vector<Table2Row> rows;
  for (double R : {300.0, 400.0, 490.0, 495.0, 499.0, 499.9}) {
    ModelParams p{R, 1.0, 500, 0.0};
    DiscreteStationary pmf = chain(p, tail_tol, 10);
    DiffusionDensity d = build_density(p, pmf.derived());
    MomentError e2 = moment_error(pmf, d, 2), e10 = moment_error(pmf, d, 10);
    rows.push_back({R, e2.exact_m, e2.diff_m, e10.exact_m, e10.diff_m});
  }
  return rows;
}

std::vector<Table3Row> run_table3(double tail_tol) {
  std::vector<Table3Row> rows;
  for (double R : {499.0, 499.9, 499.95, 499.99}) {
    ModelParams p{R, 1.0, 500, 0.0};
    DiscreteStationary pmf = chain(p, tail_tol, 2);
    DiffusionDensity d = build_density(p, pmf.derived());
    MomentError e = moment_error(pmf, d, 2);
    const double z = std::abs(pmf.derived().zeta);
    rows.push_back({R, z, e.exact_m, e.diff_m, z * e.diff_m, std::sqrt(z) * e.diff_m,
                    std::pow(z, 1.5) * e.diff_m});
  }
  return rows;
}

bool VerifyReport::passed() const {
  for (const auto& s : suites)
    if (!all_satisfied(s.rows)) return false;
  return true;
}

namespace {

std::vector<BoundCheck> distance_rows(const DistanceReport& r, const DiffusionDensity& d) {
  std::vector<BoundCheck> rows;
  if (r.bound_w) rows.push_back(check("d_w", r.d_w, *r.bound_w));
  if (r.bound_k) rows.push_back(check("d_k", r.d_k, *r.bound_k));
  rows.push_back(check("d_k_vs_d_w", r.d_k, std::sqrt(2.0 * r.density_sup * r.d_w)));
  // Same relation with the a priori bound on sup(nu) in place of the sup.
  const double sup_bound = density_sup_check(d).bound;
  rows.push_back(check("d_k_vs_d_w_sup_bound", r.d_k, std::sqrt(2.0 * sup_bound * r.d_w)));
  return rows;
}

void append(std::vector<BoundCheck>& to, const std::vector<BoundCheck>& rows,
            const std::string& prefix) {
  for (auto r : rows) {
    r.name = prefix + r.name;
    to.push_back(std::move(r));
  }
}

}  // namespace

VerifyReport run_verify(const ModelParams& p, double tail_tol) {
  validate(p);
  DiscreteStationary pmf = chain(p, tail_tol, 2);
  DiffusionDensity d = build_density(p, pmf.derived());
  const bool c = d.regime() == Regime::erlang_c;
  VerifyReport v;
  v.distance = distance_report(pmf, d);
  v.suites.push_back({"distance", distance_rows(v.distance, d)});
  v.suites.push_back({"moment_bounds", moment_bound_report(pmf)});
  v.suites.push_back({"density_sup", {density_sup_check(d)}});
  const GradientSuite grads[2] = {c ? GradientSuite::wasserstein_C : GradientSuite::wasserstein_A,
                                  c ? GradientSuite::kolmogorov_C : GradientSuite::kolmogorov_A};
  for (GradientSuite g : grads)
    v.suites.push_back({std::string("gradient_") + suite_name(g), gradient_bound_report(pmf, g)});

  const PoissonSolution ident(d, TestFunction::identity());
  const PoissonSolution kink(d, TestFunction::indicator(-d.zeta()));
  Suite stein{"stein_identity", {}};
  auto residual = [&](const std::string& name, const Residual& r) {
    stein.rows.push_back(check(name, std::abs(r.value), kStein));
  };
  residual("f_x", stein_identity_residual(pmf, [](double x) { return x; }));
  residual("f_x2", stein_identity_residual(pmf, [](double x) { return x * x; }));
  residual("f_poisson_identity",
           stein_identity_residual_derivative(
               pmf, [&](double x) { return ident.f_prime(x); }, ident.breaks()));
  residual("f_poisson_indicator",
           stein_identity_residual_derivative(
               pmf, [&](double x) { return kink.f_prime(x); }, kink.breaks()));
  v.suites.push_back(std::move(stein));

  Suite gen{"generator_identity", {}};
  Suite kol{"kolmogorov_decomposition", {}};
  auto identity_row = [&](const std::string& label, const PoissonSolution& s) {
    GeneratorIdentity g = generator_identity(pmf, s);
    gen.rows.push_back(check(label, std::abs(g.lhs - g.mean_generator), kIdentity));
  };
  identity_row("identity", ident);
  const auto anchors = indicator_anchors(d.zeta());
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const PoissonSolution s(d, TestFunction::indicator(anchors[i]));
    const std::string tag = "anchor" + std::to_string(i) + "_";
    identity_row(tag + "indicator", s);
    append(kol.rows, kolmogorov_decomposition(pmf, s).checks, tag);
  }
  v.suites.push_back(std::move(gen));
  v.suites.push_back({"wasserstein_decomposition", wasserstein_decomposition(pmf, ident).checks});
  v.suites.push_back(std::move(kol));
  return v;
}

namespace {

void dump_to(const Json& j, std::string& s) {
  switch (j.type()) {
    case Json::value_t::object: {
      s += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) s += ',';
        first = false;
        s += Json(it.key()).dump();
        s += ':';
        dump_to(it.value(), s);
      }
      s += '}';
      break;
    }
    case Json::value_t::array: {
      s += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) s += ',';
        first = false;
        dump_to(e, s);
      }
      s += ']';
      break;
    }
    case Json::value_t::number_float: {
      double x = j.get<double>();
      s += std::isfinite(x) ? printf_str("%.16e", x) : "null";
      break;
    }
    default:
      s += j.dump();
  }
}

Json number_or_null(const std::optional<double>& x) {
  return x ? Json(*x) : Json(nullptr);
}

Json check_json(const BoundCheck& r) {
  Json j;
  j["name"] = r.name;
  j["observed"] = r.observed;
  j["bound"] = r.satisfied ? Json(r.bound) : Json(nullptr);
  j["satisfied"] = r.satisfied ? Json(*r.satisfied) : Json(nullptr);
  return j;
}

std::string verdict(const std::optional<bool>& b) {
  if (!b) return "";
  return *b ? "true" : "false";
}

Json config_json(const RunConfig& cfg) {
  Json j;
  j["command"] = cfg.command;
  if (cfg.command == "distance" || cfg.command == "verify") {
    j["lambda"] = cfg.params.lambda;
    j["mu"] = cfg.params.mu;
    j["n"] = cfg.params.n;
    j["alpha"] = cfg.params.alpha;
  }
  if (cfg.command == "sweep") {
    j["regime"] = sweep_regime_name(cfg.regime);
    j["beta"] = cfg.beta;
    j["mu"] = cfg.params.mu;
    j["alpha"] = cfg.params.alpha;
    j["sizes"] = cfg.sizes;
  }
  j["tail_tol"] = cfg.tail_tol;
  j["format"] = cfg.format == Format::csv ? "csv" : "json";
  return j;
}

Json distance_json(const DistanceReport& r) {
  Json j;
  j["d_w"] = r.d_w;
  j["d_k"] = r.d_k;
  j["delta"] = r.delta;
  j["ratio_w"] = r.ratio_w;
  j["ratio_k"] = r.ratio_k;
  j["bound_w"] = number_or_null(r.bound_w);
  j["bound_k"] = number_or_null(r.bound_k);
  j["density_sup"] = r.density_sup;
  j["dw_dk_consistent"] = r.dw_dk_consistent;
  return j;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += v[i];
  }
  return s + '\n';
}

std::string opt_full(const std::optional<double>& x) { return x ? full(*x) : ""; }

bool within(const DistanceReport& r) {
  return (!r.bound_w || within_bound(r.d_w, *r.bound_w)) &&
         (!r.bound_k || within_bound(r.d_k, *r.bound_k));
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string s;
  dump_to(j, s);
  return s;
}

Output execute(const RunConfig& cfg) {
  Output o;
  Json rows = Json::array(), suites = Json::array();
  Json tol;
  tol["tail_tol"] = cfg.tail_tol;
  std::string csv;

  if (cfg.command == "table1") {
    csv = join({"n", "R", "mean_x", "error", "mean_x_full", "error_full"});
    for (const auto& r : run_table1(cfg.tail_tol)) {
      std::string err = r.error >= 5e-3 ? printf_str("%.2f", r.error) : printf_str("%.0e", r.error);
      csv += join({std::to_string(r.n), short_g(r.R), printf_str("%.2f", r.mean_x), err,
                   full(r.mean_x), full(r.error)});
      rows.push_back({{"n", r.n}, {"R", r.R}, {"mean_x", r.mean_x}, {"error", r.error}});
    }
  } else if (cfg.command == "table2") {
    csv = join({"R", "m2", "m2_err", "m10", "m10_err", "m2_full", "m2_err_full", "m10_full",
                "m10_err_full"});
    for (const auto& r : run_table2(cfg.tail_tol)) {
      csv += join({short_g(r.R), table_round(r.m2), table_round(r.m2_err), table_round(r.m10),
                   table_round(r.m10_err), full(r.m2), full(r.m2_err), full(r.m10),
                   full(r.m10_err)});
      rows.push_back({{"R", r.R},
                      {"m2", r.m2},
                      {"m2_err", r.m2_err},
                      {"m10", r.m10},
                      {"m10_err", r.m10_err}});
    }
  } else if (cfg.command == "table3") {
    csv = join({"R", "abs_zeta", "m2", "err", "zeta_err", "zeta_half_err", "zeta_three_half_err",
                "abs_zeta_full", "m2_full", "err_full", "zeta_err_full", "zeta_half_err_full",
                "zeta_three_half_err_full"});
    for (const auto& r : run_table3(cfg.tail_tol)) {
      csv += join({short_g(r.R), printf_str("%.2e", r.abs_zeta), table_round(r.m2),
                   table_round(r.err), printf_str("%.2e", r.zeta_err), table_round(r.zeta_half_err),
                   printf_str("%.2e", r.zeta_three_half_err), full(r.abs_zeta), full(r.m2),
                   full(r.err), full(r.zeta_err), full(r.zeta_half_err),
                   full(r.zeta_three_half_err)});
      rows.push_back({{"R", r.R},
                      {"abs_zeta", r.abs_zeta},
                      {"m2", r.m2},
                      {"err", r.err},
                      {"zeta_err", r.zeta_err},
                      {"zeta_half_err", r.zeta_half_err},
                      {"zeta_three_half_err", r.zeta_three_half_err}});
    }
  } else if (cfg.command == "distance") {
    validate(cfg.params);
    DiscreteStationary pmf = chain(cfg.params, cfg.tail_tol);
    DiffusionDensity d = build_density(cfg.params, pmf.derived());
    DistanceReport r = distance_report(pmf, d);
    csv = join({"d_w", "d_k", "delta", "ratio_w", "ratio_k", "bound_w", "bound_k", "density_sup",
                "dw_dk_consistent"});
    csv += join({full(r.d_w), full(r.d_k), full(r.delta), full(r.ratio_w), full(r.ratio_k),
                 opt_full(r.bound_w), opt_full(r.bound_k), full(r.density_sup),
                 r.dw_dk_consistent ? "true" : "false"});
    rows.push_back(distance_json(r));
  } else if (cfg.command == "verify") {
    VerifyReport v = run_verify(cfg.params, cfg.tail_tol);
    tol["stein_residual"] = kStein;
    tol["generator_identity"] = kIdentity;
    tol["bound_slack_rel"] = 1e-12;
    rows.push_back(distance_json(v.distance));
    csv = join({"suite", "name", "observed", "bound", "satisfied"});
    for (const auto& s : v.suites) {
      Json js;
      js["name"] = s.name;
      js["passed"] = all_satisfied(s.rows);
      js["rows"] = Json::array();
      for (const auto& r : s.rows) {
        js["rows"].push_back(check_json(r));
        csv += join({s.name, r.name, full(r.observed), r.satisfied ? full(r.bound) : "",
                     verdict(r.satisfied)});
      }
      suites.push_back(std::move(js));
    }
    if (!v.passed()) o.exit_code = 2;
  } else if (cfg.command == "sweep") {
    SweepSpec spec;
    spec.regime = cfg.regime;
    spec.beta = cfg.beta;
    spec.mu = cfg.params.mu;
    spec.alpha = cfg.params.alpha;
    spec.sizes = cfg.sizes;
    spec.tail_tol = cfg.tail_tol;
    csv = join({"regime", "R", "n", "alpha", "delta", "d_w", "d_k", "ratio_w", "ratio_k",
                "bound_w", "bound_k", "within_bounds"});
    for (const auto& row : universality_sweep(spec)) {
      const auto& r = row.report;
      csv += join({sweep_regime_name(cfg.regime), short_g(row.R), std::to_string(row.n),
                   short_g(row.alpha), full(r.delta), full(r.d_w), full(r.d_k), full(r.ratio_w),
                   full(r.ratio_k), opt_full(r.bound_w), opt_full(r.bound_k),
                   within(r) ? "true" : "false"});
      Json j;
      j["R"] = row.R;
      j["n"] = row.n;
      j["alpha"] = row.alpha;
      j.update(distance_json(r));
      j["within_bounds"] = within(r);
      rows.push_back(std::move(j));
      if (!within(r)) o.exit_code = 2;
    }
  } else {
    throw std::invalid_argument("unknown command " + cfg.command);
  }

  o.doc["schema_version"] = 1;
  o.doc["command"] = cfg.command;
  o.doc["config"] = config_json(cfg);
  o.doc["rows"] = std::move(rows);
  o.doc["suites"] = std::move(suites);
  o.doc["tolerances"] = std::move(tol);
  o.csv = std::move(csv);
  return o;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string format = "csv", regime = "qed";

  CLI::App app{"Stationary Erlang-C/A chains against their diffusion approximation"};
  app.require_subcommand(1, 1);
  auto common = [&](CLI::App* s) {
    s->add_option("--tail-tol", cfg.tail_tol, "Truncation tolerance for the pmf")
        ->check(CLI::Range(std::numeric_limits<double>::min(), 0.5));
    s->add_option("--format", format, "csv (default) or json")->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--out", cfg.out, "Output file (default: standard output)");
  };
  auto model = [&](CLI::App* s, bool need_load) {
    if (need_load) {
      s->add_option("--lambda", cfg.params.lambda, "Arrival rate")->required();
      s->add_option("--n", cfg.params.n, "Servers")->required();
    }
    s->add_option("--mu", cfg.params.mu, "Service rate (default 1)");
    s->add_option("--alpha", cfg.params.alpha, "Abandonment rate (default 0)");
  };
  common(app.add_subcommand("table1", "Mean of X and its diffusion error, n = 5 and n = 500"));
  common(app.add_subcommand("table2", "Second and tenth moment errors, n = 500"));
  common(app.add_subcommand("table3", "Second moment error scaled by powers of |zeta|"));
  const std::pair<const char*, const char*> single[] = {
      {"distance", "d_W and d_K for one parameter set"},
      {"verify", "Every bound suite for one parameter set; exit 2 on a violation"}};
  for (auto [name, about] : single) {
    auto* s = app.add_subcommand(name, about);
    common(s);
    model(s, true);
  }
  auto* sweep = app.add_subcommand("sweep", "Distances over a staffing regime; exit 2 on a violation");
  common(sweep);
  model(sweep, false);
  sweep->add_option("--regime", regime)->required()->check(CLI::IsMember({"qd", "qed", "nds"}));
  sweep->add_option("--beta", cfg.beta, "Staffing coefficient (default 1)");
  sweep->add_option("--sizes", cfg.sizes, "Offered loads R, comma separated")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  cfg.format = format == "json" ? Format::json : Format::csv;
  if (regime == "qd") cfg.regime = SweepRegime::qd;
  if (regime == "nds") cfg.regime = SweepRegime::nds;

  Output o;
  try {
    o = execute(cfg);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  std::string text = cfg.format == Format::json ? dump_json(o.doc) + '\n' : o.csv;
  if (cfg.out.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
      err << "error: cannot open " << cfg.out << '\n';
      return 1;
    }
    f << text;
  }
  return o.exit_code;
}

}  // namespace erlang::cli
