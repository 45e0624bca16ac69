#include "pinhole/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pinhole/oracle.hpp"
#include "pinhole/svg.hpp"

namespace pinhole {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
using nlohmann::json;
}  // namespace

std::vector<double> SweepGrid::values() const {
  if (count < 1 || !(eps_min > 0.0) || !(eps_min < eps_max))
    throw std::invalid_argument("sweep grid: need 0 < eps_min < eps_max");
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = eps_max;
    return v;
  }
  const double lo = std::log(eps_max), hi = std::log(eps_min);
  for (int k = 0; k < count; ++k)
    v[k] = std::exp(lo + (hi - lo) * k / (count - 1));
  return v;
}

void ExperimentConfig::validate() const {
  problem.validate();
  const double eps0 = problem.containment();
  if (!(grid.eps_max < eps0))
    throw std::invalid_argument("config: eps_max must stay below the containment radius " +
                                std::to_string(eps0));
  if (!(grid.eps_max <= 0.8 * eps0) || !(grid.eps_min >= 1e-4))
    throw std::invalid_argument(
        "config: eps grid must lie in the working range [1e-4, 0.8*containment]");
  grid.values();  // validates ordering
  if (macro_targets.rows() < 1 || micro_targets.rows() < 1)
    throw std::invalid_argument(
        "config: need at least one macro and one micro evaluation point");
  const ClosedCurve hole_at_max = problem.inner.scaled(grid.eps_max);
  for (Eigen::Index i = 0; i < macro_targets.rows(); ++i) {
    const Vec2 x = macro_targets.row(i);
    if (!problem.outer.contains(x) || hole_at_max.contains(x))
      throw std::invalid_argument(
          "config: macro evaluation point violates separation constraints");
  }
  for (Eigen::Index i = 0; i < micro_targets.rows(); ++i) {
    const Vec2 t = micro_targets.row(i);
    if (problem.inner.contains(t) ||
        !problem.outer.contains(Vec2(grid.eps_max * t)))
      throw std::invalid_argument(
          "config: micro evaluation point violates separation constraints");
  }
  if (!(newton_tol > 0.0) || newton_max_iter < 1)
    throw std::invalid_argument("config: invalid newton settings");
}

namespace {

ClosedCurve curve_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  Vec2 center = Vec2::Zero();
  if (j.contains("center")) {
    center.x() = j["center"].at(0).get<double>();
    center.y() = j["center"].at(1).get<double>();
  }
  if (kind == "circle")
    return ClosedCurve::circle(j.at("radius").get<double>(), center);
  if (kind == "ellipse")
    return ClosedCurve::ellipse(j.at("a").get<double>(),
                                j.at("b").get<double>(), center);
  if (kind == "star")
    return ClosedCurve::star(j.at("base_radius").get<double>(),
                             j.at("amplitude").get<double>(),
                             j.at("lobes").get<int>(), center);
  if (kind == "fourier")
    return ClosedCurve::fourier(
        j.at("c0").get<double>(),
        j.value("cos", std::vector<double>{}),
        j.value("sin", std::vector<double>{}), center);
  throw std::invalid_argument("config: unknown curve kind '" + kind + "'");
}

FourierSeries series_from_json(const json& j) {
  FourierSeries f;
  f.c0 = j.value("const", 0.0);
  f.cos_coeffs = j.value("cos", std::vector<double>{});
  f.sin_coeffs = j.value("sin", std::vector<double>{});
  return f;
}

ScalingFamily scaling_from_json(const json& j) {
  const json& jd = j.at("delta");
  const std::string dk = jd.at("kind").get<std::string>();
  ScalingFamily f = [&] {
    if (dk == "power_log")
      return ScalingFamily::power_log_delta(jd.value("d0", 1.0),
                                            jd.value("p", 0.0),
                                            jd.value("q", 0.0));
    if (dk == "inverse_eps_log")
      return ScalingFamily::inverse_eps_log_delta(jd.value("d0", 1.0));
    throw std::invalid_argument("config: unknown delta kind '" + dk + "'");
  }();
  const json& jr = j.at("rho");
  const std::string rk = jr.at("kind").get<std::string>();
  if (rk == "constant")
    f.with_constant_rho(jr.value("value", 1.0));
  else if (rk == "eps_over_r0")
    f.with_linear_rho(jr.at("r0").get<double>());
  else
    throw std::invalid_argument("config: unknown rho kind '" + rk + "'");
  const auto eta0 = j.value("eta0", std::vector<double>{});
  const auto eta1 = j.value("eta1", std::vector<double>{});
  Eigen::VectorXd e0 = Eigen::Map<const Eigen::VectorXd>(eta0.data(), eta0.size());
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(e0.size());
  if (!eta1.empty()) {
    if (eta1.size() != eta0.size())
      throw std::invalid_argument("config: eta0/eta1 dimension mismatch");
    e1 = Eigen::Map<const Eigen::VectorXd>(eta1.data(), eta1.size());
  }
  f.with_eta(e0, e1);
  return f;
}

RobinNonlinearity nonlinearity_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "linear") return RobinNonlinearity::linear();
  if (kind == "cubic") return RobinNonlinearity::cubic();
  if (kind == "saturating") return RobinNonlinearity::saturating();
  throw std::invalid_argument("config: unknown nonlinearity kind '" + kind + "'");
}

PointSet points_from_json(const json& j) {
  PointSet p(j.size(), 2);
  for (std::size_t i = 0; i < j.size(); ++i) {
    p(i, 0) = j[i].at(0).get<double>();
    p(i, 1) = j[i].at(1).get<double>();
  }
  return p;
}
}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  const json& jp = j.at("problem");
  cfg.problem.outer = curve_from_json(jp.at("outer"));
  cfg.problem.inner = curve_from_json(jp.at("inner"));
  cfg.problem.g_outer = series_from_json(jp.at("g_outer"));
  cfg.problem.g_inner = series_from_json(jp.at("g_inner"));
  cfg.problem.scaling = scaling_from_json(jp.at("scaling"));
  cfg.problem.nonlinearity = nonlinearity_from_json(jp.at("nonlinearity"));
  cfg.problem.nodes_outer = jp.value("nodes_outer", 128);
  cfg.problem.nodes_inner = jp.value("nodes_inner", 128);
  if (j.contains("grid")) {
    cfg.grid.eps_min = j["grid"].value("eps_min", 5e-3);
    cfg.grid.eps_max = j["grid"].value("eps_max", 0.3);
    cfg.grid.count = j["grid"].value("count", 12);
  }
  if (j.contains("targets")) {
    if (j["targets"].contains("macro"))
      cfg.macro_targets = points_from_json(j["targets"]["macro"]);
    if (j["targets"].contains("micro"))
      cfg.micro_targets = points_from_json(j["targets"]["micro"]);
  }
  cfg.root_index = j.value("root_index", 0);
  cfg.output_dir = j.value("output_dir", std::string("out"));
  cfg.emit_plots = j.value("emit_plots", true);
  cfg.seed = j.value("seed", std::uint64_t{1});
  if (j.contains("newton")) {
    cfg.newton_tol = j["newton"].value("tol", 1e-9);
    cfg.newton_max_iter = j["newton"].value("max_iter", 25);
  }
  if (j.contains("xi_bracket")) {
    cfg.xi_bracket.bracket = j["xi_bracket"].value("max", 1e3);
    cfg.xi_bracket.samples = j["xi_bracket"].value("samples", 100000);
  }
  if (j.contains("debug"))
    cfg.debug_flip_wstar_diagonal =
        j["debug"].value("flip_wstar_diagonal", false);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  in >> j;
  return config_from_json(j);
}

void apply_override(json& j, const std::string& assignment) {
  const auto pos = assignment.find('=');
  if (pos == std::string::npos)
    throw std::invalid_argument("override must look like key.path=value: " +
                                assignment);
  const std::string path = assignment.substr(0, pos);
  const std::string value = assignment.substr(pos + 1);
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty())
      throw std::invalid_argument("override has an empty path segment: " + assignment);
    if (dot == std::string::npos) {
      json parsed = json::parse(value, nullptr, false);
      (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::pair<double, double> fit_log_linear(const std::vector<double>& eps,
                                         const std::vector<double>& y) {
  if (eps.size() != y.size() || eps.size() < 2)
    throw std::invalid_argument("fit: need at least two samples");
  const std::size_t n = eps.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(eps[i]);
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  return {my - slope * mx, slope};
}

namespace {
AsymptoteCheck asymptote_check(const std::vector<double>& values,
                               double limit_value) {
  AsymptoteCheck out;
  out.limit_value = limit_value;
  std::vector<double> errors(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    errors[i] = std::abs(values[i] - limit_value);
  out.final_error = errors.empty() ? 0.0 : errors.back();
  out.monotone = true;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    out.error_ratios.push_back(errors[i] > 0.0 ? errors[i + 1] / errors[i]
                                               : 0.0);
    if (!(errors[i + 1] < errors[i])) out.monotone = false;
  }
  return out;
}
}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  SweepResult result;
  result.roots = xi_roots(cfg.problem, cfg.xi_bracket);
  result.limit = solve_limit(cfg.problem, cfg.root_index, cfg.xi_bracket);
  result.limit_energy = limit_energy_coefficients(cfg.problem, result.limit);
  if (result.limit.degenerate_root && !cfg.problem.nonlinearity.is_linear())
    throw std::runtime_error(
        "selected xi root is degenerate (dF~/dtau ~ 0): unsuitable as a "
        "Newton seed; pick another root_index");

  const NystromSystem sys(cfg.problem);
  result.int_g_outer = sys.outer_data_integral();
  result.z_m = sys.inner_rule().weights.dot(result.limit.mu_inner);
  const std::vector<double> grid = cfg.grid.values();

  const DensityTriple seed{result.limit.mu_outer, result.limit.mu_inner,
                           result.limit.xi};
  auto solve_row = [&](double eps) {
    SweepRow row;
    row.eps = eps;
    row.eps_delta = cfg.problem.scaling.eps_delta(eps);
    row.eps_delta_log_eps = cfg.problem.scaling.eps_delta_log(eps);
    row.eps_over_rho = cfg.problem.scaling.eps_over_rho(eps);
    try {
      DensityTriple triple;
      NewtonReport rep;
      if (cfg.problem.nonlinearity.is_linear()) {
        triple = sys.solve_linear(eps);
      } else {
        triple = sys.solve_newton(eps, seed, cfg.newton_tol,
                                  cfg.newton_max_iter, &rep);
      }
      row.newton_iters = rep.iterations;
      const Gamma gamma = canonical_gamma(cfg.problem.scaling, eps);
      row.residual = sys.lambda_residual(eps, gamma, triple).sup_norm();
      const double tolerance =
          cfg.problem.nonlinearity.is_linear() ? 1e-10 : cfg.newton_tol;
      if (!(row.residual <= tolerance))
        throw std::runtime_error("residual " + format_g17(row.residual) +
                                 " above the configured tolerance");
      row.xi = triple.xi;
      row.u_macro =
          sys.reconstruct(eps, triple, cfg.macro_targets.topRows(1))[0];
      row.u_micro = sys.rescaled(eps, triple, cfg.micro_targets.topRows(1))[0];
      row.energy = sys.energy(eps, triple);
      row.scaled_u_macro = row.eps_delta * row.u_macro;
      row.scaled_u_micro = row.eps_delta * row.u_micro;
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    return row;
  };

  std::vector<std::future<SweepRow>> futures;
  futures.reserve(grid.size());
  for (double eps : grid)
    futures.push_back(std::async(std::launch::async, solve_row, eps));
  for (auto& f : futures) result.rows.push_back(f.get());

  std::vector<double> ok_eps, ok_energy, ok_macro, ok_micro;
  for (const auto& row : result.rows)
    if (row.ok) {
      ok_eps.push_back(row.eps);
      ok_energy.push_back(row.energy);
      ok_macro.push_back(row.scaled_u_macro);
      ok_micro.push_back(row.scaled_u_micro);
    }
  if (ok_eps.size() >= 4) {
    FitReport fit;
    std::tie(fit.e1_hat, fit.e2_hat) = fit_log_linear(ok_eps, ok_energy);
    fit.e2_limit = result.limit_energy.e2_direct;
    fit.e2_rel_error =
        fit.e2_limit != 0.0
            ? std::abs(fit.e2_hat - fit.e2_limit) / std::abs(fit.e2_limit)
            : std::abs(fit.e2_hat);
    const double log_limit = cfg.problem.scaling.eps_delta_log_limit();
    fit.macro = asymptote_check(ok_macro, result.limit.xi);
    fit.micro = asymptote_check(
        ok_micro,
        result.limit.xi + log_limit * result.int_g_outer / kTwoPi);
    result.fit = fit;
  }
  return result;
}

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg,
                                            const std::vector<int>& node_counts,
                                            double eps) {
  cfg.validate();
  if (node_counts.empty())
    throw std::invalid_argument("convergence: empty node count list");
  const bool toy_like =
      cfg.problem.outer.kind() == CurveKind::Circle &&
      cfg.problem.inner.kind() == CurveKind::Circle &&
      cfg.problem.g_outer.degree() == 0 && cfg.problem.g_inner.degree() == 0 &&
      std::abs(cfg.problem.outer.radial_max() - 1.0) < 1e-14 &&
      std::abs(cfg.problem.inner.radial_max() - 1.0) < 1e-14 &&
      cfg.problem.outer.center().norm() == 0.0 &&
      cfg.problem.inner.center().norm() == 0.0;

  std::vector<ConvergenceRow> rows;
  Eigen::VectorXd previous;
  for (int n : node_counts) {
    ProblemSpec spec = cfg.problem;
    spec.nodes_outer = n;
    spec.nodes_inner = n;
    const NystromSystem sys(spec);
    DensityTriple triple;
    if (spec.nonlinearity.is_linear()) {
      triple = sys.solve_linear(eps);
    } else {
      const LimitSolution lim = solve_limit(spec, cfg.root_index, cfg.xi_bracket);
      triple = sys.solve_newton(eps, {lim.mu_outer, lim.mu_inner, lim.xi},
                                cfg.newton_tol, cfg.newton_max_iter);
    }
    const Eigen::VectorXd u = sys.reconstruct(eps, triple, cfg.macro_targets);
    ConvergenceRow row;
    row.nodes = n;
    if (previous.size() == u.size())
      row.delta_vs_previous = (u - previous).cwiseAbs().maxCoeff();
    if (toy_like) {
      ToyConfig toy{cfg.problem.g_outer.c0, cfg.problem.g_inner.c0,
                    cfg.problem.scaling, cfg.problem.nonlinearity};
      double err = 0.0;
      for (Eigen::Index i = 0; i < cfg.macro_targets.rows(); ++i) {
        const Vec2 x = cfg.macro_targets.row(i);
        const double exact = spec.nonlinearity.is_linear()
                                 ? toy_solution(toy, eps, x)
                                 : toy_solution_nonlinear(toy, eps, x);
        err = std::max(err, std::abs(u[i] - exact));
      }
      row.oracle_error = err;
      row.has_oracle = true;
    }
    previous = u;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// verification bundle

namespace {
struct CheckList {
  std::vector<VerifyCheck>& checks;
  void add(const std::string& name, double measured, double tol) {
    checks.push_back({name, measured, tol, std::abs(measured) <= tol});
  }
};
}  // namespace

VerifyReport run_verify(const ExperimentConfig& cfg) {
  cfg.validate();
  VerifyReport report;
  CheckList list{report.checks};
  const double diag_sign = cfg.debug_flip_wstar_diagonal ? -1.0 : 1.0;

  const std::vector<std::pair<std::string, ClosedCurve>> builtins = {
      {"circle", ClosedCurve::circle(1.0)},
      {"ellipse", ClosedCurve::ellipse(2.0, 1.0)},
      {"star", ClosedCurve::star(1.0, 0.2, 3)},
      {"fourier", ClosedCurve::fourier(1.0, {0.15}, {0.1})},
  };

  {  // quadrature identities on the unit circle
    const PeriodicRule rule = quadrature(ClosedCurve::circle(1.0), 16);
    list.add("quadrature_circle_length", rule.length() - kTwoPi, 1e-13);
    double trig = 0.0;
    for (int m = 1; m < 8; ++m) {
      double acc = 0.0;
      for (int j = 0; j < rule.n; ++j)
        acc += std::cos(m * rule.theta[j]) * rule.weights[j];
      trig = std::max(trig, std::abs(acc));
    }
    list.add("quadrature_trig_exactness", trig, 1e-12);
  }

  {  // normals and winding for every family
    double worst = 0.0;
    int winding_err = 0;
    for (const auto& [name, curve] : builtins) {
      for (int j = 0; j < 37; ++j) {
        const CurvePoint p = curve.eval(0.1 + kTwoPi * j / 37.0);
        worst = std::max(worst, std::abs(p.normal.dot(p.tangent)) / p.speed);
        worst = std::max(worst, std::abs(p.normal.norm() - 1.0));
      }
      winding_err =
          std::max(winding_err, std::abs(curve.winding_about_origin() - 1));
    }
    list.add("normal_orthonormality", worst, 1e-13);
    list.add("winding_numbers", winding_err, 0.5);
  }

  {  // Gauss point flux: 1 when enclosing the origin, 0 when not
    double worst = 0.0;
    for (const auto& [name, curve] : builtins)
      worst = std::max(worst,
                       std::abs(gauss_point_flux(quadrature(curve, 128)) - 1.0));
    list.add("gauss_point_flux", worst, 1e-10);
    const PeriodicRule off =
        quadrature(ClosedCurve::circle(1.0, Vec2(3.0, 0.0)), 128);
    list.add("gauss_point_flux_dichotomy", gauss_point_flux(off), 1e-10);
  }

  {  // adjoint-double-layer identities
    double mean_err = 0.0, flux_err = 0.0;
    for (const auto& [name, curve] : builtins) {
      const PeriodicRule rule = quadrature(curve, 128);
      const Eigen::MatrixXd w = wstar_self_matrix(rule, diag_sign);
      const Eigen::VectorXd row = w * Eigen::VectorXd::Ones(rule.n);
      mean_err = std::max(
          mean_err, std::abs(rule.weights.dot(row) / rule.length() - 0.5));
      const Eigen::VectorXd col = w.transpose() * rule.weights;
      for (int j = 0; j < rule.n; ++j)
        flux_err =
            std::max(flux_err, std::abs(col[j] / rule.weights[j] - 0.5));
    }
    list.add("wstar_integrated_identity", mean_err, 1e-10);
    list.add("wstar_gauss_flux_per_node", flux_err, 1e-10);
    const PeriodicRule circle = quadrature(ClosedCurve::circle(1.0), 128);
    const Eigen::VectorXd on_circle =
        wstar_self_matrix(circle, diag_sign) * Eigen::VectorXd::Ones(128);
    list.add("wstar_constant_density_circle",
             (on_circle.array() - 0.5).abs().maxCoeff(), 1e-12);
  }

  {  // jump relations
    const PeriodicRule rule = quadrature(ClosedCurve::ellipse(2.0, 1.0), 64);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd mu(rule.n);
    for (int j = 0; j < rule.n; ++j) mu[j] = unif(rng);
    const Eigen::VectorXd ext = neumann_trace(rule, mu, Side::Exterior);
    const Eigen::VectorXd inte = neumann_trace(rule, mu, Side::Interior);
    list.add("jump_difference_identity",
             (ext - inte - mu).cwiseAbs().maxCoeff(), 1e-14);
    const PeriodicRule circle = quadrature(ClosedCurve::circle(1.0), 64);
    const Eigen::VectorXd trace =
        0.5 * Eigen::VectorXd::Ones(64) +
        wstar_self_matrix(circle, diag_sign) * Eigen::VectorXd::Ones(64);
    list.add("jump_exterior_trace_unit_circle",
             (trace.array() - 1.0).abs().maxCoeff(), 1e-10);
  }

  {  // on-boundary single layer: unit-circle Fourier symbol and convergence
    const PeriodicRule circle = quadrature(ClosedCurve::circle(1.0), 64);
    const Eigen::MatrixXd sl = single_layer_self_matrix(circle);
    double worst = 0.0;
    for (int m = 1; m <= 16; ++m) {
      Eigen::VectorXd mu(circle.n), expect(circle.n);
      for (int j = 0; j < circle.n; ++j) {
        mu[j] = std::cos(m * circle.theta[j]);
        expect[j] = -mu[j] / (2.0 * m);
      }
      worst = std::max(worst, (sl * mu - expect).cwiseAbs().maxCoeff());
    }
    list.add("single_layer_fourier_symbol", worst, 1e-10);

    double prev_delta = 0.0, ratio = 0.0, prev_value = 0.0;
    for (int k = 0; k < 4; ++k) {
      const int n = 16 << k;
      const PeriodicRule rule = quadrature(ClosedCurve::ellipse(2.0, 1.0), n);
      Eigen::VectorXd mu(n);
      for (int j = 0; j < n; ++j) mu[j] = std::cos(rule.theta[j]);
      const double value = (single_layer_self_matrix(rule) * mu)[0];
      if (k > 0) {
        const double delta = std::abs(value - prev_value);
        if (k > 1 && prev_delta > 0.0) ratio = std::max(ratio, delta / prev_delta);
        prev_delta = delta;
      }
      prev_value = value;
    }
    list.add("single_layer_spectral_convergence_ratio", ratio, 0.25);
  }

  {  // off-boundary harmonicity by a 5-point stencil
    const PeriodicRule rule = quadrature(ClosedCurve::star(1.0, 0.2, 3), 128);
    Eigen::VectorXd mu(rule.n);
    for (int j = 0; j < rule.n; ++j) mu[j] = std::cos(rule.theta[j]);
    const double h = 1e-3;
    const Vec2 x0(2.1, 0.3);
    auto eval = [&](const Vec2& x) {
      PointSet t(1, 2);
      t.row(0) = x.transpose();
      return single_layer_offboundary(rule, mu, t)[0];
    };
    const double lap = (eval(x0 + Vec2(h, 0)) + eval(x0 - Vec2(h, 0)) +
                        eval(x0 + Vec2(0, h)) + eval(x0 - Vec2(0, h)) -
                        4.0 * eval(x0)) /
                       (h * h);
    list.add("single_layer_harmonicity", lap, 1e-6);
  }

  {  // toy equivalence at one eps and the energy law
    ToyConfig toy;
    toy.a = 1.0;
    toy.b = 2.0;
    const ProblemSpec spec = toy.as_problem_spec(128, 128);
    const NystromSystem sys(spec);
    const double eps = 0.1;
    const DensityTriple triple = sys.solve_linear(eps);
    PointSet targets(3, 2);
    targets << 0.5, 0.0, -0.3, 0.4, 0.0, -0.7;
    const Eigen::VectorXd u = sys.reconstruct(eps, triple, targets);
    double err = 0.0;
    for (int i = 0; i < 3; ++i)
      err = std::max(err, std::abs(u[i] - toy_solution(toy, eps, targets.row(i))));
    list.add("toy_solution_equivalence", err, 1e-9);
    list.add("toy_energy_law",
             sys.energy(eps, triple) / toy_energy(toy, eps) - 1.0, 1e-10);
    list.add("mean_identity_toy",
             sys.inner_density_integral(triple) - sys.outer_data_integral(),
             1e-10);
  }

  {  // limit system mean identity and closed-form root on the config problem
    const LimitSolution lim =
        solve_limit(cfg.problem, cfg.root_index, cfg.xi_bracket);
    const PeriodicRule inner = quadrature(cfg.problem.inner, cfg.problem.nodes_inner);
    const PeriodicRule outer = quadrature(cfg.problem.outer, cfg.problem.nodes_outer);
    double int_go = 0.0;
    for (int j = 0; j < outer.n; ++j)
      int_go += cfg.problem.g_outer(outer.theta[j]) * outer.weights[j];
    list.add("mean_identity_limit",
             inner.weights.dot(lim.mu_inner) - int_go, 1e-9);
    if (cfg.problem.nonlinearity.is_linear()) {
      double int_gi = 0.0;
      for (int j = 0; j < inner.n; ++j)
        int_gi += cfg.problem.g_inner(inner.theta[j]) * inner.weights[j];
      const double li = inner.length();
      const double l0 = cfg.problem.scaling.eps_delta_log_limit();
      const double r0 = cfg.problem.scaling.eps_over_rho_limit();
      const double closed =
          ((1.0 - li * l0 / kTwoPi) * int_go - r0 * int_gi) / li;
      list.add("xi_closed_form_linear", lim.xi - closed, 1e-10);
    }
    const EnergyCoefficients ec = limit_energy_coefficients(cfg.problem, lim);
    list.add("limit_energy_e2_two_routes", ec.e2 - ec.e2_direct, 1e-9);
  }

  {  // finite-eps mean identity on the config problem
    const NystromSystem sys(cfg.problem);
    const double eps = cfg.grid.eps_max;
    DensityTriple triple;
    if (cfg.problem.nonlinearity.is_linear()) {
      triple = sys.solve_linear(eps);
    } else {
      const LimitSolution lim =
          solve_limit(cfg.problem, cfg.root_index, cfg.xi_bracket);
      triple = sys.solve_newton(eps, {lim.mu_outer, lim.mu_inner, lim.xi},
                                cfg.newton_tol, cfg.newton_max_iter);
    }
    list.add("mean_identity_finite_eps",
             sys.inner_density_integral(triple) - sys.outer_data_integral(),
             1e-8);
    list.add("boundary_condition_residual",
             sys.boundary_condition_residual(eps, triple).sup_norm(), 1e-8);
  }

  {  // fit machinery self-test
    std::vector<double> eps, y;
    for (int k = 0; k < 9; ++k) {
      const double e = 0.3 * std::pow(0.6, k);
      eps.push_back(e);
      y.push_back(1.75 - 3.25 * std::log(e));
    }
    const auto [c1, c2] = fit_log_linear(eps, y);
    list.add("fit_self_test",
             std::max(std::abs(c1 - 1.75), std::abs(c2 + 3.25)), 1e-10);
  }

  {  // analytic Jacobian against finite differences
    ProblemSpec spec;
    spec.outer = ClosedCurve::ellipse(1.5, 1.0);
    spec.inner = ClosedCurve::circle(1.0);
    spec.g_outer = FourierSeries{0.3, {0.2}, {}};
    spec.g_inner = FourierSeries{0.1, {}, {0.1}};
    spec.scaling = ScalingFamily::inverse_eps_log_delta(1.0)
                       .with_linear_rho(0.5)
                       .with_eta(Eigen::VectorXd::Constant(1, 1.0),
                                 Eigen::VectorXd::Zero(1));
    spec.nonlinearity = RobinNonlinearity::cubic();
    spec.nodes_outer = 32;
    spec.nodes_inner = 32;
    const NystromSystem sys(spec);
    const double eps = 0.2;
    const Gamma gamma = canonical_gamma(spec.scaling, eps);
    std::mt19937_64 rng(cfg.seed + 7);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      DensityTriple state;
      state.mu_outer = Eigen::VectorXd::NullaryExpr(32, [&](Eigen::Index) {
        return unif(rng);
      });
      state.mu_inner = Eigen::VectorXd::NullaryExpr(32, [&](Eigen::Index) {
        return unif(rng);
      });
      state.xi = unif(rng);
      DensityTriple dir;
      dir.mu_outer = Eigen::VectorXd::NullaryExpr(32, [&](Eigen::Index) {
        return unif(rng);
      });
      dir.mu_inner = Eigen::VectorXd::NullaryExpr(32, [&](Eigen::Index) {
        return unif(rng);
      });
      dir.xi = unif(rng);
      const double h = 1e-6;
      DensityTriple plus = state, minus = state;
      plus.mu_outer += h * dir.mu_outer;
      plus.mu_inner += h * dir.mu_inner;
      plus.xi += h * dir.xi;
      minus.mu_outer -= h * dir.mu_outer;
      minus.mu_inner -= h * dir.mu_inner;
      minus.xi -= h * dir.xi;
      const LambdaResidual rp = sys.lambda_residual(eps, gamma, plus);
      const LambdaResidual rm = sys.lambda_residual(eps, gamma, minus);
      Eigen::VectorXd fd(64);
      fd << (rp.outer - rm.outer) / (2.0 * h), (rp.inner - rm.inner) / (2.0 * h);
      const Eigen::VectorXd jd = sys.jacobian_times(eps, gamma, state, dir);
      const double denom = std::max(1e-12, jd.cwiseAbs().maxCoeff());
      worst = std::max(worst, (jd - fd).cwiseAbs().maxCoeff() / denom);
    }
    list.add("newton_jacobian_fd", worst, 1e-5);
  }

  return report;
}

// ---------------------------------------------------------------------------
// emission

namespace {
const char* kCsvHeader =
    "eps,eps_delta,eps_delta_log_eps,eps_over_rho,xi,u_macro,u_micro,energy,"
    "scaled_u_macro,scaled_u_micro,newton_iters,residual";

json asymptote_json(const AsymptoteCheck& a) {
  return json{{"limit_value", a.limit_value},
              {"final_error", a.final_error},
              {"monotone", a.monotone},
              {"error_ratios", a.error_ratios}};
}
}  // namespace

json sweep_report_json(const SweepResult& result, const ExperimentConfig& cfg) {
  json j;
  j["problem"] = {{"nodes_outer", cfg.problem.nodes_outer},
                  {"nodes_inner", cfg.problem.nodes_inner},
                  {"root_index", cfg.root_index},
                  {"seed", cfg.seed}};
  json roots = json::array();
  for (const auto& r : result.roots)
    roots.push_back({{"xi", r.xi},
                     {"residual", r.residual},
                     {"dtau", r.dtau},
                     {"degenerate", r.degenerate}});
  j["limit"] = {{"xi_roots", roots},
                {"xi", result.limit.xi},
                {"z_m", result.z_m},
                {"int_g_outer", result.int_g_outer},
                {"e1_0", result.limit_energy.e1},
                {"e2_0", result.limit_energy.e2_direct},
                {"e2_0_flux_route", result.limit_energy.e2}};
  json rows = json::array();
  json failures = json::array();
  for (const auto& r : result.rows) {
    if (!r.ok) {
      failures.push_back({{"eps", r.eps}, {"error", r.error}});
      continue;
    }
    rows.push_back({{"eps", r.eps},
                    {"eps_delta", r.eps_delta},
                    {"eps_delta_log_eps", r.eps_delta_log_eps},
                    {"eps_over_rho", r.eps_over_rho},
                    {"xi", r.xi},
                    {"u_macro", r.u_macro},
                    {"u_micro", r.u_micro},
                    {"energy", r.energy},
                    {"scaled_u_macro", r.scaled_u_macro},
                    {"scaled_u_micro", r.scaled_u_micro},
                    {"newton_iters", r.newton_iters},
                    {"residual", r.residual}});
  }
  j["rows"] = rows;
  j["failures"] = failures;
  if (result.fit) {
    j["fit"] = {{"e1_hat", result.fit->e1_hat},
                {"e2_hat", result.fit->e2_hat},
                {"e2_limit", result.fit->e2_limit},
                {"e2_rel_error", result.fit->e2_rel_error},
                {"macro", asymptote_json(result.fit->macro)},
                {"micro", asymptote_json(result.fit->micro)}};
  }
  return j;
}

json verify_report_json(const VerifyReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name},
                      {"measured", c.measured},
                      {"tolerance", c.tolerance},
                      {"verdict", c.pass ? "pass" : "fail"}});
  return json{{"checks", checks}, {"all_pass", report.all_pass()}};
}

std::vector<std::string> emit_outputs(const SweepResult& result,
                                      const ExperimentConfig& cfg,
                                      const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir);
  std::vector<std::string> written;

  const std::string csv_path = (fs::path(dir) / "sweep.csv").string();
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + csv_path);
    out << kCsvHeader << "\n";
    for (const auto& r : result.rows) {
      if (!r.ok) continue;
      out << format_g17(r.eps) << "," << format_g17(r.eps_delta) << ","
          << format_g17(r.eps_delta_log_eps) << ","
          << format_g17(r.eps_over_rho) << "," << format_g17(r.xi) << ","
          << format_g17(r.u_macro) << "," << format_g17(r.u_micro) << ","
          << format_g17(r.energy) << "," << format_g17(r.scaled_u_macro)
          << "," << format_g17(r.scaled_u_micro) << "," << r.newton_iters
          << "," << format_g17(r.residual) << "\n";
    }
  }
  written.push_back(csv_path);

  const std::string json_path = (fs::path(dir) / "report.json").string();
  {
    std::ofstream out(json_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + json_path);
    out << sweep_report_json(result, cfg).dump(2) << "\n";
  }
  written.push_back(json_path);

  std::vector<double> logeps, energy, eps_ok, sm, si;
  for (const auto& r : result.rows) {
    if (!r.ok) continue;
    logeps.push_back(std::log(r.eps));
    energy.push_back(r.energy);
    eps_ok.push_back(std::log10(r.eps));
    sm.push_back(r.scaled_u_macro);
    si.push_back(r.scaled_u_micro);
  }
  if (cfg.emit_plots && !logeps.empty()) {
    {
      std::vector<SvgSeries> series;
      series.push_back({"energy", "#1f77b4", logeps, energy});
      if (result.fit) {
        std::vector<double> fy;
        for (double le : logeps)
          fy.push_back(result.fit->e1_hat + result.fit->e2_hat * le);
        series.push_back({"fit", "#d62728", logeps, fy});
      }
      const std::string path = (fs::path(dir) / "energy_vs_logeps.svg").string();
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + path);
      out << render_line_plot("energy vs log(eps)", "log(eps)", "energy",
                              series);
      written.push_back(path);
    }
    {
      std::vector<SvgSeries> series;
      series.push_back({"scaled u (macro)", "#1f77b4", eps_ok, sm});
      series.push_back({"scaled u (micro)", "#2ca02c", eps_ok, si});
      if (result.fit) {
        series.push_back({"macro limit", "#d62728", eps_ok,
                          std::vector<double>(eps_ok.size(),
                                              result.fit->macro.limit_value)});
        series.push_back({"micro limit", "#9467bd", eps_ok,
                          std::vector<double>(eps_ok.size(),
                                              result.fit->micro.limit_value)});
      }
      const std::string path = (fs::path(dir) / "scaled_u_vs_eps.svg").string();
      std::ofstream out(path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + path);
      out << render_line_plot("scaled solution values", "log10(eps)",
                              "eps*delta(eps) * u", series);
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace pinhole
