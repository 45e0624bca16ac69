#include "pinhole/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace pinhole {

namespace {
double additive_constant(const ToyConfig& cfg, double eps, bool nonlinear) {
  const double delta = cfg.scaling.delta(eps);
  const double rho = cfg.scaling.rho(eps);
  if (!nonlinear)
    return (cfg.a / eps - cfg.b / rho) / delta - cfg.a * std::log(eps);
  const double arg = (cfg.a * rho - eps * cfg.b) / (eps * rho * delta);
  const double inv = cfg.nonlinearity.raw_inverse(
      arg, cfg.scaling.eps_delta(eps), cfg.scaling.eta(eps));
  return inv - cfg.a * std::log(eps);
}

void check_point(double eps, const Vec2& x) {
  const double r = x.norm();
  if (r < eps * (1.0 - 1e-12) || r > 1.0 + 1e-12)
    throw std::domain_error("toy solution: point outside the closed annulus");
}
}  // namespace

ProblemSpec ToyConfig::as_problem_spec(int nodes_outer,
                                       int nodes_inner) const {
  ProblemSpec spec;
  spec.outer = ClosedCurve::circle(1.0);
  spec.inner = ClosedCurve::circle(1.0);
  spec.g_outer = FourierSeries::constant(a);
  spec.g_inner = FourierSeries::constant(b);
  spec.scaling = scaling;
  spec.nonlinearity = nonlinearity;
  spec.nodes_outer = nodes_outer;
  spec.nodes_inner = nodes_inner;
  return spec;
}

double toy_solution(const ToyConfig& cfg, double eps, const Vec2& x) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("toy solution: eps must lie in (0,1)");
  check_point(eps, x);
  return cfg.a * std::log(x.norm()) + additive_constant(cfg, eps, false);
}

double toy_solution_nonlinear(const ToyConfig& cfg, double eps,
                              const Vec2& x) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("toy solution: eps must lie in (0,1)");
  check_point(eps, x);
  return cfg.a * std::log(x.norm()) + additive_constant(cfg, eps, true);
}

double toy_energy(const ToyConfig& cfg, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("toy energy: eps must lie in (0,1)");
  return 2.0 * 3.14159265358979323846 * cfg.a * cfg.a * (-std::log(eps));
}

double toy_xi_linear(double a, double b, double l0, double r0) {
  return a - a * l0 - b * r0;
}

DensityTriple toy_density_triple(const ToyConfig& cfg, double eps,
                                 int nodes_outer, int nodes_inner) {
  const bool nonlinear = !cfg.nonlinearity.is_linear();
  DensityTriple t;
  t.mu_outer = Eigen::VectorXd::Zero(nodes_outer);
  t.mu_inner = Eigen::VectorXd::Constant(nodes_inner, cfg.a);
  t.xi = cfg.scaling.eps_delta(eps) * additive_constant(cfg, eps, nonlinear);
  return t;
}

}  // namespace pinhole
