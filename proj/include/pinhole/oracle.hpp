#ifndef PINHOLE_ORACLE_HPP
#define PINHOLE_ORACLE_HPP

#include "pinhole/problem.hpp"

namespace pinhole {

/// Concentric unit disks with constant data: the closed-form ground truth
/// used by the acceptance suite.
struct ToyConfig {
  double a = 0.0;  // outer Neumann constant
  double b = 0.0;  // hole Robin datum constant
  ScalingFamily scaling = ScalingFamily::power_log_delta(1.0, 0.0, 0.0);
  RobinNonlinearity nonlinearity = RobinNonlinearity::linear();

  ProblemSpec as_problem_spec(int nodes_outer = 128,
                              int nodes_inner = 128) const;
};

/// a log|x| + (1/delta)(a/eps - b/rho) - a log eps on the closed annulus.
double toy_solution(const ToyConfig& cfg, double eps, const Vec2& x);

/// Nonlinear variant through the inverse of the raw family; reduces exactly
/// to toy_solution for the linear family.
double toy_solution_nonlinear(const ToyConfig& cfg, double eps, const Vec2& x);

/// 2 pi a^2 (-log eps); independent of b, delta, rho.
double toy_energy(const ToyConfig& cfg, double eps);

/// Limit root for disks with constant data: a - a*l0 - b*r0.
double toy_xi_linear(double a, double b, double l0, double r0);

/// The exact density triple representing the toy solution:
///   mu_outer = 0:  a uniform density on the unit circle has zero interior
///     trace and zero interior normal derivative (R log R = 0 at R = 1), so
///     the mean-zero outer density carries nothing and must vanish.
///   mu_inner = a:  the scaled-hole layer of a constant density c equals
///     c log|x| outside the hole (mean value of log over the circle), so the
///     log part of the solution fixes c = a; its integral is 2 pi a.
///   xi = eps*delta(eps)*B_eps:  matching the additive constant of the
///     closed form against the xi/(delta*eps) term of the representation.
DensityTriple toy_density_triple(const ToyConfig& cfg, double eps,
                                 int nodes_outer, int nodes_inner);

}  // namespace pinhole

#endif
