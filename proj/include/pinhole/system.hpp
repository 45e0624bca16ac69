#ifndef PINHOLE_SYSTEM_HPP
#define PINHOLE_SYSTEM_HPP

#include <optional>
#include <vector>

#include "pinhole/potentials.hpp"
#include "pinhole/problem.hpp"

namespace pinhole {

/// Residual of the two-boundary integral system at the quadrature nodes.
struct LambdaResidual {
  Eigen::VectorXd outer;
  Eigen::VectorXd inner;
  double sup_norm() const {
    double o = outer.size() ? outer.cwiseAbs().maxCoeff() : 0.0;
    double i = inner.size() ? inner.cwiseAbs().maxCoeff() : 0.0;
    return std::max(o, i);
  }
};

struct NewtonReport {
  int iterations = 0;
  std::vector<double> residual_history;
  bool converged = false;
};

/// Finite-eps Nystrom solver for one ProblemSpec. Rules and self-interaction
/// matrices are assembled once; cross-interaction blocks are built per eps.
/// Instances are immutable after construction and safe to share across
/// threads; distinct eps solves share no mutable state.
class NystromSystem {
 public:
  explicit NystromSystem(const ProblemSpec& spec);

  const ProblemSpec& spec() const { return spec_; }
  const PeriodicRule& outer_rule() const { return outer_; }
  const PeriodicRule& inner_rule() const { return inner_; }

  LambdaResidual lambda_residual(double eps, const Gamma& gamma,
                                 const DensityTriple& triple) const;

  /// Dense LU solve of the linearized system; requires a linear nonlinearity.
  DensityTriple solve_linear(double eps) const;

  /// Damped Newton iteration on the discretized system with the analytic
  /// Jacobian. Throws when max_iter is exceeded (message carries the best
  /// residual) or when the Jacobian solve hits the conditioning guard.
  DensityTriple solve_newton(double eps, const DensityTriple& initial,
                             double tol, int max_iter,
                             NewtonReport* report = nullptr) const;

  /// u(eps, x) at interior targets separated from both boundaries.
  Eigen::VectorXd reconstruct(double eps, const DensityTriple& triple,
                              const PointSet& targets) const;

  /// u(eps, eps*t) at rescaled targets t near the hole; the log(eps) term is
  /// added analytically so no small differences x - eps*s are formed.
  Eigen::VectorXd rescaled(double eps, const DensityTriple& triple,
                           const PointSet& t_targets) const;

  /// Dirichlet energy over the perforated domain via boundary traces (jump
  /// relations only; no near-boundary field evaluation). Meaningful when the
  /// triple solves the system.
  double energy(double eps, const DensityTriple& triple) const;

  /// Residual of the original boundary conditions evaluated through the jump
  /// relations: (outer) d_nu u - g^o, (inner, physical coordinates)
  /// d_nu u - delta*F_eps(u) - g^i/rho.
  LambdaResidual boundary_condition_residual(double eps,
                                             const DensityTriple& triple) const;

  /// Directional derivative of the system operator at `state` applied to
  /// `direction`, stacked (outer block, inner block). Matches centered finite
  /// differences of lambda_residual.
  Eigen::VectorXd jacobian_times(double eps, const Gamma& gamma,
                                 const DensityTriple& state,
                                 const DensityTriple& direction) const;

  /// Weighted integrals of the two densities.
  double inner_density_integral(const DensityTriple& triple) const;
  double outer_data_integral() const { return w_outer_.dot(g_outer_vals_); }

 private:
  struct CrossBlocks {
    Eigen::MatrixXd wstar_outer_from_inner;  // targets on outer, sources eps*inner
    Eigen::MatrixXd wstar_inner_from_outer;  // targets eps*inner, sources outer
    Eigen::MatrixXd sl_inner_from_outer;     // S2(eps t - y) block
  };
  CrossBlocks cross_at(double eps) const;

  /// Argument of the rescaled nonlinearity at the inner nodes.
  Eigen::VectorXd nonlinearity_argument(const Gamma& gamma,
                                        const CrossBlocks& cross,
                                        const DensityTriple& triple) const;

  Eigen::MatrixXd jacobian(double eps, const Gamma& gamma,
                           const CrossBlocks& cross,
                           const Eigen::VectorXd& dtau_vals) const;

  LambdaResidual residual_impl(double eps, const Gamma& gamma,
                               const CrossBlocks& cross,
                               const DensityTriple& triple) const;

  ProblemSpec spec_;
  PeriodicRule outer_, inner_;
  Eigen::MatrixXd sl_outer_self_, wstar_outer_self_;
  Eigen::MatrixXd sl_inner_self_, wstar_inner_self_;
  Eigen::VectorXd g_outer_vals_, g_inner_vals_;
  Eigen::VectorXd w_outer_, w_inner_;
};

/// Convenience wrappers building a NystromSystem per call.
LambdaResidual assemble_lambda(const ProblemSpec& spec, double eps,
                               const Gamma& gamma, const DensityTriple& triple);
DensityTriple solve_linear(const ProblemSpec& spec, double eps);
DensityTriple solve_newton(const ProblemSpec& spec, double eps,
                           const DensityTriple& initial, double tol,
                           int max_iter, NewtonReport* report = nullptr);
Eigen::VectorXd reconstruct_field(const ProblemSpec& spec, double eps,
                                  const DensityTriple& triple,
                                  const PointSet& targets);
Eigen::VectorXd rescaled_field(const ProblemSpec& spec, double eps,
                               const DensityTriple& triple,
                               const PointSet& t_targets);
double energy(const ProblemSpec& spec, double eps, const DensityTriple& triple);

}  // namespace pinhole

#endif
