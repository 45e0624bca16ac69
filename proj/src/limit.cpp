#include "pinhole/limit.hpp"

#include <cmath>
#include <stdexcept>

#include "pinhole/linalg.hpp"

namespace pinhole {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

Eigen::VectorXd sample_series(const FourierSeries& f,
                              const Eigen::VectorXd& theta) {
  Eigen::VectorXd v(theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) v[j] = f(theta[j]);
  return v;
}

struct LimitContext {
  PeriodicRule outer, inner;
  Eigen::VectorXd g_outer_vals, g_inner_vals;
  double int_g_outer = 0.0, int_g_inner = 0.0, inner_length = 0.0;
  double log_limit = 0.0;   // limit of eps*delta*log(eps)
  double rho_limit = 0.0;   // limit of eps/rho
  Eigen::VectorXd eta0;

  explicit LimitContext(const ProblemSpec& spec) {
    spec.validate();
    outer = quadrature(spec.outer, spec.nodes_outer);
    inner = quadrature(spec.inner, spec.nodes_inner);
    g_outer_vals = sample_series(spec.g_outer, outer.theta);
    g_inner_vals = sample_series(spec.g_inner, inner.theta);
    int_g_outer = outer.weights.dot(g_outer_vals);
    int_g_inner = inner.weights.dot(g_inner_vals);
    inner_length = inner.length();
    log_limit = spec.scaling.eps_delta_log_limit();
    rho_limit = spec.scaling.eps_over_rho_limit();
    eta0 = spec.scaling.eta_limit();
  }

  double root_argument(double xi) const {
    return log_limit / kTwoPi * int_g_outer + xi;
  }
  double root_rhs() const {
    return (int_g_outer - rho_limit * int_g_inner) / inner_length;
  }
};
}  // namespace

Eigen::VectorXd solve_mu_o_limit(const ProblemSpec& spec) {
  const LimitContext ctx(spec);
  const int n = ctx.outer.n;
  const Eigen::MatrixXd wstar = wstar_self_matrix(ctx.outer);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n + 1);
  a.block(0, 0, n, n) = wstar - 0.5 * Eigen::MatrixXd::Identity(n, n);
  a.block(0, n, n, 1) = Eigen::VectorXd::Ones(n);
  a.block(n, 0, 1, n) = ctx.outer.weights.transpose();
  Eigen::VectorXd rhs(n + 1);
  for (int j = 0; j < n; ++j) {
    const Vec2 x = ctx.outer.points.row(j);
    const double dnu_s2 = ctx.outer.normals.row(j).dot(x.transpose()) /
                          (kTwoPi * x.squaredNorm());
    rhs[j] = ctx.g_outer_vals[j] - dnu_s2 * ctx.int_g_outer;
  }
  rhs[n] = 0.0;
  const Eigen::VectorXd sol = guarded_solve(a, rhs, "solve_mu_o_limit");
  return sol.segment(0, n);
}

std::vector<XiRoot> xi_roots(const ProblemSpec& spec,
                             const XiRootOptions& options) {
  const LimitContext ctx(spec);
  const double rhs = ctx.root_rhs();
  const auto f = [&](double xi) {
    return spec.nonlinearity.value(ctx.root_argument(xi), ctx.eta0) - rhs;
  };
  std::vector<XiRoot> roots;
  const int m = options.samples;
  const double lo = -options.bracket, hi = options.bracket;
  double xprev = lo, fprev = f(lo);
  for (int k = 1; k <= m; ++k) {
    const double x = lo + (hi - lo) * k / m;
    const double fx = f(x);
    const bool crossing = (fprev == 0.0) || (fprev * fx < 0.0);
    if (crossing) {
      double a = xprev, b = x;
      if (fprev == 0.0) {
        b = a;
      } else {
        double fa = fprev;
        for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
          const double mid = 0.5 * (a + b);
          const double fm = f(mid);
          if (fa * fm <= 0.0) {
            b = mid;
          } else {
            a = mid;
            fa = fm;
          }
        }
      }
      XiRoot root;
      root.xi = 0.5 * (a + b);
      root.residual = f(root.xi);
      root.dtau =
          spec.nonlinearity.dtau(ctx.root_argument(root.xi), ctx.eta0);
      root.degenerate = std::abs(root.dtau) < options.degenerate_threshold;
      roots.push_back(root);
    }
    xprev = x;
    fprev = fx;
  }
  return roots;
}

Eigen::VectorXd solve_mu_i_limit(const ProblemSpec& spec, double xi) {
  const LimitContext ctx(spec);
  const int n = ctx.inner.n;
  const Eigen::MatrixXd wstar = wstar_self_matrix(ctx.inner);
  const Eigen::MatrixXd a =
      0.5 * Eigen::MatrixXd::Identity(n, n) + wstar;
  const double fval =
      spec.nonlinearity.value(ctx.root_argument(xi), ctx.eta0);
  Eigen::VectorXd rhs(n);
  for (int j = 0; j < n; ++j)
    rhs[j] = fval + ctx.g_inner_vals[j] * ctx.rho_limit;
  return guarded_solve(a, rhs, "solve_mu_i_limit");
}

LimitSolution solve_limit(const ProblemSpec& spec, int root_index,
                          const XiRootOptions& options) {
  const std::vector<XiRoot> roots = xi_roots(spec, options);
  if (roots.empty())
    throw std::runtime_error(
        "limit system has no xi root in the scan bracket (existence "
        "assumption unsatisfiable there)");
  if (root_index < 0 || root_index >= static_cast<int>(roots.size()))
    throw std::out_of_range("root index out of range: " +
                            std::to_string(roots.size()) + " roots found");
  LimitSolution sol;
  sol.mu_outer = solve_mu_o_limit(spec);
  sol.xi = roots[root_index].xi;
  sol.mu_inner = solve_mu_i_limit(spec, sol.xi);
  sol.root_index = root_index;
  sol.root_residual = roots[root_index].residual;
  sol.degenerate_root = roots[root_index].degenerate;
  return sol;
}

LimitFields limit_fields(const ProblemSpec& spec, const LimitSolution& sol,
                         const PointSet& macro_targets,
                         const PointSet& micro_targets) {
  const LimitContext ctx(spec);
  LimitFields out;
  out.z_m = ctx.inner.weights.dot(sol.mu_inner);
  // macroscopic: single layer of mu_outer plus the point-source shift
  out.u_macro.resize(macro_targets.rows());
  if (macro_targets.rows() > 0) {
    const Eigen::VectorXd base =
        single_layer_matrix(macro_targets, ctx.outer, 1.0) * sol.mu_outer;
    for (Eigen::Index i = 0; i < macro_targets.rows(); ++i)
      out.u_macro[i] =
          base[i] + fundamental_solution(macro_targets.row(i)) * ctx.int_g_outer;
  }
  // microscopic: inner single layer plus the constant carried over from the
  // outer density evaluated at the degeneration point
  const double shift = [&] {
    double acc = 0.0;
    for (int j = 0; j < ctx.outer.n; ++j)
      acc += fundamental_solution(ctx.outer.points.row(j)) *
             sol.mu_outer[j] * ctx.outer.weights[j];
    return acc;
  }();
  out.u_micro.resize(micro_targets.rows());
  if (micro_targets.rows() > 0) {
    const Eigen::VectorXd base =
        single_layer_matrix(micro_targets, ctx.inner, 1.0) * sol.mu_inner;
    for (Eigen::Index i = 0; i < micro_targets.rows(); ++i)
      out.u_micro[i] = base[i] + shift;
  }
  return out;
}

EnergyCoefficients limit_energy_coefficients(const ProblemSpec& spec,
                                             const LimitSolution& sol) {
  const LimitContext ctx(spec);
  EnergyCoefficients out;

  // outer boundary: traces of u_M + S2 * Int g^o via jump relations
  const Eigen::MatrixXd sl_outer = single_layer_self_matrix(ctx.outer);
  const Eigen::MatrixXd wstar_outer = wstar_self_matrix(ctx.outer);
  Eigen::VectorXd trace_outer = sl_outer * sol.mu_outer;
  Eigen::VectorXd dnu_outer =
      -0.5 * sol.mu_outer + wstar_outer * sol.mu_outer;
  for (int j = 0; j < ctx.outer.n; ++j) {
    const Vec2 x = ctx.outer.points.row(j);
    trace_outer[j] += fundamental_solution(x) * ctx.int_g_outer;
    dnu_outer[j] += ctx.outer.normals.row(j).dot(x.transpose()) /
                    (kTwoPi * x.squaredNorm()) * ctx.int_g_outer;
  }

  // hole boundary: exterior traces of u_m
  const Eigen::MatrixXd sl_inner = single_layer_self_matrix(ctx.inner);
  const Eigen::MatrixXd wstar_inner = wstar_self_matrix(ctx.inner);
  double shift = 0.0;
  for (int j = 0; j < ctx.outer.n; ++j)
    shift += fundamental_solution(ctx.outer.points.row(j)) * sol.mu_outer[j] *
             ctx.outer.weights[j];
  Eigen::VectorXd trace_inner = sl_inner * sol.mu_inner;
  trace_inner.array() += shift;
  const Eigen::VectorXd dnu_inner =
      0.5 * sol.mu_inner + wstar_inner * sol.mu_inner;

  out.e1 = ctx.outer.weights.dot(trace_outer.cwiseProduct(dnu_outer)) -
           ctx.inner.weights.dot(trace_inner.cwiseProduct(dnu_inner));
  const double z = ctx.inner.weights.dot(sol.mu_inner);
  out.e2 = -z * ctx.outer.weights.dot(dnu_outer) / kTwoPi;
  out.e2_direct = -ctx.int_g_outer * ctx.int_g_outer / kTwoPi;
  return out;
}

}  // namespace pinhole
