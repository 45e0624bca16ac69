#include "pinhole/system.hpp"

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
}  // namespace

NystromSystem::NystromSystem(const ProblemSpec& spec) : spec_(spec) {
  spec_.validate();
  outer_ = quadrature(spec_.outer, spec_.nodes_outer);
  inner_ = quadrature(spec_.inner, spec_.nodes_inner);
  sl_outer_self_ = single_layer_self_matrix(outer_);
  wstar_outer_self_ = wstar_self_matrix(outer_);
  sl_inner_self_ = single_layer_self_matrix(inner_);
  wstar_inner_self_ = wstar_self_matrix(inner_);
  g_outer_vals_ = sample_series(spec_.g_outer, outer_.theta);
  g_inner_vals_ = sample_series(spec_.g_inner, inner_.theta);
  w_outer_ = outer_.weights;
  w_inner_ = inner_.weights;
}

NystromSystem::CrossBlocks NystromSystem::cross_at(double eps) const {
  const double gap = min_distance(outer_.points, inner_.points, eps);
  const double spacing =
      std::max(outer_.max_spacing(), eps * inner_.max_spacing());
  if (gap < 2.0 * spacing)
    throw std::runtime_error(
        "boundary curves closer than two node spacings: increase N or reduce "
        "eps");
  CrossBlocks c;
  c.wstar_outer_from_inner =
      wstar_cross_matrix(outer_.points, outer_.normals, inner_, eps);
  PointSet scaled_inner = eps * inner_.points;
  c.wstar_inner_from_outer =
      wstar_cross_matrix(scaled_inner, inner_.normals, outer_, 1.0);
  c.sl_inner_from_outer = single_layer_matrix(scaled_inner, outer_, 1.0);
  return c;
}

Eigen::VectorXd NystromSystem::nonlinearity_argument(
    const Gamma& gamma, const CrossBlocks& cross,
    const DensityTriple& triple) const {
  Eigen::VectorXd arg = gamma.g1 * (cross.sl_inner_from_outer * triple.mu_outer +
                                    sl_inner_self_ * triple.mu_inner);
  arg.array() += gamma.g2 / kTwoPi * w_inner_.dot(triple.mu_inner) + triple.xi;
  return arg;
}

LambdaResidual NystromSystem::residual_impl(double eps, const Gamma& gamma,
                                            const CrossBlocks& cross,
                                            const DensityTriple& triple) const {
  LambdaResidual r;
  r.outer = -0.5 * triple.mu_outer + wstar_outer_self_ * triple.mu_outer +
            cross.wstar_outer_from_inner * triple.mu_inner - g_outer_vals_;
  const Eigen::VectorXd arg = nonlinearity_argument(gamma, cross, triple);
  Eigen::VectorXd fval(arg.size());
  for (Eigen::Index j = 0; j < arg.size(); ++j)
    fval[j] = spec_.nonlinearity.value(arg[j], gamma.g3);
  r.inner = 0.5 * triple.mu_inner +
            eps * (cross.wstar_inner_from_outer * triple.mu_outer) +
            wstar_inner_self_ * triple.mu_inner - fval -
            gamma.g4 * g_inner_vals_;
  return r;
}

LambdaResidual NystromSystem::lambda_residual(double eps, const Gamma& gamma,
                                              const DensityTriple& triple) const {
  spec_.require_eps_in_range(eps);
  return residual_impl(eps, gamma, cross_at(eps), triple);
}

Eigen::MatrixXd NystromSystem::jacobian(double eps, const Gamma& gamma,
                                        const CrossBlocks& cross,
                                        const Eigen::VectorXd& dtau_vals) const {
  const int no = outer_.n, ni = inner_.n;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(no + ni + 1, no + ni + 1);
  j.block(0, 0, no, no) =
      wstar_outer_self_ - 0.5 * Eigen::MatrixXd::Identity(no, no);
  j.block(0, no, no, ni) = cross.wstar_outer_from_inner;
  j.block(no, 0, ni, no) =
      eps * cross.wstar_inner_from_outer -
      dtau_vals.asDiagonal() * (gamma.g1 * cross.sl_inner_from_outer);
  j.block(no, no, ni, ni) =
      0.5 * Eigen::MatrixXd::Identity(ni, ni) + wstar_inner_self_ -
      dtau_vals.asDiagonal() *
          (gamma.g1 * sl_inner_self_ +
           (gamma.g2 / kTwoPi) * Eigen::VectorXd::Ones(ni) * w_inner_.transpose());
  j.block(no, no + ni, ni, 1) = -dtau_vals;
  j.block(no + ni, 0, 1, no) = w_outer_.transpose();
  return j;
}

DensityTriple NystromSystem::solve_linear(double eps) const {
  if (!spec_.nonlinearity.is_linear())
    throw std::invalid_argument("solve_linear: nonlinear spec, use solve_newton");
  spec_.require_eps_in_range(eps);
  const Gamma gamma = canonical_gamma(spec_.scaling, eps);
  const CrossBlocks cross = cross_at(eps);
  const int no = outer_.n, ni = inner_.n;
  const Eigen::MatrixXd j =
      jacobian(eps, gamma, cross, Eigen::VectorXd::Ones(ni));
  Eigen::VectorXd rhs(no + ni + 1);
  rhs.segment(0, no) = g_outer_vals_;
  rhs.segment(no, ni) = gamma.g4 * g_inner_vals_;
  rhs[no + ni] = 0.0;
  const Eigen::VectorXd x = guarded_solve(
      j, rhs,
      "solve_linear (eps=" + std::to_string(eps) +
          ", N=" + std::to_string(no) + "+" + std::to_string(ni) + ")");
  DensityTriple t;
  t.mu_outer = x.segment(0, no);
  t.mu_inner = x.segment(no, ni);
  t.xi = x[no + ni];
  return t;
}

DensityTriple NystromSystem::solve_newton(double eps,
                                          const DensityTriple& initial,
                                          double tol, int max_iter,
                                          NewtonReport* report) const {
  spec_.require_eps_in_range(eps);
  const Gamma gamma = canonical_gamma(spec_.scaling, eps);
  const CrossBlocks cross = cross_at(eps);
  const int no = outer_.n, ni = inner_.n;

  NewtonReport local;
  NewtonReport& rep = report ? *report : local;
  rep = NewtonReport{};

  DensityTriple cur = initial;
  auto sup = [&](const DensityTriple& t) {
    LambdaResidual r = residual_impl(eps, gamma, cross, t);
    double mean_row = std::abs(w_outer_.dot(t.mu_outer));
    return std::max(r.sup_norm(), mean_row);
  };

  double res = sup(cur);
  rep.residual_history.push_back(res);
  double best = res;
  for (int it = 0; it < max_iter; ++it) {
    if (res <= tol) {
      rep.converged = true;
      return cur;
    }
    const Eigen::VectorXd arg = nonlinearity_argument(gamma, cross, cur);
    Eigen::VectorXd dtau_vals(ni);
    for (int j = 0; j < ni; ++j)
      dtau_vals[j] = spec_.nonlinearity.dtau(arg[j], gamma.g3);
    const Eigen::MatrixXd jac = jacobian(eps, gamma, cross, dtau_vals);
    const LambdaResidual r = residual_impl(eps, gamma, cross, cur);
    Eigen::VectorXd f(no + ni + 1);
    f.segment(0, no) = r.outer;
    f.segment(no, ni) = r.inner;
    f[no + ni] = w_outer_.dot(cur.mu_outer);
    Eigen::VectorXd step;
    try {
      step = guarded_solve(jac, -f, "solve_newton jacobian");
    } catch (const std::runtime_error&) {
      throw std::runtime_error(
          "solve_newton: nondegeneracy condition violated near iterate " +
          std::to_string(it));
    }
    // step halving on residual increase widens the local basin
    double scale = 1.0;
    DensityTriple next;
    double next_res = 0.0;
    for (int h = 0; h <= 8; ++h) {
      next.mu_outer = cur.mu_outer + scale * step.segment(0, no);
      next.mu_inner = cur.mu_inner + scale * step.segment(no, ni);
      next.xi = cur.xi + scale * step[no + ni];
      next_res = sup(next);
      if (next_res < res || h == 8) break;
      scale *= 0.5;
    }
    cur = next;
    res = next_res;
    best = std::min(best, res);
    rep.iterations = it + 1;
    rep.residual_history.push_back(res);
  }
  if (res <= tol) {
    rep.converged = true;
    return cur;
  }
  throw std::runtime_error("solve_newton: max_iter (" +
                           std::to_string(max_iter) +
                           ") exceeded, best residual " + std::to_string(best));
}

Eigen::VectorXd NystromSystem::reconstruct(double eps,
                                           const DensityTriple& triple,
                                           const PointSet& targets) const {
  spec_.require_eps_in_range(eps);
  for (Eigen::Index i = 0; i < targets.rows(); ++i) {
    const Vec2 x = targets.row(i);
    if (!spec_.outer.contains(x))
      throw std::domain_error("reconstruct: target outside the outer domain");
    if (spec_.inner.scaled(eps).contains(x))
      throw std::domain_error("reconstruct: target inside the hole");
  }
  Eigen::VectorXd u = single_layer_matrix(targets, outer_, 1.0) * triple.mu_outer;
  u += single_layer_matrix(targets, inner_, eps) * triple.mu_inner;
  u.array() += triple.xi / (spec_.scaling.delta(eps) * eps);
  return u;
}

Eigen::VectorXd NystromSystem::rescaled(double eps, const DensityTriple& triple,
                                        const PointSet& t_targets) const {
  spec_.require_eps_in_range(eps);
  PointSet physical = eps * t_targets;
  for (Eigen::Index i = 0; i < t_targets.rows(); ++i) {
    const Vec2 t = t_targets.row(i);
    if (spec_.inner.contains(t))
      throw std::domain_error("rescaled: target inside the hole shape");
    if (!spec_.outer.contains(Vec2(physical.row(i))))
      throw std::domain_error("rescaled: eps*t outside the outer domain");
  }
  Eigen::VectorXd u = single_layer_matrix(physical, outer_, 1.0) * triple.mu_outer;
  u += single_layer_matrix(t_targets, inner_, 1.0) * triple.mu_inner;
  u.array() += std::log(eps) / kTwoPi * w_inner_.dot(triple.mu_inner) +
               triple.xi / (spec_.scaling.delta(eps) * eps);
  return u;
}

double NystromSystem::energy(double eps, const DensityTriple& triple) const {
  spec_.require_eps_in_range(eps);
  const CrossBlocks cross = cross_at(eps);
  const double z = w_inner_.dot(triple.mu_inner);

  // outer boundary: trace and normal derivative of u - c_eps, where c_eps
  // collects the constant log(eps)/(2pi)*z + xi/(delta*eps) level
  PointSet scaled_inner = eps * inner_.points;
  const Eigen::MatrixXd sl_outer_from_inner =
      single_layer_matrix(outer_.points, inner_, eps);
  Eigen::VectorXd trace_outer = sl_outer_self_ * triple.mu_outer +
                                sl_outer_from_inner * triple.mu_inner;
  trace_outer.array() -= std::log(eps) / kTwoPi * z;
  const Eigen::VectorXd dnu_outer =
      -0.5 * triple.mu_outer + wstar_outer_self_ * triple.mu_outer +
      cross.wstar_outer_from_inner * triple.mu_inner;

  // hole boundary in rescaled coordinates: u(eps,eps t) - c_eps and its
  // t-gradient normal component, exterior trace of the inner layer
  const Eigen::VectorXd trace_inner =
      cross.sl_inner_from_outer * triple.mu_outer +
      sl_inner_self_ * triple.mu_inner;
  const Eigen::VectorXd dnu_inner =
      eps * (cross.wstar_inner_from_outer * triple.mu_outer) +
      0.5 * triple.mu_inner + wstar_inner_self_ * triple.mu_inner;

  return w_outer_.dot(trace_outer.cwiseProduct(dnu_outer)) -
         w_inner_.dot(trace_inner.cwiseProduct(dnu_inner));
}

LambdaResidual NystromSystem::boundary_condition_residual(
    double eps, const DensityTriple& triple) const {
  const CrossBlocks cross = cross_at(eps);
  LambdaResidual r;
  r.outer = -0.5 * triple.mu_outer + wstar_outer_self_ * triple.mu_outer +
            cross.wstar_outer_from_inner * triple.mu_inner - g_outer_vals_;
  // physical normal derivative on eps*curve is (1/eps) * t-derivative
  const Eigen::VectorXd dnu_physical =
      (eps * (cross.wstar_inner_from_outer * triple.mu_outer) +
       0.5 * triple.mu_inner + wstar_inner_self_ * triple.mu_inner) /
      eps;
  // u on the hole boundary via the rescaled identity
  Eigen::VectorXd u_on_hole = cross.sl_inner_from_outer * triple.mu_outer +
                              sl_inner_self_ * triple.mu_inner;
  u_on_hole.array() += std::log(eps) / kTwoPi * w_inner_.dot(triple.mu_inner) +
                       triple.xi / (spec_.scaling.delta(eps) * eps);
  const double delta = spec_.scaling.delta(eps);
  const double rho = spec_.scaling.rho(eps);
  const double eps_delta = spec_.scaling.eps_delta(eps);
  const Eigen::VectorXd eta = spec_.scaling.eta(eps);
  Eigen::VectorXd robin(inner_.n);
  for (int j = 0; j < inner_.n; ++j)
    robin[j] = delta * spec_.nonlinearity.raw(u_on_hole[j], eps_delta, eta) +
               g_inner_vals_[j] / rho;
  r.inner = dnu_physical - robin;
  return r;
}

Eigen::VectorXd NystromSystem::jacobian_times(
    double eps, const Gamma& gamma, const DensityTriple& state,
    const DensityTriple& direction) const {
  const CrossBlocks cross = cross_at(eps);
  const int no = outer_.n, ni = inner_.n;
  const Eigen::VectorXd arg = nonlinearity_argument(gamma, cross, state);
  Eigen::VectorXd dtau_vals(ni);
  for (int j = 0; j < ni; ++j)
    dtau_vals[j] = spec_.nonlinearity.dtau(arg[j], gamma.g3);
  const Eigen::MatrixXd jac = jacobian(eps, gamma, cross, dtau_vals);
  Eigen::VectorXd dir(no + ni + 1);
  dir << direction.mu_outer, direction.mu_inner, direction.xi;
  return (jac * dir).head(no + ni);
}

double NystromSystem::inner_density_integral(const DensityTriple& triple) const {
  return w_inner_.dot(triple.mu_inner);
}

LambdaResidual assemble_lambda(const ProblemSpec& spec, double eps,
                               const Gamma& gamma, const DensityTriple& triple) {
  return NystromSystem(spec).lambda_residual(eps, gamma, triple);
}

DensityTriple solve_linear(const ProblemSpec& spec, double eps) {
  return NystromSystem(spec).solve_linear(eps);
}

DensityTriple solve_newton(const ProblemSpec& spec, double eps,
                           const DensityTriple& initial, double tol,
                           int max_iter, NewtonReport* report) {
  return NystromSystem(spec).solve_newton(eps, initial, tol, max_iter, report);
}

Eigen::VectorXd reconstruct_field(const ProblemSpec& spec, double eps,
                                  const DensityTriple& triple,
                                  const PointSet& targets) {
  return NystromSystem(spec).reconstruct(eps, triple, targets);
}

Eigen::VectorXd rescaled_field(const ProblemSpec& spec, double eps,
                               const DensityTriple& triple,
                               const PointSet& t_targets) {
  return NystromSystem(spec).rescaled(eps, triple, t_targets);
}

double energy(const ProblemSpec& spec, double eps,
              const DensityTriple& triple) {
  return NystromSystem(spec).energy(eps, triple);
}

}  // namespace pinhole
