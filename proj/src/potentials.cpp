#include "pinhole/potentials.hpp"

#include <cmath>
#include <stdexcept>

namespace pinhole {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

double fundamental_solution(const Vec2& x) {
  const double r = x.norm();
  if (r == 0.0)
    throw std::domain_error("fundamental solution undefined at the origin");
  return std::log(r) / kTwoPi;
}

Vec2 fundamental_solution_gradient(const Vec2& x) {
  const double r2 = x.squaredNorm();
  if (r2 == 0.0)
    throw std::domain_error("fundamental solution undefined at the origin");
  return x / (kTwoPi * r2);
}

Eigen::VectorXd kress_log_weights(int n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("kress_log_weights: n must be even");
  const int half = n / 2;
  Eigen::VectorXd r(n);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int m = 1; m < half; ++m)
      acc += std::cos(m * k * kPi / half) / m;
    r[k] = -(kTwoPi / half) * acc - (kPi / (half * half)) * std::cos(k * kPi);
  }
  return r;
}

Eigen::MatrixXd single_layer_self_matrix(const PeriodicRule& rule) {
  const int n = rule.n;
  const Eigen::VectorXd r = kress_log_weights(n);
  const double h = kTwoPi / n;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double smooth;
      if (i == j) {
        smooth = std::log(rule.speeds[i]) / kTwoPi;
      } else {
        const double d =
            (rule.points.row(i) - rule.points.row(j)).norm();
        const double s = 2.0 * std::abs(std::sin((rule.theta[i] - rule.theta[j]) / 2.0));
        smooth = std::log(d / s) / kTwoPi;
      }
      m(i, j) = (r[std::abs(i - j)] / (2.0 * kTwoPi) + h * smooth) * rule.speeds[j];
    }
  }
  return m;
}

Eigen::MatrixXd wstar_self_matrix(const PeriodicRule& rule,
                                  double diagonal_sign) {
  const int n = rule.n;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        m(i, j) = diagonal_sign * rule.curvatures[i] / (2.0 * kTwoPi) *
                  rule.weights[j];
      } else {
        const Vec2 d = rule.points.row(i) - rule.points.row(j);
        m(i, j) = rule.normals.row(i).dot(d.transpose()) /
                  (kTwoPi * d.squaredNorm()) * rule.weights[j];
      }
    }
  }
  return m;
}

double min_distance(const PointSet& targets, const PointSet& source_points,
                    double source_scale) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < targets.rows(); ++i)
    for (Eigen::Index j = 0; j < source_points.rows(); ++j)
      best = std::min(best, (targets.row(i) - source_scale * source_points.row(j)).norm());
  return best;
}

Eigen::MatrixXd single_layer_matrix(const PointSet& targets,
                                    const PeriodicRule& source,
                                    double source_scale) {
  if (!(source_scale > 0.0))
    throw std::invalid_argument("single layer: source scale must be positive");
  const double clearance = source_scale * source.max_spacing();
  if (min_distance(targets, source.points, source_scale) <= clearance)
    throw std::runtime_error(
        "single layer target within one node spacing of the source curve; "
        "use the on-boundary trace (near-boundary evaluation unsupported)");
  Eigen::MatrixXd m(targets.rows(), source.n);
  for (Eigen::Index i = 0; i < targets.rows(); ++i)
    for (int j = 0; j < source.n; ++j) {
      const Vec2 d = targets.row(i) - source_scale * source.points.row(j);
      m(i, j) = std::log(d.norm()) / kTwoPi * source.weights[j];
    }
  return m;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> single_layer_gradient_matrices(
    const PointSet& targets, const PeriodicRule& source, double source_scale) {
  const double clearance = source_scale * source.max_spacing();
  if (min_distance(targets, source.points, source_scale) <= clearance)
    throw std::runtime_error(
        "single layer gradient target within one node spacing of the source "
        "curve");
  Eigen::MatrixXd mx(targets.rows(), source.n), my(targets.rows(), source.n);
  for (Eigen::Index i = 0; i < targets.rows(); ++i)
    for (int j = 0; j < source.n; ++j) {
      const Vec2 d = targets.row(i) - source_scale * source.points.row(j);
      const Vec2 g = d / (kTwoPi * d.squaredNorm()) * source.weights[j];
      mx(i, j) = g.x();
      my(i, j) = g.y();
    }
  return {mx, my};
}

Eigen::MatrixXd wstar_cross_matrix(const PointSet& targets,
                                   const PointSet& target_normals,
                                   const PeriodicRule& source,
                                   double source_scale) {
  const double clearance = 2.0 * source_scale * source.max_spacing();
  if (min_distance(targets, source.points, source_scale) <= clearance)
    throw std::runtime_error(
        "cross interaction curves too close: increase N or reduce eps");
  Eigen::MatrixXd m(targets.rows(), source.n);
  for (Eigen::Index i = 0; i < targets.rows(); ++i)
    for (int j = 0; j < source.n; ++j) {
      const Vec2 d = targets.row(i) - source_scale * source.points.row(j);
      m(i, j) = target_normals.row(i).dot(d.transpose()) /
                (kTwoPi * d.squaredNorm()) * source.weights[j];
    }
  return m;
}

Eigen::VectorXd single_layer_onboundary(const PeriodicRule& rule,
                                        const Eigen::VectorXd& mu) {
  return single_layer_self_matrix(rule) * mu;
}

Eigen::VectorXd single_layer_offboundary(const PeriodicRule& source,
                                         const Eigen::VectorXd& mu,
                                         const PointSet& targets,
                                         double source_scale) {
  return single_layer_matrix(targets, source, source_scale) * mu;
}

Eigen::VectorXd wstar_apply(const PeriodicRule& rule,
                            const Eigen::VectorXd& mu) {
  return wstar_self_matrix(rule) * mu;
}

Eigen::VectorXd wstar_apply_cross(const PointSet& targets,
                                  const PointSet& target_normals,
                                  const PeriodicRule& source,
                                  const Eigen::VectorXd& mu,
                                  double source_scale) {
  return wstar_cross_matrix(targets, target_normals, source, source_scale) * mu;
}

Eigen::VectorXd neumann_trace(const PeriodicRule& rule,
                              const Eigen::VectorXd& mu, Side side) {
  const double jump = (side == Side::Interior) ? -0.5 : 0.5;
  return jump * mu + wstar_apply(rule, mu);
}

double gauss_point_flux(const PeriodicRule& rule) {
  double acc = 0.0;
  for (int j = 0; j < rule.n; ++j) {
    const Vec2 x = rule.points.row(j);
    acc += rule.normals.row(j).dot(x.transpose()) /
           (kTwoPi * x.squaredNorm()) * rule.weights[j];
  }
  return acc;
}

}  // namespace pinhole
