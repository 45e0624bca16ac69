#include "pinhole/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace pinhole {

double condition_estimate(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu,
                          const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  if (n == 0) return 0.0;
  const double norm_a = a.cwiseAbs().colwise().sum().maxCoeff();
  // Hager's estimator for ||A^{-1}||_1
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / double(n));
  double est = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    const Eigen::VectorXd y = lu.solve(x);
    est = y.lpNorm<1>();
    Eigen::VectorXd xi(n);
    for (Eigen::Index i = 0; i < n; ++i) xi[i] = (y[i] >= 0.0) ? 1.0 : -1.0;
    const Eigen::VectorXd z = lu.transpose().solve(xi);
    Eigen::Index j;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= z.dot(x)) break;
    x.setZero();
    x[j] = 1.0;
  }
  return est * norm_a;
}

Eigen::VectorXd guarded_solve(const Eigen::MatrixXd& a,
                              const Eigen::VectorXd& b,
                              const std::string& context,
                              double condition_limit) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double cond = condition_estimate(lu, a);
  if (!std::isfinite(cond) || cond > condition_limit)
    throw std::runtime_error(context + ": system ill-conditioned (estimate " +
                             std::to_string(cond) + ")");
  return lu.solve(b);
}

}  // namespace pinhole
