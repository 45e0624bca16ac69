#ifndef PINHOLE_LINALG_HPP
#define PINHOLE_LINALG_HPP

#include <Eigen/Dense>
#include <string>

namespace pinhole {

/// 1-norm condition estimate (Hager's method) from an existing factorization.
double condition_estimate(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu,
                          const Eigen::MatrixXd& a);

/// LU solve with partial pivoting, guarded by a condition estimate. Throws
/// std::runtime_error mentioning `context` when the estimate exceeds
/// `condition_limit` (default guard 1e12).
Eigen::VectorXd guarded_solve(const Eigen::MatrixXd& a,
                              const Eigen::VectorXd& b,
                              const std::string& context,
                              double condition_limit = 1e12);

}  // namespace pinhole

#endif
