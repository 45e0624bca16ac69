#ifndef PINHOLE_PROBLEM_HPP
#define PINHOLE_PROBLEM_HPP

#include <Eigen/Dense>
#include <vector>

#include "pinhole/geometry.hpp"

namespace pinhole {

/// The degeneration regime: delta(eps), rho(eps), eta(eps) and their limits.
/// Built-in delta families: d0 * eps^p * |log eps|^q (p >= 0), and the
/// distinguished d0 / (eps |log eps|). Built-in rho families: a positive
/// constant, or eps / r0. eta(eps) = eta0 + eps*eta1 is affine.
class ScalingFamily {
 public:
  enum class DeltaKind { PowerLog, InverseEpsLog };
  enum class RhoKind { Constant, EpsOverR0 };

  static ScalingFamily power_log_delta(double d0, double p, double q);
  static ScalingFamily inverse_eps_log_delta(double d0);

  ScalingFamily& with_constant_rho(double value);
  ScalingFamily& with_linear_rho(double r0);
  ScalingFamily& with_eta(Eigen::VectorXd eta0, Eigen::VectorXd eta1);

  double delta(double eps) const;
  double rho(double eps) const;
  Eigen::VectorXd eta(double eps) const;

  double eps_delta(double eps) const { return eps * delta(eps); }
  double eps_delta_log(double eps) const;
  double eps_over_rho(double eps) const { return eps / rho(eps); }

  /// Limits as eps -> 0 of eps*delta*log(eps), eps/rho, eta.
  double eps_delta_log_limit() const;
  double eps_over_rho_limit() const;
  const Eigen::VectorXd& eta_limit() const { return eta0_; }

  DeltaKind delta_kind() const { return delta_kind_; }
  RhoKind rho_kind() const { return rho_kind_; }
  int eta_dim() const { return static_cast<int>(eta0_.size()); }

 private:
  ScalingFamily() = default;
  DeltaKind delta_kind_ = DeltaKind::PowerLog;
  double d0_ = 1.0, p_ = 0.0, q_ = 0.0;
  RhoKind rho_kind_ = RhoKind::Constant;
  double rho_param_ = 1.0;  // constant value, or r0
  Eigen::VectorXd eta0_ = Eigen::VectorXd(0), eta1_ = Eigen::VectorXd(0);
};

/// Rescaled Robin nonlinearity F~(tau, eta) with tau-derivative. The raw
/// family and its inverse are derived from the consistency relation
/// eps*delta * F_eps(tau/(eps*delta)) = F~(tau, eta(eps)), i.e.
/// F_eps(u) = F~(eps*delta*u, eta(eps)) / (eps*delta).
class RobinNonlinearity {
 public:
  enum class Kind { Linear, Cubic, Saturating };

  static RobinNonlinearity linear();
  /// F~ = tau + eta[0] * tau^3
  static RobinNonlinearity cubic();
  /// F~ = eta[0] * tanh(tau / eta[0]); requires eta[0] > 0
  static RobinNonlinearity saturating();

  double value(double tau, const Eigen::VectorXd& eta) const;
  double dtau(double tau, const Eigen::VectorXd& eta) const;

  /// Solve F~(tau, eta) = v for tau. Throws when undefined (outside the
  /// saturating range, or a non-monotone cubic).
  double invert(double v, const Eigen::VectorXd& eta) const;

  double raw(double u, double eps_delta, const Eigen::VectorXd& eta) const;
  double raw_inverse(double y, double eps_delta,
                     const Eigen::VectorXd& eta) const;

  Kind kind() const { return kind_; }
  bool is_linear() const { return kind_ == Kind::Linear; }
  /// Minimum eta dimension this kind reads.
  int required_eta_dim() const { return kind_ == Kind::Linear ? 0 : 1; }

 private:
  explicit RobinNonlinearity(Kind k) : kind_(k) {}
  Kind kind_;
};

/// Truncated Fourier series in the boundary parameter:
/// f(t) = c0 + sum_m (cos_coeffs[m-1] cos(m t) + sin_coeffs[m-1] sin(m t)).
struct FourierSeries {
  double c0 = 0.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;

  double operator()(double theta) const;
  int degree() const {
    return static_cast<int>(std::max(cos_coeffs.size(), sin_coeffs.size()));
  }
  static FourierSeries constant(double c) { return {c, {}, {}}; }
};

/// Full finite-eps problem description. Validated on construction via
/// validate(): node counts even and >= 8, Fourier truncation below the
/// Nyquist bound, curves enclosing the origin, eta dimension sufficient.
struct ProblemSpec {
  ClosedCurve outer = ClosedCurve::circle(1.0);
  ClosedCurve inner = ClosedCurve::circle(1.0);
  FourierSeries g_outer;
  FourierSeries g_inner;
  ScalingFamily scaling = ScalingFamily::power_log_delta(1.0, 0.0, 0.0);
  RobinNonlinearity nonlinearity = RobinNonlinearity::linear();
  int nodes_outer = 128;
  int nodes_inner = 128;

  void validate() const;
  double containment() const { return containment_radius(outer, inner); }
  /// Working eps range [1e-4, 0.8 * containment]; solves outside it are
  /// refused (below 1e-4 the 1/(eps*delta) reconstruction term may overflow).
  void require_eps_in_range(double eps) const;
};

/// Discretized unknown of the integral system: densities at the two rules'
/// nodes plus the scalar xi. mu_outer is constrained to zero weighted mean.
struct DensityTriple {
  Eigen::VectorXd mu_outer;
  Eigen::VectorXd mu_inner;
  double xi = 0.0;
};

/// The auxiliary variables replacing (eps*delta, eps*delta*log eps, eta,
/// eps/rho) in the system operator.
struct Gamma {
  double g1 = 0.0;
  double g2 = 0.0;
  Eigen::VectorXd g3 = Eigen::VectorXd(0);
  double g4 = 0.0;
};

/// Gamma evaluated on the scaling family at finite eps.
Gamma canonical_gamma(const ScalingFamily& scaling, double eps);
/// Gamma at the eps -> 0 limit: (0, l0, eta0, r0).
Gamma limit_gamma(const ScalingFamily& scaling);

}  // namespace pinhole

#endif
