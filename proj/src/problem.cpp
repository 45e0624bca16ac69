#include "pinhole/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace pinhole {

ScalingFamily ScalingFamily::power_log_delta(double d0, double p, double q) {
  if (!(d0 > 0.0)) throw std::invalid_argument("delta: d0 must be positive");
  if (p < 0.0) throw std::invalid_argument("delta: exponent p must be >= 0");
  ScalingFamily f;
  f.delta_kind_ = DeltaKind::PowerLog;
  f.d0_ = d0;
  f.p_ = p;
  f.q_ = q;
  return f;
}

ScalingFamily ScalingFamily::inverse_eps_log_delta(double d0) {
  if (!(d0 > 0.0)) throw std::invalid_argument("delta: d0 must be positive");
  ScalingFamily f;
  f.delta_kind_ = DeltaKind::InverseEpsLog;
  f.d0_ = d0;
  return f;
}

ScalingFamily& ScalingFamily::with_constant_rho(double value) {
  if (!(value > 0.0)) throw std::invalid_argument("rho: must be positive");
  rho_kind_ = RhoKind::Constant;
  rho_param_ = value;
  return *this;
}

ScalingFamily& ScalingFamily::with_linear_rho(double r0) {
  if (!(r0 > 0.0)) throw std::invalid_argument("rho: r0 must be positive");
  rho_kind_ = RhoKind::EpsOverR0;
  rho_param_ = r0;
  return *this;
}

ScalingFamily& ScalingFamily::with_eta(Eigen::VectorXd eta0,
                                       Eigen::VectorXd eta1) {
  if (eta0.size() != eta1.size())
    throw std::invalid_argument("eta: eta0 and eta1 dimensions differ");
  eta0_ = std::move(eta0);
  eta1_ = std::move(eta1);
  return *this;
}

double ScalingFamily::delta(double eps) const {
  if (!(eps > 0.0) || !(eps < 1.0))
    throw std::domain_error("scaling family defined on 0 < eps < 1");
  const double al = std::abs(std::log(eps));
  if (delta_kind_ == DeltaKind::PowerLog)
    return d0_ * std::pow(eps, p_) * std::pow(al, q_);
  return d0_ / (eps * al);
}

double ScalingFamily::rho(double eps) const {
  if (rho_kind_ == RhoKind::Constant) return rho_param_;
  return eps / rho_param_;
}

Eigen::VectorXd ScalingFamily::eta(double eps) const {
  return eta0_ + eps * eta1_;
}

double ScalingFamily::eps_delta_log(double eps) const {
  if (delta_kind_ == DeltaKind::InverseEpsLog) return -d0_;  // log/|log| = -1
  return eps_delta(eps) * std::log(eps);
}

double ScalingFamily::eps_delta_log_limit() const {
  return delta_kind_ == DeltaKind::PowerLog ? 0.0 : -d0_;
}

double ScalingFamily::eps_over_rho_limit() const {
  return rho_kind_ == RhoKind::Constant ? 0.0 : rho_param_;
}

RobinNonlinearity RobinNonlinearity::linear() {
  return RobinNonlinearity(Kind::Linear);
}
RobinNonlinearity RobinNonlinearity::cubic() {
  return RobinNonlinearity(Kind::Cubic);
}
RobinNonlinearity RobinNonlinearity::saturating() {
  return RobinNonlinearity(Kind::Saturating);
}

namespace {
double eta_coeff(const Eigen::VectorXd& eta) {
  if (eta.size() < 1)
    throw std::invalid_argument("nonlinearity reads eta[0] but eta is empty");
  return eta[0];
}
}  // namespace

double RobinNonlinearity::value(double tau, const Eigen::VectorXd& eta) const {
  switch (kind_) {
    case Kind::Linear:
      return tau;
    case Kind::Cubic:
      return tau + eta_coeff(eta) * tau * tau * tau;
    case Kind::Saturating: {
      const double c = eta_coeff(eta);
      if (!(c > 0.0))
        throw std::domain_error("saturating nonlinearity needs eta[0] > 0");
      return c * std::tanh(tau / c);
    }
  }
  return tau;
}

double RobinNonlinearity::dtau(double tau, const Eigen::VectorXd& eta) const {
  switch (kind_) {
    case Kind::Linear:
      return 1.0;
    case Kind::Cubic:
      return 1.0 + 3.0 * eta_coeff(eta) * tau * tau;
    case Kind::Saturating: {
      const double c = eta_coeff(eta);
      const double t = std::tanh(tau / c);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

double RobinNonlinearity::invert(double v, const Eigen::VectorXd& eta) const {
  switch (kind_) {
    case Kind::Linear:
      return v;
    case Kind::Cubic: {
      const double c = eta_coeff(eta);
      if (c < 0.0)
        throw std::domain_error(
            "F_eps not invertible at required value: non-monotone cubic");
      if (c == 0.0) return v;
      // unique real root of c t^3 + t - v = 0; Newton from the dominant branch
      double t = std::cbrt(v / c);
      if (std::abs(v) < 1.0) t = v;
      for (int it = 0; it < 100; ++it) {
        const double f = c * t * t * t + t - v;
        const double df = 3.0 * c * t * t + 1.0;
        const double step = f / df;
        t -= step;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(t))) break;
      }
      return t;
    }
    case Kind::Saturating: {
      const double c = eta_coeff(eta);
      if (!(std::abs(v) < c))
        throw std::domain_error(
            "F_eps not invertible at required value: outside saturating range");
      return c * std::atanh(v / c);
    }
  }
  return v;
}

double RobinNonlinearity::raw(double u, double eps_delta,
                              const Eigen::VectorXd& eta) const {
  return value(eps_delta * u, eta) / eps_delta;
}

double RobinNonlinearity::raw_inverse(double y, double eps_delta,
                                      const Eigen::VectorXd& eta) const {
  return invert(eps_delta * y, eta) / eps_delta;
}

double FourierSeries::operator()(double theta) const {
  double v = c0;
  for (std::size_t m = 1; m <= cos_coeffs.size(); ++m)
    v += cos_coeffs[m - 1] * std::cos(m * theta);
  for (std::size_t m = 1; m <= sin_coeffs.size(); ++m)
    v += sin_coeffs[m - 1] * std::sin(m * theta);
  return v;
}

void ProblemSpec::validate() const {
  if (nodes_outer < 8 || nodes_outer % 2 != 0 || nodes_inner < 8 ||
      nodes_inner % 2 != 0)
    throw std::invalid_argument("node counts must be even and >= 8");
  const int nyquist = std::min(nodes_outer, nodes_inner) / 2;
  if (g_outer.degree() >= nyquist || g_inner.degree() >= nyquist)
    throw std::invalid_argument(
        "boundary data truncation degree must stay below min(N_o,N_i)/2");
  if (scaling.eta_dim() < nonlinearity.required_eta_dim())
    throw std::invalid_argument("eta dimension too small for nonlinearity");
  containment();  // throws when a curve does not enclose the origin
}

void ProblemSpec::require_eps_in_range(double eps) const {
  const double hi = 0.8 * containment();
  if (!(eps >= 1e-4 && eps <= hi))
    throw std::domain_error(
        "eps outside the working range [1e-4, 0.8*containment] = [1e-4, " +
        std::to_string(hi) + "]");
}

Gamma canonical_gamma(const ScalingFamily& scaling, double eps) {
  Gamma g;
  g.g1 = scaling.eps_delta(eps);
  g.g2 = scaling.eps_delta_log(eps);
  g.g3 = scaling.eta(eps);
  g.g4 = scaling.eps_over_rho(eps);
  return g;
}

Gamma limit_gamma(const ScalingFamily& scaling) {
  Gamma g;
  g.g1 = 0.0;
  g.g2 = scaling.eps_delta_log_limit();
  g.g3 = scaling.eta_limit();
  g.g4 = scaling.eps_over_rho_limit();
  return g;
}

}  // namespace pinhole
