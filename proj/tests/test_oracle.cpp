#include <doctest.h>

#include <cmath>

#include "pinhole/oracle.hpp"
#include "pinhole/system.hpp"

using namespace pinhole;

namespace {
constexpr double kPi = 3.14159265358979323846;

ToyConfig plain_toy(double a, double b) {
  ToyConfig cfg;
  cfg.a = a;
  cfg.b = b;
  return cfg;  // delta = 1, rho = 1, linear
}
}  // namespace

TEST_CASE("toy solution values") {
  const ToyConfig cfg = plain_toy(1.0, 0.0);
  // |x| = 1: a log 1 + (1/delta)(a/eps - b) - a log eps = 10 + log 10
  CHECK(toy_solution(cfg, 0.1, Vec2(1.0, 0.0)) ==
        doctest::Approx(10.0 + std::log(10.0)).epsilon(1e-14));
  // |x| = eps: (1/(eps*delta)) (a - b*eps/rho) = 10
  CHECK(toy_solution(cfg, 0.1, Vec2(0.1, 0.0)) ==
        doctest::Approx(10.0).epsilon(1e-12));
  CHECK(toy_solution(plain_toy(0.0, 0.0), 0.1, Vec2(0.5, 0.0)) == 0.0);
  CHECK_THROWS_AS(toy_solution(cfg, 0.1, Vec2(1.5, 0.0)), std::domain_error);
  CHECK_THROWS_AS(toy_solution(cfg, 0.1, Vec2(0.01, 0.0)), std::domain_error);
  CHECK_THROWS_AS(toy_solution(cfg, 1.2, Vec2(0.5, 0.0)), std::domain_error);
}

TEST_CASE("toy solution satisfies the hole Robin condition") {
  ToyConfig cfg = plain_toy(1.3, -0.7);
  cfg.scaling = ScalingFamily::power_log_delta(2.0, 0.0, 0.0)
                    .with_constant_rho(0.5);
  for (double eps : {0.1, 0.3}) {
    // radial derivative of a log|x| + B is a/|x|
    const double u_at_eps = toy_solution(cfg, eps, Vec2(eps, 0.0));
    const double lhs = cfg.a / eps;
    const double rhs = cfg.scaling.delta(eps) * u_at_eps +
                       cfg.b / cfg.scaling.rho(eps);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("scaled toy values approach the degeneration coefficient") {
  // eps*delta * u(eps, xbar) -> a - b r0 - a l0 for every built-in family
  const double a = 0.8, b = -0.4;
  const std::vector<ScalingFamily> families = {
      ScalingFamily::power_log_delta(1.0, 0.0, 0.0).with_constant_rho(1.0),
      ScalingFamily::power_log_delta(2.0, 0.5, 1.0).with_linear_rho(0.25),
      ScalingFamily::inverse_eps_log_delta(1.5).with_linear_rho(0.5),
      ScalingFamily::inverse_eps_log_delta(1.0).with_constant_rho(2.0),
  };
  for (const auto& fam : families) {
    ToyConfig cfg = plain_toy(a, b);
    cfg.scaling = fam;
    const double expect = a - b * fam.eps_over_rho_limit() -
                          a * fam.eps_delta_log_limit();
    const Vec2 xbar(0.5, 0.0);
    double prev_err = 1e300;
    double err = 0.0;
    for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
      const double scaled =
          fam.eps_delta(eps) * toy_solution(cfg, eps, xbar);
      err = std::abs(scaled - expect);
      CHECK(err < prev_err + 1e-12);
      prev_err = err;
    }
    // the inverse-log family converges only like 1/|log eps|
    const bool log_slow =
        fam.delta_kind() == ScalingFamily::DeltaKind::InverseEpsLog;
    CHECK(err < (log_slow ? 5e-2 : 1e-5));
  }
}

TEST_CASE("nonlinear toy reduces to the linear one for the linear family") {
  ToyConfig cfg = plain_toy(1.1, 0.6);
  cfg.scaling = ScalingFamily::power_log_delta(1.7, 0.0, 0.0)
                    .with_constant_rho(1.3);
  for (double eps : {0.05, 0.2, 0.5})
    for (double r : {eps * 1.5, 0.7})
      CHECK(toy_solution_nonlinear(cfg, eps, Vec2(r, 0.0)) ==
            doctest::Approx(toy_solution(cfg, eps, Vec2(r, 0.0)))
                .epsilon(1e-14));
}

TEST_CASE("nonlinear toy through the cubic built-in matches Newton inversion") {
  ToyConfig cfg = plain_toy(1.0, 0.0);
  cfg.scaling = ScalingFamily::power_log_delta(1.0, 0.0, 0.0)
                    .with_constant_rho(1.0)
                    .with_eta(Eigen::VectorXd::Constant(1, 1.0),
                              Eigen::VectorXd::Zero(1));
  cfg.nonlinearity = RobinNonlinearity::cubic();
  const double eps = 0.1;
  // raw family: F_eps(u) = u + (eps*delta)^2 u^3; invert at a/(eps*delta)=10
  const double u = cfg.nonlinearity.raw_inverse(10.0, 0.1, cfg.scaling.eta(eps));
  CHECK(u + 0.01 * u * u * u == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(toy_solution_nonlinear(cfg, eps, Vec2(1.0, 0.0)) ==
        doctest::Approx(u - std::log(eps)).epsilon(1e-13));
}

TEST_CASE("saturating family inverse can be undefined") {
  ToyConfig cfg = plain_toy(1.0, 0.0);
  cfg.scaling = ScalingFamily::power_log_delta(1.0, 0.0, 0.0)
                    .with_constant_rho(1.0)
                    .with_eta(Eigen::VectorXd::Constant(1, 0.5),
                              Eigen::VectorXd::Zero(1));
  cfg.nonlinearity = RobinNonlinearity::saturating();
  // required value a/(eps*delta) = 10 exceeds the saturation bound
  CHECK_THROWS_AS(toy_solution_nonlinear(cfg, 0.1, Vec2(1.0, 0.0)),
                  std::domain_error);
}

TEST_CASE("toy energy") {
  CHECK(toy_energy(plain_toy(1.0, 5.0), 0.1) ==
        doctest::Approx(2.0 * kPi * std::log(10.0)).epsilon(1e-14));
  CHECK(toy_energy(plain_toy(0.0, 3.0), 0.2) == 0.0);
  CHECK(toy_energy(plain_toy(2.0, 0.0), std::exp(-1.0)) ==
        doctest::Approx(8.0 * kPi).epsilon(1e-14));
}

TEST_CASE("linear limit root for disks") {
  CHECK(toy_xi_linear(1.0, 2.0, 0.5, 0.25) == doctest::Approx(0.0));
  CHECK(toy_xi_linear(0.7, 9.0, 0.0, 0.0) == doctest::Approx(0.7));
  CHECK(toy_xi_linear(0.0, 2.0, 0.3, 0.25) == doctest::Approx(-0.5));
}

TEST_CASE("exported density triple satisfies the system") {
  ToyConfig cfg = plain_toy(1.0, 2.0);
  const double eps = 0.1;
  const ProblemSpec spec = cfg.as_problem_spec(256, 256);
  const DensityTriple triple = toy_density_triple(cfg, eps, 256, 256);
  const Gamma gamma = canonical_gamma(spec.scaling, eps);
  const LambdaResidual res = assemble_lambda(spec, eps, gamma, triple);
  CHECK(res.sup_norm() < 1e-9);

  // zero data, zero triple: residual vanishes identically
  ToyConfig zero = plain_toy(0.0, 0.0);
  const DensityTriple t0 = toy_density_triple(zero, eps, 64, 64);
  CHECK(assemble_lambda(zero.as_problem_spec(64, 64), eps, gamma, t0)
            .sup_norm() == 0.0);
}
