#include <doctest.h>

#include <cmath>
#include <random>

#include "pinhole/limit.hpp"
#include "pinhole/oracle.hpp"
#include "pinhole/system.hpp"

using namespace pinhole;

namespace {
constexpr double kPi = 3.14159265358979323846;

ProblemSpec annulus_spec(double a, double b, int n = 128) {
  ToyConfig cfg;
  cfg.a = a;
  cfg.b = b;
  return cfg.as_problem_spec(n, n);
}

ProblemSpec general_spec(int n = 64) {
  ProblemSpec spec;
  spec.outer = ClosedCurve::ellipse(1.5, 1.0);
  spec.inner = ClosedCurve::star(1.0, 0.2, 3);
  spec.g_outer = FourierSeries{0.25, {0.15}, {}};
  spec.g_inner = FourierSeries{0.125, {}, {0.1}};
  spec.scaling = ScalingFamily::inverse_eps_log_delta(1.0).with_linear_rho(0.5);
  spec.nonlinearity = RobinNonlinearity::linear();
  spec.nodes_outer = n;
  spec.nodes_inner = n;
  return spec;
}

PointSet one_point(double x, double y) {
  PointSet p(1, 2);
  p << x, y;
  return p;
}
}  // namespace

TEST_CASE("scaling family limits and validation") {
  const auto power = ScalingFamily::power_log_delta(2.0, 0.5, 1.0);
  CHECK(power.eps_delta_log_limit() == 0.0);
  CHECK(power.delta(0.1) ==
        doctest::Approx(2.0 * std::sqrt(0.1) * std::abs(std::log(0.1))));
  const auto inv = ScalingFamily::inverse_eps_log_delta(3.0);
  CHECK(inv.eps_delta_log_limit() == doctest::Approx(-3.0));
  CHECK(inv.eps_delta(0.01) == doctest::Approx(3.0 / std::abs(std::log(0.01))));
  CHECK(ScalingFamily::power_log_delta(1.0, 0.0, 0.0)
            .with_constant_rho(2.0)
            .eps_over_rho_limit() == 0.0);
  CHECK(ScalingFamily::power_log_delta(1.0, 0.0, 0.0)
            .with_linear_rho(0.5)
            .eps_over_rho_limit() == doctest::Approx(0.5));
  CHECK_THROWS(ScalingFamily::power_log_delta(-1.0, 0.0, 0.0));
  CHECK_THROWS(ScalingFamily::power_log_delta(1.0, -0.5, 0.0));
  CHECK_THROWS(ScalingFamily::inverse_eps_log_delta(1.0).with_constant_rho(0.0));

  // eps*delta -> 0 along a decreasing sequence for both kinds (the inverse
  // family only logarithmically)
  for (const auto& fam : {power, inv}) {
    double prev = 1e300;
    for (double eps : {1e-2, 1e-8, 1e-100, 1e-300}) {
      CHECK(fam.eps_delta(eps) < prev);
      prev = fam.eps_delta(eps);
    }
    CHECK(prev < 1e-2);
  }

  // eta is affine in eps
  const auto fam = ScalingFamily::power_log_delta(1.0, 0.0, 0.0)
                       .with_eta(Eigen::Vector2d(1.0, -2.0).eval(),
                                 Eigen::Vector2d(0.5, 1.0).eval());
  CHECK(fam.eta(0.2)[0] == doctest::Approx(1.1));
  CHECK(fam.eta(0.2)[1] == doctest::Approx(-1.8));
}

TEST_CASE("rescaled/raw nonlinearity consistency") {
  const Eigen::VectorXd eta = Eigen::VectorXd::Constant(1, 0.8);
  const std::vector<RobinNonlinearity> kinds = {
      RobinNonlinearity::linear(), RobinNonlinearity::cubic(),
      RobinNonlinearity::saturating()};
  for (const auto& f : kinds) {
    for (double eps_delta : {0.05, 0.3})
      for (double tau : {-1.2, -0.3, 0.0, 0.7, 2.1}) {
        const double lhs = eps_delta * f.raw(tau / eps_delta, eps_delta, eta);
        CHECK(lhs == doctest::Approx(f.value(tau, eta)).epsilon(1e-13));
      }
    // derivative against centered differences, O(h^2)
    for (double tau : {-0.9, 0.4}) {
      const double h = 1e-5;
      const double fd =
          (f.value(tau + h, eta) - f.value(tau - h, eta)) / (2.0 * h);
      CHECK(f.dtau(tau, eta) == doctest::Approx(fd).epsilon(1e-8));
    }
    // inversion round trip
    for (double tau : {-0.5, 0.6}) {
      const double v = f.value(tau, eta);
      CHECK(f.invert(v, eta) == doctest::Approx(tau).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(
      RobinNonlinearity::saturating().invert(1.0, eta), std::domain_error);
  CHECK_THROWS_AS(RobinNonlinearity::cubic().invert(
                      0.5, Eigen::VectorXd::Constant(1, -1.0)),
                  std::domain_error);
}

TEST_CASE("lambda residual vanishes for zero data and zero triple") {
  ProblemSpec spec = annulus_spec(0.0, 0.0, 64);
  Gamma gamma;  // all zeros, linear F~
  gamma.g3 = Eigen::VectorXd(0);
  DensityTriple t;
  t.mu_outer = Eigen::VectorXd::Zero(64);
  t.mu_inner = Eigen::VectorXd::Zero(64);
  const LambdaResidual r = assemble_lambda(spec, 0.1, gamma, t);
  CHECK(r.sup_norm() == 0.0);
}

TEST_CASE("solve_linear reproduces the annulus closed form") {
  const ProblemSpec spec = annulus_spec(1.0, 0.0, 128);
  const NystromSystem sys(spec);
  const double eps = 0.1;
  const DensityTriple t = sys.solve_linear(eps);

  const Gamma gamma = canonical_gamma(spec.scaling, eps);
  CHECK(sys.lambda_residual(eps, gamma, t).sup_norm() < 1e-10);

  // u(0.5, 0) = log 0.5 + 10 - log 0.1
  const double expect = std::log(0.5) + 10.0 - std::log(0.1);
  CHECK(sys.reconstruct(eps, t, one_point(0.5, 0.0))[0] ==
        doctest::Approx(expect).epsilon(1e-12));

  // triple structure: mu_outer = 0, mu_inner = a, xi = eps*delta*B
  CHECK(t.mu_outer.cwiseAbs().maxCoeff() < 1e-11);
  CHECK((t.mu_inner.array() - 1.0).abs().maxCoeff() < 1e-11);
}

TEST_CASE("solve_linear annulus special cases") {
  // a = 0, b = 0: everything vanishes
  {
    const NystromSystem sys(annulus_spec(0.0, 0.0, 64));
    const DensityTriple t = sys.solve_linear(0.2);
    CHECK(t.mu_outer.cwiseAbs().maxCoeff() < 1e-13);
    CHECK(t.mu_inner.cwiseAbs().maxCoeff() < 1e-13);
    CHECK(std::abs(t.xi) < 1e-13);
  }
  // a = 0, b = 1, delta = rho = 1: u = -1 everywhere
  {
    const NystromSystem sys(annulus_spec(0.0, 1.0, 64));
    const DensityTriple t = sys.solve_linear(0.2);
    const Eigen::VectorXd u = sys.reconstruct(0.2, t, one_point(0.5, 0.3));
    CHECK(u[0] == doctest::Approx(-1.0).epsilon(1e-12));
  }
}

TEST_CASE("solve_linear rejects nonlinear specs and out-of-range eps") {
  ProblemSpec spec = annulus_spec(1.0, 0.0, 64);
  spec.scaling.with_eta(Eigen::VectorXd::Constant(1, 1.0),
                        Eigen::VectorXd::Zero(1));
  spec.nonlinearity = RobinNonlinearity::cubic();
  CHECK_THROWS_WITH_AS(NystromSystem(spec).solve_linear(0.1),
                       "solve_linear: nonlinear spec, use solve_newton",
                       std::invalid_argument);
  const NystromSystem ok(annulus_spec(1.0, 0.0, 64));
  CHECK_THROWS_AS(ok.solve_linear(0.9), std::domain_error);
  CHECK_THROWS_AS(ok.solve_linear(1e-5), std::domain_error);
}

TEST_CASE("newton on a linear spec converges in one iteration") {
  const ProblemSpec spec = annulus_spec(1.0, 2.0, 96);
  const NystromSystem sys(spec);
  const double eps = 0.2;
  DensityTriple init;
  init.mu_outer = Eigen::VectorXd::Zero(96);
  init.mu_inner = Eigen::VectorXd::Zero(96);
  NewtonReport rep;
  const DensityTriple t = sys.solve_newton(eps, init, 1e-10, 10, &rep);
  CHECK(rep.iterations == 1);
  CHECK(rep.converged);
  const DensityTriple direct = sys.solve_linear(eps);
  CHECK((t.mu_inner - direct.mu_inner).cwiseAbs().maxCoeff() < 1e-11);
  CHECK(t.xi == doctest::Approx(direct.xi).epsilon(1e-11));

  // re-feeding the converged triple takes zero iterations
  NewtonReport rep2;
  const DensityTriple t2 = sys.solve_newton(eps, t, 1e-10, 10, &rep2);
  CHECK(rep2.iterations == 0);
  CHECK(t2.xi == t.xi);
  CHECK((t2.mu_inner - t.mu_inner).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("newton solves the cubic annulus and matches the nonlinear oracle") {
  ToyConfig toy;
  toy.a = 1.0;
  toy.b = 2.0;
  toy.scaling = ScalingFamily::power_log_delta(1.0, 0.0, 0.0)
                    .with_constant_rho(1.0)
                    .with_eta(Eigen::VectorXd::Constant(1, 1.0),
                              Eigen::VectorXd::Zero(1));
  toy.nonlinearity = RobinNonlinearity::cubic();
  const ProblemSpec spec = toy.as_problem_spec(128, 128);
  const NystromSystem sys(spec);
  const LimitSolution lim = solve_limit(spec);
  for (double eps : {0.1, 0.4}) {
    NewtonReport rep;
    const DensityTriple t = sys.solve_newton(
        eps, {lim.mu_outer, lim.mu_inner, lim.xi}, 1e-11, 25, &rep);
    CHECK(rep.iterations <= 8);
    const PointSet target = one_point(0.55, -0.2);
    const double u = sys.reconstruct(eps, t, target)[0];
    const double exact = toy_solution_nonlinear(toy, eps, target.row(0));
    CHECK(u == doctest::Approx(exact).epsilon(1e-10));
    // the gradient of the closed form does not involve the nonlinearity
    CHECK(sys.energy(eps, t) ==
          doctest::Approx(toy_energy(toy, eps)).epsilon(1e-11));
  }
}

TEST_CASE("newton refuses a degenerate linearization") {
  // saturating nonlinearity evaluated deep in its flat tail: dF~/dtau ~ 0 at
  // every node, so the xi column of the jacobian vanishes
  ProblemSpec spec = annulus_spec(0.5, 0.0, 64);
  spec.scaling.with_eta(Eigen::VectorXd::Constant(1, 1.0),
                        Eigen::VectorXd::Zero(1));
  spec.nonlinearity = RobinNonlinearity::saturating();
  const NystromSystem sys(spec);
  DensityTriple init;
  init.mu_outer = Eigen::VectorXd::Zero(64);
  init.mu_inner = Eigen::VectorXd::Zero(64);
  init.xi = 50.0;  // tanh argument far beyond saturation
  try {
    sys.solve_newton(0.2, init, 1e-10, 5);
    FAIL("expected a nondegeneracy error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("nondegeneracy") != std::string::npos);
  }
}

TEST_CASE("newton failure carries the best residual") {
  const ProblemSpec spec = annulus_spec(1.0, 0.0, 64);
  const NystromSystem sys(spec);
  DensityTriple init;
  init.mu_outer = Eigen::VectorXd::Zero(64);
  init.mu_inner = Eigen::VectorXd::Zero(64);
  CHECK_THROWS_AS(sys.solve_newton(0.1, init, 1e-30, 2), std::runtime_error);
}

TEST_CASE("reconstruct guards and symmetry") {
  const ProblemSpec spec = annulus_spec(1.0, 2.0, 64);
  const NystromSystem sys(spec);
  const double eps = 0.2;
  const DensityTriple t = sys.solve_linear(eps);
  CHECK_THROWS_AS(sys.reconstruct(eps, t, one_point(1.4, 0.0)),
                  std::domain_error);
  CHECK_THROWS_AS(sys.reconstruct(eps, t, one_point(0.05, 0.0)),
                  std::domain_error);
  // radial symmetry: equal |x| gives equal values
  const double u1 = sys.reconstruct(eps, t, one_point(0.6, 0.0))[0];
  const double u2 = sys.reconstruct(eps, t, one_point(0.0, -0.6))[0];
  CHECK(u1 == doctest::Approx(u2).epsilon(1e-12));
  // zero triple reconstructs zero
  DensityTriple zero;
  zero.mu_outer = Eigen::VectorXd::Zero(64);
  zero.mu_inner = Eigen::VectorXd::Zero(64);
  CHECK(sys.reconstruct(eps, zero, one_point(0.6, 0.0))[0] == 0.0);
}

TEST_CASE("rescaled field agrees with reconstruct away from the hole") {
  const ProblemSpec spec = general_spec(96);
  const NystromSystem sys(spec);
  const double eps = 0.15;
  const DensityTriple t = sys.solve_linear(eps);
  const Vec2 tpt(2.4, 0.6);
  const double via_rescaled = sys.rescaled(eps, t, one_point(tpt.x(), tpt.y()))[0];
  const double via_field =
      sys.reconstruct(eps, t, one_point(eps * tpt.x(), eps * tpt.y()))[0];
  CHECK(via_rescaled == doctest::Approx(via_field).epsilon(1e-10));
}

TEST_CASE("scaled hole-boundary values approach the degeneration coefficient") {
  const ProblemSpec spec = annulus_spec(1.0, 2.0, 128);
  const NystromSystem sys(spec);
  // eps*delta * u(eps, eps t) at |t| near 1 tends to a - b r0 = 1 (r0 = 0)
  double prev_err = 1e300;
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    const DensityTriple t = sys.solve_linear(eps);
    const double v = sys.rescaled(eps, t, one_point(1.25, 0.0))[0];
    const double err = std::abs(spec.scaling.eps_delta(eps) * v - 1.0);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 0.2);
}

TEST_CASE("reconstructed field is harmonic") {
  const ProblemSpec spec = general_spec(96);
  const NystromSystem sys(spec);
  const double eps = 0.2;
  const DensityTriple t = sys.solve_linear(eps);
  auto eval = [&](double x, double y) {
    return sys.reconstruct(eps, t, one_point(x, y))[0];
  };
  const double h = 1e-3;
  for (const Vec2& x0 : {Vec2(0.9, 0.3), Vec2(-0.6, -0.5)}) {
    const double lap =
        (eval(x0.x() + h, x0.y()) + eval(x0.x() - h, x0.y()) +
         eval(x0.x(), x0.y() + h) + eval(x0.x(), x0.y() - h) -
         4.0 * eval(x0.x(), x0.y())) /
        (h * h);
    CHECK(std::abs(lap) < 1e-5);
  }
}

TEST_CASE("scaled hole values with nontrivial degeneration limits") {
  // disks with delta = 1/(eps|log eps|), rho = eps/r0: the scaled values on
  // the hole scale tend to xi + l0*(int g^o)/(2 pi) = a - b*r0
  ProblemSpec spec = annulus_spec(1.0, 2.0, 128);
  spec.scaling = ScalingFamily::inverse_eps_log_delta(1.0).with_linear_rho(0.5);
  const NystromSystem sys(spec);
  const double expect = 1.0 - 2.0 * 0.5;  // a - b r0 = 0
  double prev_err = 1e300;
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    const DensityTriple t = sys.solve_linear(eps);
    const double v = sys.rescaled(eps, t, one_point(1.25, 0.0))[0];
    const double err = std::abs(spec.scaling.eps_delta(eps) * v - expect);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 0.5 * std::abs(
      spec.scaling.eps_delta(0.2) *
          sys.rescaled(0.2, sys.solve_linear(0.2), one_point(1.25, 0.0))[0] -
      expect) + 1e-12);
}

TEST_CASE("energy matches the toy law and degenerate cases") {
  const double eps = 0.1;
  {
    const NystromSystem sys(annulus_spec(1.0, 0.0, 128));
    const DensityTriple t = sys.solve_linear(eps);
    CHECK(sys.energy(eps, t) ==
          doctest::Approx(2.0 * kPi * (-std::log(eps))).epsilon(1e-12));
  }
  {
    const NystromSystem sys(annulus_spec(0.0, 1.5, 128));
    const DensityTriple t = sys.solve_linear(eps);
    CHECK(std::abs(sys.energy(eps, t)) < 1e-12);
  }
  {
    const NystromSystem sys(annulus_spec(1.0, 0.0, 64));
    DensityTriple zero;
    zero.mu_outer = Eigen::VectorXd::Zero(64);
    zero.mu_inner = Eigen::VectorXd::Zero(64);
    CHECK(sys.energy(eps, zero) == 0.0);
  }
}

TEST_CASE("equivalence of the gamma form and the raw family form") {
  // at a solution, the raw-family residual (delta*F_eps through the
  // reconstructed trace) also vanishes
  const ProblemSpec spec = general_spec(96);
  const NystromSystem sys(spec);
  const double eps = 0.2;
  const DensityTriple t = sys.solve_linear(eps);
  CHECK(sys.boundary_condition_residual(eps, t).sup_norm() < 1e-8);
}

TEST_CASE("mean identity at finite eps") {
  {  // annulus: exact up to quadrature rounding
    const NystromSystem sys(annulus_spec(1.0, 2.0, 128));
    const DensityTriple t = sys.solve_linear(0.2);
    CHECK(std::abs(sys.inner_density_integral(t) - sys.outer_data_integral()) <
          1e-10);
  }
  {  // general domains: drift shrinks with eps
    const ProblemSpec spec = general_spec(96);
    const NystromSystem sys(spec);
    double prev = 1e300;
    for (double eps : {0.3, 0.15, 0.075}) {
      const DensityTriple t = sys.solve_linear(eps);
      const double drift =
          std::abs(sys.inner_density_integral(t) - sys.outer_data_integral());
      CHECK(drift < 1e-8);
      CHECK(drift < prev + 1e-13);
      prev = drift;
    }
  }
}

TEST_CASE("grid refinement changes the solution geometrically") {
  const double eps = 0.1;
  std::vector<double> values;
  for (int n : {32, 64, 128}) {
    const NystromSystem sys(general_spec(n));
    const DensityTriple t = sys.solve_linear(eps);
    values.push_back(sys.reconstruct(eps, t, one_point(0.9, 0.3))[0]);
  }
  const double d1 = std::abs(values[1] - values[0]);
  const double d2 = std::abs(values[2] - values[1]);
  CHECK(d2 < 0.1 * d1 + 1e-14);
}

TEST_CASE("analytic jacobian matches finite differences") {
  ProblemSpec spec = general_spec(32);
  spec.scaling.with_eta(Eigen::VectorXd::Constant(1, 0.7),
                        Eigen::VectorXd::Zero(1));
  spec.nonlinearity = RobinNonlinearity::cubic();
  const NystromSystem sys(spec);
  const double eps = 0.2;
  const Gamma gamma = canonical_gamma(spec.scaling, eps);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  auto rand_triple = [&] {
    DensityTriple t;
    t.mu_outer = Eigen::VectorXd::NullaryExpr(32, [&](Eigen::Index) {
      return unif(rng);
    });
    t.mu_inner = Eigen::VectorXd::NullaryExpr(32, [&](Eigen::Index) {
      return unif(rng);
    });
    t.xi = unif(rng);
    return t;
  };
  for (int trial = 0; trial < 5; ++trial) {
    const DensityTriple state = rand_triple();
    const DensityTriple dir = rand_triple();
    const double h = 1e-6;
    DensityTriple plus = state, minus = state;
    plus.mu_outer += h * dir.mu_outer;
    plus.mu_inner += h * dir.mu_inner;
    plus.xi += h * dir.xi;
    minus.mu_outer -= h * dir.mu_outer;
    minus.mu_inner -= h * dir.mu_inner;
    minus.xi -= h * dir.xi;
    const LambdaResidual rp = sys.lambda_residual(eps, gamma, plus);
    const LambdaResidual rm = sys.lambda_residual(eps, gamma, minus);
    Eigen::VectorXd fd(64);
    fd << (rp.outer - rm.outer) / (2.0 * h), (rp.inner - rm.inner) / (2.0 * h);
    const Eigen::VectorXd jd = sys.jacobian_times(eps, gamma, state, dir);
    CHECK((jd - fd).cwiseAbs().maxCoeff() /
              std::max(1.0, jd.cwiseAbs().maxCoeff()) <
          1e-7);
  }
}
