#include <doctest.h>

#include <cmath>

#include "pinhole/geometry.hpp"

using namespace pinhole;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Romberg integration on [0, 2*pi]; independent of the trapezoidal rule under
// test (it refines dyadically and extrapolates).
template <typename F>
double romberg(F f, int levels = 18) {
  std::vector<std::vector<double>> r(levels);
  const double a = 0.0, b = 2.0 * kPi;
  r[0] = {0.5 * (b - a) * (f(a) + f(b))};
  for (int k = 1; k < levels; ++k) {
    const long n = 1L << k;
    const double h = (b - a) / n;
    double acc = 0.0;
    for (long j = 1; j < n; j += 2) acc += f(a + j * h);
    r[k].resize(k + 1);
    r[k][0] = 0.5 * r[k - 1][0] + h * acc;
    double pow4 = 1.0;
    for (int m = 1; m <= k; ++m) {
      pow4 *= 4.0;
      r[k][m] = r[k][m - 1] + (r[k][m - 1] - r[k - 1][m - 1]) / (pow4 - 1.0);
    }
  }
  return r[levels - 1][levels - 1];
}

double ellipse_speed(double a, double b, double t) {
  const double dx = -a * std::sin(t), dy = b * std::cos(t);
  return std::hypot(dx, dy);
}
}  // namespace

TEST_CASE("circle evaluation") {
  const ClosedCurve c = ClosedCurve::circle(1.0);
  const CurvePoint p = c.eval(0.0);
  CHECK(p.point.x() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.point.y() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p.normal.x() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.normal.y() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p.speed == doctest::Approx(1.0));
  CHECK(p.curvature == doctest::Approx(1.0));

  const ClosedCurve c2 = ClosedCurve::circle(2.0);
  for (double t : {0.3, 1.1, 4.9})
    CHECK(c2.eval(t).curvature == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("ellipse evaluation at the co-vertex") {
  const ClosedCurve e = ClosedCurve::ellipse(2.0, 1.0);
  const CurvePoint p = e.eval(kPi / 2.0);
  CHECK(p.point.x() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p.point.y() == doctest::Approx(1.0));
  CHECK(p.normal.x() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p.normal.y() == doctest::Approx(1.0));
  CHECK(p.speed == doctest::Approx(2.0));
  // curvature from kappa = a b / (a^2 sin^2 + b^2 cos^2)^{3/2}
  CHECK(p.curvature == doctest::Approx(2.0 / 8.0).epsilon(1e-14));
  CHECK(e.eval(0.0).curvature == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("invalid shape parameters rejected at construction") {
  CHECK_THROWS(ClosedCurve::circle(-1.0));
  CHECK_THROWS(ClosedCurve::circle(0.0));
  CHECK_THROWS(ClosedCurve::ellipse(0.0, 1.0));
  CHECK_THROWS(ClosedCurve::star(1.0, 1.0, 2));  // radial function touches 0
  CHECK_THROWS(ClosedCurve::star(1.0, 1.3, 4));
  CHECK_THROWS(ClosedCurve::star(-1.0, 0.3, 4));
  CHECK_THROWS(ClosedCurve::fourier(1.0, {-1.2}, {}));  // radial sign change
  CHECK_THROWS(quadrature(ClosedCurve::circle(1.0), 15));
  CHECK_THROWS(quadrature(ClosedCurve::circle(1.0), 6));
}

TEST_CASE("quadrature length of the unit circle") {
  const PeriodicRule rule = quadrature(ClosedCurve::circle(1.0), 16);
  CHECK(std::abs(rule.length() - 2.0 * kPi) < 1e-14);
}

TEST_CASE("ellipse perimeter against the Romberg oracle") {
  const double oracle =
      romberg([](double t) { return ellipse_speed(2.0, 1.0, t); });
  // frozen from the oracle (also matches adaptive quadrature elsewhere)
  CHECK(oracle == doctest::Approx(9.688448220547676).epsilon(1e-13));
  CHECK(std::abs(boundary_length(ClosedCurve::ellipse(2.0, 1.0), 64) - oracle) <
        1e-10);
}

TEST_CASE("star length self-convergence is geometric") {
  const ClosedCurve s = ClosedCurve::star(1.0, 0.3, 5);
  const double l64 = boundary_length(s, 64);
  const double l128 = boundary_length(s, 128);
  const double l256 = boundary_length(s, 256);
  const double d1 = std::abs(l128 - l64);
  const double d2 = std::abs(l256 - l128);
  CHECK(d1 < 1e-6);
  CHECK(d2 < 0.1 * d1 + 1e-15);
}

TEST_CASE("normals are unit and orthogonal to tangents") {
  const std::vector<ClosedCurve> curves = {
      ClosedCurve::circle(1.5),
      ClosedCurve::ellipse(2.0, 1.0),
      ClosedCurve::star(1.0, 0.3, 5),
      ClosedCurve::fourier(1.0, {0.2, 0.05}, {0.1}),
  };
  for (const auto& c : curves)
    for (int j = 0; j < 101; ++j) {
      const CurvePoint p = c.eval(0.05 + 2.0 * kPi * j / 101.0);
      CHECK(std::abs(p.normal.dot(p.tangent)) / p.speed < 1e-13);
      CHECK(std::abs(p.normal.norm() - 1.0) < 1e-13);
    }
}

TEST_CASE("trig exactness of the periodic rule on a circle") {
  const PeriodicRule rule = quadrature(ClosedCurve::circle(1.0), 32);
  for (int m = 1; m < 16; ++m) {
    double acc = 0.0;
    for (int j = 0; j < rule.n; ++j)
      acc += std::cos(m * rule.theta[j]) * rule.weights[j];
    CHECK(std::abs(acc) < 1e-12);
  }
}

TEST_CASE("boundary length is homogeneous of degree one") {
  const std::vector<ClosedCurve> curves = {
      ClosedCurve::circle(0.7),
      ClosedCurve::ellipse(2.0, 1.0),
      ClosedCurve::star(1.0, 0.2, 3),
      ClosedCurve::fourier(1.0, {0.1}, {0.05}),
  };
  for (const auto& c : curves) {
    const double l = boundary_length(c, 256);
    const double l2 = boundary_length(c.scaled(2.0), 256);
    CHECK(l2 == doctest::Approx(2.0 * l).epsilon(1e-12));
  }
}

TEST_CASE("winding number about the origin") {
  CHECK(ClosedCurve::circle(1.0).winding_about_origin() == 1);
  CHECK(ClosedCurve::ellipse(2.0, 1.0).winding_about_origin() == 1);
  CHECK(ClosedCurve::star(1.0, 0.3, 5).winding_about_origin() == 1);
  CHECK(ClosedCurve::circle(1.0, Vec2(3.0, 0.0)).winding_about_origin() == 0);
}

TEST_CASE("containment radius") {
  CHECK(containment_radius(ClosedCurve::circle(1.0), ClosedCurve::circle(1.0)) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(containment_radius(ClosedCurve::circle(2.0), ClosedCurve::circle(1.0)) ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(containment_radius(ClosedCurve::ellipse(2.0, 1.0),
                           ClosedCurve::circle(1.0)) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_WITH_AS(
      containment_radius(ClosedCurve::circle(1.0, Vec2(3.0, 0.0)),
                         ClosedCurve::circle(1.0)),
      "geometry violates 0 in Omega^o and omega^i", std::runtime_error);
}

TEST_CASE("theta must be finite") {
  CHECK_THROWS(ClosedCurve::circle(1.0).eval(
      std::numeric_limits<double>::infinity()));
}
