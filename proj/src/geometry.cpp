#include "pinhole/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pinhole {

namespace {
constexpr int kDenseSamples = 1024;
constexpr double kPi = 3.14159265358979323846;
}  // namespace

ClosedCurve ClosedCurve::circle(double radius, const Vec2& center) {
  if (!(radius > 0.0))
    throw std::invalid_argument("circle: radius must be positive");
  ClosedCurve c;
  c.kind_ = CurveKind::Circle;
  c.center_ = center;
  c.params_ = {radius};
  return c;
}

ClosedCurve ClosedCurve::ellipse(double a, double b, const Vec2& center) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("ellipse: semi-axes must be positive");
  ClosedCurve c;
  c.kind_ = CurveKind::Ellipse;
  c.center_ = center;
  c.params_ = {a, b};
  return c;
}

ClosedCurve ClosedCurve::star(double base_radius, double amplitude, int lobes,
                              const Vec2& center) {
  if (!(base_radius > 0.0))
    throw std::invalid_argument("star: base radius must be positive");
  if (amplitude < 0.0 || lobes < 1)
    throw std::invalid_argument("star: need amplitude >= 0 and lobes >= 1");
  if (!(amplitude < 1.0))
    throw std::invalid_argument(
        "star: amplitude must be < 1 (radial function must stay positive)");
  ClosedCurve c;
  c.kind_ = CurveKind::Star;
  c.center_ = center;
  c.params_ = {base_radius, amplitude, static_cast<double>(lobes)};
  return c;
}

ClosedCurve ClosedCurve::fourier(double c0, std::vector<double> cos_coeffs,
                                 std::vector<double> sin_coeffs,
                                 const Vec2& center) {
  if (!(c0 > 0.0))
    throw std::invalid_argument("fourier: constant term must be positive");
  ClosedCurve c;
  c.kind_ = CurveKind::Fourier;
  c.center_ = center;
  c.params_ = {c0};
  c.cos_coeffs_ = std::move(cos_coeffs);
  c.sin_coeffs_ = std::move(sin_coeffs);
  // positivity of the radial function on a dense sample
  for (int j = 0; j < kDenseSamples; ++j) {
    double r, dr, ddr;
    c.radial(2.0 * kPi * j / kDenseSamples, r, dr, ddr);
    if (!(r > 0.0))
      throw std::invalid_argument(
          "fourier: radial function must stay positive");
  }
  return c;
}

void ClosedCurve::radial(double theta, double& r, double& dr,
                         double& ddr) const {
  if (kind_ == CurveKind::Star) {
    const double r0 = params_[0], amp = params_[1], k = params_[2];
    r = r0 * (1.0 + amp * std::cos(k * theta));
    dr = -r0 * amp * k * std::sin(k * theta);
    ddr = -r0 * amp * k * k * std::cos(k * theta);
    return;
  }
  r = params_[0];
  dr = 0.0;
  ddr = 0.0;
  for (std::size_t m = 1; m <= cos_coeffs_.size(); ++m) {
    const double a = cos_coeffs_[m - 1];
    r += a * std::cos(m * theta);
    dr -= a * m * std::sin(m * theta);
    ddr -= a * m * m * std::cos(m * theta);
  }
  for (std::size_t m = 1; m <= sin_coeffs_.size(); ++m) {
    const double b = sin_coeffs_[m - 1];
    r += b * std::sin(m * theta);
    dr += b * m * std::cos(m * theta);
    ddr -= b * m * m * std::sin(m * theta);
  }
}

CurvePoint ClosedCurve::eval(double theta) const {
  if (!std::isfinite(theta))
    throw std::invalid_argument("curve eval: theta must be finite");
  const double c = std::cos(theta), s = std::sin(theta);
  Vec2 p = Vec2::Zero(), dp = Vec2::Zero(), ddp = Vec2::Zero();
  switch (kind_) {
    case CurveKind::Circle: {
      const double R = params_[0];
      p = {R * c, R * s};
      dp = {-R * s, R * c};
      ddp = {-R * c, -R * s};
      break;
    }
    case CurveKind::Ellipse: {
      const double a = params_[0], b = params_[1];
      p = {a * c, b * s};
      dp = {-a * s, b * c};
      ddp = {-a * c, -b * s};
      break;
    }
    case CurveKind::Star:
    case CurveKind::Fourier: {
      double r, dr, ddr;
      radial(theta, r, dr, ddr);
      p = {r * c, r * s};
      dp = {dr * c - r * s, dr * s + r * c};
      ddp = {(ddr - r) * c - 2.0 * dr * s, (ddr - r) * s + 2.0 * dr * c};
      break;
    }
  }
  CurvePoint out;
  out.point = center_ + p;
  out.tangent = dp;
  out.speed = dp.norm();
  out.normal = Vec2(dp.y(), -dp.x()) / out.speed;
  out.curvature =
      (dp.x() * ddp.y() - dp.y() * ddp.x()) / (out.speed * out.speed * out.speed);
  return out;
}

double ClosedCurve::radial_min() const {
  double m = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kDenseSamples; ++j)
    m = std::min(m, eval(2.0 * kPi * j / kDenseSamples).point.norm());
  return m;
}

double ClosedCurve::radial_max() const {
  double m = 0.0;
  for (int j = 0; j < kDenseSamples; ++j)
    m = std::max(m, eval(2.0 * kPi * j / kDenseSamples).point.norm());
  return m;
}

int ClosedCurve::winding_about_origin() const {
  double total = 0.0;
  double prev = std::atan2(eval(0.0).point.y(), eval(0.0).point.x());
  for (int j = 1; j <= kDenseSamples; ++j) {
    const Vec2 p = eval(2.0 * kPi * j / kDenseSamples).point;
    const double ang = std::atan2(p.y(), p.x());
    double d = ang - prev;
    while (d > kPi) d -= 2.0 * kPi;
    while (d < -kPi) d += 2.0 * kPi;
    total += d;
    prev = ang;
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

bool ClosedCurve::contains(const Vec2& x) const {
  const Vec2 q = x - center_;
  switch (kind_) {
    case CurveKind::Circle:
      return q.norm() < params_[0];
    case CurveKind::Ellipse: {
      const double a = params_[0], b = params_[1];
      return (q.x() / a) * (q.x() / a) + (q.y() / b) * (q.y() / b) < 1.0;
    }
    case CurveKind::Star:
    case CurveKind::Fourier: {
      double r, dr, ddr;
      radial(std::atan2(q.y(), q.x()), r, dr, ddr);
      return q.norm() < r;
    }
  }
  return false;
}

ClosedCurve ClosedCurve::scaled(double factor) const {
  if (!(factor > 0.0))
    throw std::invalid_argument("curve scaled: factor must be positive");
  ClosedCurve c = *this;
  c.center_ = factor * center_;
  switch (kind_) {
    case CurveKind::Circle:
      c.params_[0] *= factor;
      break;
    case CurveKind::Ellipse:
      c.params_[0] *= factor;
      c.params_[1] *= factor;
      break;
    case CurveKind::Star:
      c.params_[0] *= factor;  // amplitude and lobe count are dimensionless
      break;
    case CurveKind::Fourier:
      c.params_[0] *= factor;
      for (double& a : c.cos_coeffs_) a *= factor;
      for (double& b : c.sin_coeffs_) b *= factor;
      break;
  }
  return c;
}

PeriodicRule quadrature(const ClosedCurve& curve, int n) {
  if (n < 8 || n % 2 != 0)
    throw std::invalid_argument("quadrature: node count must be even and >= 8");
  PeriodicRule rule;
  rule.curve = curve;
  rule.n = n;
  rule.theta.resize(n);
  rule.points.resize(n, 2);
  rule.normals.resize(n, 2);
  rule.speeds.resize(n);
  rule.curvatures.resize(n);
  rule.weights.resize(n);
  const double h = 2.0 * kPi / n;
  for (int j = 0; j < n; ++j) {
    const double t = h * j;
    const CurvePoint cp = curve.eval(t);
    rule.theta[j] = t;
    rule.points.row(j) = cp.point.transpose();
    rule.normals.row(j) = cp.normal.transpose();
    rule.speeds[j] = cp.speed;
    rule.curvatures[j] = cp.curvature;
    rule.weights[j] = h * cp.speed;
  }
  return rule;
}

double boundary_length(const ClosedCurve& curve, int n) {
  return quadrature(curve, n).length();
}

double containment_radius(const ClosedCurve& outer, const ClosedCurve& inner) {
  if (outer.winding_about_origin() != 1 || inner.winding_about_origin() != 1)
    throw std::runtime_error("geometry violates 0 in Omega^o and omega^i");
  return outer.radial_min() / inner.radial_max();
}

}  // namespace pinhole
