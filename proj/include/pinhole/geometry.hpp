#ifndef PINHOLE_GEOMETRY_HPP
#define PINHOLE_GEOMETRY_HPP

#include <Eigen/Dense>
#include <vector>

namespace pinhole {

using Vec2 = Eigen::Vector2d;
using PointSet = Eigen::Matrix<double, Eigen::Dynamic, 2>;

enum class CurveKind { Circle, Ellipse, Star, Fourier };

/// Pointwise data of a parametrized boundary curve at angle theta.
struct CurvePoint {
  Vec2 point;
  Vec2 tangent;    // p'(theta), not normalized
  Vec2 normal;     // outward unit normal
  double speed;    // |p'(theta)|
  double curvature;  // signed, 1/R on a counterclockwise circle of radius R
};

/// Analytic closed planar curve, 2*pi-periodic, counterclockwise, simple.
/// Built-in families: circle, ellipse, star r(t)=r0(1+amp*cos(k t)), and a
/// radial truncated Fourier curve r(t)=c0+sum(a_m cos(m t)+b_m sin(m t)).
/// All families may carry a center offset. Shape parameters are validated at
/// construction; eval never throws for finite theta.
class ClosedCurve {
 public:
  static ClosedCurve circle(double radius, const Vec2& center = Vec2::Zero());
  static ClosedCurve ellipse(double semi_axis_x, double semi_axis_y,
                             const Vec2& center = Vec2::Zero());
  static ClosedCurve star(double base_radius, double amplitude, int lobes,
                          const Vec2& center = Vec2::Zero());
  static ClosedCurve fourier(double c0, std::vector<double> cos_coeffs,
                             std::vector<double> sin_coeffs,
                             const Vec2& center = Vec2::Zero());

  CurvePoint eval(double theta) const;

  CurveKind kind() const { return kind_; }
  const Vec2& center() const { return center_; }

  /// min/max of |p(theta)| over a dense sample (1024 points).
  double radial_min() const;
  double radial_max() const;

  /// Winding number of the curve about the origin (+1 for the built-in
  /// families when they enclose it).
  int winding_about_origin() const;

  /// True if x lies strictly inside the region bounded by the curve.
  bool contains(const Vec2& x) const;

  /// Returns a copy with all length-type shape parameters scaled.
  ClosedCurve scaled(double factor) const;

 private:
  ClosedCurve() = default;

  CurveKind kind_ = CurveKind::Circle;
  Vec2 center_ = Vec2::Zero();
  // circle: params_[0]=R; ellipse: a,b; star: r0, amp, lobes
  std::vector<double> params_;
  std::vector<double> cos_coeffs_, sin_coeffs_;  // fourier kind

  void radial(double theta, double& r, double& dr, double& ddr) const;
};

/// Periodic trapezoidal rule on a closed curve: nodes theta_j = 2*pi*j/N with
/// weights w_j = (2*pi/N)|p'(theta_j)|. N must be even (the log-singular
/// quadrature pairs nodes) and at least 8.
struct PeriodicRule {
  ClosedCurve curve = ClosedCurve::circle(1.0);
  int n = 0;
  Eigen::VectorXd theta;
  PointSet points;
  PointSet normals;
  Eigen::VectorXd speeds;
  Eigen::VectorXd curvatures;
  Eigen::VectorXd weights;

  double length() const { return weights.sum(); }
  /// Largest arc spacing between consecutive nodes; the separation unit used
  /// by the off-boundary evaluation guards.
  double max_spacing() const { return weights.maxCoeff(); }
};

PeriodicRule quadrature(const ClosedCurve& curve, int n);

double boundary_length(const ClosedCurve& curve, int n);

/// Largest eps0 such that eps * (closure of inner) stays inside outer for all
/// |eps| < eps0, computed as min_radial(outer)/max_radial(inner) on a dense
/// sample. Both curves must enclose the origin.
double containment_radius(const ClosedCurve& outer, const ClosedCurve& inner);

}  // namespace pinhole

#endif
