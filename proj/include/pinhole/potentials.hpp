#ifndef PINHOLE_POTENTIALS_HPP
#define PINHOLE_POTENTIALS_HPP

#include <Eigen/Dense>

#include "pinhole/geometry.hpp"

namespace pinhole {

/// Fundamental solution of the 2D Laplacian, (1/2pi) log|x|.
double fundamental_solution(const Vec2& x);
Vec2 fundamental_solution_gradient(const Vec2& x);

/// Spectral weights R_k for the periodic log kernel log(4 sin^2(t/2)):
/// integral of log(4 sin^2((t_i-t)/2)) f(t) dt ~ sum_j R_{|i-j|} f(t_j)
/// for f smooth and 2*pi-periodic, nodes t_j = 2*pi*j/n, n even.
Eigen::VectorXd kress_log_weights(int n);

/// Dense Nystrom matrices. All matrices carry the quadrature weights, so they
/// apply directly to nodal density values.

/// On-boundary single layer trace for a density on `rule`. Splits the kernel
/// into the periodic log part (spectral weights above) and a smooth remainder
/// whose diagonal is log(speed)/(2 pi); spectrally accurate on analytic
/// curves.
Eigen::MatrixXd single_layer_self_matrix(const PeriodicRule& rule);

/// Self-interaction adjoint double layer. The kernel is smooth on an analytic
/// curve; the diagonal entry is curvature/(4 pi). `diagonal_sign` is a
/// verification hook (run_verify's negative control flips it); leave at +1.
Eigen::MatrixXd wstar_self_matrix(const PeriodicRule& rule,
                                  double diagonal_sign = 1.0);

/// Single layer evaluation matrix at arbitrary targets, sources scaled by
/// `source_scale` (measure stays that of the unscaled curve). Requires every
/// target at distance > one node spacing from the scaled source points.
Eigen::MatrixXd single_layer_matrix(const PointSet& targets,
                                    const PeriodicRule& source,
                                    double source_scale = 1.0);

/// Gradient of the single layer at off-boundary targets, rows are
/// (d/dx, d/dy) interleaved as an N x 2 result per density application; here
/// returned as two matrices applied separately.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> single_layer_gradient_matrices(
    const PointSet& targets, const PeriodicRule& source,
    double source_scale = 1.0);

/// Cross adjoint-double-layer matrix: target points with prescribed normals
/// against a (possibly scaled) source curve. Requires clearance of at least
/// two node spacings between targets and scaled sources.
Eigen::MatrixXd wstar_cross_matrix(const PointSet& targets,
                                   const PointSet& target_normals,
                                   const PeriodicRule& source,
                                   double source_scale = 1.0);

/// Operator applications mirroring the matrices above.
Eigen::VectorXd single_layer_onboundary(const PeriodicRule& rule,
                                        const Eigen::VectorXd& mu);
Eigen::VectorXd single_layer_offboundary(const PeriodicRule& source,
                                         const Eigen::VectorXd& mu,
                                         const PointSet& targets,
                                         double source_scale = 1.0);
Eigen::VectorXd wstar_apply(const PeriodicRule& rule,
                            const Eigen::VectorXd& mu);
Eigen::VectorXd wstar_apply_cross(const PointSet& targets,
                                  const PointSet& target_normals,
                                  const PeriodicRule& source,
                                  const Eigen::VectorXd& mu,
                                  double source_scale = 1.0);

enum class Side { Interior, Exterior };

/// Normal derivative trace of the single layer from the given side:
/// -mu/2 + W*mu (interior) or +mu/2 + W*mu (exterior).
Eigen::VectorXd neumann_trace(const PeriodicRule& rule,
                              const Eigen::VectorXd& mu, Side side);

/// Flux of grad S2 through the curve; equals 1 when the curve encloses the
/// origin and 0 when it does not.
double gauss_point_flux(const PeriodicRule& rule);

/// Smallest distance from any target to the scaled source nodes.
double min_distance(const PointSet& targets, const PointSet& source_points,
                    double source_scale = 1.0);

}  // namespace pinhole

#endif
