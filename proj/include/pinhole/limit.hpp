#ifndef PINHOLE_LIMIT_HPP
#define PINHOLE_LIMIT_HPP

#include <vector>

#include "pinhole/system.hpp"

namespace pinhole {

/// One root of the scalar limit equation
/// F~(l0/(2pi) * Int g^o + xi, eta0) = (Int g^o - r0 * Int g^i) / |inner|.
struct XiRoot {
  double xi = 0.0;
  double residual = 0.0;  // equation residual at the root
  double dtau = 0.0;      // dF~/dtau at the root argument
  bool degenerate = false;  // |dtau| below threshold: unsuitable Newton seed
};

struct XiRootOptions {
  double bracket = 1e3;  // scan over [-bracket, bracket]
  int samples = 100000;
  double degenerate_threshold = 1e-8;
};

/// Solution of the eps -> 0 limiting system.
struct LimitSolution {
  Eigen::VectorXd mu_outer;  // weighted mean zero
  Eigen::VectorXd mu_inner;
  double xi = 0.0;
  int root_index = 0;
  double root_residual = 0.0;
  bool degenerate_root = false;
};

/// Unique mean-zero solution of the decoupled outer equation
/// -mu/2 + W*mu = g^o - d_nu S2 * Int g^o. Solved as a bordered square
/// system: constraint row = weighted mean, compensating rank-one column on
/// the constant function.
Eigen::VectorXd solve_mu_o_limit(const ProblemSpec& spec);

/// All simple roots found by a sign-change scan plus bisection. Multiplicity
/// beyond sign changes is not claimed. Empty when no sign change lies in the
/// bracket.
std::vector<XiRoot> xi_roots(const ProblemSpec& spec,
                             const XiRootOptions& options = {});

/// Unique solution of the inner equation mu/2 + W*mu = F~(...) + g^i r0 for a
/// given root. The identity Int mu = Int g^o is a consequence, not imposed.
Eigen::VectorXd solve_mu_i_limit(const ProblemSpec& spec, double xi);

LimitSolution solve_limit(const ProblemSpec& spec, int root_index = 0,
                          const XiRootOptions& options = {});

struct LimitFields {
  Eigen::VectorXd u_macro;  // macroscopic limit field plus the S2*Int g^o shift
  Eigen::VectorXd u_micro;  // limit of the rescaled solution near the hole
  double z_m = 0.0;         // Int mu_inner = Int g^o
};

LimitFields limit_fields(const ProblemSpec& spec, const LimitSolution& sol,
                         const PointSet& macro_targets,
                         const PointSet& micro_targets);

struct EnergyCoefficients {
  double e1 = 0.0;
  double e2 = 0.0;           // -(Int g^o)^2 / (2 pi), by the defining integral
  double e2_direct = 0.0;    // the closed form, for cross-checking
};

EnergyCoefficients limit_energy_coefficients(const ProblemSpec& spec,
                                             const LimitSolution& sol);

}  // namespace pinhole

#endif
