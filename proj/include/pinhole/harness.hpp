#ifndef PINHOLE_HARNESS_HPP
#define PINHOLE_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pinhole/limit.hpp"
#include "pinhole/system.hpp"

namespace pinhole {

struct SweepGrid {
  double eps_min = 5e-3;
  double eps_max = 0.3;
  int count = 12;
  /// Log-spaced grid, eps descending.
  std::vector<double> values() const;
};

struct ExperimentConfig {
  ProblemSpec problem;
  SweepGrid grid;
  PointSet macro_targets = PointSet(0, 2);
  PointSet micro_targets = PointSet(0, 2);
  int root_index = 0;
  std::string output_dir = "out";
  bool emit_plots = true;
  std::uint64_t seed = 1;
  double newton_tol = 1e-9;
  int newton_max_iter = 25;
  XiRootOptions xi_bracket;
  bool debug_flip_wstar_diagonal = false;  // verify negative-control hook

  void validate() const;
};

/// Parse a JSON config file (schema in docs/config.md).
ExperimentConfig load_config(const std::string& path);
ExperimentConfig config_from_json(const nlohmann::json& j);
/// Apply a dotted-path override "a.b.c=value" to a JSON document; the value
/// is parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

struct SweepRow {
  double eps = 0.0;
  double eps_delta = 0.0;
  double eps_delta_log_eps = 0.0;
  double eps_over_rho = 0.0;
  double xi = 0.0;
  double u_macro = 0.0;
  double u_micro = 0.0;
  double energy = 0.0;
  double scaled_u_macro = 0.0;
  double scaled_u_micro = 0.0;
  int newton_iters = 0;
  double residual = 0.0;
  bool ok = false;
  std::string error;  // set when flagged
};

struct AsymptoteCheck {
  double limit_value = 0.0;
  double final_error = 0.0;
  bool monotone = false;
  std::vector<double> error_ratios;  // successive Richardson-style ratios
};

struct FitReport {
  double e1_hat = 0.0;
  double e2_hat = 0.0;
  double e2_limit = 0.0;
  double e2_rel_error = 0.0;
  AsymptoteCheck macro;
  AsymptoteCheck micro;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<FitReport> fit;  // absent with < 4 valid rows
  LimitSolution limit;
  std::vector<XiRoot> roots;
  EnergyCoefficients limit_energy;
  double int_g_outer = 0.0;
  double z_m = 0.0;  // integral of the limit inner density
};

SweepResult run_sweep(const ExperimentConfig& cfg);

struct ConvergenceRow {
  int nodes = 0;
  double delta_vs_previous = 0.0;  // sup change of u at targets
  double oracle_error = 0.0;       // sup vs closed form (annulus specs only)
  bool has_oracle = false;
};

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg,
                                            const std::vector<int>& node_counts,
                                            double eps);

struct VerifyCheck {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Bundle of the module invariants: quadrature and Gauss identities, jump
/// relations, the unit-circle Fourier symbol, mean identities, the toy
/// equivalence at one eps, and the fit self-test.
VerifyReport run_verify(const ExperimentConfig& cfg);

/// Write sweep.csv (pinned header, %.17g numbers), report.json, and the two
/// SVG plots when requested. Returns the list of files written.
std::vector<std::string> emit_outputs(const SweepResult& result,
                                      const ExperimentConfig& cfg,
                                      const std::string& dir);

nlohmann::json sweep_report_json(const SweepResult& result,
                                 const ExperimentConfig& cfg);
nlohmann::json verify_report_json(const VerifyReport& report);

std::string format_g17(double v);
/// Least-squares fit y ~ c1 + c2 * log(eps) (centered for conditioning).
std::pair<double, double> fit_log_linear(const std::vector<double>& eps,
                                         const std::vector<double>& y);

/// Environment variable consulted by the CLI for the output directory.
constexpr const char* kOutputDirEnvVar = "PINHOLE_OUT";

}  // namespace pinhole

#endif
