// Command-line driver: solve | limit | sweep | convergence | verify.
// Every subcommand takes --config PATH plus repeatable --set key.path=value
// overrides; PINHOLE_OUT overrides the configured output directory.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pinhole/harness.hpp"
#include "pinhole/limit.hpp"
#include "pinhole/oracle.hpp"

using nlohmann::json;

namespace {

pinhole::ExperimentConfig load_with_overrides(
    const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  in >> j;
  for (const auto& assignment : overrides)
    pinhole::apply_override(j, assignment);
  return pinhole::config_from_json(j);
}

std::string output_dir_for(const pinhole::ExperimentConfig& cfg) {
  if (const char* env = std::getenv(pinhole::kOutputDirEnvVar); env && *env)
    return env;
  return cfg.output_dir;
}

std::vector<int> parse_node_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundary-integral lab for the degenerating-Robin small-hole problem"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "JSON config file (docs/config.md)")
      ->required();
  app.add_option("--set", overrides, "override, e.g. --set grid.count=8");

  double eps = -1.0;
  std::string node_csv = "32,64,128,256";

  auto* cmd_solve = app.add_subcommand("solve", "solve at one eps");
  cmd_solve->add_option("--eps", eps, "hole size")->required();
  auto* cmd_limit = app.add_subcommand("limit", "limit system, roots, energy coefficients");
  auto* cmd_sweep = app.add_subcommand("sweep", "eps sweep with asymptotic fit");
  auto* cmd_conv = app.add_subcommand("convergence", "grid refinement study");
  cmd_conv->add_option("--eps", eps, "hole size (default: grid eps_max)");
  cmd_conv->add_option("--nodes", node_csv, "comma-separated node counts");
  auto* cmd_verify = app.add_subcommand("verify", "run the invariant check bundle");

  CLI11_PARSE(app, argc, argv);

  try {
    const pinhole::ExperimentConfig cfg =
        load_with_overrides(config_path, overrides);

    if (cmd_solve->parsed()) {
      cfg.validate();
      const pinhole::NystromSystem sys(cfg.problem);
      pinhole::DensityTriple triple;
      pinhole::NewtonReport rep;
      if (cfg.problem.nonlinearity.is_linear()) {
        triple = sys.solve_linear(eps);
      } else {
        const pinhole::LimitSolution lim =
            pinhole::solve_limit(cfg.problem, cfg.root_index, cfg.xi_bracket);
        triple = sys.solve_newton(eps, {lim.mu_outer, lim.mu_inner, lim.xi},
                                  cfg.newton_tol, cfg.newton_max_iter, &rep);
      }
      const pinhole::Gamma gamma =
          pinhole::canonical_gamma(cfg.problem.scaling, eps);
      json out;
      out["eps"] = eps;
      out["xi"] = triple.xi;
      out["residual"] = sys.lambda_residual(eps, gamma, triple).sup_norm();
      out["newton_iters"] = rep.iterations;
      out["energy"] = sys.energy(eps, triple);
      out["u_macro"] =
          sys.reconstruct(eps, triple, cfg.macro_targets.topRows(1))[0];
      out["u_micro"] =
          sys.rescaled(eps, triple, cfg.micro_targets.topRows(1))[0];
      out["mean_identity_drift"] =
          sys.inner_density_integral(triple) - sys.outer_data_integral();
      std::cout << out.dump(2) << "\n";
      return 0;
    }

    if (cmd_limit->parsed()) {
      cfg.validate();
      const auto roots = pinhole::xi_roots(cfg.problem, cfg.xi_bracket);
      json out;
      json jroots = json::array();
      for (const auto& r : roots)
        jroots.push_back({{"xi", r.xi},
                          {"residual", r.residual},
                          {"dtau", r.dtau},
                          {"degenerate", r.degenerate}});
      out["xi_roots"] = jroots;
      if (!roots.empty()) {
        const pinhole::LimitSolution sol =
            pinhole::solve_limit(cfg.problem, cfg.root_index, cfg.xi_bracket);
        const pinhole::EnergyCoefficients ec =
            pinhole::limit_energy_coefficients(cfg.problem, sol);
        const pinhole::LimitFields fields = pinhole::limit_fields(
            cfg.problem, sol, cfg.macro_targets, cfg.micro_targets);
        out["xi"] = sol.xi;
        out["z_m"] = fields.z_m;
        out["e1_0"] = ec.e1;
        out["e2_0"] = ec.e2_direct;
        out["e2_0_flux_route"] = ec.e2;
        out["u_macro"] = std::vector<double>(
            fields.u_macro.data(), fields.u_macro.data() + fields.u_macro.size());
        out["u_micro"] = std::vector<double>(
            fields.u_micro.data(), fields.u_micro.data() + fields.u_micro.size());
      }
      std::cout << out.dump(2) << "\n";
      return roots.empty() ? 1 : 0;
    }

    if (cmd_sweep->parsed()) {
      const pinhole::SweepResult result = pinhole::run_sweep(cfg);
      const auto files =
          pinhole::emit_outputs(result, cfg, output_dir_for(cfg));
      int failures = 0;
      for (const auto& row : result.rows)
        if (!row.ok) ++failures;
      for (const auto& f : files) std::cout << "wrote " << f << "\n";
      if (result.fit) {
        std::cout << "fitted E1=" << pinhole::format_g17(result.fit->e1_hat)
                  << " E2=" << pinhole::format_g17(result.fit->e2_hat)
                  << " (limit E2=" << pinhole::format_g17(result.fit->e2_limit)
                  << ", rel err "
                  << pinhole::format_g17(result.fit->e2_rel_error) << ")\n";
      }
      if (failures)
        std::cout << failures << " of " << result.rows.size()
                  << " rows flagged (see report.json)\n";
      return failures == 0 ? 0 : 1;
    }

    if (cmd_conv->parsed()) {
      const double e = eps > 0.0 ? eps : cfg.grid.eps_max;
      const auto rows =
          pinhole::run_convergence(cfg, parse_node_list(node_csv), e);
      std::cout << "nodes,delta_vs_previous,oracle_error\n";
      for (const auto& r : rows)
        std::cout << r.nodes << "," << pinhole::format_g17(r.delta_vs_previous)
                  << ","
                  << (r.has_oracle ? pinhole::format_g17(r.oracle_error)
                                   : std::string(""))
                  << "\n";
      return 0;
    }

    if (cmd_verify->parsed()) {
      const pinhole::VerifyReport report = pinhole::run_verify(cfg);
      for (const auto& c : report.checks)
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name
                  << " measured=" << pinhole::format_g17(c.measured)
                  << " tol=" << pinhole::format_g17(c.tolerance) << "\n";
      const std::string dir = output_dir_for(cfg);
      std::filesystem::create_directories(dir);
      const std::string path =
          (std::filesystem::path(dir) / "verify.json").string();
      std::ofstream out(path, std::ios::binary);
      out << pinhole::verify_report_json(report).dump(2) << "\n";
      std::cout << "wrote " << path << "\n";
      return report.all_pass() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
