#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "pinhole/harness.hpp"
#include "pinhole/limit.hpp"
#include "pinhole/oracle.hpp"

namespace py = pybind11;
using namespace pinhole;

namespace {

ExperimentConfig config_from_text(const std::string& text) {
  return config_from_json(nlohmann::json::parse(text));
}

py::dict triple_to_dict(const DensityTriple& t) {
  py::dict d;
  d["mu_outer"] = t.mu_outer;
  d["mu_inner"] = t.mu_inner;
  d["xi"] = t.xi;
  return d;
}

DensityTriple triple_from_dict(const py::dict& d) {
  DensityTriple t;
  t.mu_outer = d["mu_outer"].cast<Eigen::VectorXd>();
  t.mu_inner = d["mu_inner"].cast<Eigen::VectorXd>();
  t.xi = d["xi"].cast<double>();
  return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nystrom solver and asymptotics lab for the mixed Neumann-Robin "
            "Laplace problem in a planar domain with one small hole";

  py::class_<ClosedCurve>(m, "ClosedCurve")
      .def_static("circle", &ClosedCurve::circle, py::arg("radius"),
                  py::arg("center") = Vec2::Zero())
      .def_static("ellipse", &ClosedCurve::ellipse, py::arg("a"), py::arg("b"),
                  py::arg("center") = Vec2::Zero())
      .def_static("star", &ClosedCurve::star, py::arg("base_radius"),
                  py::arg("amplitude"), py::arg("lobes"),
                  py::arg("center") = Vec2::Zero())
      .def_static("fourier", &ClosedCurve::fourier, py::arg("c0"),
                  py::arg("cos_coeffs"), py::arg("sin_coeffs"),
                  py::arg("center") = Vec2::Zero())
      .def("eval",
           [](const ClosedCurve& c, double theta) {
             const CurvePoint p = c.eval(theta);
             py::dict d;
             d["point"] = p.point;
             d["tangent"] = p.tangent;
             d["normal"] = p.normal;
             d["speed"] = p.speed;
             d["curvature"] = p.curvature;
             return d;
           })
      .def("winding_about_origin", &ClosedCurve::winding_about_origin)
      .def("contains", &ClosedCurve::contains);

  m.def("boundary_length", &boundary_length, py::arg("curve"), py::arg("n"));
  m.def("containment_radius", &containment_radius, py::arg("outer"),
        py::arg("inner"));
  m.def("config_from_json", &config_from_text, py::arg("text"),
        "parse an experiment config from a JSON string");

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def("validate", &ExperimentConfig::validate)
      .def_readwrite("root_index", &ExperimentConfig::root_index)
      .def_readwrite("output_dir", &ExperimentConfig::output_dir)
      .def_readwrite("emit_plots", &ExperimentConfig::emit_plots);

  m.def(
      "solve",
      [](const ExperimentConfig& cfg, double eps) {
        const NystromSystem sys(cfg.problem);
        DensityTriple triple;
        NewtonReport rep;
        if (cfg.problem.nonlinearity.is_linear()) {
          triple = sys.solve_linear(eps);
        } else {
          const LimitSolution lim =
              solve_limit(cfg.problem, cfg.root_index, cfg.xi_bracket);
          triple = sys.solve_newton(eps, {lim.mu_outer, lim.mu_inner, lim.xi},
                                    cfg.newton_tol, cfg.newton_max_iter, &rep);
        }
        py::dict d = triple_to_dict(triple);
        d["newton_iters"] = rep.iterations;
        d["energy"] = sys.energy(eps, triple);
        d["residual"] = sys.lambda_residual(
                               eps, canonical_gamma(cfg.problem.scaling, eps),
                               triple)
                            .sup_norm();
        return d;
      },
      py::arg("config"), py::arg("eps"),
      "solve the finite-eps system (linear LU or Newton from the limit seed)");

  m.def(
      "reconstruct",
      [](const ExperimentConfig& cfg, double eps, const py::dict& triple,
         const PointSet& targets) {
        return NystromSystem(cfg.problem)
            .reconstruct(eps, triple_from_dict(triple), targets);
      },
      py::arg("config"), py::arg("eps"), py::arg("triple"), py::arg("targets"));

  m.def(
      "rescaled",
      [](const ExperimentConfig& cfg, double eps, const py::dict& triple,
         const PointSet& targets) {
        return NystromSystem(cfg.problem)
            .rescaled(eps, triple_from_dict(triple), targets);
      },
      py::arg("config"), py::arg("eps"), py::arg("triple"), py::arg("targets"));

  m.def(
      "limit_solve",
      [](const ExperimentConfig& cfg) {
        const auto roots = xi_roots(cfg.problem, cfg.xi_bracket);
        const LimitSolution sol =
            solve_limit(cfg.problem, cfg.root_index, cfg.xi_bracket);
        const EnergyCoefficients ec =
            limit_energy_coefficients(cfg.problem, sol);
        py::dict d;
        py::list rl;
        for (const auto& r : roots) {
          py::dict rd;
          rd["xi"] = r.xi;
          rd["residual"] = r.residual;
          rd["dtau"] = r.dtau;
          rd["degenerate"] = r.degenerate;
          rl.append(rd);
        }
        d["xi_roots"] = rl;
        d["xi"] = sol.xi;
        d["mu_outer"] = sol.mu_outer;
        d["mu_inner"] = sol.mu_inner;
        d["e1_0"] = ec.e1;
        d["e2_0"] = ec.e2_direct;
        return d;
      },
      py::arg("config"));

  m.def(
      "run_sweep",
      [](const ExperimentConfig& cfg, const std::string& output_dir) {
        const SweepResult result = run_sweep(cfg);
        std::vector<std::string> files;
        if (!output_dir.empty()) files = emit_outputs(result, cfg, output_dir);
        const nlohmann::json j = sweep_report_json(result, cfg);
        py::dict d;
        d["report_json"] = j.dump();
        d["files"] = files;
        return d;
      },
      py::arg("config"), py::arg("output_dir") = std::string(),
      "run the eps sweep; returns the report as a JSON string");

  m.def(
      "run_verify",
      [](const ExperimentConfig& cfg) {
        const VerifyReport report = run_verify(cfg);
        py::list checks;
        for (const auto& c : report.checks) {
          py::dict cd;
          cd["name"] = c.name;
          cd["measured"] = c.measured;
          cd["tolerance"] = c.tolerance;
          cd["pass"] = c.pass;
          checks.append(cd);
        }
        py::dict d;
        d["checks"] = checks;
        d["all_pass"] = report.all_pass();
        return d;
      },
      py::arg("config"));

  m.def("toy_solution",
        [](double a, double b, double eps, double x, double y) {
          ToyConfig cfg;
          cfg.a = a;
          cfg.b = b;
          return toy_solution(cfg, eps, Vec2(x, y));
        });
  m.def("toy_energy", [](double a, double eps) {
    ToyConfig cfg;
    cfg.a = a;
    return toy_energy(cfg, eps);
  });
  m.def("toy_xi_linear", &toy_xi_linear, py::arg("a"), py::arg("b"),
        py::arg("l0"), py::arg("r0"));

#ifdef PINHOLE_VERSION
#define PINHOLE_STR2(x) #x
#define PINHOLE_STR(x) PINHOLE_STR2(x)
  m.attr("__version__") = PINHOLE_STR(PINHOLE_VERSION);
#else
  m.attr("__version__") = "dev";
#endif
}
