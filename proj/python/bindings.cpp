#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "degpar/config.hpp"
#include "degpar/harness.hpp"
#include "degpar/multiplier.hpp"
#include "degpar/params.hpp"
#include "degpar/profiles.hpp"
#include "degpar/version.hpp"

namespace py = pybind11;
using namespace degpar;

namespace {

RunConfig parse_config(const std::string& text) {
  return RunConfig::from_json(text.empty() ? nlohmann::json::object() : nlohmann::json::parse(text));
}

py::dict result_dict(const EstimateResult& r) {
  py::dict d;
  d["estimate_id"] = r.estimate_id;
  d["anchor"] = r.anchor;
  d["parameters"] = r.parameters;
  d["levels"] = r.levels;
  d["constants"] = r.constants;
  d["constant"] = r.constant;
  d["drift"] = r.drift;
  d["finite"] = r.finite;
  d["pass"] = r.pass;
  d["detail"] = r.detail;
  if (r.negative) {
    py::dict n;
    n["constants"] = r.negative->constants;
    n["drift"] = r.negative->drift;
    n["passed"] = r.negative->passed;
    d["negative_control"] = n;
  } else {
    d["negative_control"] = py::none();
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Degenerate elliptic and parabolic operators on the half-space";
  mod.attr("__version__") = kVersion;

  py::register_exception<ParameterError>(mod, "ParameterError", PyExc_ValueError);
  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);

  mod.def(
      "beta_map",
      [](double beta, double alpha1, double alpha2, double c, double m, double p) {
        const BetaImage b = beta_map(beta, alpha1, alpha2, c, m, p);
        return py::dict(py::arg("alpha1") = b.alpha1, py::arg("alpha2") = b.alpha2, py::arg("c") = b.c,
                        py::arg("m") = b.m);
      },
      py::arg("beta"), py::arg("alpha1"), py::arg("alpha2"), py::arg("c"), py::arg("m"), py::arg("p"),
      "Parameters of the operator conjugated by the power substitution T_beta.");
  mod.def("inverse_beta", &inverse_beta, py::arg("beta"));
  mod.def("compose_beta", &compose_beta, py::arg("beta1"), py::arg("beta2"));

  mod.def(
      "validate_window",
      [](const std::string& config) {
        const RunConfig cfg = parse_config(config);
        const WindowReport w = validate_window(cfg.spec, cfg.space);
        return py::dict(py::arg("pass") = w.pass, py::arg("ratio") = w.ratio, py::arg("lower") = w.lower,
                        py::arg("upper") = w.upper);
      },
      py::arg("config") = "", "Window test alpha1^- < (m+1)/p < c/gamma + 1 - alpha2 for a JSON run config.");

  mod.def(
      "reduce",
      [](const std::string& config) {
        const RunConfig cfg = parse_config(config);
        const Reduction r = reduce_to_model(cfg.spec, cfg.space);
        py::dict model;
        model["a"] = std::vector<double>(r.model.a.data(), r.model.a.data() + r.model.a.size());
        model["alpha"] = r.model.alpha;
        model["c"] = r.model.c_bessel;
        model["m"] = r.model.m;
        model["p"] = r.model.p;
        model["scale"] = r.model.scale;
        return py::make_tuple(model, r.chain.to_json());
      },
      py::arg("config") = "", "Model parameters and the transform chain (JSON) of a run config.");

  mod.def("suite_checks", &suite_checks, py::arg("suite") = "all");
  mod.def("suite_names", &suite_names);

  mod.def(
      "run_check",
      [](const std::string& id, const std::string& config) {
        const SuiteConfig sc = parse_config(config).suite_config();
        EstimateResult r;
        {
          py::gil_scoped_release release;
          r = run_check(id, sc);
        }
        return result_dict(r);
      },
      py::arg("id"), py::arg("config") = "", "Runs one registered check and returns its result.");

  mod.def(
      "solve_elliptic",
      [](const std::string& config) {
        const RunConfig cfg = parse_config(config);
        const GridPtr g = cfg.grid();
        Eigen::VectorXi k(cfg.dimension());
        for (int i = 0; i < cfg.dimension(); ++i) k[i] = cfg.mode[static_cast<size_t>(i)];
        const Profile phi = profile_panel(2, 0.3, 0.5 * cfg.y_max, cfg.seed)[1];
        NdSolveReport rep;
        double err = 0.0;
        {
          py::gil_scoped_release release;
          const ManufacturedPair mp = manufactured_general(cfg.spec, g, k, phi, cfg.lambda);
          const Field u = solve_general(cfg.spec, cfg.space, cfg.lambda, mp.f, &rep);
          err = lp_norm(Field(g, u.values() - mp.u.values()), cfg.space.p, cfg.space.m) /
                lp_norm(mp.u, cfg.space.p, cfg.space.m);
        }
        return py::dict(py::arg("residual") = rep.residual, py::arg("relative_error") = err,
                        py::arg("max_condition") = rep.max_condition);
      },
      py::arg("config") = "", "Manufactured elliptic solve (lambda - L) u = f; returns residual and error.");
}
