#include <fftw3.h>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "degpar/config.hpp"
#include "degpar/harness.hpp"
#include "degpar/multiplier.hpp"
#include "degpar/parallel.hpp"
#include "degpar/semigroup.hpp"
#include "degpar/version.hpp"

namespace fs = std::filesystem;
using namespace degpar;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;

struct Common {
  std::string config_path;
  std::string out = "degpar_out";
  int threads = 1;
  std::optional<std::uint64_t> seed;
  std::optional<int> refine;
};

RunConfig load_config(const Common& c) {
  RunConfig cfg = c.config_path.empty() ? RunConfig::defaults() : RunConfig::load(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  if (c.refine) {
    if (*c.refine < 1 || *c.refine > 4) throw ConfigError("--refine", "must lie in [1, 4]");
    cfg.refine = *c.refine;
  }
  return cfg;
}

json versions() {
  return {{"degpar", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"fftw", std::string(fftw_version)},
          {"compiler", __VERSION__}};
}

void write_manifest(const fs::path& out, const std::string& command, const RunConfig& cfg, const json& extra = {}) {
  json m;
  m["command"] = command;
  m["config"] = cfg.to_json();
  m["seed"] = cfg.seed;
  m["versions"] = versions();
  try {
    m["transform_chain"] = json::parse(reduce_to_model(cfg.spec, cfg.space).chain.to_json());
  } catch (const ParameterError& e) {
    m["transform_chain"] = nullptr;
    m["transform_chain_error"] = e.what();
  }
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  std::ofstream(out / "manifest.json") << m.dump(2) << '\n';
}

Profile solution_profile(const RunConfig& cfg) { return profile_panel(2, 0.3, 0.5 * cfg.y_max, cfg.seed)[1]; }

Eigen::VectorXi mode_vector(const RunConfig& cfg) {
  Eigen::VectorXi k(cfg.dimension());
  for (int i = 0; i < cfg.dimension(); ++i) k[i] = cfg.mode[static_cast<size_t>(i)];
  return k;
}

void write_field_csv(const fs::path& path, const Field& u, const Field* exact) {
  std::ofstream os(path);
  const Grid& g = u.grid();
  os << "x_point,y,re,im";
  if (exact) os << ",exact_re,exact_im";
  os << '\n';
  char buf[160];
  for (Eigen::Index p = 0; p < g.x_points(); ++p) {
    for (int j = 0; j < g.J(); ++j) {
      const cplx v = u.at(p, j);
      std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g", static_cast<long>(p), g.y()[j], v.real(), v.imag());
      os << buf;
      if (exact) {
        const cplx e = exact->at(p, j);
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g", e.real(), e.imag());
        os << buf;
      }
      os << '\n';
    }
  }
}

int solve_elliptic(const Common& common) {
  const RunConfig cfg = load_config(common);
  const fs::path out(common.out);
  fs::create_directories(out);
  const GridPtr g = cfg.grid();
  NdSolveReport rep;
  if (cfg.forcing == "manufactured") {
    const ManufacturedPair mp = manufactured_general(cfg.spec, g, mode_vector(cfg), solution_profile(cfg), cfg.lambda);
    const Field u = solve_general(cfg.spec, cfg.space, cfg.lambda, mp.f, &rep);
    const double err = lp_norm(Field(g, u.values() - mp.u.values()), cfg.space.p, cfg.space.m) /
                       lp_norm(mp.u, cfg.space.p, cfg.space.m);
    std::printf("residual %.6e relative_error %.6e max_condition %.3e\n", rep.residual, err, rep.max_condition);
    write_field_csv(out / "solution.csv", u, &mp.u);
    write_manifest(out, "solve_elliptic", cfg, {{"residual", rep.residual}, {"relative_error", err}});
  } else {
    Field f(g);
    const Eigen::VectorXd phi = solution_profile(cfg).sample(g->y());
    for (Eigen::Index s = 0; s < g->x_points(); ++s) f.slice(s) = phi.cast<cplx>();
    const Field u = solve_general(cfg.spec, cfg.space, cfg.lambda, f, &rep);
    std::printf("residual %.6e max_condition %.3e\n", rep.residual, rep.max_condition);
    write_field_csv(out / "solution.csv", u, nullptr);
    write_manifest(out, "solve_elliptic", cfg, {{"residual", rep.residual}});
  }
  return kExitOk;
}

int solve_parabolic(const Common& common) {
  const RunConfig cfg = load_config(common);
  const fs::path out(common.out);
  fs::create_directories(out);
  const GridPtr g = cfg.grid();
  const auto tg = uniform_time_grid(cfg.t_final, cfg.time_steps);
  const int every = std::max(1, cfg.time_steps / 10);
  json extra;
  EvolutionRun run;
  if (cfg.forcing == "manufactured") {
    // u(t) = e^{-t} psi solves D_t u - L u = e^{-t} (-psi - L psi).
    const ManufacturedPair mp = manufactured_general(cfg.spec, g, mode_vector(cfg), solution_profile(cfg), cplx(-1.0));
    const Forcing forcing = [&](double t) { return Field(g, std::exp(-t) * mp.f.values()); };
    run = evolve_general(mp.u, forcing, cfg.spec, cfg.space, cfg.scheme, tg, every);
    const Field exact(g, std::exp(-cfg.t_final) * mp.u.values());
    const double err = lp_norm(Field(g, run.final_state().values() - exact.values()), cfg.space.p, cfg.space.m) /
                       lp_norm(exact, cfg.space.p, cfg.space.m);
    std::printf("final_time %.6g steps %d relative_error %.6e\n", cfg.t_final, cfg.time_steps, err);
    extra["relative_error"] = err;
  } else {
    Field u0(g);
    const Eigen::VectorXd phi = solution_profile(cfg).sample(g->y());
    for (Eigen::Index s = 0; s < g->x_points(); ++s) u0.slice(s) = phi.cast<cplx>();
    run = evolve_general(u0, {}, cfg.spec, cfg.space, cfg.scheme, tg, every);
    const double ratio = lp_norm(run.final_state(), cfg.space.p, cfg.space.m) / lp_norm(u0, cfg.space.p, cfg.space.m);
    std::printf("final_time %.6g steps %d norm_ratio %.6e\n", cfg.t_final, cfg.time_steps, ratio);
    extra["norm_ratio"] = ratio;
  }
  std::ofstream os(out / "evolution.csv");
  run.write_csv(os);
  write_manifest(out, "solve_parabolic", cfg, extra);
  return kExitOk;
}

void print_result(const EstimateResult& r) {
  std::printf("%s %-26s %s\n", r.pass ? "PASS" : "FAIL", r.estimate_id.c_str(), r.detail.c_str());
}

json result_json(const EstimateResult& r) {
  json j;
  j["estimate_id"] = r.estimate_id;
  j["anchor"] = r.anchor;
  j["pass"] = r.pass;
  j["constant"] = r.constant;
  j["drift"] = r.drift;
  j["csv"] = fs::path(r.csv_path).filename().string();
  return j;
}

int verify(const Common& common, const std::string& suite) {
  const RunConfig cfg = load_config(common);
  SuiteConfig sc = cfg.suite_config();
  try {
    const auto ids = suite_checks(suite);
    if (!sc.checks) sc.checks = ids;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("suite", e.what());
  }
  sc.out_dir = common.out;
  const auto results = run_suite(sc);
  bool ok = true;
  json checks = json::array();
  for (const auto& r : results) {
    print_result(r);
    ok = ok && r.pass;
    checks.push_back(result_json(r));
  }
  std::printf("%zu checks, %s\n", results.size(), ok ? "all passed" : "failures recorded");
  write_manifest(fs::path(common.out), "verify " + suite, cfg,
                 {{"suite", suite}, {"check_seed", sc.seed}, {"checks", checks}});
  return ok ? kExitOk : kExitCheckFailure;
}

std::vector<double> parse_range(const std::string& text) {
  double a = 0.0, b = 0.0;
  int n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  if (!(is >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 || n > 64)
    throw ConfigError("range", "expected start:stop:count with 1 <= count <= 64");
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return v;
}

int sweep(const Common& common, const std::string& parameter, const std::string& range, const std::string& suite) {
  const RunConfig base = load_config(common);
  const auto values = parse_range(range);
  json bj = base.to_json();
  if (!bj.contains(parameter) || !bj.at(parameter).is_number())
    throw ConfigError(parameter, "not a numeric configuration key");
  const bool integral = bj.at(parameter).is_number_integer();
  std::vector<std::string> ids;
  try {
    ids = suite_checks(suite);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("suite", e.what());
  }
  const fs::path out(common.out);
  fs::create_directories(out);
  CsvTable table;
  table.header = {parameter, "in_window", "estimate_id", "pass", "constant", "drift"};
  bool ok = true;
  for (size_t i = 0; i < values.size(); ++i) {
    json j = bj;
    if (integral)
      j[parameter] = static_cast<long long>(std::llround(values[i]));
    else
      j[parameter] = values[i];
    const RunConfig cfg = RunConfig::from_json(j);
    SuiteConfig sc = cfg.suite_config();
    if (!sc.checks) sc.checks = ids;
    sc.out_dir = (out / ("point_" + std::to_string(i))).string();
    const bool in_window = validate_window(cfg.spec, cfg.space).pass;
    for (const auto& r : run_suite(sc)) {
      std::printf("%s=%-10.6g ", parameter.c_str(), values[i]);
      print_result(r);
      ok = ok && r.pass;
      table.add(values[i], in_window ? "true" : "false", r.estimate_id, r.pass ? "true" : "false", r.constant, r.drift);
    }
  }
  std::ofstream(out / "sweep.csv") << table.to_string();
  write_manifest(out, "sweep " + parameter + " " + range, base,
                 {{"suite", suite}, {"parameter", parameter}, {"values", values}});
  return ok ? kExitOk : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degenerate elliptic and parabolic operators on the half-space: solvers and estimate checks"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON run configuration");
    sub->add_option("--out", common.out, "output directory")->capture_default_str();
    sub->add_option("--threads", common.threads, "worker threads")->check(CLI::Range(1, 256))->capture_default_str();
    sub->add_option("--seed", common.seed, "seed (overrides the configuration)");
    sub->add_option("--refine", common.refine, "refinement levels of the checks (overrides the configuration)");
  };
  auto* elliptic = app.add_subcommand("solve_elliptic", "solve (lambda - L) u = f");
  add_common(elliptic);
  auto* parabolic = app.add_subcommand("solve_parabolic", "evolve D_t u = L u + f");
  add_common(parabolic);
  auto* ver = app.add_subcommand("verify", "run a check suite");
  std::string suite = "all";
  ver->add_option("suite", suite, "suite name or check id")->capture_default_str();
  add_common(ver);
  auto* sw = app.add_subcommand("sweep", "run a suite over a range of one configuration key");
  std::string parameter, range, sweep_suite = "kernel_bounds";
  sw->add_option("parameter", parameter, "numeric configuration key")->required();
  sw->add_option("range", range, "start:stop:count")->required();
  sw->add_option("--suite", sweep_suite, "suite run at every point")->capture_default_str();
  add_common(sw);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfigError;
  }
  try {
    set_thread_count(common.threads);
    if (*elliptic) return solve_elliptic(common);
    if (*parabolic) return solve_parabolic(common);
    if (*ver) return verify(common, suite);
    return sweep(common, parameter, range, sweep_suite);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitCheckFailure;
  }
}
