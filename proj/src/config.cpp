#include "degpar/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace degpar {

namespace {

using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "dimension", "q_matrix",  "q_vector",   "gamma",     "drift_b",   "drift_c", "alpha1",
      "alpha2",    "p",         "m",          "grid_j",    "y_max",     "grading", "box_length",
      "nx",        "lambda_re", "lambda_im",  "t_final",   "time_steps", "scheme", "forcing",
      "mode",      "seed",      "refine",     "time_q",    "checks",    "negative_controls"};
  return keys;
}

double get_number(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(key, "must be finite");
  return x;
}

int get_int(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
  return v.get<int>();
}

Eigen::VectorXd get_vector(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(key, "expected an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(key, "expected an array of numbers");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

Eigen::MatrixXd get_matrix(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(key, "expected an array of rows");
  const auto n = static_cast<Eigen::Index>(v.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const json& row = v[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw ConfigError(key, "expected a square matrix");
    for (Eigen::Index c = 0; c < n; ++c) {
      if (!row[static_cast<size_t>(c)].is_number()) throw ConfigError(key, "expected numeric entries");
      out(r, c) = row[static_cast<size_t>(c)].get<double>();
    }
  }
  return out;
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

/// The type invariants of OperatorSpec/SpaceSpec, each charged to a key.
void check_invariants(const RunConfig& c) {
  const OperatorSpec& s = c.spec;
  const int n = s.dimension();
  if (n < 1 || n > 3) throw ConfigError("dimension", "must be 1, 2 or 3");
  if (s.q.size() != n) throw ConfigError("q_vector", "size must equal the dimension");
  if (s.drift_b.size() != n) throw ConfigError("drift_b", "size must equal the dimension");
  if ((s.Q - s.Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + s.Q.cwiseAbs().maxCoeff()))
    throw ConfigError("q_matrix", "must be symmetric");
  if (!(s.gamma > 0.0)) throw ConfigError("gamma", "must be positive");
  if (!(min_block_eigenvalue(s) > 0.0))
    throw ConfigError("q_matrix", "block matrix [[Q, q], [q^T, gamma]] is not positive definite");
  if (!(s.alpha2 < 2.0)) throw ConfigError("alpha2", "must be < 2");
  if (!(s.alpha2 - s.alpha1 < 2.0)) throw ConfigError("alpha1", "alpha2 - alpha1 must be < 2");
  if (s.drift_c == 0.0 && s.drift_b.cwiseAbs().maxCoeff() != 0.0)
    throw ConfigError("drift_b", "must vanish when drift_c = 0");
  if (s.drift_b.cwiseAbs().maxCoeff() != 0.0 && s.alpha1 != s.alpha2)
    throw ConfigError("drift_b", "an oblique drift needs alpha1 = alpha2");
  if (!(c.space.p > 1.0)) throw ConfigError("p", "must lie in (1, inf)");
  if (c.grid_j < 8 || c.grid_j > (1 << 16)) throw ConfigError("grid_j", "must lie in [8, 65536]");
  if (!(c.y_max > 0.0)) throw ConfigError("y_max", "must be positive");
  if (!(c.grading >= 1.0)) throw ConfigError("grading", "must be >= 1");
  if (!(c.box_length > 0.0)) throw ConfigError("box_length", "must be positive");
  if (c.nx < 2 || c.nx % 2 != 0 || c.nx > 1024) throw ConfigError("nx", "must be even and in [2, 1024]");
  if (!(c.t_final > 0.0)) throw ConfigError("t_final", "must be positive");
  if (c.time_steps < 1) throw ConfigError("time_steps", "must be >= 1");
  if (c.forcing != "manufactured" && c.forcing != "none") throw ConfigError("forcing", "expected manufactured or none");
  if (static_cast<int>(c.mode.size()) != n) throw ConfigError("mode", "size must equal the dimension");
  if (c.refine < 1 || c.refine > 4) throw ConfigError("refine", "must lie in [1, 4]");
  if (!(c.time_q > 1.0)) throw ConfigError("time_q", "must lie in (1, inf)");
}

}  // namespace

RunConfig RunConfig::defaults() {
  RunConfig c;
  c.spec = OperatorSpec::model(Eigen::VectorXd::Zero(1), 0.0, 0.0);
  c.mode = {1};
  return c;
}

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known_keys().count(it.key())) throw ConfigError(it.key(), "unknown key");

  RunConfig c = defaults();
  int n = 1;
  if (j.contains("dimension")) n = get_int(j, "dimension");
  else if (j.contains("q_matrix")) n = static_cast<int>(j.at("q_matrix").size());
  if (n < 1 || n > 3) throw ConfigError("dimension", "must be 1, 2 or 3");
  c.spec = OperatorSpec::model(Eigen::VectorXd::Zero(n), 0.0, 0.0);
  c.mode.assign(static_cast<size_t>(n), 0);
  c.mode[0] = 1;

  if (j.contains("q_matrix")) {
    c.spec.Q = get_matrix(j, "q_matrix");
    if (c.spec.Q.rows() != n) throw ConfigError("q_matrix", "size must equal the dimension");
  }
  if (j.contains("q_vector")) c.spec.q = get_vector(j, "q_vector");
  if (j.contains("gamma")) c.spec.gamma = get_number(j, "gamma");
  if (j.contains("drift_b")) c.spec.drift_b = get_vector(j, "drift_b");
  if (j.contains("drift_c")) c.spec.drift_c = get_number(j, "drift_c");
  if (j.contains("alpha1")) c.spec.alpha1 = get_number(j, "alpha1");
  if (j.contains("alpha2")) c.spec.alpha2 = get_number(j, "alpha2");
  if (j.contains("p")) c.space.p = get_number(j, "p");
  if (j.contains("m")) c.space.m = get_number(j, "m");
  if (j.contains("grid_j")) c.grid_j = get_int(j, "grid_j");
  if (j.contains("y_max")) c.y_max = get_number(j, "y_max");
  if (j.contains("grading")) c.grading = get_number(j, "grading");
  if (j.contains("box_length")) c.box_length = get_number(j, "box_length");
  if (j.contains("nx")) c.nx = get_int(j, "nx");
  if (j.contains("lambda_re")) c.lambda.real(get_number(j, "lambda_re"));
  if (j.contains("lambda_im")) c.lambda.imag(get_number(j, "lambda_im"));
  if (j.contains("t_final")) c.t_final = get_number(j, "t_final");
  if (j.contains("time_steps")) c.time_steps = get_int(j, "time_steps");
  if (j.contains("scheme")) {
    if (!j.at("scheme").is_string()) throw ConfigError("scheme", "expected a string");
    try {
      c.scheme = time_scheme_from_string(j.at("scheme").get<std::string>());
    } catch (const std::exception&) {
      throw ConfigError("scheme", "expected backward_euler or crank_nicolson");
    }
  }
  if (j.contains("forcing")) {
    if (!j.at("forcing").is_string()) throw ConfigError("forcing", "expected a string");
    c.forcing = j.at("forcing").get<std::string>();
  }
  if (j.contains("mode")) {
    const json& v = j.at("mode");
    if (!v.is_array()) throw ConfigError("mode", "expected an array of integers");
    c.mode.clear();
    for (const auto& e : v) {
      if (!e.is_number_integer()) throw ConfigError("mode", "expected an array of integers");
      c.mode.push_back(e.get<int>());
    }
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !(j.at("seed").is_number_integer() && j.at("seed").get<long long>() >= 0))
      throw ConfigError("seed", "expected a nonnegative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("refine")) c.refine = get_int(j, "refine");
  if (j.contains("time_q")) c.time_q = get_number(j, "time_q");
  if (j.contains("checks")) {
    const json& v = j.at("checks");
    if (!v.is_array()) throw ConfigError("checks", "expected an array of check ids");
    std::vector<std::string> ids;
    for (const auto& e : v) {
      if (!e.is_string()) throw ConfigError("checks", "expected an array of check ids");
      ids.push_back(e.get<std::string>());
      bool known = false;
      for (const auto& ci : check_registry()) known = known || ci.id == ids.back();
      if (!known) throw ConfigError("checks", "unknown check '" + ids.back() + "'");
    }
    c.checks = ids;
  }
  if (j.contains("negative_controls")) {
    if (!j.at("negative_controls").is_boolean()) throw ConfigError("negative_controls", "expected a boolean");
    c.negative_controls = j.at("negative_controls").get<bool>();
  }
  check_invariants(c);
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("--config", "cannot open '" + path + "'");
  json j;
  try {
    is >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
  return from_json(j);
}

json RunConfig::to_json() const {
  json j;
  const int n = dimension();
  j["dimension"] = n;
  json Q = json::array();
  for (int r = 0; r < n; ++r) {
    json row = json::array();
    for (int c = 0; c < n; ++c) row.push_back(spec.Q(r, c));
    Q.push_back(row);
  }
  j["q_matrix"] = Q;
  j["q_vector"] = vector_json(spec.q);
  j["gamma"] = spec.gamma;
  j["drift_b"] = vector_json(spec.drift_b);
  j["drift_c"] = spec.drift_c;
  j["alpha1"] = spec.alpha1;
  j["alpha2"] = spec.alpha2;
  j["p"] = space.p;
  j["m"] = space.m;
  j["grid_j"] = grid_j;
  j["y_max"] = y_max;
  j["grading"] = grading;
  j["box_length"] = box_length;
  j["nx"] = nx;
  j["lambda_re"] = lambda.real();
  j["lambda_im"] = lambda.imag();
  j["t_final"] = t_final;
  j["time_steps"] = time_steps;
  j["scheme"] = to_string(scheme);
  j["forcing"] = forcing;
  j["mode"] = mode;
  j["seed"] = seed;
  j["refine"] = refine;
  j["time_q"] = time_q;
  if (checks) j["checks"] = *checks;
  j["negative_controls"] = negative_controls;
  return j;
}

GridPtr RunConfig::grid() const { return Grid::make(grid_j, y_max, grading, XBox{box_length, nx, dimension()}); }

SuiteConfig RunConfig::suite_config() const {
  SuiteConfig s = SuiteConfig::defaults();
  try {
    s.model = reduce_to_model(spec, space).model;
  } catch (const ParameterError& e) {
    throw ConfigError("q_vector", std::string("no model reduction: ") + e.what());
  }
  s.base_J = grid_j;
  s.y_max = y_max;
  s.grading = grading;
  s.nx = nx;
  s.box_length = box_length;
  s.time_q = time_q;
  s.refine = refine;
  s.seed = seed;
  s.checks = checks;
  s.negative_controls = negative_controls;
  return s;
}

}  // namespace degpar
