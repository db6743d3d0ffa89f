#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "degpar/harness.hpp"
#include "degpar/params.hpp"
#include "degpar/semigroup.hpp"
#include "json.hpp"

namespace degpar {

/// Invalid run configuration; `key` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error("config key '" + key + "': " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Operator, space, discretization and run settings of one CLI invocation.
/// JSON keys (all optional): dimension, q_matrix, q_vector, gamma, drift_b,
/// drift_c, alpha1, alpha2, p, m, grid_j, y_max, grading, box_length, nx,
/// lambda_re, lambda_im, t_final, time_steps, scheme, forcing, mode, seed,
/// refine, time_q, checks, negative_controls. Unknown keys are errors.
struct RunConfig {
  OperatorSpec spec;
  SpaceSpec space;
  int grid_j = 128;
  double y_max = 8.0;
  double grading = 2.0;
  double box_length = 2.0 * 3.14159265358979323846;
  int nx = 16;
  cplx lambda{1.0, 0.0};
  double t_final = 1.0;
  int time_steps = 100;
  TimeScheme scheme = TimeScheme::backward_euler;
  /// "manufactured" (exact solution known) or "none".
  std::string forcing = "manufactured";
  /// x-frequency index of the manufactured solution (per axis).
  std::vector<int> mode;
  std::uint64_t seed = 1;
  int refine = 2;
  double time_q = 2.0;
  std::optional<std::vector<std::string>> checks;
  bool negative_controls = true;

  /// Defaults: N = 1, Q = I, q = 0, gamma = 1, b = 0, c = 0, alpha1 = alpha2 = 0, p = 2, m = 0.
  static RunConfig defaults();
  /// Throws ConfigError naming the first bad key.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
  nlohmann::json to_json() const;

  int dimension() const { return spec.dimension(); }
  /// Grid with the x-box of the operator's dimension.
  GridPtr grid() const;
  /// Suite settings in the reduced model frame (reduce_to_model).
  SuiteConfig suite_config() const;
};

}  // namespace degpar
