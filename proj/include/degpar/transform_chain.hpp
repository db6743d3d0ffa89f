#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace degpar {

enum class TransformKind { shear, linear_x, power, phase };

std::string to_string(TransformKind kind);

/// One change of variables. Only the fields of the given kind are used.
struct TransformStep {
  TransformKind kind = TransformKind::power;
  // shear: u(x - (b/c) y, y)
  Eigen::VectorXd shear_b;
  double shear_c = 1.0;
  // linear_x: x_source = matrix * x_target
  Eigen::MatrixXd matrix;
  // power: |beta+1|^{1/p} u(x, y^{beta+1})
  double beta = 0.0;
  double p = 2.0;
  // phase: exp(-i a_dot_xi y^{2/(2-alpha)}) u
  double a_dot_xi = 0.0;
  double alpha = 0.0;
};

/// Ordered changes of variables from the original frame to the model frame,
/// with the weighted spaces on both ends.
struct TransformChain {
  std::vector<TransformStep> steps;
  double source_p = 2.0;
  double source_m = 0.0;
  double target_p = 2.0;
  double target_m = 0.0;

  bool empty() const { return steps.empty(); }
  /// JSON text (pretty printed with two-space indentation).
  std::string to_json() const;
  static TransformChain from_json(const std::string& text);
};

}  // namespace degpar
