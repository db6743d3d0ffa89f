#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

#include "degpar/transform_chain.hpp"

namespace degpar {

/// Raised for inadmissible operator/space parameters.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Coefficients of
///   L = y^{a1} Tr(Q D_xx) + 2 y^{(a1+a2)/2} q.grad_x D_y + gamma y^{a2} D_yy
///       + y^{a2-1} (b.grad_x + c D_y)
/// on the half-space R^N x (0, inf).
struct OperatorSpec {
  Eigen::MatrixXd Q;
  Eigen::VectorXd q;
  double gamma = 1.0;
  Eigen::VectorXd drift_b;
  double drift_c = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;

  int dimension() const { return static_cast<int>(Q.rows()); }

  /// The (N+1)x(N+1) block matrix [[Q, q], [q^T, gamma]].
  Eigen::MatrixXd block_matrix() const;

  /// Throws ParameterError unless the type invariants hold (ellipticity,
  /// alpha2 < 2, alpha2 - alpha1 < 2, b = 0 when c = 0, consistent sizes).
  void validate() const;

  /// Q = I, q = a, gamma = 1, b = 0, alpha1 = alpha2 = alpha.
  static OperatorSpec model(const Eigen::VectorXd& a, double alpha, double c);
};

/// Weighted Lebesgue space L^p_m = L^p(y^m dx dy).
struct SpaceSpec {
  double p = 2.0;
  double m = 0.0;

  void validate() const;
};

/// Model operator y^alpha (Delta_x + 2 a.grad_x D_y + D_yy + (c/y) D_y),
/// multiplied by `scale` when it stands for a reduced general operator.
struct ModelParams {
  Eigen::VectorXd a;
  double alpha = 0.0;
  double c_bessel = 0.0;
  double m = 0.0;
  double p = 2.0;
  double scale = 1.0;

  int dimension() const { return static_cast<int>(a.size()); }
  void validate() const;
  SpaceSpec space() const { return {p, m}; }
  /// The model as an OperatorSpec (scale dropped).
  OperatorSpec as_operator() const;
};

struct WindowReport {
  bool pass = false;
  double ratio = 0.0;  ///< (m+1)/p
  double lower = 0.0;  ///< alpha1^-
  double upper = 0.0;  ///< c/gamma + 1 - alpha2
  double lower_margin = 0.0;  ///< ratio - lower
  double upper_margin = 0.0;  ///< upper - ratio
};

/// alpha1^- < (m+1)/p < c/gamma + 1 - alpha2, strict, no slack.
WindowReport validate_window(const OperatorSpec& spec, const SpaceSpec& space);

/// Window of the model operator (alpha1 = alpha2 = alpha, gamma = 1).
WindowReport validate_window(const ModelParams& model);

struct BetaImage {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double c = 0.0;
  double m = 0.0;
};

/// Parameters seen by T_beta^{-1} L T_beta in L^p_{m~}.
BetaImage beta_map(double beta, double alpha1, double alpha2, double c, double m, double p);

/// Exponent of T_beta^{-1} = T_{-beta/(beta+1)}.
double inverse_beta(double beta);

/// Exponent gamma with T_{beta2} T_{beta1} = T_gamma (as substitutions).
double compose_beta(double beta1, double beta2);

/// Coefficients of T^{-1} L T for the shear T u(x, y) = u(x - (b/c) y, y).
/// The drift b is removed; Q, q change by the congruence of the block matrix
/// with [[I, 0], [-b^T/c, 1]].
OperatorSpec shear_map(const OperatorSpec& spec);

/// Smallest eigenvalue of the block matrix.
double min_block_eigenvalue(const OperatorSpec& spec);

struct Reduction {
  ModelParams model;
  TransformChain chain;
};

/// Shear, linear x-change and power substitution taking (spec, space) to a
/// model operator.
Reduction reduce_to_model(const OperatorSpec& spec, const SpaceSpec& space);

}  // namespace degpar
