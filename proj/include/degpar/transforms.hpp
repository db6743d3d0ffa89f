#pragma once

#include <Eigen/Dense>

#include <vector>

#include "degpar/grid.hpp"
#include "degpar/params.hpp"
#include "degpar/profiles.hpp"

namespace degpar {

/// Source mesh of T_beta for a target mesh: nodes target_j^{beta+1}.
GridPtr power_source_grid(const Grid& target, double beta);

/// True when source nodes equal target nodes^{beta+1} to rounding.
bool matched_power_pair(const Grid& source, const Grid& target, double beta);

/// (T_beta u)(x, y) = |beta+1|^{1/p} u(x, y^{beta+1}). The result lives on
/// the mesh whose nodes are the source nodes^{1/(beta+1)}, so no
/// interpolation is involved. Requires beta > -1.
Field apply_power(const Field& u, double beta, double p);
/// Same, onto a given target mesh (throws std::invalid_argument if unmatched).
Field apply_power(const Field& u, double beta, double p, GridPtr target);

/// Multiplies by exp(-i a_dot_xi y^{2/(2-alpha)}).
Field apply_phase(const Field& u, double a_dot_xi, double alpha);
Eigen::VectorXcd apply_phase(const Grid& grid, const Eigen::VectorXcd& u, double a_dot_xi, double alpha);

/// (T u)(x, y) = u(x - (b/c) y, y), by an exact phase shift of every x-mode.
Field apply_shear(const Field& u, const Eigen::VectorXd& b, double c);
/// Inverse shear u(x + (b/c) y, y).
Field apply_shear_inverse(const Field& u, const Eigen::VectorXd& b, double c);

/// Strong-form evaluation of the full operator L on a field: spectral in x,
/// three-point differences in y.
Field apply_operator_strong(const OperatorSpec& spec, const Field& u);

struct SimilarityParams {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double c = 0.0;
  double a_dot_xi = 0.0;
  double xi_sq = 0.0;
  double beta = 0.0;
  double p = 2.0;
};

struct SimilarityReport {
  double max_rel_discrepancy = 0.0;
  /// Least-squares coefficient of the transformed Bessel term, expected (beta+1)^2.
  double bessel_coefficient = 0.0;
  double expected_coefficient = 0.0;
  BetaImage image;
};

/// Evaluates T_beta^{-1} (y^{a1} Delta_x + 2 y^{(a1+a2)/2} (a, grad_x D_y) + y^{a2} B) T_beta u
/// and its transformed form on one Fourier mode e^{i xi x} phi(y) for each
/// panel profile phi. `grid` is the mesh of the transformed frame; the
/// original frame uses its matched preimage.
SimilarityReport similarity_check_power(const SimilarityParams& params, const GridPtr& grid,
                                        const std::vector<Profile>& panel);

/// max |a~(u, v) - a~_b~(S^{-1} u, S^{-1} v)| / max |a~(u, v)| over panel
/// pairs, with a~ the power-frame form and a~_b~ the transport form.
double phase_form_check(double c_tilde, double beta, double a_dot_xi, double xi_sq, const GridPtr& grid,
                        const std::vector<Profile>& panel);

/// max |T^{-1} L T u - L~ u| / max |L~ u| over tensor test fields
/// cos(k.x) phi(y), with L~ the coefficients returned by shear_map.
double shear_conjugation_check(const OperatorSpec& spec, const GridPtr& grid, const std::vector<Profile>& panel);

}  // namespace degpar
