#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "degpar/grid.hpp"
#include "degpar/profiles.hpp"
#include "degpar/tridiag.hpp"

namespace degpar {

enum class BoundaryTag { neumann_form, oblique };

/// Raised when a resolvent system is singular or too ill-conditioned.
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Continuous parameters a form stands for (bookkeeping only).
struct FormParams {
  double c = 0.0;
  double alpha = 0.0;
  double drift = 0.0;  ///< b, or 2 a.xi
  double shift = 0.0;  ///< mu, |xi|^2 or Q_a(xi)
  double beta = 0.0;
};

/// Sesquilinear form on (0, Y_max) with power weights:
///   stiffness_coef * int Du Dv^* y^s
///   + sum directional: coef * int (Du) v^* y^s
///   + sum transport:   coef * int D(u v^*) y^s
///   + sum potential:   coef * int u v^* y^s,
/// realized as an operator M in L^2(y^inner dy) through -<Mu, v> = form(u, v).
struct FormSpec {
  enum class Kind { directional, transport, potential };
  struct Term {
    Kind kind = Kind::potential;
    cplx coef = 0.0;
    double exponent = 0.0;
  };

  double stiffness_exponent = 0.0;
  double stiffness_coef = 1.0;
  std::vector<Term> terms;
  double inner_exponent = 0.0;
  BoundaryTag bc = BoundaryTag::neumann_form;
  /// |Im form| <= sector_tan * Re form; the semigroup is analytic on the
  /// sector of half-angle pi/2 - atan(sector_tan).
  double sector_tan = 0.0;
  std::string label;
  FormParams params;

  FormSpec& add(Kind kind, cplx coef, double exponent);
  /// True when the form is Hermitian (no imaginary coefficients).
  bool hermitian() const;
};

/// B = D_yy + (c/y) D_y in L^2_c.
FormSpec bessel_form(double c);
/// y^alpha B - mu y^alpha in L^2_{c-alpha}.
FormSpec shifted_bessel_form(double c, double alpha, double mu);
/// y^alpha (L_{2 a.xi} - |xi|^2) = y^alpha (B + 2i a.xi D_y - |xi|^2) in L^2_{c-alpha}.
FormSpec degenerate_form(double c, double alpha, double a_dot_xi, double xi_sq);
/// The same operator after the power substitution y -> y^{1-alpha/2}, in
/// L^2_{c~}: stiffness y^{c~}, directional -i b (beta+1) y^{c~+beta},
/// potential |xi|^2 (beta+1)^2 y^{c~+2 beta}, with b = 2 a.xi.
FormSpec power_frame_form(double c_tilde, double beta, double b, double xi_sq);
/// A_{b,beta} = B - i b (c+beta)/2 y^{beta-1} - (beta+1)^2 Q_a y^{2 beta} in L^2_c,
/// from the symmetric transport form -i (b/2) int D(u v^*) y^{c+beta}.
FormSpec auxiliary_form(double c, double beta, double b, double q_a);
/// L_{2 a.xi} - |xi|^2 - lambda y^{-alpha} in L^2_c.
FormSpec potential_form(double c, double alpha, double a_dot_xi, double xi_sq, cplx lambda);

/// Building blocks on a grid (nodes y_j, links between consecutive nodes).
/// int Du Dv^* y^s: link k (nodes k-1, k) carries int_{y_{k-1}}^{y_k} y^s / h_k^2.
Tridiag assemble_stiffness(const Grid& grid, double s);
/// int (Du) v^* y^s: link k contributes (u_k - u_{k-1}) (v_{k-1} + v_k)^* omega_k / (2 h_k).
Tridiag assemble_directional(const Grid& grid, double s);
/// int D(u v^*) y^s: the Hermitian-symmetric part of twice the directional matrix (diagonal).
Eigen::VectorXd assemble_transport(const Grid& grid, double s);
/// int u v^* y^s, lumped: exact cell moments.
Eigen::VectorXd assemble_potential(const Grid& grid, double s);

/// Banded realization M = -W^{-1} K of a form on a grid.
class DiscreteOperator {
 public:
  DiscreteOperator(FormSpec spec, GridPtr grid);

  const FormSpec& spec() const { return spec_; }
  const GridPtr& grid() const { return grid_; }
  BoundaryTag bc() const { return spec_.bc; }
  /// Form matrix K: form(u, v) = v^H K u.
  const Tridiag& form_matrix() const { return K_; }
  /// Inner-product weights W (cell moments of y^inner).
  const Eigen::VectorXd& inner_weight() const { return W_; }
  Eigen::Index size() const { return W_.size(); }

  /// Dense M = -W^{-1} K.
  Eigen::MatrixXcd matrix() const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& u) const;
  cplx form(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const;
  cplx inner(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const;
  double norm(const Eigen::VectorXcd& u) const;
  /// Banded structure as CSV rows (row, lower, diag, upper, weight).
  void write_banded(std::ostream& os) const;

 private:
  FormSpec spec_;
  GridPtr grid_;
  Tridiag K_;
  Eigen::VectorXd W_;
};

struct SolveInfo {
  double residual = 0.0;   ///< ||(lambda - M) u - f||_w / ||f||_w
  double condition = 0.0;  ///< 1-norm condition estimate of lambda W + K
};

/// Factorization of lambda W + K, reusable for many right-hand sides.
class Resolvent {
 public:
  Resolvent(const DiscreteOperator& op, cplx lambda);

  cplx lambda() const { return lambda_; }
  double condition() const { return condition_; }
  /// u = (lambda - M)^{-1} f.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& f) const;
  /// Solves (lambda W + K) u = load.
  Eigen::VectorXcd solve_load(const Eigen::VectorXcd& load) const;
  /// Adjoint of apply in the Euclidean product.
  Eigen::VectorXcd apply_adjoint(const Eigen::VectorXcd& g) const;
  double residual(const Eigen::VectorXcd& u, const Eigen::VectorXcd& f) const;

 private:
  const DiscreteOperator* op_;
  cplx lambda_;
  Tridiag A_;
  TridiagLU lu_;
  double condition_;
};

/// Solves (lambda - M) u = f; throws SolveError on (near) singularity.
Eigen::VectorXcd resolve(const DiscreteOperator& op, cplx lambda, const Eigen::VectorXcd& f, SolveInfo* info = nullptr);
Field resolve(const DiscreteOperator& op, cplx lambda, const Field& f, SolveInfo* info = nullptr);
/// Solves (lambda W + K) u = load for a precomputed load vector.
Eigen::VectorXcd resolve_load(const DiscreteOperator& op, cplx lambda, const Eigen::VectorXcd& load,
                              SolveInfo* info = nullptr);

/// Heat kernel of e^{zM} with respect to the measure rho^{inner} d rho.
struct Kernel1D {
  cplx z;
  double measure_exponent = 0.0;
  GridPtr grid;
  Eigen::MatrixXcd values;  ///< values(i, j) = p(z, y_i, rho_j)
};

constexpr int kMaxDenseJ = 512;

/// e^{zM} (dense; J <= 512).
Eigen::MatrixXcd expm_matrix(const DiscreteOperator& op, cplx z);
Kernel1D expm_kernel(const DiscreteOperator& op, cplx z);
/// Kernels at several real times, sharing one diagonalization (Hermitian
/// forms) or one exponential followed by squarings (t_{k+1} = 2 t_k).
std::vector<Kernel1D> expm_kernels(const DiscreteOperator& op, const std::vector<double>& times);
/// CSV rows t, y, rho, Re, Im (every `stride`-th node in each direction).
void write_kernel_csv(std::ostream& os, const std::vector<Kernel1D>& kernels, int stride = 1);

/// pi/2 - atan(|a| / sqrt(1 - |a|^2)).
double sector_half_angle(double a_norm);

/// Fit of |p(t,y,rho)| <= C t^{-1/2} rho^{-c} (rho/sqrt t ^ 1)^c exp(-|y-rho|^2/(kappa t)).
struct GaussianBoundFit {
  double C = 0.0;
  double kappa = 0.0;
  Eigen::Index samples = 0;
  bool finite() const;
};

/// Samples nodes with y, rho < y_cut; C = 2 max ratio, kappa the smallest
/// value making every sample with ratio above 1e-10 C satisfy the bound.
GaussianBoundFit fit_gaussian_bound(const std::vector<Kernel1D>& kernels, double c, double y_cut);

/// Largest entrywise excess (|p_dominated| - p_dominating)_+ over max p_dominating.
double domination_excess(const Kernel1D& dominated, const Kernel1D& dominating);

/// Discrete check of y^alpha L_{2a.xi} - y^alpha |xi|^2 = (T S)[(beta+1)^{-2} A~](T S)^{-1}
/// through the forms on all pairs of panel profiles (relative to the largest form value).
struct EquivalenceReport {
  double max_rel_discrepancy = 0.0;
  double beta = 0.0;
  double c_tilde = 0.0;
  double b_tilde = 0.0;
  double q_a = 0.0;
};

struct EquivalenceParams {
  double c = 0.0;
  double alpha = 0.0;
  double a_dot_xi = 0.0;
  double xi_sq = 0.0;
};

EquivalenceReport equivalence_transform_check(const EquivalenceParams& params, const GridPtr& grid,
                                              const std::vector<Profile>& panel);

/// Operator-norm probe in weighted L^2: max over random (and optional
/// single-node) probes of ||A x||_{w_out} / ||x||_{w_in}, each random probe
/// refined by power iteration with the weighted adjoint.
struct ProbeOptions {
  int random = 16;
  int power_steps = 3;
  std::uint64_t seed = 1;
  bool cell_probes = false;
  /// Fixed probes evaluated in addition (each of the operator's size).
  std::vector<Eigen::VectorXcd> extra;
};

using LinearMap = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

double probe_l2_norm(const LinearMap& A, const LinearMap& A_adjoint, const Eigen::VectorXd& w_in,
                     const Eigen::VectorXd& w_out, const ProbeOptions& opt);

/// Same without adjoint, for L^p with weights w (norm (sum |x|^p w)^{1/p}).
double probe_lp_norm(const LinearMap& A, const Eigen::VectorXd& w_in, const Eigen::VectorXd& w_out, double p,
                     const ProbeOptions& opt);

struct SectorScanReport {
  double sup_norm = 0.0;
  double theta = 0.0;
  cplx worst_lambda = 0.0;
  int samples = 0;
};

/// sup of ||lambda (lambda - M)^{-1}|| in L^2_w over lambda in the sector
/// |arg lambda| <= theta, |lambda| log-spaced in [r_min, r_max].
SectorScanReport sector_scan(const DiscreteOperator& op, double theta, double r_min, double r_max, int n_moduli,
                             int n_args, const ProbeOptions& opt);

}  // namespace degpar
