#pragma once

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <memory>
#include <vector>

#include "degpar/bessel1d.hpp"
#include "degpar/grid.hpp"
#include "degpar/params.hpp"

namespace degpar {

/// Per-frequency factorizations of lambda - scale * y^alpha (L_{2 a.xi} - |xi|^2)
/// on the lattice of the grid's x-box (a single mode xi = 0 without a box).
/// With a frequency map F the model sees xi_model = F^T xi.
class FrequencySolvePlan {
 public:
  FrequencySolvePlan(const ModelParams& model, GridPtr grid, cplx lambda, Eigen::MatrixXd freq_map = {});

  const ModelParams& model() const { return model_; }
  const GridPtr& grid() const { return grid_; }
  cplx lambda() const { return lambda_; }
  Eigen::Index modes() const { return static_cast<Eigen::Index>(ops_.size()); }
  Eigen::VectorXd model_xi(Eigen::Index mode) const;
  const DiscreteOperator& mode_operator(Eigen::Index mode) const { return *ops_[static_cast<size_t>(mode)]; }
  double max_condition() const { return max_condition_; }

  /// hat <- (lambda - scale M(xi))^{-1} hat, mode by mode (data already in x-frequency).
  void solve_hat(Eigen::VectorXcd& hat) const;
  /// hat <- scale M(xi) hat.
  void apply_hat(Eigen::VectorXcd& hat) const;

 private:
  ModelParams model_;
  GridPtr grid_;
  cplx lambda_;
  Eigen::MatrixXd freq_map_;
  std::vector<std::unique_ptr<DiscreteOperator>> ops_;
  std::vector<std::unique_ptr<Resolvent>> res_;
  double max_condition_ = 0.0;
};

struct NdSolveReport {
  double residual = 0.0;  ///< ||(lambda - L) u - f||_2 / ||f||_2 (discrete L, unweighted)
  double max_condition = 0.0;
};

/// u = (lambda - L)^{-1} f for the model operator on f's grid.
Field resolvent_nd(cplx lambda, const Field& f, const ModelParams& model, NdSolveReport* report = nullptr);
Field resolvent_nd(const FrequencySolvePlan& plan, const Field& f, NdSolveReport* report = nullptr);

/// Discrete model operator (form-assembled per mode) applied to u.
Field apply_model_nd(const ModelParams& model, const Field& u);

/// Derived multipliers of u = (lambda - L)^{-1} f, all in the model frame:
/// scale * (laplace_x + 2 sum_i a_i grad_x_dy[i] + bessel) = lambda u - f.
struct DerivedFields {
  Field u;
  Field laplace_x;                ///< y^alpha Delta_x u
  std::vector<Field> grad_x_dy;   ///< y^alpha D_{x_i} D_y u
  Field bessel;                   ///< y^alpha B u
  std::vector<Field> hessian_x;   ///< y^alpha D_{x_i x_j} u, row-major N x N
  Field dyy;                      ///< y^alpha D_yy u
  Field neumann;                  ///< y^{alpha-1} D_y u
};

DerivedFields derived_multipliers(cplx lambda, const Field& f, const ModelParams& model);

/// Resolvent of a general operator through reduce_to_model: inverse shear,
/// power substitution, per-mode model solve (frequency map and scale
/// included), and back. f lives on the original-frame grid.
Field solve_general(const OperatorSpec& spec, const SpaceSpec& space, cplx lambda, const Field& f,
                    NdSolveReport* report = nullptr);

/// Independent route for b = 0: per-mode form of the original operator
/// (both powers kept) in L^2_{c/gamma - alpha2}, without any substitution.
Field solve_general_direct(const OperatorSpec& spec, cplx lambda, const Field& f);

/// One-dimensional pieces of R_lambda(xi) on a y-grid, used by the
/// xi-derivative and multiplier checks.
class ModeResolvent {
 public:
  ModeResolvent(const ModelParams& model, GridPtr grid, cplx lambda, Eigen::VectorXd xi);

  const DiscreteOperator& op() const { return *op_; }
  const Eigen::VectorXd& xi() const { return xi_; }
  Eigen::VectorXcd R(const Eigen::VectorXcd& f) const;
  /// y^alpha u (discrete: P_c / W).
  Eigen::VectorXcd y_alpha(const Eigen::VectorXcd& u) const;
  /// y^alpha D_y u (discrete: W^{-1} G_c).
  Eigen::VectorXcd y_alpha_dy(const Eigen::VectorXcd& u) const;
  /// D_{xi_j} R f = R (2 i a_j y^alpha D_y - 2 xi_j y^alpha) R f.
  Eigen::VectorXcd dR(int j, const Eigen::VectorXcd& f) const;
  /// D_{xi_i} D_{xi_j} R f (sum over the two orderings plus the second-derivative term).
  Eigen::VectorXcd d2R(int i, int j, const Eigen::VectorXcd& f) const;

 private:
  Eigen::VectorXcd F(int j, const Eigen::VectorXcd& v) const;

  ModelParams model_;
  Eigen::VectorXd xi_;
  std::unique_ptr<DiscreteOperator> op_;
  std::unique_ptr<Resolvent> res_;
  Eigen::VectorXd yalpha_;
  Tridiag G_;
};

struct XiDerivativeReport {
  int order = 1;
  std::vector<double> steps;
  std::vector<double> errors;     ///< max relative error over components at each step
  double observed_order = 0.0;    ///< min log2 ratio of successive errors
  double symmetry_defect = 0.0;   ///< |D_1 D_2 R f - D_2 D_1 R f| / |D_1 D_2 R f| (N >= 2)
};

/// Analytic xi-derivatives of R_lambda(xi) f against centred differences
/// with steps h0, h0/2, h0/4.
XiDerivativeReport xi_derivative_check(cplx lambda, const ModelParams& model, const GridPtr& grid,
                                       const Eigen::VectorXd& xi, int order, const Eigen::VectorXcd& f,
                                       double h0 = 0.2);

struct MikhlinRow {
  int family = 0;  ///< 0: lambda R, 1: |xi|^2 y^alpha R, 2: xi_k y^alpha D_y R
  int beta_mask = 0;
  cplx lambda;
  Eigen::VectorXd xi;
  double norm = 0.0;
};

struct MikhlinReport {
  std::vector<MikhlinRow> rows;
  std::array<double, 3> sup{0.0, 0.0, 0.0};
  void write_csv(std::ostream& os) const;
};

/// Operator norms in L^p_m (random and optional single-node probes) of
/// xi^beta D^beta_xi of the three multiplier families, beta in {0,1}^N, N <= 2.
MikhlinReport mikhlin_bound_scan(const std::vector<cplx>& lambdas, const std::vector<Eigen::VectorXd>& xis,
                                 const ModelParams& model, const GridPtr& grid, const ProbeOptions& opt);

const char* multiplier_family_name(int family);

}  // namespace degpar
