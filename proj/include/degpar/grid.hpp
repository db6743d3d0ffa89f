#pragma once

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "degpar/params.hpp"

namespace degpar {

using cplx = std::complex<double>;

/// Periodic uniform x-grid [0, L)^dim with nx points per axis.
struct XBox {
  double length = 0.0;
  int nx = 0;
  int dim = 0;
};

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Cell-centred graded mesh on (0, Y_max]: interfaces e_j = Y (j/J)^g,
/// nodes y_j = Y ((j+1/2)/J)^g, weights = cell lengths. Optional torus in x.
class Grid {
 public:
  /// Requires J >= 8, Y_max > 0, grading >= 1, nx even.
  static GridPtr make(int J, double y_max, double grading, std::optional<XBox> box = std::nullopt);

  /// Same family with any grading > 0 (images of graded meshes under y^k).
  static GridPtr make_derived(int J, double y_max, double grading, std::optional<XBox> box = std::nullopt);

  /// The mesh with nodes y_j^{beta+1} (same J, Y_max^{beta+1}, grading*(beta+1)).
  GridPtr power_image(double beta) const;
  GridPtr with_box(std::optional<XBox> box) const;

  int J() const { return J_; }
  double y_max() const { return y_max_; }
  double grading() const { return grading_; }
  const Eigen::VectorXd& y() const { return y_; }
  const Eigen::VectorXd& weights() const { return w_; }
  /// J+1 cell interfaces, e_0 = 0, e_J = Y_max.
  const Eigen::VectorXd& interfaces() const { return e_; }

  /// Exact integral of t^s over [a, b] (0 <= a < b); s <= -1 needs a > 0.
  static double power_integral(double a, double b, double s);
  /// Integral of y^s over cell j; cells where it diverges use y_j^s w_j.
  double cell_moment(int j, double s) const;
  Eigen::VectorXd cell_moments(double s) const;

  const std::optional<XBox>& box() const { return box_; }
  bool has_box() const { return box_.has_value() && box_->dim > 0; }
  int dim() const { return has_box() ? box_->dim : 0; }
  int nx() const { return has_box() ? box_->nx : 1; }
  double dx() const { return has_box() ? box_->length / box_->nx : 1.0; }
  /// Number of x-points (nx^dim, or 1 without a box).
  Eigen::Index x_points() const;
  Eigen::Index size() const { return x_points() * J_; }
  /// Angular frequency of FFT index k on one axis: (2 pi / L) * k, k in [-nx/2, nx/2).
  double frequency(int k) const;
  /// Frequency vector of flat mode index (row-major over axes).
  Eigen::VectorXd xi(Eigen::Index mode) const;
  /// x-coordinates of flat point index.
  Eigen::VectorXd x(Eigen::Index point) const;

 private:
  Grid(int J, double y_max, double grading, std::optional<XBox> box);

  int J_;
  double y_max_;
  double grading_;
  std::optional<XBox> box_;
  Eigen::VectorXd y_, w_, e_;
};

/// Complex grid function; values indexed [x_point * J + j] (y fastest).
class Field {
 public:
  explicit Field(GridPtr grid);
  Field(GridPtr grid, Eigen::VectorXcd values);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  Eigen::VectorXcd& values() { return values_; }
  const Eigen::VectorXcd& values() const { return values_; }

  cplx& at(Eigen::Index x_point, int j) { return values_[x_point * grid_->J() + j]; }
  cplx at(Eigen::Index x_point, int j) const { return values_[x_point * grid_->J() + j]; }
  auto slice(Eigen::Index x_point) { return values_.segment(x_point * grid_->J(), grid_->J()); }
  auto slice(Eigen::Index x_point) const { return values_.segment(x_point * grid_->J(), grid_->J()); }

 private:
  GridPtr grid_;
  Eigen::VectorXcd values_;
};

/// (sum |u|^p y^m w dx^N)^{1/p}.
double lp_norm(const Field& u, double p, double m);
/// Same weighted norm of a raw vector laid out like a field on `grid`.
double lp_norm(const Grid& grid, const Eigen::VectorXcd& values, double p, double m);

/// Weighted L^p_m norms of every term of the second-order weighted Sobolev norm.
struct SobolevNormReport {
  double u = 0.0;
  double xx = 0.0;   ///< y^{a1} D_xx u
  double x = 0.0;    ///< y^{a1/2} D_x u
  double yy = 0.0;   ///< y^{a2} D_yy u
  double y = 0.0;    ///< y^{a2/2} D_y u
  double xy = 0.0;   ///< y^{(a1+a2)/2} D_y grad_x u
  double neumann = 0.0;  ///< y^{a2-1} D_y u
  double oblique = 0.0;  ///< y^{a2-1} (b.grad_x + c D_y) u
  bool finite() const;
};

SobolevNormReport sobolev_report(const Field& u, const OperatorSpec& spec, const SpaceSpec& space);

/// Three-point nonuniform finite differences along y (one-sided at the ends).
Eigen::VectorXcd fd_dy(const Grid& grid, const Eigen::VectorXcd& u);
Eigen::VectorXcd fd_dyy(const Grid& grid, const Eigen::VectorXcd& u);

void write_field_csv(std::ostream& os, const Field& u);
void write_field_csv(const std::string& path, const Field& u);
/// Reads values written by write_field_csv onto a given grid.
Field read_field_csv(const std::string& path, GridPtr grid);
void write_field_blob(const std::string& path, const Field& u);
Field read_field_blob(const std::string& path);

}  // namespace degpar
