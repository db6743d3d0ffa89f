#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace degpar {

using cplx = std::complex<double>;

/// Complex tridiagonal matrix: lower[i] = A(i+1, i), diag[i] = A(i, i),
/// upper[i] = A(i, i+1).
struct Tridiag {
  Eigen::VectorXcd lower;
  Eigen::VectorXcd diag;
  Eigen::VectorXcd upper;

  Tridiag() = default;
  explicit Tridiag(Eigen::Index n);

  Eigen::Index size() const { return diag.size(); }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  Tridiag adjoint() const;
  Eigen::MatrixXcd dense() const;
  /// this += s * other
  void add_scaled(cplx s, const Tridiag& other);
  void add_diagonal(const Eigen::VectorXcd& d);
  /// Maximum absolute column sum.
  double norm1() const;
};

/// LU factorization with partial pivoting (row interchanges between
/// neighbours only), in the layout of the LAPACK gttrf/gttrs pair.
class TridiagLU {
 public:
  TridiagLU() = default;
  explicit TridiagLU(const Tridiag& A);

  bool singular() const { return singular_; }
  Eigen::Index size() const { return d_.size(); }
  Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const;
  /// Solves A^H x = b.
  Eigen::VectorXcd solve_adjoint(const Eigen::VectorXcd& b) const;
  void solve_in_place(cplx* b) const;
  void solve_adjoint_in_place(cplx* b) const;
  /// Estimate of ||A^{-1}||_1 * ||A||_1 (Hager's method, a few sweeps).
  double condition_estimate() const;

 private:
  Eigen::VectorXcd dl_, d_, du_, du2_;
  std::vector<int> ipiv_;
  double norm1_ = 0.0;
  bool singular_ = false;
};

}  // namespace degpar
