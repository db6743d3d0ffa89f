#include "oracles.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "degpar/bessel1d.hpp"

namespace degpar::oracle {

namespace {

/// F^{-1} diag(g(xi_k)) F on the periodic x-lattice, from explicit exponentials.
Eigen::MatrixXcd fourier_matrix(const Grid& grid, cplx (*g)(double)) {
  const int n = grid.nx();
  const double L = grid.box()->length;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const int kk = k >= n / 2 ? k - n : k;
    const double xi = 2.0 * M_PI / L * kk;
    const cplx gk = g(xi);
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s) out(r, s) += gk * std::polar(1.0, xi * L * (r - s) / n) / static_cast<double>(n);
  }
  return out;
}

void add_tridiag(std::vector<Eigen::Triplet<cplx>>& t, int row0, int col0, cplx s, const Tridiag& T) {
  const auto n = T.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    t.emplace_back(row0 + i, col0 + i, s * T.diag[i]);
    if (i + 1 < n) {
      t.emplace_back(row0 + i + 1, col0 + i, s * T.lower[i]);
      t.emplace_back(row0 + i, col0 + i + 1, s * T.upper[i]);
    }
  }
}

}  // namespace

Field monolithic_resolvent(const ModelParams& model, const GridPtr& grid, cplx lambda, const Field& f) {
  if (!grid->has_box() || grid->dim() != 1 || model.dimension() != 1)
    throw std::invalid_argument("monolithic_resolvent handles N = 1 only");
  const int n = grid->nx(), J = grid->J();
  const double c = model.c_bessel, a = model.a[0], s = model.scale;
  const Eigen::MatrixXcd Dx = fourier_matrix(*grid, [](double xi) { return cplx(0.0, xi); });
  const Eigen::MatrixXcd Dxx = fourier_matrix(*grid, [](double xi) { return cplx(-xi * xi, 0.0); });
  const Tridiag S = assemble_stiffness(*grid, c);
  const Tridiag D = assemble_directional(*grid, c);
  const Eigen::VectorXd P = assemble_potential(*grid, c);
  const Eigen::VectorXd W = grid->cell_moments(c - model.alpha);
  Tridiag Pt(J), Wt(J);
  Pt.diag = P.cast<cplx>();
  Wt.diag = W.cast<cplx>();

  // Form in xi: stiffness - 2 i a xi directional + xi^2 potential; i xi -> D_x, xi^2 -> -D_xx.
  std::vector<Eigen::Triplet<cplx>> t;
  for (int r = 0; r < n; ++r) {
    add_tridiag(t, r * J, r * J, lambda, Wt);
    add_tridiag(t, r * J, r * J, s, S);
    for (int q = 0; q < n; ++q) {
      if (std::abs(Dx(r, q)) > 0.0) add_tridiag(t, r * J, q * J, -2.0 * a * s * Dx(r, q), D);
      if (std::abs(Dxx(r, q)) > 0.0) add_tridiag(t, r * J, q * J, -s * Dxx(r, q), Pt);
    }
  }
  Eigen::SparseMatrix<cplx> A(n * J, n * J);
  A.setFromTriplets(t.begin(), t.end());
  Eigen::VectorXcd rhs(n * J);
  for (int r = 0; r < n; ++r) rhs.segment(r * J, J) = W.cast<cplx>().cwiseProduct(f.slice(r));
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw std::runtime_error("monolithic_resolvent: factorization failed");
  return Field(grid, lu.solve(rhs));
}

double power_integral(double a, double b, double s) {
  if (std::abs(s + 1.0) < 1e-14) return std::log(b / a);
  return (std::pow(b, s + 1.0) - std::pow(a, s + 1.0)) / (s + 1.0);
}

}  // namespace degpar::oracle
