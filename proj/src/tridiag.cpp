#include "degpar/tridiag.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace degpar {

Tridiag::Tridiag(Eigen::Index n)
    : lower(Eigen::VectorXcd::Zero(n > 0 ? n - 1 : 0)),
      diag(Eigen::VectorXcd::Zero(n)),
      upper(Eigen::VectorXcd::Zero(n > 0 ? n - 1 : 0)) {}

Eigen::VectorXcd Tridiag::apply(const Eigen::VectorXcd& x) const {
  const Eigen::Index n = size();
  if (x.size() != n) throw std::invalid_argument("Tridiag::apply: size mismatch");
  Eigen::VectorXcd y = diag.cwiseProduct(x);
  if (n > 1) {
    y.head(n - 1) += upper.cwiseProduct(x.tail(n - 1));
    y.tail(n - 1) += lower.cwiseProduct(x.head(n - 1));
  }
  return y;
}

Tridiag Tridiag::adjoint() const {
  Tridiag t;
  t.diag = diag.conjugate();
  t.lower = upper.conjugate();
  t.upper = lower.conjugate();
  return t;
}

Eigen::MatrixXcd Tridiag::dense() const {
  const Eigen::Index n = size();
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, i) = diag[i];
    if (i + 1 < n) {
      A(i, i + 1) = upper[i];
      A(i + 1, i) = lower[i];
    }
  }
  return A;
}

void Tridiag::add_scaled(cplx s, const Tridiag& other) {
  if (other.size() != size()) throw std::invalid_argument("Tridiag::add_scaled: size mismatch");
  diag += s * other.diag;
  lower += s * other.lower;
  upper += s * other.upper;
}

void Tridiag::add_diagonal(const Eigen::VectorXcd& d) {
  if (d.size() != size()) throw std::invalid_argument("Tridiag::add_diagonal: size mismatch");
  diag += d;
}

double Tridiag::norm1() const {
  const Eigen::Index n = size();
  double best = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double s = std::abs(diag[j]);
    if (j > 0) s += std::abs(upper[j - 1]);
    if (j + 1 < n) s += std::abs(lower[j]);
    best = std::max(best, s);
  }
  return best;
}

TridiagLU::TridiagLU(const Tridiag& A)
    : dl_(A.lower), d_(A.diag), du_(A.upper), ipiv_(static_cast<size_t>(A.size())), norm1_(A.norm1()) {
  const Eigen::Index n = A.size();
  du2_ = Eigen::VectorXcd::Zero(n > 2 ? n - 2 : 0);
  for (Eigen::Index i = 0; i < n; ++i) ipiv_[static_cast<size_t>(i)] = static_cast<int>(i);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (std::abs(d_[i]) >= std::abs(dl_[i])) {
      if (d_[i] != cplx(0.0)) {
        const cplx fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
      }
    } else {
      const cplx fact = d_[i] / dl_[i];
      d_[i] = dl_[i];
      dl_[i] = fact;
      const cplx temp = du_[i];
      du_[i] = d_[i + 1];
      d_[i + 1] = temp - fact * d_[i + 1];
      if (i + 2 < n) {
        du2_[i] = du_[i + 1];
        du_[i + 1] = -fact * du_[i + 1];
      }
      ipiv_[static_cast<size_t>(i)] = static_cast<int>(i + 1);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    if (d_[i] == cplx(0.0)) singular_ = true;
}

void TridiagLU::solve_in_place(cplx* b) const {
  const Eigen::Index n = d_.size();
  if (singular_) throw std::runtime_error("TridiagLU: singular matrix");
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (ipiv_[static_cast<size_t>(i)] == i) {
      b[i + 1] -= dl_[i] * b[i];
    } else {
      const cplx temp = b[i];
      b[i] = b[i + 1];
      b[i + 1] = temp - dl_[i] * b[i];
    }
  }
  if (n == 0) return;
  b[n - 1] /= d_[n - 1];
  if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
  for (Eigen::Index i = n - 3; i >= 0; --i) b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
}

void TridiagLU::solve_adjoint_in_place(cplx* b) const {
  const Eigen::Index n = d_.size();
  if (singular_) throw std::runtime_error("TridiagLU: singular matrix");
  if (n == 0) return;
  b[0] /= std::conj(d_[0]);
  if (n > 1) b[1] = (b[1] - std::conj(du_[0]) * b[0]) / std::conj(d_[1]);
  for (Eigen::Index i = 2; i < n; ++i)
    b[i] = (b[i] - std::conj(du_[i - 1]) * b[i - 1] - std::conj(du2_[i - 2]) * b[i - 2]) / std::conj(d_[i]);
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    if (ipiv_[static_cast<size_t>(i)] == i) {
      b[i] -= std::conj(dl_[i]) * b[i + 1];
    } else {
      const cplx temp = b[i + 1];
      b[i + 1] = b[i] - std::conj(dl_[i]) * temp;
      b[i] = temp;
    }
  }
}

Eigen::VectorXcd TridiagLU::solve(const Eigen::VectorXcd& b) const {
  if (b.size() != d_.size()) throw std::invalid_argument("TridiagLU::solve: size mismatch");
  Eigen::VectorXcd x = b;
  solve_in_place(x.data());
  return x;
}

Eigen::VectorXcd TridiagLU::solve_adjoint(const Eigen::VectorXcd& b) const {
  if (b.size() != d_.size()) throw std::invalid_argument("TridiagLU::solve_adjoint: size mismatch");
  Eigen::VectorXcd x = b;
  solve_adjoint_in_place(x.data());
  return x;
}

double TridiagLU::condition_estimate() const {
  if (singular_) return std::numeric_limits<double>::infinity();
  const Eigen::Index n = d_.size();
  if (n == 0) return 0.0;
  Eigen::VectorXcd x = Eigen::VectorXcd::Constant(n, cplx(1.0 / static_cast<double>(n)));
  double est = 0.0;
  Eigen::Index last = -1;
  for (int iter = 0; iter < 5; ++iter) {
    const Eigen::VectorXcd y = solve(x);
    est = std::max(est, y.cwiseAbs().sum());
    Eigen::VectorXcd s(n);
    for (Eigen::Index i = 0; i < n; ++i) s[i] = std::abs(y[i]) > 0.0 ? y[i] / std::abs(y[i]) : cplx(1.0);
    const Eigen::VectorXcd z = solve_adjoint(s);
    Eigen::Index j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= std::real(z.dot(x)) || j == last) break;
    last = j;
    x.setZero();
    x[j] = 1.0;
  }
  return est * norm1_;
}

}  // namespace degpar
