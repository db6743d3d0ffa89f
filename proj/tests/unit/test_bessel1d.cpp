#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "degpar/bessel1d.hpp"

using namespace degpar;

namespace {

Eigen::VectorXcd random_vec(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  Eigen::VectorXcd v(n);
  for (auto& x : v) x = cplx(N(rng), N(rng));
  return v;
}

}  // namespace

TEST(Forms, RealFormsAreHermitianAndDissipative) {
  const GridPtr g = Grid::make(128, 6.0, 2.0);
  for (double c : {-0.5, 0.0, 1.0, 2.5}) {
    for (double alpha : {-0.6, 0.0, 0.8}) {
      if (c - alpha <= -1.0) continue;  // outside the admissible exponent range
      const DiscreteOperator op(degenerate_form(c, alpha, 0.0, 1.7), g);
      const Eigen::MatrixXcd K = op.form_matrix().dense();
      EXPECT_LT((K - K.adjoint()).cwiseAbs().maxCoeff(), 1e-12 * K.cwiseAbs().maxCoeff());
      const Eigen::VectorXcd u = random_vec(g->J(), 3);
      EXPECT_GE(op.form(u, u).real(), 0.0);
    }
  }
}

TEST(Forms, DriftKeepsSector) {
  // |Im a(u,u)| <= |a.xi| / sqrt(|xi|^2 - |a.xi|^2) Re a(u,u) for every u.
  const GridPtr g = Grid::make(128, 6.0, 2.0);
  const DiscreteOperator op(degenerate_form(0.5, 0.3, 0.6, 1.0), g);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Eigen::VectorXcd u = random_vec(g->J(), s);
    const cplx a = op.form(u, u);
    EXPECT_LE(std::abs(a.imag()), op.spec().sector_tan * a.real() * (1.0 + 1e-12));
  }
}

TEST(Bessel, NeumannEigenvaluesOfLaplacian) {
  // c = 0: D_yy on (0, Y) with Neumann ends, eigenvalues -(pi n / Y)^2.
  std::vector<double> errs;
  for (int J : {64, 128}) {
    const GridPtr g = Grid::make(J, 2.0, 1.0);
    const DiscreteOperator op(bessel_form(0.0), g);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(op.matrix());
    std::vector<double> ev;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ev.push_back(-es.eigenvalues()[i].real());
    std::sort(ev.begin(), ev.end());
    EXPECT_NEAR(ev[0], 0.0, 1e-9);
    double e = 0.0;
    for (int n = 1; n <= 3; ++n) e = std::max(e, std::abs(ev[n] - std::pow(M_PI * n / 2.0, 2)));
    errs.push_back(e);
  }
  EXPECT_LT(errs[1], 2e-2);
  EXPECT_GT(std::log2(errs[0] / errs[1]), 1.8);
}

TEST(Resolvent, SolvesAndReportsResidual) {
  const GridPtr g = Grid::make(256, 8.0, 2.0);
  const DiscreteOperator op(degenerate_form(1.0, 0.5, 0.4, 1.0), g);
  const Eigen::VectorXcd f = random_vec(g->J(), 5);
  SolveInfo info;
  const Eigen::VectorXcd u = resolve(op, cplx(0.3, 2.0), f, &info);
  EXPECT_LT(info.residual, 1e-10);
  const Eigen::VectorXcd r = cplx(0.3, 2.0) * u - op.apply(u) - f;
  EXPECT_LT(r.norm() / f.norm(), 1e-9);
}

TEST(Resolvent, AdjointInEuclideanProduct) {
  const GridPtr g = Grid::make(64, 4.0, 2.0);
  const DiscreteOperator op(degenerate_form(0.5, 0.2, 0.3, 2.0), g);
  const Resolvent R(op, cplx(1.0, -0.5));
  const Eigen::VectorXcd x = random_vec(64, 1), y = random_vec(64, 2);
  EXPECT_NEAR(std::abs(y.dot(R.apply(x)) - R.apply_adjoint(y).dot(x)), 0.0, 1e-10 * x.norm() * y.norm());
}

TEST(Resolvent, HalfPlaneBoundInHilbertCase) {
  // ||lambda R(lambda)|| <= 1 on the positive axis for a dissipative self-adjoint M.
  const GridPtr g = Grid::make(128, 6.0, 2.0);
  const DiscreteOperator op(degenerate_form(0.0, 0.0, 0.0, 1.0), g);
  ProbeOptions opt;
  opt.random = 8;
  for (double lam : {0.01, 1.0, 100.0}) {
    const Resolvent R(op, lam);
    const double n = probe_l2_norm([&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd { return lam * R.apply(x); },
                                   [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd { return lam * R.apply_adjoint(x); },
                                   op.inner_weight(), op.inner_weight(), opt);
    EXPECT_LE(n, 1.0 + 1e-10);
  }
}

TEST(Kernels, PositiveMassPreservingBessel) {
  // e^{tB} with Neumann ends preserves int u y^c: sum_i p(t, y_i, rho_j) W_i = 1.
  const GridPtr g = Grid::make(128, 8.0, 1.0);
  const DiscreteOperator op(bessel_form(0.5), g);
  const auto ks = expm_kernels(op, {0.1, 0.2});
  for (const auto& k : ks) {
    EXPECT_GT(k.values.real().minCoeff(), -1e-10);
    const Eigen::VectorXcd mass = k.values.transpose() * op.inner_weight().cast<cplx>();
    EXPECT_LT((mass.array() - 1.0).abs().maxCoeff(), 1e-9);
  }
}

TEST(Kernels, AuxiliaryDominatedByBessel) {
  const GridPtr g = Grid::make(128, 8.0, 1.0);
  const double beta = 0.5, b = 1.0, a = b / (2.0 * (beta + 1.0));
  const DiscreteOperator aux(auxiliary_form(0.5, beta, b, 1.0 - a * a), g);
  const DiscreteOperator bes(bessel_form(0.5), g);
  const auto ka = expm_kernels(aux, {0.1, 0.2, 0.4});
  const auto kb = expm_kernels(bes, {0.1, 0.2, 0.4});
  for (size_t i = 0; i < ka.size(); ++i) EXPECT_LT(domination_excess(ka[i], kb[i]), 1e-10);
}

TEST(Kernels, GaussianFitFinite) {
  const GridPtr g = Grid::make(128, 8.0, 1.0);
  const DiscreteOperator op(bessel_form(1.0), g);
  const GaussianBoundFit f = fit_gaussian_bound(expm_kernels(op, {0.05, 0.1, 0.2, 0.4}), 1.0, 4.0);
  EXPECT_TRUE(f.finite());
  EXPECT_GT(f.C, 0.0);
  EXPECT_GT(f.kappa, 0.0);
}

TEST(SectorScan, BoundedBeyondHalfPlane) {
  const GridPtr g = Grid::make(64, 8.0, 2.0);
  for (double a : {0.0, 0.7}) {
    const DiscreteOperator op(degenerate_form(1.0, 0.5, a, 1.0), g);
    ProbeOptions opt;
    opt.random = 4;
    const SectorScanReport rep = sector_scan(op, 0.5 * M_PI + 0.5 * sector_half_angle(a), 1e-2, 1e2, 5, 5, opt);
    EXPECT_LT(rep.sup_norm, 4.0);
    EXPECT_GE(rep.sup_norm, 0.9);
  }
}

TEST(SectorScan, HalfAngle) {
  EXPECT_DOUBLE_EQ(sector_half_angle(0.0), 0.5 * M_PI);
  EXPECT_NEAR(sector_half_angle(std::sqrt(0.5)), 0.25 * M_PI, 1e-14);
}

TEST(Equivalence, ConjugatedFormsAgreeAtSecondOrder) {
  const auto panel = profile_panel(4, 0.2, 1.5, 1);
  std::vector<double> errs;
  for (int J : {64, 128, 256}) {
    errs.push_back(equivalence_transform_check({1.0, 0.5, 0.3, 1.0}, Grid::make(J, 4.0, 2.0), panel).max_rel_discrepancy);
  }
  EXPECT_GT(std::log2(errs[1] / errs[2]), 1.5);
  EXPECT_LT(errs[2], 1e-3);
}
