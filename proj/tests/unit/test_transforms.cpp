#include <gtest/gtest.h>

#include <cmath>

#include "degpar/transforms.hpp"
#include "oracles.hpp"

using namespace degpar;

TEST(PowerSubstitution, IsometryOnMonomials) {
  // u = y^k on (0, Y): ||u||_{L^p_{m~}}^p = Y^{kp + m~ + 1} / (kp + m~ + 1), evaluated in closed form.
  const double p = 2.5, m = 0.4, k = 1.0;
  for (double beta : {-0.4, 0.5, 1.2}) {
    const double mt = beta_map(beta, 0.0, 0.0, 0.0, m, p).m;
    const GridPtr src = Grid::make_derived(2048, 2.0, 1.0);
    Field u(src);
    for (int j = 0; j < src->J(); ++j) u.at(0, j) = std::pow(src->y()[j], k);
    const Field tu = apply_power(u, beta, p);
    const double exact = std::pow(oracle::power_integral(0.0, 2.0, k * p + mt), 1.0 / p);
    EXPECT_NEAR(lp_norm(u, p, mt) / exact, 1.0, 1e-3);
    EXPECT_NEAR(lp_norm(tu, p, m) / exact, 1.0, 1e-3);
    // Node values: T u (y) = |k|^{1/p} u(y^{beta+1}).
    for (int j = 0; j < src->J(); j += 97)
      EXPECT_NEAR(std::abs(tu.at(0, j) - std::pow(beta + 1.0, 1.0 / p) * std::pow(tu.grid().y()[j], k * (beta + 1.0))),
                  0.0, 1e-12);
  }
}

TEST(PhaseFactor, PreservesModulus) {
  const GridPtr g = Grid::make(64, 4.0, 2.0);
  Field u(g);
  for (int j = 0; j < 64; ++j) u.at(0, j) = cplx(std::cos(g->y()[j]), 0.3);
  const Field s = apply_phase(u, 0.8, 0.5);
  EXPECT_LT((s.values().cwiseAbs() - u.values().cwiseAbs()).cwiseAbs().maxCoeff(), 1e-15);
  // exp(-i a.xi y^{2/(2-alpha)}) at alpha = 0 is exp(-i a.xi y).
  const Field s0 = apply_phase(u, 0.8, 0.0);
  for (int j = 0; j < 64; ++j) EXPECT_NEAR(std::abs(s0.at(0, j) - std::polar(1.0, -0.8 * g->y()[j]) * u.at(0, j)), 0.0, 1e-14);
}

TEST(Shear, ExactOnTrigonometricModes) {
  const GridPtr g = Grid::make(32, 2.0, 1.0, XBox{2.0 * M_PI, 32, 1});
  Eigen::VectorXd b(1);
  b << 0.6;
  const double c = 1.2;
  Field u(g);
  for (Eigen::Index p = 0; p < g->x_points(); ++p)
    for (int j = 0; j < g->J(); ++j) u.at(p, j) = std::cos(3.0 * g->x(p)[0]) * g->y()[j];
  const Field s = apply_shear(u, b, c);
  for (Eigen::Index p = 0; p < g->x_points(); p += 5)
    for (int j = 0; j < g->J(); j += 7)
      EXPECT_NEAR(std::abs(s.at(p, j) - std::cos(3.0 * (g->x(p)[0] - 0.5 * g->y()[j])) * g->y()[j]), 0.0, 1e-12);
  const Field back = apply_shear_inverse(s, b, c);
  EXPECT_LT((back.values() - u.values()).norm(), 1e-12 * u.values().norm());
}

TEST(Similarity, PowerConjugationFirstOrderOrBetter) {
  const auto panel = profile_panel(4, 0.2, 1.5, 2);
  const SimilarityParams prm{0.6, -0.4, 1.2, 0.2, 2.0, 0.5, 2.0};
  std::vector<double> errs;
  for (int J : {64, 128, 256}) errs.push_back(similarity_check_power(prm, Grid::make(J, 4.0, 2.0), panel).max_rel_discrepancy);
  EXPECT_GT(std::log2(errs[0] / errs[1]), 1.0);
  EXPECT_GT(std::log2(errs[1] / errs[2]), 1.0);
}

TEST(Similarity, BesselCoefficientIsSquareOfK) {
  const auto panel = profile_panel(4, 0.2, 1.5, 2);
  const SimilarityReport rep = similarity_check_power({0.5, 0.5, 1.0, 0.0, 1.0, 0.3, 2.0}, Grid::make(256, 4.0, 2.0), panel);
  EXPECT_NEAR(rep.expected_coefficient, 1.69, 1e-14);
  EXPECT_NEAR(rep.bessel_coefficient / rep.expected_coefficient, 1.0, 1e-3);
}

TEST(Similarity, ShearRemovesDrift) {
  OperatorSpec spec;
  spec.Q = Eigen::MatrixXd::Constant(1, 1, 1.5);
  spec.q = Eigen::VectorXd::Constant(1, 0.2);
  spec.gamma = 1.0;
  spec.drift_b = Eigen::VectorXd::Constant(1, 0.4);
  spec.drift_c = 1.3;
  spec.alpha1 = spec.alpha2 = 0.3;
  const auto panel = profile_panel(4, 0.2, 1.5, 2);
  const double e1 = shear_conjugation_check(spec, Grid::make(128, 4.0, 2.0, XBox{2.0 * M_PI, 16, 1}), panel);
  const double e2 = shear_conjugation_check(spec, Grid::make(256, 4.0, 2.0, XBox{2.0 * M_PI, 16, 1}), panel);
  EXPECT_LT(e2, e1);
  EXPECT_LT(e2, 1e-3);
}
