#include <gtest/gtest.h>

#include <random>

#include "degpar/harness.hpp"
#include "degpar/multiplier.hpp"
#include "oracles.hpp"

using namespace degpar;

namespace {

Field random_field(const GridPtr& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  Field f(g);
  for (auto& v : f.values()) v = cplx(N(rng), N(rng));
  return f;
}

ModelParams model(double a, double alpha, double c) {
  ModelParams m;
  m.a = Eigen::VectorXd::Constant(1, a);
  m.alpha = alpha;
  m.c_bessel = c;
  return m;
}

}  // namespace

TEST(ModeSolve, AgreesWithMonolithicOracle) {
  const GridPtr g = Grid::make(64, 8.0, 2.0, XBox{2.0 * M_PI, 16, 1});
  const Field f = random_field(g, 4);
  for (double a : {0.0, 0.5}) {
    ModelParams m = model(a, 0.4, 0.8);
    m.scale = 1.7;
    const Field u = resolvent_nd(cplx(0.5, -1.0), f, m);
    const Field v = oracle::monolithic_resolvent(m, g, cplx(0.5, -1.0), f);
    EXPECT_LT((u.values() - v.values()).norm() / v.values().norm(), 1e-10);
  }
}

TEST(ModeSolve, ResidualAndApplyConsistency) {
  const GridPtr g = Grid::make(64, 8.0, 2.0, XBox{2.0 * M_PI, 8, 2});
  ModelParams m;
  m.a = Eigen::Vector2d(0.3, -0.2);
  m.alpha = 0.2;
  m.c_bessel = 1.0;
  const Field f = random_field(g, 2);
  NdSolveReport rep;
  const Field u = resolvent_nd(cplx(1.0), f, m, &rep);
  EXPECT_LT(rep.residual, 1e-10);
  const Field Lu = apply_model_nd(m, u);
  EXPECT_LT((u.values() - Lu.values() - f.values()).norm() / f.values().norm(), 1e-9);
}

TEST(DerivedMultipliers, RecombineToResolventIdentity) {
  const GridPtr g = Grid::make(64, 8.0, 2.0, XBox{2.0 * M_PI, 8, 1});
  const ModelParams m = model(0.4, 0.3, 0.5);
  const Field f = random_field(g, 8);
  const cplx lambda(0.8, 0.4);
  const DerivedFields d = derived_multipliers(lambda, f, m);
  const Eigen::VectorXcd lhs =
      m.scale * (d.laplace_x.values() + 2.0 * m.a[0] * d.grad_x_dy[0].values() + d.bessel.values());
  const Eigen::VectorXcd rhs = lambda * d.u.values() - f.values();
  EXPECT_LT((lhs - rhs).norm() / rhs.norm(), 1e-9);
}

TEST(XiDerivatives, CentredDifferencesSecondOrder) {
  const GridPtr g = Grid::make(128, 8.0, 2.0);
  ModelParams m;
  m.a = Eigen::Vector2d(0.3, -0.2);
  m.alpha = 0.4;
  m.c_bessel = 0.7;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N;
  Eigen::VectorXcd f(128);
  for (auto& v : f) v = cplx(N(rng), N(rng));
  for (int order : {1, 2}) {
    const XiDerivativeReport r = xi_derivative_check(cplx(1.0, 0.5), m, g, Eigen::Vector2d(0.7, 1.3), order, f);
    EXPECT_GT(r.observed_order, 1.9);
    EXPECT_LT(r.errors.back(), 5e-3);
    if (order == 2) EXPECT_LT(r.symmetry_defect, 1e-10);
  }
}

TEST(GeneralSolve, ReductionAgreesWithDirectRoute) {
  OperatorSpec s;
  s.Q = Eigen::MatrixXd::Constant(1, 1, 1.5);
  s.q = Eigen::VectorXd::Constant(1, 0.3);
  s.gamma = 1.2;
  s.drift_b = Eigen::VectorXd::Zero(1);
  s.drift_c = 1.1;
  s.alpha1 = 0.4;
  s.alpha2 = -0.2;
  const SpaceSpec sp{2.0, 0.2};
  const Profile phi = profile_panel(2, 0.3, 4.0, 1)[1];
  std::vector<double> diff;
  for (int J : {64, 128}) {
    const GridPtr g = Grid::make(J, 8.0, 2.0, XBox{2.0 * M_PI, 8, 1});
    const ManufacturedPair mp = manufactured_general(s, g, Eigen::VectorXi::Constant(1, 1), phi, cplx(1.0, 0.5));
    const Field u1 = solve_general(s, sp, cplx(1.0, 0.5), mp.f);
    const Field u2 = solve_general_direct(s, cplx(1.0, 0.5), mp.f);
    diff.push_back(lp_norm(Field(g, u1.values() - u2.values()), sp.p, sp.m) / lp_norm(mp.u, sp.p, sp.m));
  }
  EXPECT_LT(diff[1], diff[0]);
  EXPECT_LT(diff[1], 1e-2);
}

TEST(Mikhlin, ScanIsFiniteAndBounded) {
  const GridPtr g = Grid::make(64, 8.0, 2.0);
  ModelParams m = model(0.3, 0.0, 0.0);
  ProbeOptions opt;
  opt.random = 4;
  const MikhlinReport rep =
      mikhlin_bound_scan({cplx(1.0), cplx(0.0, 3.0)}, {Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, 4.0)},
                         m, g, opt);
  for (double s : rep.sup) {
    EXPECT_TRUE(std::isfinite(s));
    EXPECT_GT(s, 0.0);
    EXPECT_LT(s, 20.0);
  }
}
