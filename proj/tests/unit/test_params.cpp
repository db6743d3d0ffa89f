#include <gtest/gtest.h>

#include <random>

#include "degpar/params.hpp"
#include "degpar/transform_chain.hpp"

using namespace degpar;

namespace {

OperatorSpec random_spec(std::mt19937_64& rng, int N, bool oblique) {
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  Eigen::MatrixXd R = Eigen::MatrixXd::NullaryExpr(N + 1, N + 1, [&]() { return U(rng); });
  const Eigen::MatrixXd M = R * R.transpose() + 0.4 * Eigen::MatrixXd::Identity(N + 1, N + 1);
  OperatorSpec s;
  s.Q = M.topLeftCorner(N, N);
  s.q = M.topRightCorner(N, 1);
  s.gamma = M(N, N);
  s.drift_c = 1.0 + U(rng);
  s.drift_b = Eigen::VectorXd::Zero(N);
  if (oblique) s.drift_b = Eigen::VectorXd::NullaryExpr(N, [&]() { return U(rng); });
  s.alpha1 = s.alpha2 = 0.3 * U(rng);
  return s;
}

}  // namespace

TEST(BetaMap, MatchesClosedForms) {
  // T_beta^{-1} L T_beta: alpha_i -> (alpha_i + 2 beta [i=2]) / k, c -> (c + beta) / k, m -> (m - beta) / k.
  const BetaImage b = beta_map(0.5, 0.4, -0.2, 1.0, 0.3, 2.0);
  EXPECT_DOUBLE_EQ(b.alpha1, 0.4 / 1.5);
  EXPECT_DOUBLE_EQ(b.alpha2, 0.8 / 1.5);
  EXPECT_DOUBLE_EQ(b.c, 1.5 / 1.5);
  EXPECT_DOUBLE_EQ(b.m, -0.2 / 1.5);
}

TEST(BetaMap, EqualisesPowersAtHalfDifference) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    const double a1 = U(rng), a2 = U(rng);
    const double beta = 0.5 * (a1 - a2);
    if (beta <= -1.0) continue;
    const BetaImage b = beta_map(beta, a1, a2, 0.5, 0.0, 2.0);
    EXPECT_NEAR(b.alpha1, b.alpha2, 1e-14);
  }
}

TEST(BetaMap, InverseCompositionIsIdentity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-0.9, 2.0);
  for (int i = 0; i < 500; ++i) {
    const double beta = U(rng);
    EXPECT_NEAR(compose_beta(beta, inverse_beta(beta)), 0.0, 1e-14);
    const BetaImage f = beta_map(beta, 0.3, -0.4, 1.2, 0.7, 3.0);
    const BetaImage g = beta_map(inverse_beta(beta), f.alpha1, f.alpha2, f.c, f.m, 3.0);
    EXPECT_NEAR(g.alpha1, 0.3, 1e-13);
    EXPECT_NEAR(g.alpha2, -0.4, 1e-13);
    EXPECT_NEAR(g.c, 1.2, 1e-13);
    EXPECT_NEAR(g.m, 0.7, 1e-13);
  }
}

TEST(BetaMap, CompositionOfSubstitutions) {
  // y -> y^{k1} then y -> y^{k2} is y -> y^{k1 k2}.
  for (double b1 : {-0.5, 0.2, 1.5})
    for (double b2 : {-0.3, 0.0, 0.8}) EXPECT_NEAR(compose_beta(b1, b2) + 1.0, (b1 + 1.0) * (b2 + 1.0), 1e-14);
}

TEST(ShearMap, CongruenceOfBlockMatrix) {
  std::mt19937_64 rng(5);
  for (int N = 1; N <= 3; ++N) {
    for (int t = 0; t < 20; ++t) {
      const OperatorSpec s = random_spec(rng, N, true);
      Eigen::MatrixXd P = Eigen::MatrixXd::Identity(N + 1, N + 1);
      P.bottomLeftCorner(1, N) = -s.drift_b.transpose() / s.drift_c;
      const Eigen::MatrixXd expect = P.transpose() * s.block_matrix() * P;
      const OperatorSpec sh = shear_map(s);
      EXPECT_LT((sh.block_matrix() - expect).cwiseAbs().maxCoeff(), 1e-13);
      EXPECT_LT(sh.drift_b.norm(), 1e-15);
      EXPECT_DOUBLE_EQ(sh.drift_c, s.drift_c);
      // Congruence keeps the block positive definite.
      EXPECT_GT(min_block_eigenvalue(sh), 0.0);
    }
  }
}

TEST(ShearMap, ChainRuleFormula) {
  // Q~ = Q - (s q^T + q s^T) + gamma s s^T, q~ = q - gamma s, s = b / c.
  std::mt19937_64 rng(9);
  const OperatorSpec s = random_spec(rng, 2, true);
  const Eigen::VectorXd v = s.drift_b / s.drift_c;
  const OperatorSpec sh = shear_map(s);
  const Eigen::MatrixXd Qt = s.Q - (v * s.q.transpose() + s.q * v.transpose()) + s.gamma * v * v.transpose();
  EXPECT_LT((sh.Q - Qt).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((sh.q - (s.q - s.gamma * v)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Window, StrictInequalities) {
  ModelParams m;
  m.a = Eigen::VectorXd::Zero(1);
  m.alpha = -0.5;
  m.c_bessel = 0.0;
  m.p = 3.0;
  m.m = 0.5;  // (m+1)/p = 0.5 = alpha^-: boundary, excluded
  EXPECT_FALSE(validate_window(m).pass);
  m.m = 1.0;
  EXPECT_TRUE(validate_window(m).pass);
  m.m = 3.0 * 1.5 - 1.0;  // upper end c + 1 - alpha = 1.5
  EXPECT_FALSE(validate_window(m).pass);
}

TEST(Window, InvariantUnderReduction) {
  // All three window quantities divide by k = beta + 1.
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int checked = 0;
  for (int t = 0; t < 200; ++t) {
    OperatorSpec s = random_spec(rng, 2, false);
    s.alpha1 = -0.8 + 1.6 * U(rng);
    s.alpha2 = -0.8 + 1.6 * U(rng);
    SpaceSpec sp{1.5 + 2.0 * U(rng), 0.0};
    const WindowReport w0 = validate_window(s, sp);
    if (!(w0.upper > w0.lower)) continue;
    sp.m = sp.p * (w0.lower + (w0.upper - w0.lower) * U(rng)) - 1.0;
    Reduction r;
    try {
      r = reduce_to_model(s, sp);
    } catch (const ParameterError&) {
      continue;
    }
    const double k = 0.5 * (s.alpha1 - s.alpha2) + 1.0;
    const WindowReport w1 = validate_window(r.model);
    const WindowReport w2 = validate_window(s, sp);
    EXPECT_NEAR(w1.ratio, w2.ratio / k, 1e-12);
    EXPECT_NEAR(w1.upper, w2.upper / k, 1e-12);
    EXPECT_EQ(w1.pass, w2.pass);
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Reduction, ModelCaseIsFixed) {
  Eigen::VectorXd a(2);
  a << 0.3, -0.2;
  const OperatorSpec s = OperatorSpec::model(a, 0.4, 1.1);
  const Reduction r = reduce_to_model(s, {2.5, 0.7});
  EXPECT_LT((r.model.a - a).norm(), 1e-14);
  EXPECT_DOUBLE_EQ(r.model.alpha, 0.4);
  EXPECT_DOUBLE_EQ(r.model.c_bessel, 1.1);
  EXPECT_DOUBLE_EQ(r.model.m, 0.7);
  EXPECT_DOUBLE_EQ(r.model.scale, 1.0);
}

TEST(Reduction, RejectsInadmissible) {
  OperatorSpec s = OperatorSpec::model(Eigen::VectorXd::Zero(1), 0.0, 0.0);
  s.gamma = -1.0;
  EXPECT_THROW(s.validate(), ParameterError);
  s = OperatorSpec::model(Eigen::VectorXd::Zero(1), 2.5, 0.0);
  EXPECT_THROW(s.validate(), ParameterError);
  s = OperatorSpec::model(Eigen::VectorXd::Zero(1), 0.0, 0.0);
  s.drift_b[0] = 1.0;
  EXPECT_THROW(s.validate(), ParameterError);
  EXPECT_THROW((SpaceSpec{1.0, 0.0}.validate()), ParameterError);
}

TEST(TransformChain, JsonRoundTrip) {
  OperatorSpec s = OperatorSpec::model(Eigen::VectorXd::Constant(1, 0.2), 0.3, 1.0);
  s.drift_b[0] = 0.4;
  s.Q(0, 0) = 1.7;
  const Reduction r = reduce_to_model(s, {2.0, 0.5});
  const TransformChain back = TransformChain::from_json(r.chain.to_json());
  ASSERT_EQ(back.steps.size(), r.chain.steps.size());
  for (size_t i = 0; i < back.steps.size(); ++i) EXPECT_EQ(back.steps[i].kind, r.chain.steps[i].kind);
  EXPECT_EQ(back.to_json(), r.chain.to_json());
}
