#include <gtest/gtest.h>

#include <cmath>

#include "degpar/semigroup.hpp"

using namespace degpar;

namespace {

ModelParams heat_model() {
  ModelParams m;
  m.a = Eigen::VectorXd::Zero(1);
  return m;
}

}  // namespace

TEST(Heat, BackwardEulerFirstOrderCrankNicolsonSecond) {
  std::vector<double> be, cn;
  for (int steps : {10, 20, 40}) {
    const GridPtr g = Grid::make(256, 4.0, 1.0, XBox{2.0 * M_PI, 8, 1});
    const Field u0 = heat_closed_form(g, 1, 1, 0.0);
    const Field ex = heat_closed_form(g, 1, 1, 0.5);
    for (TimeScheme s : {TimeScheme::backward_euler, TimeScheme::crank_nicolson}) {
      const EvolutionRun r = evolve(u0, {}, heat_model(), s, uniform_time_grid(0.5, steps), steps);
      const double e = (r.final_state().values() - ex.values()).cwiseAbs().maxCoeff();
      (s == TimeScheme::backward_euler ? be : cn).push_back(e);
    }
  }
  EXPECT_NEAR(std::log2(be[1] / be[2]), 1.0, 0.15);
  EXPECT_LT(cn[2], be[2]);
}

TEST(Heat, ClosedFormSatisfiesNeumannHeatEquation) {
  // Time derivative against the exact rate -(k^2 + (pi n / Y)^2).
  const GridPtr g = Grid::make(16, 2.0, 1.0, XBox{2.0 * M_PI, 4, 1});
  const Field a = heat_closed_form(g, 2, 3, 0.1), b = heat_closed_form(g, 2, 3, 0.2);
  const double rate = 4.0 + std::pow(3.0 * M_PI / 2.0, 2);
  for (Eigen::Index i = 0; i < a.values().size(); ++i)
    if (std::abs(a.values()[i]) > 1e-8) EXPECT_NEAR(std::abs(b.values()[i] / a.values()[i]), std::exp(-0.1 * rate), 1e-12);
}

TEST(Contraction, NormsDoNotGrow) {
  ModelParams m = heat_model();
  m.alpha = 0.5;
  m.c_bessel = 1.0;
  m.a[0] = 0.4;
  const GridPtr g = Grid::make(64, 8.0, 2.0, XBox{2.0 * M_PI, 8, 1});
  const ContractionReport r = contraction_check(m, g, {0.1, 1.0}, 3.0, 3, 1, 100);
  EXPECT_LE(r.max_ratio(), 1.05);
}

TEST(MaximalRegularity, HilbertCaseBounded) {
  const GridPtr g = Grid::make(64, 8.0, 2.0, XBox{2.0 * M_PI, 8, 1});
  const MaxRegReport r = maximal_regularity_check(heat_model(), g, 2.0, uniform_time_grid(1.0, 16), 2, 1);
  EXPECT_TRUE(std::isfinite(r.ratio));
  EXPECT_LE(r.ratio, 10.0);
  EXPECT_GT(r.ratio, 0.5);
}

TEST(Schemes, NamesRoundTrip) {
  for (TimeScheme s : {TimeScheme::backward_euler, TimeScheme::crank_nicolson})
    EXPECT_EQ(time_scheme_from_string(to_string(s)), s);
  EXPECT_THROW(time_scheme_from_string("rk4"), std::invalid_argument);
}
