#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "degpar/fft.hpp"
#include "degpar/grid.hpp"
#include "oracles.hpp"

using namespace degpar;

TEST(Grid, GradedNodesAndInterfaces) {
  const GridPtr g = Grid::make(16, 4.0, 2.0);
  ASSERT_EQ(g->J(), 16);
  EXPECT_DOUBLE_EQ(g->interfaces()[0], 0.0);
  EXPECT_DOUBLE_EQ(g->interfaces()[16], 4.0);
  for (int j = 0; j < 16; ++j) {
    EXPECT_NEAR(g->y()[j], 4.0 * std::pow((j + 0.5) / 16.0, 2.0), 1e-14);
    EXPECT_NEAR(g->weights()[j], g->interfaces()[j + 1] - g->interfaces()[j], 1e-14);
  }
  EXPECT_THROW(Grid::make(4, 1.0, 1.0), std::invalid_argument);
}

TEST(Grid, CellMomentsAreExactIntegrals) {
  const GridPtr g = Grid::make(32, 3.0, 2.0);
  for (double s : {-0.7, 0.0, 0.5, 2.3}) {
    const Eigen::VectorXd m = g->cell_moments(s);
    for (int j = 0; j < g->J(); ++j)
      EXPECT_NEAR(m[j], oracle::power_integral(g->interfaces()[j], g->interfaces()[j + 1], s),
                  1e-13 * (1.0 + std::abs(m[j])));
    EXPECT_NEAR(m.sum(), std::pow(3.0, s + 1.0) / (s + 1.0), 1e-12);
  }
}

TEST(Grid, WeightedNormOfPower) {
  // || y^k ||_{L^p_m(0,Y)}^p ~ Y^{kp+m+1} / (kp+m+1), midpoint-in-moment accuracy.
  const GridPtr g = Grid::make(512, 2.0, 1.0);
  Field u(g);
  for (int j = 0; j < g->J(); ++j) u.at(0, j) = g->y()[j];
  const double p = 3.0, m = 0.5;
  const double exact = std::pow(std::pow(2.0, p + m + 1.0) / (p + m + 1.0), 1.0 / p);
  EXPECT_NEAR(lp_norm(u, p, m) / exact, 1.0, 1e-4);
}

TEST(Grid, PowerImageNodes) {
  const GridPtr g = Grid::make(32, 2.0, 2.0);
  const GridPtr h = g->power_image(0.5);
  for (int j = 0; j < g->J(); ++j) EXPECT_NEAR(h->y()[j], std::pow(g->y()[j], 1.5), 1e-13);
  EXPECT_NEAR(h->y_max(), std::pow(2.0, 1.5), 1e-13);
}

TEST(Fft, RoundTripAndDerivative) {
  const GridPtr g = Grid::make(8, 1.0, 1.0, XBox{2.0 * M_PI, 16, 2});
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N;
  Eigen::VectorXcd v(g->size());
  for (auto& x : v) x = cplx(N(rng), N(rng));
  Eigen::VectorXcd w = v;
  fft_x_forward(*g, w);
  fft_x_inverse(*g, w);
  EXPECT_LT((w - v).norm(), 1e-12 * v.norm());

  Eigen::VectorXcd s(g->size());
  for (Eigen::Index p = 0; p < g->x_points(); ++p) {
    const Eigen::VectorXd x = g->x(p);
    for (int j = 0; j < g->J(); ++j) s[p * g->J() + j] = std::sin(2.0 * x[0]) * std::cos(3.0 * x[1]) * g->y()[j];
  }
  const Eigen::VectorXcd d = spectral_dx(*g, s, 1);
  for (Eigen::Index p = 0; p < g->x_points(); ++p) {
    const Eigen::VectorXd x = g->x(p);
    for (int j = 0; j < g->J(); ++j)
      EXPECT_NEAR(std::abs(d[p * g->J() + j] - (-3.0 * std::sin(2.0 * x[0]) * std::sin(3.0 * x[1]) * g->y()[j])), 0.0,
                  1e-12);
  }
  const Eigen::VectorXcd d2 = spectral_dxx(*g, s, 0, 0);
  EXPECT_LT((d2 + 4.0 * s).norm(), 1e-11 * s.norm());
}

TEST(FiniteDifferences, SecondOrderOnGradedMesh) {
  std::vector<double> errs;
  for (int J : {64, 128, 256}) {
    const GridPtr g = Grid::make(J, 2.0, 2.0);
    Eigen::VectorXcd u(J);
    for (int j = 0; j < J; ++j) u[j] = std::cos(g->y()[j]);
    const Eigen::VectorXcd d = fd_dyy(*g, u);
    double e = 0.0;
    for (int j = 1; j < J - 1; ++j) e = std::max(e, std::abs(d[j] + std::cos(g->y()[j])));
    errs.push_back(e);
  }
  EXPECT_GT(std::log2(errs[1] / errs[2]), 0.9);
}

TEST(FieldIo, BlobRoundTripIsExact) {
  const GridPtr g = Grid::make(16, 1.0, 2.0, XBox{1.0, 4, 1});
  Field u(g);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N;
  for (auto& x : u.values()) x = cplx(N(rng), N(rng));
  const auto path = std::filesystem::temp_directory_path() / "degpar_field_test.bin";
  write_field_blob(path.string(), u);
  const Field v = read_field_blob(path.string());
  EXPECT_EQ(v.values(), u.values());
  EXPECT_EQ(v.grid().y(), g->y());
  std::filesystem::remove(path);
}
