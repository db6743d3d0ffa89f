#include <gtest/gtest.h>

#include <filesystem>
#include <set>
#include <fstream>
#include <sstream>

#include "degpar/harness.hpp"
#include "degpar/transforms.hpp"

using namespace degpar;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

OperatorSampler identity_family() {
  return [](int, std::mt19937_64&) {
    SampledOperator s;
    s.apply = [](const Eigen::VectorXcd& v) -> Eigen::VectorXcd { return v; };
    s.adjoint = s.apply;
    return s;
  };
}

/// lambda R(lambda) for the 1-d operator at xi = 0, lambda > 0 drawn log-uniformly.
OperatorSampler positive_resolvents(const GridPtr& g) {
  auto op = std::make_shared<DiscreteOperator>(degenerate_form(0.0, 0.0, 0.0, 0.0), g);
  return [op](int, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    const double lam = std::pow(10.0, U(rng));
    auto R = std::make_shared<Resolvent>(*op, lam);
    SampledOperator s;
    s.apply = [R, lam](const Eigen::VectorXcd& v) -> Eigen::VectorXcd { return lam * R->apply(v); };
    s.adjoint = [R, lam](const Eigen::VectorXcd& v) -> Eigen::VectorXcd { return lam * R->apply_adjoint(v); };
    return s;
  };
}

}  // namespace

TEST(Helpers, DriftAndOrder) {
  EXPECT_NEAR(relative_drift({1.0, 1.1, 1.0}), 0.1, 1e-14);
  EXPECT_TRUE(std::isinf(relative_drift({1.0, std::nan("")})));
  EXPECT_NEAR(observed_order({1.0, 0.25, 0.0625}), 2.0, 1e-14);
  EXPECT_NEAR(observed_order({1.0, 0.5, 0.0625}), 1.0, 1e-14);
}

TEST(Helpers, OutOfWindowModel) {
  const SuiteConfig cfg = SuiteConfig::defaults();
  EXPECT_TRUE(validate_window(cfg.model).pass);
  const ModelParams bad = out_of_window_model(cfg.model);
  const WindowReport w = validate_window(bad);
  EXPECT_FALSE(w.pass);
  EXPECT_NEAR(w.ratio, w.upper + 0.5, 1e-14);
}

TEST(SquareFunction, IdentityFamilyGivesOne) {
  const GridPtr g = Grid::make(64, 8.0, 2.0);
  const Eigen::VectorXd w = g->cell_moments(0.3);
  for (int n : {1, 4, 16})
    EXPECT_NEAR(square_function_ratio(identity_family(), n, 3, 3.0, w, g->y(), 1), 1.0, 1e-12);
}

TEST(SquareFunction, SingleResolventBoundedByOne) {
  const GridPtr g = Grid::make(64, 8.0, 2.0);
  const double r = square_function_ratio(positive_resolvents(g), 1, 20, 2.0, g->cell_moments(0.0), g->y(), 3);
  EXPECT_LE(r, 1.0 + 1e-10);
  EXPECT_GT(r, 0.5);
}

TEST(SquareFunction, RejectsBadArguments) {
  const GridPtr g = Grid::make(16, 1.0, 1.0);
  const Eigen::VectorXd w = g->weights();
  EXPECT_THROW(square_function_ratio(identity_family(), 33, 1, 2.0, w, g->y(), 1), std::invalid_argument);
  EXPECT_THROW(square_function_ratio(identity_family(), 2, 201, 2.0, w, g->y(), 1), std::invalid_argument);
  EXPECT_THROW(square_function_ratio(identity_family(), 2, 1, 1.0, w, g->y(), 1), std::invalid_argument);
}

TEST(Manufactured, StrongEvaluationReproducesForcing) {
  // f is built from exact profile derivatives; the spectral/finite-difference
  // strong evaluation of L must reproduce lambda u - f up to discretization.
  OperatorSpec s = OperatorSpec::model(Eigen::VectorXd::Constant(1, 0.2), 0.3, 1.0);
  s.drift_b[0] = 0.5;
  s.drift_c = 1.0;
  const Profile phi = profile_panel(2, 0.3, 4.0, 1)[1];
  std::vector<double> errs;
  for (int J : {128, 256}) {
    const GridPtr g = Grid::make(J, 8.0, 2.0, XBox{2.0 * M_PI, 8, 1});
    const ManufacturedPair mp = manufactured_general(s, g, Eigen::VectorXi::Constant(1, 2), phi, cplx(1.0));
    const Field Lu = apply_operator_strong(s, mp.u);
    const Eigen::VectorXcd target = mp.u.values() - mp.f.values();
    errs.push_back((Lu.values() - target).cwiseAbs().maxCoeff() / target.cwiseAbs().maxCoeff());
  }
  EXPECT_LT(errs[1], 5e-2);
  EXPECT_GT(std::log2(errs[0] / errs[1]), 1.5);
  EXPECT_THROW(manufactured_general(s, Grid::make(16, 1.0, 1.0), Eigen::VectorXi::Constant(1, 1), phi, 1.0),
               std::invalid_argument);
}

TEST(Suite, EmptyCheckListGivesNoResults) {
  SuiteConfig cfg = SuiteConfig::defaults();
  cfg.checks = std::vector<std::string>{};
  EXPECT_TRUE(run_suite(cfg).empty());
}

TEST(Suite, UnknownCheckRejected) {
  SuiteConfig cfg = SuiteConfig::defaults();
  cfg.checks = std::vector<std::string>{"no_such_check"};
  EXPECT_THROW(run_suite(cfg), std::invalid_argument);
  EXPECT_THROW(suite_checks("no_such_suite"), std::invalid_argument);
}

TEST(Suite, RegistryCoversSuites) {
  std::set<std::string> all;
  for (const auto& c : check_registry()) {
    EXPECT_FALSE(c.anchor.empty());
    all.insert(c.id);
  }
  for (const auto& s : suite_names())
    for (const auto& id : suite_checks(s)) EXPECT_TRUE(all.count(id)) << id;
}

TEST(Suite, OutOfWindowFailsWindowChecksOnly) {
  SuiteConfig cfg = SuiteConfig::defaults();
  cfg.model = out_of_window_model(cfg.model);
  cfg.base_J = 64;
  cfg.checks = std::vector<std::string>{"param_calculus", "uniform_xi_bound", "apriori_estimate", "maximal_regularity"};
  const auto res = run_suite(cfg);
  ASSERT_EQ(res.size(), 4u);
  for (const auto& r : res) {
    if (r.estimate_id == "param_calculus")
      EXPECT_TRUE(r.pass);
    else
      EXPECT_FALSE(r.pass) << r.estimate_id;
  }
}

TEST(Suite, WindowCheckNegativeControlMustFail) {
  SuiteConfig cfg = SuiteConfig::defaults();
  cfg.base_J = 64;
  const EstimateResult r = run_check("apriori_estimate", cfg);
  EXPECT_TRUE(r.window_dependent);
  ASSERT_TRUE(r.negative.has_value());
  EXPECT_FALSE(r.negative->passed);
  EXPECT_TRUE(r.pass);
}

TEST(Suite, CsvOutputsAreByteIdentical) {
  SuiteConfig cfg = SuiteConfig::defaults();
  cfg.base_J = 64;
  cfg.checks = std::vector<std::string>{"param_calculus", "isometry_power", "sector_scan", "square_function"};
  const fs::path a = fs::temp_directory_path() / "degpar_repro_a", b = fs::temp_directory_path() / "degpar_repro_b";
  fs::remove_all(a);
  fs::remove_all(b);
  cfg.out_dir = a.string();
  const auto ra = run_suite(cfg);
  cfg.out_dir = b.string();
  run_suite(cfg);
  for (const auto& r : ra) {
    const auto name = r.estimate_id + ".csv";
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
  EXPECT_EQ(slurp(a / "summary.csv"), slurp(b / "summary.csv"));
  const std::string summary = slurp(a / "summary.csv");
  EXPECT_EQ(summary.rfind("estimate_id,pass,constant,drift", 0), 0u);
  fs::remove_all(a);
  fs::remove_all(b);
}
