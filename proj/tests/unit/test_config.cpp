#include <gtest/gtest.h>

#include "degpar/config.hpp"

using namespace degpar;
using nlohmann::json;

namespace {

std::string bad_key(const json& j) {
  try {
    RunConfig::from_json(j);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

}  // namespace

TEST(Config, DefaultsAreTheModelCase) {
  const RunConfig c = RunConfig::from_json(json::object());
  EXPECT_EQ(c.dimension(), 1);
  EXPECT_DOUBLE_EQ(c.space.p, 2.0);
  const SuiteConfig s = c.suite_config();
  EXPECT_DOUBLE_EQ(s.model.alpha, 0.0);
  EXPECT_DOUBLE_EQ(s.model.c_bessel, 0.0);
  EXPECT_TRUE(validate_window(s.model).pass);
}

TEST(Config, ErrorsNameTheKey) {
  EXPECT_EQ(bad_key({{"bogus", 1}}), "bogus");
  EXPECT_EQ(bad_key({{"gamma", -1.0}}), "gamma");
  EXPECT_EQ(bad_key({{"p", 1.0}}), "p");
  EXPECT_EQ(bad_key({{"alpha2", 2.5}}), "alpha2");
  EXPECT_EQ(bad_key({{"drift_b", {1.0}}}), "drift_b");
  EXPECT_EQ(bad_key({{"q_vector", {2.0}}}), "q_matrix");
  EXPECT_EQ(bad_key({{"grid_j", "big"}}), "grid_j");
  EXPECT_EQ(bad_key({{"scheme", "rk4"}}), "scheme");
  EXPECT_EQ(bad_key({{"checks", {"nope"}}}), "checks");
  EXPECT_EQ(bad_key({{"dimension", 2}, {"q_matrix", {{1.0}}}}), "q_matrix");
}

TEST(Config, JsonRoundTrip) {
  json j = {{"dimension", 2},
            {"q_matrix", {{1.5, 0.1}, {0.1, 1.0}}},
            {"q_vector", {0.2, -0.1}},
            {"gamma", 1.3},
            {"drift_b", {0.3, 0.0}},
            {"drift_c", 1.2},
            {"alpha1", 0.4},
            {"alpha2", 0.4},
            {"p", 3.0},
            {"m", 0.5},
            {"mode", {1, 0}},
            {"scheme", "crank_nicolson"},
            {"seed", 42}};
  const RunConfig c = RunConfig::from_json(j);
  const RunConfig d = RunConfig::from_json(c.to_json());
  EXPECT_EQ(c.to_json().dump(), d.to_json().dump());
  EXPECT_EQ(d.seed, 42u);
  EXPECT_EQ(d.scheme, TimeScheme::crank_nicolson);
}
