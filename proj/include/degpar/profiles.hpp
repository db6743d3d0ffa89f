#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace degpar {

/// C-infinity step: 1 on [0, y1], 0 on [y2, inf), with analytic derivatives.
struct SmoothStep {
  double y1 = 0.5;
  double y2 = 1.0;

  double value(double y) const;
  double d1(double y) const;
  double d2(double y) const;
};

/// Finite combination of terms coef * (1 - lo(y)) * hi(y) * cos(freq * y),
/// where the factor (1 - lo) is present only when `windowed` is set. Terms
/// without a window must have freq = 0, so the profile is constant near 0.
/// Compactly supported in [0, max hi.y2].
struct Profile {
  struct Term {
    double coef = 1.0;
    SmoothStep hi;
    bool windowed = false;
    SmoothStep lo;
    double freq = 0.0;
  };
  std::vector<Term> terms;

  double value(double y) const;
  double d1(double y) const;
  double d2(double y) const;
  /// D_y u vanishes identically on (0, y_flat].
  double flat_until() const;
  double support() const;

  Eigen::VectorXd sample(const Eigen::VectorXd& y) const;
  Eigen::VectorXd sample_d1(const Eigen::VectorXd& y) const;
  Eigen::VectorXd sample_d2(const Eigen::VectorXd& y) const;
};

/// Deterministic panel of n profiles flat on (0, flat) and supported in
/// (0, support); the first is a single step, later ones mix steps and
/// oscillating terms with seeded random coefficients.
std::vector<Profile> profile_panel(int n, double flat, double support, std::uint64_t seed);

}  // namespace degpar
