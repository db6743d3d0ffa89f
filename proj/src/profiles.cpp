#include "degpar/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace degpar {

namespace {

struct StepParts {
  double s, s1, s2;  // s(t) and its first two t-derivatives
};

// s(t) = psi(t) / (psi(t) + psi(1-t)), psi(t) = exp(-1/t) for t > 0.
StepParts transition(double t) {
  if (t <= 0.0) return {0.0, 0.0, 0.0};
  if (t >= 1.0) return {1.0, 0.0, 0.0};
  const double u = 1.0 - t;
  const double A = std::exp(-1.0 / t), B = std::exp(-1.0 / u);
  const double A1 = A / (t * t), A2 = A * (1.0 - 2.0 * t) / (t * t * t * t);
  const double B1 = -B / (u * u), B2 = B * (1.0 - 2.0 * u) / (u * u * u * u);
  const double S = A + B;
  const double num1 = A1 * B - A * B1;
  const double s1 = num1 / (S * S);
  const double s2 = (A2 * B - A * B2) / (S * S) - 2.0 * num1 * (A1 + B1) / (S * S * S);
  return {A / S, s1, s2};
}

}  // namespace

double SmoothStep::value(double y) const { return 1.0 - transition((y - y1) / (y2 - y1)).s; }
double SmoothStep::d1(double y) const { return -transition((y - y1) / (y2 - y1)).s1 / (y2 - y1); }
double SmoothStep::d2(double y) const {
  const double L = y2 - y1;
  return -transition((y - y1) / L).s2 / (L * L);
}

namespace {

// value, first and second derivative of one term
std::array<double, 3> term_eval(const Profile::Term& t, double y) {
  const double a0 = t.windowed ? 1.0 - t.lo.value(y) : 1.0;
  const double a1 = t.windowed ? -t.lo.d1(y) : 0.0;
  const double a2 = t.windowed ? -t.lo.d2(y) : 0.0;
  const double b0 = t.hi.value(y), b1 = t.hi.d1(y), b2 = t.hi.d2(y);
  const double c0 = std::cos(t.freq * y), c1 = -t.freq * std::sin(t.freq * y), c2 = -t.freq * t.freq * c0;
  const double v = a0 * b0 * c0;
  const double d1 = a1 * b0 * c0 + a0 * b1 * c0 + a0 * b0 * c1;
  const double d2 = a2 * b0 * c0 + a0 * b2 * c0 + a0 * b0 * c2 +
                    2.0 * (a1 * b1 * c0 + a1 * b0 * c1 + a0 * b1 * c1);
  return {t.coef * v, t.coef * d1, t.coef * d2};
}

}  // namespace

double Profile::value(double y) const {
  double s = 0.0;
  for (const auto& t : terms) s += term_eval(t, y)[0];
  return s;
}

double Profile::d1(double y) const {
  double s = 0.0;
  for (const auto& t : terms) s += term_eval(t, y)[1];
  return s;
}

double Profile::d2(double y) const {
  double s = 0.0;
  for (const auto& t : terms) s += term_eval(t, y)[2];
  return s;
}

double Profile::flat_until() const {
  double f = support();
  for (const auto& t : terms) f = std::min(f, t.windowed ? t.lo.y1 : t.hi.y1);
  return f;
}

double Profile::support() const {
  double s = 0.0;
  for (const auto& t : terms) s = std::max(s, t.hi.y2);
  return s;
}

Eigen::VectorXd Profile::sample(const Eigen::VectorXd& y) const { return y.unaryExpr([this](double v) { return value(v); }); }
Eigen::VectorXd Profile::sample_d1(const Eigen::VectorXd& y) const { return y.unaryExpr([this](double v) { return d1(v); }); }
Eigen::VectorXd Profile::sample_d2(const Eigen::VectorXd& y) const { return y.unaryExpr([this](double v) { return d2(v); }); }

std::vector<Profile> profile_panel(int n, double flat, double support, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double span = support - flat;
  std::vector<Profile> out;
  for (int i = 0; i < n; ++i) {
    Profile p;
    if (i == 0) {
      p.terms.push_back({1.0, {flat + 0.2 * span, support}, false, {}, 0.0});
      out.push_back(p);
      continue;
    }
    const double y1 = flat + span * (0.1 + 0.4 * U(rng));
    const double y2 = y1 + (support - y1) * (0.4 + 0.6 * U(rng));
    p.terms.push_back({0.5 + U(rng), {y1, y2}, false, {}, 0.0});
    const int extra = 1 + static_cast<int>(U(rng) * 2.0);
    for (int e = 0; e < extra; ++e) {
      const double l1 = flat + span * 0.3 * U(rng);
      const double l2 = l1 + span * (0.05 + 0.25 * U(rng));
      const double h1 = l2 + (support - l2) * 0.3 * U(rng);
      const double h2 = h1 + (support - h1) * (0.3 + 0.7 * U(rng));
      const double freq = 2.0 * M_PI / span * 2.0 * U(rng);
      p.terms.push_back({2.0 * U(rng) - 1.0, {h1, h2}, true, {l1, l2}, freq});
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace degpar
