#include "degpar/transforms.hpp"

#include <cmath>
#include <stdexcept>

#include "degpar/bessel1d.hpp"
#include "degpar/fft.hpp"

namespace degpar {

GridPtr power_source_grid(const Grid& target, double beta) { return target.power_image(beta); }

bool matched_power_pair(const Grid& source, const Grid& target, double beta) {
  if (source.J() != target.J()) return false;
  const double k = beta + 1.0;
  for (int j = 0; j < source.J(); ++j) {
    const double expect = std::pow(target.y()[j], k);
    if (std::abs(source.y()[j] - expect) > 1e-12 * expect) return false;
  }
  return true;
}

Field apply_power(const Field& u, double beta, double p) {
  if (!(beta > -1.0)) throw std::invalid_argument("apply_power needs beta > -1");
  return apply_power(u, beta, p, u.grid().power_image(inverse_beta(beta)));
}

Field apply_power(const Field& u, double beta, double p, GridPtr target) {
  if (beta == -1.0) throw std::invalid_argument("apply_power: beta = -1");
  if (!matched_power_pair(u.grid(), *target, beta))
    throw std::invalid_argument("apply_power: target mesh is not the matched image of the source mesh");
  if (target->x_points() != u.grid().x_points()) throw std::invalid_argument("apply_power: x-grids differ");
  return Field(std::move(target), u.values() * std::pow(std::abs(beta + 1.0), 1.0 / p));
}

Eigen::VectorXcd apply_phase(const Grid& grid, const Eigen::VectorXcd& u, double a_dot_xi, double alpha) {
  if (!(alpha < 2.0)) throw std::invalid_argument("apply_phase needs alpha < 2");
  if (u.size() % grid.J() != 0) throw std::invalid_argument("apply_phase: size mismatch");
  const int J = grid.J();
  const double e = 2.0 / (2.0 - alpha);
  Eigen::VectorXcd factor(J);
  for (int j = 0; j < J; ++j) factor[j] = std::polar(1.0, -a_dot_xi * std::pow(grid.y()[j], e));
  Eigen::VectorXcd out = u;
  for (Eigen::Index s = 0; s < u.size() / J; ++s) out.segment(s * J, J).array() *= factor.array();
  return out;
}

Field apply_phase(const Field& u, double a_dot_xi, double alpha) {
  return Field(u.grid_ptr(), apply_phase(u.grid(), u.values(), a_dot_xi, alpha));
}

namespace {

Field shear_by(const Field& u, const Eigen::VectorXd& shift_per_y) {
  const Grid& g = u.grid();
  if (!g.has_box()) throw std::invalid_argument("shear needs a periodic x-box");
  if (shift_per_y.size() != g.dim()) throw std::invalid_argument("shear: drift dimension mismatch");
  Eigen::VectorXcd hat = u.values();
  fft_x_forward(g, hat);
  const int J = g.J();
  for (Eigen::Index k = 0; k < g.x_points(); ++k) {
    const double rate = g.xi(k).dot(shift_per_y);
    for (int j = 0; j < J; ++j) hat[k * J + j] *= std::polar(1.0, -rate * g.y()[j]);
  }
  fft_x_inverse(g, hat);
  return Field(u.grid_ptr(), std::move(hat));
}

}  // namespace

Field apply_shear(const Field& u, const Eigen::VectorXd& b, double c) {
  if (c == 0.0) throw std::invalid_argument("apply_shear needs c != 0");
  return shear_by(u, b / c);
}

Field apply_shear_inverse(const Field& u, const Eigen::VectorXd& b, double c) {
  if (c == 0.0) throw std::invalid_argument("apply_shear needs c != 0");
  return shear_by(u, -b / c);
}

Field apply_operator_strong(const OperatorSpec& spec, const Field& u) {
  const Grid& g = u.grid();
  const int N = spec.dimension();
  if (N != g.dim()) throw std::invalid_argument("apply_operator_strong: dimension mismatch");
  const int J = g.J();
  const Eigen::Index X = g.x_points();
  const Eigen::VectorXd& y = g.y();
  const Eigen::ArrayXd y1 = y.array().pow(spec.alpha1);
  const Eigen::ArrayXd y12 = y.array().pow(0.5 * (spec.alpha1 + spec.alpha2));
  const Eigen::ArrayXd y2 = y.array().pow(spec.alpha2);
  const Eigen::ArrayXd y2m1 = y.array().pow(spec.alpha2 - 1.0);

  std::vector<Eigen::VectorXcd> dx(static_cast<size_t>(N));
  for (int i = 0; i < N; ++i) dx[static_cast<size_t>(i)] = spectral_dx(g, u.values(), i);

  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(u.values().size());
  for (int i = 0; i < N; ++i) {
    for (int l = 0; l < N; ++l) {
      if (spec.Q(i, l) == 0.0) continue;
      const Eigen::VectorXcd dil = spectral_dxx(g, u.values(), i, l);
      for (Eigen::Index s = 0; s < X; ++s) out.segment(s * J, J).array() += spec.Q(i, l) * y1 * dil.segment(s * J, J).array();
    }
  }
  for (Eigen::Index s = 0; s < X; ++s) {
    const Eigen::VectorXcd slice = u.values().segment(s * J, J);
    const Eigen::VectorXcd dy = fd_dy(g, slice);
    const Eigen::VectorXcd dyy = fd_dyy(g, slice);
    Eigen::ArrayXcd acc = spec.gamma * y2 * dyy.array() + spec.drift_c * y2m1 * dy.array();
    for (int i = 0; i < N; ++i) {
      const Eigen::VectorXcd di = dx[static_cast<size_t>(i)].segment(s * J, J);
      if (spec.q[i] != 0.0) acc += 2.0 * spec.q[i] * y12 * fd_dy(g, di).array();
      if (spec.drift_b.size() == N && spec.drift_b[i] != 0.0) acc += spec.drift_b[i] * y2m1 * di.array();
    }
    out.segment(s * J, J).array() += acc;
  }
  return Field(u.grid_ptr(), std::move(out));
}

SimilarityReport similarity_check_power(const SimilarityParams& prm, const GridPtr& grid,
                                        const std::vector<Profile>& panel) {
  const double beta = prm.beta;
  if (!(beta > -1.0)) throw std::invalid_argument("similarity check needs beta > -1");
  const double k = beta + 1.0;
  SimilarityReport rep;
  rep.image = beta_map(beta, prm.alpha1, prm.alpha2, prm.c, 0.0, prm.p);
  rep.expected_coefficient = k * k;

  const GridPtr orig = grid->power_image(inverse_beta(beta));
  const Eigen::VectorXd& s = grid->y();
  const Eigen::VectorXd& y = orig->y();
  const double pk = std::pow(k, 1.0 / prm.p);
  const double mixed_exp = (prm.alpha1 + prm.alpha2 + 2.0 * beta) / (2.0 * k);
  const cplx two_i_axi(0.0, 2.0 * prm.a_dot_xi);

  double worst = 0.0, num = 0.0, den = 0.0;
  for (const auto& prof : panel) {
    const Eigen::VectorXcd phi = prof.sample(s).cast<cplx>();
    const Eigen::VectorXcd v = pk * phi;
    const Eigen::VectorXcd vy = fd_dy(*orig, v), vyy = fd_dyy(*orig, v);
    const Eigen::VectorXcd ps = fd_dy(*grid, phi), pss = fd_dyy(*grid, phi);
    Eigen::VectorXcd lhs(s.size()), rhs(s.size()), lhs_b(s.size()), bare_b(s.size());
    for (Eigen::Index j = 0; j < s.size(); ++j) {
      const double yj = y[j], sj = s[j];
      const cplx bessel_y = std::pow(yj, prm.alpha2) * (vyy[j] + prm.c / yj * vy[j]);
      lhs[j] = (-prm.xi_sq * std::pow(yj, prm.alpha1) * v[j] +
                two_i_axi * std::pow(yj, 0.5 * (prm.alpha1 + prm.alpha2)) * vy[j] + bessel_y) /
               pk;
      lhs_b[j] = bessel_y / pk;
      bare_b[j] = std::pow(sj, rep.image.alpha2) * (pss[j] + rep.image.c / sj * ps[j]);
      rhs[j] = -prm.xi_sq * std::pow(sj, rep.image.alpha1) * phi[j] +
               k * two_i_axi * std::pow(sj, mixed_exp) * ps[j] + k * k * bare_b[j];
    }
    const double scale = rhs.cwiseAbs().maxCoeff();
    if (scale > 0.0) worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff() / scale);
    num += std::real(bare_b.dot(lhs_b));
    den += bare_b.squaredNorm();
  }
  rep.max_rel_discrepancy = worst;
  rep.bessel_coefficient = den > 0.0 ? num / den : 0.0;
  return rep;
}

double phase_form_check(double c_tilde, double beta, double a_dot_xi, double xi_sq, const GridPtr& grid,
                        const std::vector<Profile>& panel) {
  const double b = 2.0 * a_dot_xi;
  const DiscreteOperator frame(power_frame_form(c_tilde, beta, b, xi_sq), grid);
  const DiscreteOperator aux(auxiliary_form(c_tilde, beta, b * (beta + 1.0), xi_sq - a_dot_xi * a_dot_xi), grid);
  const Eigen::VectorXd& z = grid->y();
  Eigen::VectorXcd inv_phase(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) inv_phase[j] = std::polar(1.0, a_dot_xi * std::pow(z[j], beta + 1.0));

  std::vector<Eigen::VectorXcd> samples;
  for (const auto& prof : panel) samples.push_back(prof.sample(z).cast<cplx>());
  double worst = 0.0, scale = 0.0;
  for (const auto& u : samples) {
    for (const auto& v : samples) {
      const cplx lhs = frame.form(u, v);
      const cplx rhs = aux.form(inv_phase.cwiseProduct(u), inv_phase.cwiseProduct(v));
      worst = std::max(worst, std::abs(lhs - rhs));
      scale = std::max(scale, std::abs(lhs));
    }
  }
  return scale > 0.0 ? worst / scale : worst;
}

double shear_conjugation_check(const OperatorSpec& spec, const GridPtr& grid, const std::vector<Profile>& panel) {
  const int N = spec.dimension();
  if (N == 0 || !grid->has_box()) throw std::invalid_argument("shear check needs N >= 1 and an x-box");
  if (spec.drift_c == 0.0) throw std::invalid_argument("shear check needs c != 0");
  const OperatorSpec sheared = shear_map(spec);
  const double L = grid->box()->length;
  double worst = 0.0;
  int idx = 0;
  for (const auto& prof : panel) {
    const Eigen::VectorXd phi = prof.sample(grid->y());
    const int mode = 1 + idx % 3;
    ++idx;
    Field u(grid);
    for (Eigen::Index s = 0; s < grid->x_points(); ++s) {
      const Eigen::VectorXd x = grid->x(s);
      double arg = 0.0;
      for (int i = 0; i < N; ++i) arg += (i + 1) * mode * 2.0 * M_PI / L * x[i];
      u.slice(s) = (std::cos(arg) * phi).cast<cplx>();
    }
    const Field direct = apply_operator_strong(sheared, u);
    const Field conj = apply_shear_inverse(apply_operator_strong(spec, apply_shear(u, spec.drift_b, spec.drift_c)),
                                           spec.drift_b, spec.drift_c);
    const double scale = direct.values().cwiseAbs().maxCoeff();
    if (scale > 0.0) worst = std::max(worst, (conj.values() - direct.values()).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

}  // namespace degpar
