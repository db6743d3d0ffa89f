#include "degpar/bessel1d.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>

namespace degpar {

FormSpec& FormSpec::add(Kind kind, cplx coef, double exponent) {
  terms.push_back({kind, coef, exponent});
  return *this;
}

bool FormSpec::hermitian() const {
  for (const auto& t : terms) {
    if (t.kind != Kind::potential) {
      if (t.coef != cplx(0.0)) return false;
    } else if (t.coef.imag() != 0.0) {
      return false;
    }
  }
  return true;
}

FormSpec bessel_form(double c) {
  FormSpec f;
  f.stiffness_exponent = c;
  f.inner_exponent = c;
  f.label = "bessel";
  f.params.c = c;
  return f;
}

FormSpec shifted_bessel_form(double c, double alpha, double mu) {
  FormSpec f;
  f.stiffness_exponent = c;
  f.inner_exponent = c - alpha;
  f.add(FormSpec::Kind::potential, mu, c);
  f.label = "shifted_bessel";
  f.params = {c, alpha, 0.0, mu, 0.0};
  return f;
}

FormSpec degenerate_form(double c, double alpha, double a_dot_xi, double xi_sq) {
  FormSpec f;
  f.stiffness_exponent = c;
  f.inner_exponent = c - alpha;
  f.add(FormSpec::Kind::directional, cplx(0.0, -2.0 * a_dot_xi), c);
  f.add(FormSpec::Kind::potential, xi_sq, c);
  const double qa = xi_sq - a_dot_xi * a_dot_xi;
  f.sector_tan = a_dot_xi == 0.0 ? 0.0 : (qa > 0.0 ? std::abs(a_dot_xi) / std::sqrt(qa) : HUGE_VAL);
  f.label = "degenerate";
  f.params = {c, alpha, 2.0 * a_dot_xi, xi_sq, 0.0};
  return f;
}

FormSpec power_frame_form(double c_tilde, double beta, double b, double xi_sq) {
  FormSpec f;
  f.stiffness_exponent = c_tilde;
  f.inner_exponent = c_tilde;
  f.add(FormSpec::Kind::directional, cplx(0.0, -b * (beta + 1.0)), c_tilde + beta);
  f.add(FormSpec::Kind::potential, xi_sq * (beta + 1.0) * (beta + 1.0), c_tilde + 2.0 * beta);
  f.label = "power_frame";
  f.params = {c_tilde, 0.0, b, xi_sq, beta};
  return f;
}

FormSpec auxiliary_form(double c, double beta, double b, double q_a) {
  FormSpec f;
  f.stiffness_exponent = c;
  f.inner_exponent = c;
  f.add(FormSpec::Kind::transport, cplx(0.0, -0.5 * b), c + beta);
  f.add(FormSpec::Kind::potential, (beta + 1.0) * (beta + 1.0) * q_a, c + 2.0 * beta);
  // |Im| <= |b| / (2 (beta+1) sqrt(Q_a)) Re
  f.sector_tan = b == 0.0 ? 0.0 : (q_a > 0.0 ? std::abs(b) / (2.0 * (beta + 1.0) * std::sqrt(q_a)) : HUGE_VAL);
  f.label = "auxiliary";
  f.params = {c, 0.0, b, q_a, beta};
  return f;
}

FormSpec potential_form(double c, double alpha, double a_dot_xi, double xi_sq, cplx lambda) {
  FormSpec f;
  f.stiffness_exponent = c;
  f.inner_exponent = c;
  f.add(FormSpec::Kind::directional, cplx(0.0, -2.0 * a_dot_xi), c);
  f.add(FormSpec::Kind::potential, xi_sq, c);
  f.add(FormSpec::Kind::potential, lambda, c - alpha);
  f.label = "potential";
  f.params = {c, alpha, 2.0 * a_dot_xi, xi_sq, 0.0};
  return f;
}

Tridiag assemble_stiffness(const Grid& grid, double s) {
  const int J = grid.J();
  const auto& y = grid.y();
  Tridiag K(J);
  for (int k = 1; k < J; ++k) {
    const double h = y[k] - y[k - 1];
    const double sigma = Grid::power_integral(y[k - 1], y[k], s) / (h * h);
    K.diag[k - 1] += sigma;
    K.diag[k] += sigma;
    K.upper[k - 1] -= sigma;
    K.lower[k - 1] -= sigma;
  }
  return K;
}

Tridiag assemble_directional(const Grid& grid, double s) {
  const int J = grid.J();
  const auto& y = grid.y();
  Tridiag G(J);
  for (int k = 1; k < J; ++k) {
    const double h = y[k] - y[k - 1];
    const double r = 0.5 * Grid::power_integral(y[k - 1], y[k], s) / h;
    G.upper[k - 1] += r;
    G.diag[k - 1] -= r;
    G.diag[k] += r;
    G.lower[k - 1] -= r;
  }
  return G;
}

Eigen::VectorXd assemble_transport(const Grid& grid, double s) {
  const int J = grid.J();
  const auto& y = grid.y();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(J);
  for (int k = 1; k < J; ++k) {
    const double q = Grid::power_integral(y[k - 1], y[k], s) / (y[k] - y[k - 1]);
    d[k] += q;
    d[k - 1] -= q;
  }
  return d;
}

Eigen::VectorXd assemble_potential(const Grid& grid, double s) { return grid.cell_moments(s); }

namespace {

std::string describe(const FormSpec& f) {
  std::ostringstream os;
  os << f.label << "(c=" << f.params.c << ", alpha=" << f.params.alpha << ", drift=" << f.params.drift
     << ", shift=" << f.params.shift << ", beta=" << f.params.beta << ")";
  return os.str();
}

}  // namespace

DiscreteOperator::DiscreteOperator(FormSpec spec, GridPtr grid) : spec_(std::move(spec)), grid_(std::move(grid)) {
  if (!grid_) throw std::invalid_argument("DiscreteOperator needs a grid");
  if (!(spec_.stiffness_exponent > -1.0))
    throw ParameterError("form stiffness exponent must be > -1 (Neumann regime), got " + describe(spec_));
  if (!(spec_.inner_exponent > -1.0))
    throw ParameterError("inner-product exponent must be > -1 (window violated), got " + describe(spec_));
  const Grid& g = *grid_;
  K_ = assemble_stiffness(g, spec_.stiffness_exponent);
  K_.diag *= spec_.stiffness_coef;
  K_.lower *= spec_.stiffness_coef;
  K_.upper *= spec_.stiffness_coef;
  for (const auto& t : spec_.terms) {
    if (t.coef == cplx(0.0)) continue;
    switch (t.kind) {
      case FormSpec::Kind::directional:
        K_.add_scaled(t.coef, assemble_directional(g, t.exponent));
        break;
      case FormSpec::Kind::transport:
        K_.add_diagonal(t.coef * assemble_transport(g, t.exponent).cast<cplx>());
        break;
      case FormSpec::Kind::potential:
        K_.add_diagonal(t.coef * assemble_potential(g, t.exponent).cast<cplx>());
        break;
    }
  }
  W_ = g.cell_moments(spec_.inner_exponent);
}

Eigen::MatrixXcd DiscreteOperator::matrix() const {
  Eigen::MatrixXcd M = -K_.dense();
  for (Eigen::Index i = 0; i < M.rows(); ++i) M.row(i) /= W_[i];
  return M;
}

Eigen::VectorXcd DiscreteOperator::apply(const Eigen::VectorXcd& u) const {
  return -(K_.apply(u).array() / W_.array()).matrix();
}

cplx DiscreteOperator::form(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const { return v.dot(K_.apply(u)); }

cplx DiscreteOperator::inner(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) const {
  return v.dot(W_.cast<cplx>().cwiseProduct(u));
}

double DiscreteOperator::norm(const Eigen::VectorXcd& u) const { return std::sqrt((W_.array() * u.array().abs2()).sum()); }

void DiscreteOperator::write_banded(std::ostream& os) const {
  os << "row,lower_re,lower_im,diag_re,diag_im,upper_re,upper_im,weight\n";
  char buf[256];
  const Eigen::Index n = size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx lo = i > 0 ? K_.lower[i - 1] : cplx(0.0);
    const cplx up = i + 1 < n ? K_.upper[i] : cplx(0.0);
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", static_cast<long>(i), lo.real(),
                  lo.imag(), K_.diag[i].real(), K_.diag[i].imag(), up.real(), up.imag(), W_[i]);
    os << buf;
  }
}

Resolvent::Resolvent(const DiscreteOperator& op, cplx lambda) : op_(&op), lambda_(lambda), A_(op.form_matrix()) {
  A_.add_diagonal(lambda * op.inner_weight().cast<cplx>());
  lu_ = TridiagLU(A_);
  condition_ = lu_.condition_estimate();
  if (lu_.singular() || !(condition_ <= 1e14)) {
    std::ostringstream os;
    os << "resolvent system singular or ill-conditioned (condition " << condition_ << ") at lambda = " << lambda
       << " for " << describe(op.spec());
    throw SolveError(os.str());
  }
}

Eigen::VectorXcd Resolvent::solve_load(const Eigen::VectorXcd& load) const { return lu_.solve(load); }

Eigen::VectorXcd Resolvent::apply(const Eigen::VectorXcd& f) const {
  Eigen::VectorXcd b = op_->inner_weight().cast<cplx>().cwiseProduct(f);
  lu_.solve_in_place(b.data());
  return b;
}

Eigen::VectorXcd Resolvent::apply_adjoint(const Eigen::VectorXcd& g) const {
  Eigen::VectorXcd b = g;
  lu_.solve_adjoint_in_place(b.data());
  return op_->inner_weight().cast<cplx>().cwiseProduct(b);
}

double Resolvent::residual(const Eigen::VectorXcd& u, const Eigen::VectorXcd& f) const {
  const Eigen::VectorXd& W = op_->inner_weight();
  const Eigen::VectorXcd r = (A_.apply(u).array() / W.array()).matrix() - f;
  const double rn = std::sqrt((W.array() * r.array().abs2()).sum());
  const double fn = std::sqrt((W.array() * f.array().abs2()).sum());
  return fn > 0.0 ? rn / fn : rn;
}

Eigen::VectorXcd resolve(const DiscreteOperator& op, cplx lambda, const Eigen::VectorXcd& f, SolveInfo* info) {
  if (f.size() != op.size()) throw std::invalid_argument("resolve: right-hand side size mismatch");
  const Resolvent R(op, lambda);
  Eigen::VectorXcd u = R.apply(f);
  if (info) {
    info->residual = R.residual(u, f);
    info->condition = R.condition();
  }
  return u;
}

Field resolve(const DiscreteOperator& op, cplx lambda, const Field& f, SolveInfo* info) {
  if (f.grid().has_box()) throw std::invalid_argument("resolve: expected a 1-d field");
  return Field(f.grid_ptr(), resolve(op, lambda, f.values(), info));
}

Eigen::VectorXcd resolve_load(const DiscreteOperator& op, cplx lambda, const Eigen::VectorXcd& load, SolveInfo* info) {
  if (load.size() != op.size()) throw std::invalid_argument("resolve_load: size mismatch");
  const Resolvent R(op, lambda);
  Eigen::VectorXcd u = R.solve_load(load);
  if (info) {
    const Eigen::VectorXcd f = (load.array() / op.inner_weight().array()).matrix();
    info->residual = R.residual(u, f);
    info->condition = R.condition();
  }
  return u;
}

double sector_half_angle(double a_norm) { return 0.5 * M_PI - std::asin(std::clamp(a_norm, 0.0, 1.0)); }

namespace {

void check_exp_args(const DiscreteOperator& op, cplx z) {
  if (op.size() > kMaxDenseJ) throw std::invalid_argument("dense exponential limited to J <= 512");
  if (!(z.real() > 0.0)) throw ParameterError("exponential needs Re z > 0");
  const double half = 0.5 * M_PI - std::atan(op.spec().sector_tan);
  if (!(std::abs(std::arg(z)) < half)) throw ParameterError("z lies outside the analyticity sector of the operator");
}

// W^{1/2} (-M) W^{-1/2} = W^{-1/2} K W^{-1/2}
Eigen::MatrixXcd symmetrized(const DiscreteOperator& op) {
  Eigen::MatrixXcd S = op.form_matrix().dense();
  const Eigen::VectorXd s = op.inner_weight().cwiseSqrt().cwiseInverse();
  return s.asDiagonal() * S * s.asDiagonal();
}

Eigen::MatrixXcd unsymmetrize(const DiscreteOperator& op, const Eigen::MatrixXcd& E) {
  const Eigen::VectorXd s = op.inner_weight().cwiseSqrt();
  return s.cwiseInverse().asDiagonal() * E * s.asDiagonal();
}

Kernel1D to_kernel(const DiscreteOperator& op, cplx z, const Eigen::MatrixXcd& E) {
  Kernel1D k;
  k.z = z;
  k.measure_exponent = op.spec().inner_exponent;
  k.grid = op.grid();
  k.values = E * op.inner_weight().cwiseInverse().asDiagonal();
  return k;
}

}  // namespace

Eigen::MatrixXcd expm_matrix(const DiscreteOperator& op, cplx z) {
  check_exp_args(op, z);
  const Eigen::MatrixXcd S = symmetrized(op);
  if (op.spec().hermitian()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S.real());
    const Eigen::MatrixXd& V = es.eigenvectors();
    const Eigen::VectorXcd e = (-z * es.eigenvalues().cast<cplx>()).array().exp();
    return unsymmetrize(op, V.cast<cplx>() * e.asDiagonal() * V.transpose().cast<cplx>());
  }
  const Eigen::MatrixXcd A = -z * S;
  return unsymmetrize(op, A.exp());
}

Kernel1D expm_kernel(const DiscreteOperator& op, cplx z) { return to_kernel(op, z, expm_matrix(op, z)); }

std::vector<Kernel1D> expm_kernels(const DiscreteOperator& op, const std::vector<double>& times) {
  std::vector<Kernel1D> out;
  if (times.empty()) return out;
  for (double t : times) check_exp_args(op, t);
  const Eigen::MatrixXcd S = symmetrized(op);
  if (op.spec().hermitian()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S.real());
    const Eigen::MatrixXcd V = es.eigenvectors().cast<cplx>();
    for (double t : times) {
      const Eigen::VectorXcd e = (-t * es.eigenvalues()).array().exp().cast<cplx>();
      out.push_back(to_kernel(op, t, unsymmetrize(op, V * e.asDiagonal() * V.adjoint())));
    }
    return out;
  }
  Eigen::MatrixXcd prev;
  double t_prev = -1.0;
  for (double t : times) {
    Eigen::MatrixXcd E;
    if (t_prev > 0.0 && std::abs(t - 2.0 * t_prev) <= 1e-14 * t) {
      E = prev * prev;
    } else {
      const Eigen::MatrixXcd A = -t * S;
      E = A.exp();
    }
    prev = E;
    t_prev = t;
    out.push_back(to_kernel(op, t, unsymmetrize(op, E)));
  }
  return out;
}

void write_kernel_csv(std::ostream& os, const std::vector<Kernel1D>& kernels, int stride) {
  os << "t,y,rho,re,im\n";
  char buf[160];
  stride = std::max(stride, 1);
  for (const auto& k : kernels) {
    const auto& y = k.grid->y();
    for (Eigen::Index i = 0; i < k.values.rows(); i += stride) {
      for (Eigen::Index j = 0; j < k.values.cols(); j += stride) {
        const cplx v = k.values(i, j);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", k.z.real(), y[i], y[j], v.real(), v.imag());
        os << buf;
      }
    }
  }
}

bool GaussianBoundFit::finite() const {
  return std::isfinite(C) && std::isfinite(kappa) && C > 0.0 && kappa > 0.0 && samples > 0;
}

GaussianBoundFit fit_gaussian_bound(const std::vector<Kernel1D>& kernels, double c, double y_cut) {
  struct Sample {
    double ratio, s;
  };
  std::vector<Sample> samples;
  for (const auto& k : kernels) {
    const double t = k.z.real();
    const double st = std::sqrt(t);
    const auto& y = k.grid->y();
    for (Eigen::Index j = 0; j < k.values.cols(); ++j) {
      if (y[j] >= y_cut) break;
      const double rho = y[j];
      const double bound = std::pow(rho, -c) * std::pow(std::min(rho / st, 1.0), c) / st;
      for (Eigen::Index i = 0; i < k.values.rows(); ++i) {
        if (y[i] >= y_cut) break;
        const double d = y[i] - rho;
        samples.push_back({std::abs(k.values(i, j)) / bound, d * d / t});
      }
    }
  }
  GaussianBoundFit fit;
  fit.samples = static_cast<Eigen::Index>(samples.size());
  double rmax = 0.0;
  for (const auto& s : samples) rmax = std::max(rmax, s.ratio);
  fit.C = 2.0 * rmax;
  double kappa = 0.0;
  for (const auto& s : samples) {
    if (s.ratio <= 1e-10 * fit.C || s.s == 0.0) continue;
    kappa = std::max(kappa, s.s / std::log(fit.C / s.ratio));
  }
  fit.kappa = kappa;
  return fit;
}

double domination_excess(const Kernel1D& dominated, const Kernel1D& dominating) {
  if (dominated.values.rows() != dominating.values.rows() || dominated.values.cols() != dominating.values.cols())
    throw std::invalid_argument("domination_excess: kernel shapes differ");
  const double scale = dominating.values.cwiseAbs().maxCoeff();
  double excess = 0.0;
  for (Eigen::Index i = 0; i < dominated.values.rows(); ++i)
    for (Eigen::Index j = 0; j < dominated.values.cols(); ++j)
      excess = std::max(excess, std::abs(dominated.values(i, j)) - dominating.values(i, j).real());
  return excess / scale;
}

EquivalenceReport equivalence_transform_check(const EquivalenceParams& prm, const GridPtr& grid,
                                              const std::vector<Profile>& panel) {
  if (!(prm.c + 1.0 - prm.alpha > 0.0)) throw ParameterError("equivalence check needs c + 1 - alpha > 0");
  if (!(prm.alpha < 2.0)) throw ParameterError("equivalence check needs alpha < 2");
  EquivalenceReport rep;
  const double alpha = prm.alpha;
  rep.beta = alpha / (2.0 - alpha);
  rep.c_tilde = (2.0 * prm.c - alpha) / (2.0 - alpha);
  rep.b_tilde = 2.0 * prm.a_dot_xi * (rep.beta + 1.0);
  rep.q_a = prm.xi_sq - prm.a_dot_xi * prm.a_dot_xi;
  if (rep.q_a < 0.0) throw ParameterError("equivalence check needs |a.xi|^2 <= |xi|^2");

  const DiscreteOperator lhs_op(degenerate_form(prm.c, alpha, prm.a_dot_xi, prm.xi_sq), grid);
  const GridPtr zgrid = grid->power_image(-0.5 * alpha);
  const DiscreteOperator rhs_op(auxiliary_form(rep.c_tilde, rep.beta, rep.b_tilde, rep.q_a), zgrid);

  const Eigen::VectorXd& y = grid->y();
  const double tnorm = std::sqrt(1.0 - 0.5 * alpha);
  const double k2 = (rep.beta + 1.0) * (rep.beta + 1.0);
  Eigen::VectorXcd phase(y.size());
  for (Eigen::Index j = 0; j < y.size(); ++j) phase[j] = std::exp(cplx(0.0, -prm.a_dot_xi * y[j]));

  // Form identity a(u, v) = (beta+1)^{-2} a~((T S)^{-1} u, (T S)^{-1} v); (T S)^{-1} u
  // takes values on the z-nodes z_j = y_j^{1-alpha/2}.
  std::vector<Eigen::VectorXcd> us, vs;
  for (const auto& prof : panel) {
    const Eigen::VectorXcd u = prof.sample(y).cast<cplx>();
    us.push_back(u);
    vs.push_back((u.array() / phase.array()).matrix() / tnorm);
  }
  double worst = 0.0, scale = 0.0;
  for (size_t i = 0; i < us.size(); ++i) {
    for (size_t j = 0; j < us.size(); ++j) {
      const cplx lhs = lhs_op.form(us[i], us[j]);
      const cplx rhs = rhs_op.form(vs[i], vs[j]) / k2;
      worst = std::max(worst, std::abs(lhs - rhs));
      scale = std::max(scale, std::abs(lhs));
    }
  }
  if (scale > 0.0) worst /= scale;
  rep.max_rel_discrepancy = worst;
  return rep;
}

namespace {

Eigen::VectorXcd random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::VectorXcd x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = N(rng);
    const double im = N(rng);
    x[i] = cplx(re, im);
  }
  return x;
}

double wnorm2(const Eigen::VectorXcd& x, const Eigen::VectorXd& w) { return std::sqrt((w.array() * x.array().abs2()).sum()); }

double wnormp(const Eigen::VectorXcd& x, const Eigen::VectorXd& w, double p) {
  return std::pow((w.array() * x.array().abs().pow(p)).sum(), 1.0 / p);
}

}  // namespace

double probe_l2_norm(const LinearMap& A, const LinearMap& A_adjoint, const Eigen::VectorXd& w_in,
                     const Eigen::VectorXd& w_out, const ProbeOptions& opt) {
  const Eigen::Index n = w_in.size();
  std::mt19937_64 rng(opt.seed);
  double best = 0.0;
  auto ratio = [&](const Eigen::VectorXcd& x) {
    const double xn = wnorm2(x, w_in);
    return xn > 0.0 ? wnorm2(A(x), w_out) / xn : 0.0;
  };
  for (int r = 0; r < opt.random; ++r) {
    Eigen::VectorXcd x = random_vector(n, rng);
    best = std::max(best, ratio(x));
    for (int s = 0; s < opt.power_steps && A_adjoint; ++s) {
      // weighted adjoint: W_in^{-1} A^H W_out
      const Eigen::VectorXcd Ax = A(x);
      Eigen::VectorXcd next = A_adjoint(w_out.cast<cplx>().cwiseProduct(Ax));
      next = (next.array() / w_in.array()).matrix();
      const double nn = wnorm2(next, w_in);
      if (!(nn > 0.0)) break;
      x = next / nn;
      best = std::max(best, ratio(x));
    }
  }
  if (opt.cell_probes) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
      e[j] = 1.0;
      best = std::max(best, ratio(e));
    }
  }
  for (const auto& x : opt.extra) best = std::max(best, ratio(x));
  return best;
}

double probe_lp_norm(const LinearMap& A, const Eigen::VectorXd& w_in, const Eigen::VectorXd& w_out, double p,
                     const ProbeOptions& opt) {
  const Eigen::Index n = w_in.size();
  std::mt19937_64 rng(opt.seed);
  double best = 0.0;
  auto ratio = [&](const Eigen::VectorXcd& x) {
    const double xn = wnormp(x, w_in, p);
    return xn > 0.0 ? wnormp(A(x), w_out, p) / xn : 0.0;
  };
  for (int r = 0; r < opt.random; ++r) best = std::max(best, ratio(random_vector(n, rng)));
  if (opt.cell_probes) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
      e[j] = 1.0;
      best = std::max(best, ratio(e));
    }
  }
  for (const auto& x : opt.extra) best = std::max(best, ratio(x));
  return best;
}

SectorScanReport sector_scan(const DiscreteOperator& op, double theta, double r_min, double r_max, int n_moduli,
                             int n_args, const ProbeOptions& opt) {
  SectorScanReport rep;
  rep.theta = theta;
  const Eigen::VectorXd& W = op.inner_weight();
  for (int i = 0; i < n_moduli; ++i) {
    const double r = n_moduli == 1 ? r_min : r_min * std::pow(r_max / r_min, static_cast<double>(i) / (n_moduli - 1));
    for (int k = 0; k < n_args; ++k) {
      const double phi = n_args == 1 ? 0.0 : -theta + 2.0 * theta * k / (n_args - 1);
      const cplx lambda = std::polar(r, phi);
      const Resolvent R(op, lambda);
      const LinearMap A = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd { return lambda * R.apply(x); };
      const LinearMap AH = [&](const Eigen::VectorXcd& g) -> Eigen::VectorXcd {
        return std::conj(lambda) * R.apply_adjoint(g);
      };
      const double nrm = probe_l2_norm(A, AH, W, W, opt);
      ++rep.samples;
      if (nrm > rep.sup_norm) {
        rep.sup_norm = nrm;
        rep.worst_lambda = lambda;
      }
    }
  }
  return rep;
}

}  // namespace degpar
