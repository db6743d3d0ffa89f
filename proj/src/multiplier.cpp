#include "degpar/multiplier.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "degpar/fft.hpp"
#include "degpar/parallel.hpp"
#include "degpar/transforms.hpp"

namespace degpar {

FrequencySolvePlan::FrequencySolvePlan(const ModelParams& model, GridPtr grid, cplx lambda, Eigen::MatrixXd freq_map)
    : model_(model), grid_(std::move(grid)), lambda_(lambda), freq_map_(std::move(freq_map)) {
  model_.validate();
  if (!grid_) throw std::invalid_argument("FrequencySolvePlan needs a grid");
  const int n = model_.dimension();
  if (freq_map_.size() == 0) {
    if (grid_->dim() != n) throw std::invalid_argument("FrequencySolvePlan: grid and model dimensions differ");
  } else if (freq_map_.rows() != grid_->dim() || freq_map_.cols() != n) {
    throw std::invalid_argument("FrequencySolvePlan: frequency map has the wrong shape");
  }
  const Eigen::Index modes = grid_->x_points();
  ops_.resize(static_cast<size_t>(modes));
  res_.resize(static_cast<size_t>(modes));
  std::vector<double> cond(static_cast<size_t>(modes), 0.0);
  parallel_for(0, modes, [&](std::ptrdiff_t k) {
    const Eigen::VectorXd xm = model_xi(k);
    const double a_xi = n > 0 ? model_.a.dot(xm) : 0.0;
    const double xi_sq = n > 0 ? xm.squaredNorm() : 0.0;
    auto op = std::make_unique<DiscreteOperator>(degenerate_form(model_.c_bessel, model_.alpha, a_xi, xi_sq), grid_);
    try {
      res_[static_cast<size_t>(k)] = std::make_unique<Resolvent>(*op, lambda_ / model_.scale);
    } catch (const SolveError& e) {
      std::ostringstream os;
      os << e.what() << " (frequency mode " << k << ", xi =";
      for (Eigen::Index i = 0; i < xm.size(); ++i) os << ' ' << xm[i];
      os << ")";
      throw SolveError(os.str());
    }
    cond[static_cast<size_t>(k)] = res_[static_cast<size_t>(k)]->condition();
    ops_[static_cast<size_t>(k)] = std::move(op);
  });
  for (double c : cond) max_condition_ = std::max(max_condition_, c);
}

Eigen::VectorXd FrequencySolvePlan::model_xi(Eigen::Index mode) const {
  if (!grid_->has_box()) return Eigen::VectorXd::Zero(model_.dimension());
  const Eigen::VectorXd xi = grid_->xi(mode);
  if (freq_map_.size() == 0) return xi;
  return freq_map_.transpose() * xi;
}

void FrequencySolvePlan::solve_hat(Eigen::VectorXcd& hat) const {
  const int J = grid_->J();
  if (hat.size() != grid_->size()) throw std::invalid_argument("solve_hat: size mismatch");
  const double s = model_.scale;
  parallel_for(0, modes(), [&](std::ptrdiff_t k) {
    auto seg = hat.segment(k * J, J);
    seg = res_[static_cast<size_t>(k)]->apply(seg) / s;
  });
}

void FrequencySolvePlan::apply_hat(Eigen::VectorXcd& hat) const {
  const int J = grid_->J();
  if (hat.size() != grid_->size()) throw std::invalid_argument("apply_hat: size mismatch");
  const double s = model_.scale;
  parallel_for(0, modes(), [&](std::ptrdiff_t k) {
    auto seg = hat.segment(k * J, J);
    seg = s * ops_[static_cast<size_t>(k)]->apply(seg);
  });
}

Field resolvent_nd(const FrequencySolvePlan& plan, const Field& f, NdSolveReport* report) {
  const Grid& g = *plan.grid();
  if (f.values().size() != g.size()) throw std::invalid_argument("resolvent_nd: field does not match plan grid");
  Eigen::VectorXcd fhat = f.values();
  fft_x_forward(g, fhat);
  Eigen::VectorXcd uhat = fhat;
  plan.solve_hat(uhat);
  if (report) {
    Eigen::VectorXcd Lu = uhat;
    plan.apply_hat(Lu);
    const Eigen::VectorXcd r = plan.lambda() * uhat - Lu - fhat;
    const double fn = fhat.norm();
    report->residual = fn > 0.0 ? r.norm() / fn : r.norm();
    report->max_condition = plan.max_condition();
  }
  fft_x_inverse(g, uhat);
  return Field(plan.grid(), std::move(uhat));
}

Field resolvent_nd(cplx lambda, const Field& f, const ModelParams& model, NdSolveReport* report) {
  const FrequencySolvePlan plan(model, f.grid_ptr(), lambda);
  return resolvent_nd(plan, f, report);
}

Field apply_model_nd(const ModelParams& model, const Field& u) {
  const FrequencySolvePlan plan(model, u.grid_ptr(), 1.0);
  Eigen::VectorXcd hat = u.values();
  fft_x_forward(u.grid(), hat);
  plan.apply_hat(hat);
  fft_x_inverse(u.grid(), hat);
  return Field(u.grid_ptr(), std::move(hat));
}

DerivedFields derived_multipliers(cplx lambda, const Field& f, const ModelParams& model) {
  const GridPtr& gp = f.grid_ptr();
  const Grid& g = *gp;
  const FrequencySolvePlan plan(model, gp, lambda);
  const int N = model.dimension();
  const int J = g.J();
  const double c = model.c_bessel;

  Eigen::VectorXcd uhat = f.values();
  fft_x_forward(g, uhat);
  plan.solve_hat(uhat);

  const Eigen::VectorXd W = g.cell_moments(c - model.alpha);
  const Eigen::VectorXcd yalpha = (g.cell_moments(c).array() / W.array()).cast<cplx>();
  const Tridiag S = assemble_stiffness(g, c);
  const Tridiag G = assemble_directional(g, c);
  const Tridiag Gm1 = assemble_directional(g, c - 1.0);
  const Eigen::VectorXcd Winv = W.cwiseInverse().cast<cplx>();

  const Eigen::Index size = g.size();
  Eigen::VectorXcd lap = Eigen::VectorXcd::Zero(size), bes = lap, dyy = lap, neu = lap;
  std::vector<Eigen::VectorXcd> gxd(static_cast<size_t>(N), lap), hess(static_cast<size_t>(N * N), lap);

  for (Eigen::Index k = 0; k < plan.modes(); ++k) {
    const Eigen::VectorXd xi = g.has_box() ? g.xi(k) : Eigen::VectorXd::Zero(N);
    const Eigen::VectorXcd u = uhat.segment(k * J, J);
    const Eigen::VectorXcd ya = yalpha.cwiseProduct(u);
    const Eigen::VectorXcd yad = Winv.cwiseProduct(G.apply(u));
    const Eigen::VectorXcd yn = Winv.cwiseProduct(Gm1.apply(u));
    const Eigen::VectorXcd yb = -Winv.cwiseProduct(S.apply(u));
    lap.segment(k * J, J) = -xi.squaredNorm() * ya;
    bes.segment(k * J, J) = yb;
    neu.segment(k * J, J) = yn;
    dyy.segment(k * J, J) = yb - c * yn;
    for (int i = 0; i < N; ++i) {
      gxd[static_cast<size_t>(i)].segment(k * J, J) = cplx(0.0, xi[i]) * yad;
      for (int j = 0; j < N; ++j) hess[static_cast<size_t>(i * N + j)].segment(k * J, J) = -xi[i] * xi[j] * ya;
    }
  }
  auto back = [&](Eigen::VectorXcd v) {
    fft_x_inverse(g, v);
    return Field(gp, std::move(v));
  };
  DerivedFields out{back(uhat), back(lap), {}, back(bes), {}, back(dyy), back(neu)};
  for (auto& v : gxd) out.grad_x_dy.push_back(back(v));
  for (auto& v : hess) out.hessian_x.push_back(back(v));
  return out;
}

Field solve_general(const OperatorSpec& spec, const SpaceSpec& space, cplx lambda, const Field& f,
                    NdSolveReport* report) {
  const Reduction red = reduce_to_model(spec, space);
  const GridPtr& G = f.grid_ptr();
  if (G->dim() != spec.dimension()) throw std::invalid_argument("solve_general: grid and operator dimensions differ");

  const TransformStep* shear = nullptr;
  double beta = 0.0;
  Eigen::MatrixXd fmap;
  for (const auto& st : red.chain.steps) {
    if (st.kind == TransformKind::shear) shear = &st;
    if (st.kind == TransformKind::power) beta = st.beta;
    if (st.kind == TransformKind::linear_x) fmap = st.matrix;
  }
  const double k = beta + 1.0;
  const double pk = std::pow(k, 1.0 / space.p);

  Field g = shear ? apply_shear_inverse(f, shear->shear_b, shear->shear_c) : f;
  const GridPtr Gm = beta != 0.0 ? G->power_image(beta) : G;
  if (fmap.size() == 0 && spec.dimension() > 0) fmap = Eigen::MatrixXd::Identity(spec.dimension(), spec.dimension());

  // T_beta^{-1} g on the model mesh (nodes y_j^{beta+1}).
  Eigen::VectorXcd hat = g.values() / pk;
  fft_x_forward(*G, hat);
  const FrequencySolvePlan plan(red.model, Gm, lambda, fmap);
  Eigen::VectorXcd fhat = hat;
  plan.solve_hat(hat);
  if (report) {
    Eigen::VectorXcd Lu = hat;
    plan.apply_hat(Lu);
    const Eigen::VectorXcd r = lambda * hat - Lu - fhat;
    report->residual = fhat.norm() > 0.0 ? r.norm() / fhat.norm() : r.norm();
    report->max_condition = plan.max_condition();
  }
  fft_x_inverse(*G, hat);
  Field u(G, hat * pk);
  return shear ? apply_shear(u, shear->shear_b, shear->shear_c) : u;
}

Field solve_general_direct(const OperatorSpec& spec, cplx lambda, const Field& f) {
  spec.validate();
  const int N = spec.dimension();
  if (N > 0 && spec.drift_b.cwiseAbs().maxCoeff() != 0.0)
    throw ParameterError("the direct route covers b = 0 only");
  const GridPtr& gp = f.grid_ptr();
  const Grid& g = *gp;
  if (g.dim() != N) throw std::invalid_argument("solve_general_direct: dimension mismatch");
  const double gam = spec.gamma;
  const double c = spec.drift_c / gam;
  const double d = spec.alpha1 - spec.alpha2;
  const int J = g.J();
  Eigen::VectorXcd hat = f.values();
  fft_x_forward(g, hat);
  parallel_for(0, g.x_points(), [&](std::ptrdiff_t k) {
    const Eigen::VectorXd xi = g.has_box() ? g.xi(k) : Eigen::VectorXd::Zero(N);
    FormSpec form;
    form.stiffness_exponent = c;
    form.stiffness_coef = gam;
    form.inner_exponent = c - spec.alpha2;
    if (N > 0) {
      form.add(FormSpec::Kind::directional, cplx(0.0, -2.0 * spec.q.dot(xi)), c + 0.5 * d);
      form.add(FormSpec::Kind::potential, xi.dot(spec.Q * xi), c + d);
    }
    form.label = "general_direct";
    form.params = {c, spec.alpha2, 0.0, 0.0, 0.0};
    const DiscreteOperator op(form, gp);
    auto seg = hat.segment(k * J, J);
    seg = Resolvent(op, lambda).apply(seg);
  });
  fft_x_inverse(g, hat);
  return Field(gp, std::move(hat));
}

ModeResolvent::ModeResolvent(const ModelParams& model, GridPtr grid, cplx lambda, Eigen::VectorXd xi)
    : model_(model), xi_(std::move(xi)) {
  model_.validate();
  if (xi_.size() != model_.dimension()) throw std::invalid_argument("ModeResolvent: xi has the wrong dimension");
  const double a_xi = xi_.size() ? model_.a.dot(xi_) : 0.0;
  op_ = std::make_unique<DiscreteOperator>(degenerate_form(model_.c_bessel, model_.alpha, a_xi, xi_.squaredNorm()),
                                           std::move(grid));
  res_ = std::make_unique<Resolvent>(*op_, lambda / model_.scale);
  const Grid& g = *op_->grid();
  yalpha_ = g.cell_moments(model_.c_bessel).cwiseQuotient(op_->inner_weight());
  G_ = assemble_directional(g, model_.c_bessel);
}

Eigen::VectorXcd ModeResolvent::R(const Eigen::VectorXcd& f) const { return res_->apply(f) / model_.scale; }

Eigen::VectorXcd ModeResolvent::y_alpha(const Eigen::VectorXcd& u) const { return yalpha_.cast<cplx>().cwiseProduct(u); }

Eigen::VectorXcd ModeResolvent::y_alpha_dy(const Eigen::VectorXcd& u) const {
  return (G_.apply(u).array() / op_->inner_weight().array()).matrix();
}

// scale * (2 i a_j y^alpha D_y - 2 xi_j y^alpha) v
Eigen::VectorXcd ModeResolvent::F(int j, const Eigen::VectorXcd& v) const {
  return model_.scale * (cplx(0.0, 2.0 * model_.a[j]) * y_alpha_dy(v) - 2.0 * xi_[j] * y_alpha(v));
}

Eigen::VectorXcd ModeResolvent::dR(int j, const Eigen::VectorXcd& f) const { return R(F(j, R(f))); }

Eigen::VectorXcd ModeResolvent::d2R(int i, int j, const Eigen::VectorXcd& f) const {
  const Eigen::VectorXcd r = R(f);
  Eigen::VectorXcd out = R(F(i, R(F(j, r)))) + R(F(j, R(F(i, r))));
  if (i == j) out -= 2.0 * model_.scale * R(y_alpha(r));
  return out;
}

XiDerivativeReport xi_derivative_check(cplx lambda, const ModelParams& model, const GridPtr& grid,
                                       const Eigen::VectorXd& xi, int order, const Eigen::VectorXcd& f, double h0) {
  if (order != 1 && order != 2) throw std::invalid_argument("xi_derivative_check: order must be 1 or 2");
  const int N = model.dimension();
  if (N < 1) throw std::invalid_argument("xi_derivative_check needs N >= 1");
  XiDerivativeReport rep;
  rep.order = order;
  const ModeResolvent base(model, grid, lambda, xi);
  const Eigen::VectorXd& W = base.op().inner_weight();
  auto wnorm = [&](const Eigen::VectorXcd& v) { return std::sqrt((W.array() * v.array().abs2()).sum()); };
  auto Rat = [&](const Eigen::VectorXd& x) { return ModeResolvent(model, grid, lambda, x).R(f); };

  std::vector<std::pair<int, int>> comps;
  if (order == 1) {
    for (int j = 0; j < N; ++j) comps.push_back({j, j});
  } else {
    for (int i = 0; i < N; ++i)
      for (int j = i; j < N; ++j) comps.push_back({i, j});
  }
  std::vector<Eigen::VectorXcd> exact;
  for (auto [i, j] : comps) exact.push_back(order == 1 ? base.dR(j, f) : base.d2R(i, j, f));

  const Eigen::VectorXcd r0 = base.R(f);
  for (int s = 0; s < 3; ++s) {
    const double h = h0 / std::pow(2.0, s);
    double err = 0.0;
    for (size_t c = 0; c < comps.size(); ++c) {
      const auto [i, j] = comps[c];
      Eigen::VectorXcd fd;
      const Eigen::VectorXd ei = Eigen::VectorXd::Unit(N, i), ej = Eigen::VectorXd::Unit(N, j);
      if (order == 1) {
        fd = (Rat(xi + h * ej) - Rat(xi - h * ej)) / (2.0 * h);
      } else if (i == j) {
        fd = (Rat(xi + h * ej) - 2.0 * r0 + Rat(xi - h * ej)) / (h * h);
      } else {
        fd = (Rat(xi + h * ei + h * ej) - Rat(xi + h * ei - h * ej) - Rat(xi - h * ei + h * ej) +
              Rat(xi - h * ei - h * ej)) /
             (4.0 * h * h);
      }
      const double scale = wnorm(exact[c]);
      err = std::max(err, wnorm(fd - exact[c]) / (scale > 0.0 ? scale : 1.0));
    }
    rep.steps.push_back(h);
    rep.errors.push_back(err);
  }
  rep.observed_order = HUGE_VAL;
  for (size_t s = 0; s + 1 < rep.errors.size(); ++s)
    rep.observed_order = std::min(rep.observed_order, std::log2(rep.errors[s] / rep.errors[s + 1]));
  if (order == 2 && N >= 2) {
    const Eigen::VectorXcd d12 = base.d2R(0, 1, f), d21 = base.d2R(1, 0, f);
    rep.symmetry_defect = wnorm(d12 - d21) / std::max(wnorm(d12), 1e-300);
  }
  return rep;
}

const char* multiplier_family_name(int family) {
  switch (family) {
    case 0:
      return "lambda_resolvent";
    case 1:
      return "xi_sq_y_alpha_resolvent";
    default:
      return "xi_y_alpha_dy_resolvent";
  }
}

void MikhlinReport::write_csv(std::ostream& os) const {
  os << "family,beta,lambda_re,lambda_im,xi,estimate\n";
  char buf[256];
  for (const auto& r : rows) {
    std::string xs;
    for (Eigen::Index i = 0; i < r.xi.size(); ++i) {
      char b[32];
      std::snprintf(b, sizeof b, "%s%.6g", i ? ";" : "", r.xi[i]);
      xs += b;
    }
    std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%s,%.17g\n", multiplier_family_name(r.family), r.beta_mask,
                  r.lambda.real(), r.lambda.imag(), xs.c_str(), r.norm);
    os << buf;
  }
}

MikhlinReport mikhlin_bound_scan(const std::vector<cplx>& lambdas, const std::vector<Eigen::VectorXd>& xis,
                                 const ModelParams& model, const GridPtr& grid, const ProbeOptions& opt) {
  const int N = model.dimension();
  if (N > 2) throw std::invalid_argument("multiplier scans are limited to N <= 2");
  MikhlinReport rep;
  const Eigen::VectorXd w = grid->cell_moments(model.m);
  for (const cplx lambda : lambdas) {
    for (const auto& xi : xis) {
      const ModeResolvent mr(model, grid, lambda, xi);
      for (int mask = 0; mask < (1 << N); ++mask) {
        std::vector<int> idx;
        for (int j = 0; j < N; ++j)
          if (mask & (1 << j)) idx.push_back(j);
        double xb = 1.0;
        for (int j : idx) xb *= xi[j];
        // D^beta of R applied to v, together with the lower-order pieces needed by the product rule.
        auto dbeta = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
          if (idx.empty()) return mr.R(v);
          if (idx.size() == 1) return mr.dR(idx[0], v);
          return mr.d2R(idx[0], idx[1], v);
        };
        for (int family = 0; family < 3; ++family) {
          const int kmax = family == 2 ? N : 1;
          for (int kk = 0; kk < kmax; ++kk) {
            const LinearMap A = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
              if (family == 0) return xb * lambda * dbeta(v);
              if (family == 1) {
                const double x2 = xi.squaredNorm();
                Eigen::VectorXcd out = x2 * mr.y_alpha(dbeta(v));
                if (idx.size() == 1) {
                  out += 2.0 * xi[idx[0]] * mr.y_alpha(mr.R(v));
                } else if (idx.size() == 2) {
                  out += 2.0 * xi[idx[1]] * mr.y_alpha(mr.dR(idx[0], v)) +
                         2.0 * xi[idx[0]] * mr.y_alpha(mr.dR(idx[1], v));
                }
                return xb * out;
              }
              Eigen::VectorXcd out = xi[kk] * mr.y_alpha_dy(dbeta(v));
              if (idx.size() == 1) {
                if (idx[0] == kk) out += mr.y_alpha_dy(mr.R(v));
              } else if (idx.size() == 2) {
                if (idx[1] == kk) out += mr.y_alpha_dy(mr.dR(idx[0], v));
                if (idx[0] == kk) out += mr.y_alpha_dy(mr.dR(idx[1], v));
              }
              return xb * out;
            };
            MikhlinRow row{family, mask, lambda, xi, probe_lp_norm(A, w, w, model.p, opt)};
            rep.sup[static_cast<size_t>(family)] = std::max(rep.sup[static_cast<size_t>(family)], row.norm);
            rep.rows.push_back(std::move(row));
          }
        }
      }
    }
  }
  return rep;
}

}  // namespace degpar
