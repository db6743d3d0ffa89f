#include "degpar/semigroup.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <ostream>
#include <random>
#include <stdexcept>

#include "degpar/fft.hpp"
#include "degpar/multiplier.hpp"
#include "degpar/profiles.hpp"
#include "degpar/transforms.hpp"

namespace degpar {

std::string to_string(TimeScheme scheme) {
  return scheme == TimeScheme::backward_euler ? "backward_euler" : "crank_nicolson";
}

TimeScheme time_scheme_from_string(const std::string& name) {
  if (name == "backward_euler") return TimeScheme::backward_euler;
  if (name == "crank_nicolson") return TimeScheme::crank_nicolson;
  throw std::invalid_argument("unknown time scheme '" + name + "'");
}

void EvolutionRun::write_csv(std::ostream& os) const {
  os << "step,t";
  const Grid& g = snapshots.front().grid();
  for (int d = 0; d < g.dim(); ++d) os << ",ix" << d;
  os << ",y,re,im\n";
  char buf[128];
  for (size_t s = 0; s < snapshots.size(); ++s) {
    const Field& u = snapshots[s];
    const int step = snapshot_steps[s];
    for (Eigen::Index p = 0; p < g.x_points(); ++p) {
      std::string idx;
      Eigen::Index rest = p;
      std::vector<Eigen::Index> ix(static_cast<size_t>(g.dim()));
      for (int d = g.dim() - 1; d >= 0; --d) {
        ix[static_cast<size_t>(d)] = rest % g.nx();
        rest /= g.nx();
      }
      for (auto i : ix) idx += "," + std::to_string(i);
      for (int j = 0; j < g.J(); ++j) {
        const cplx v = u.at(p, j);
        std::snprintf(buf, sizeof buf, "%d,%.17g", step, times[static_cast<size_t>(step)]);
        os << buf << idx;
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", g.y()[j], v.real(), v.imag());
        os << buf;
      }
    }
  }
}

std::vector<double> uniform_time_grid(double T, int steps) {
  if (!(T > 0.0) || steps < 1) throw std::invalid_argument("time grid needs T > 0 and steps >= 1");
  std::vector<double> t(static_cast<size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) t[static_cast<size_t>(k)] = T * k / steps;
  return t;
}

namespace {

// Frequency-domain stepping shared by the model and general pipelines.
struct Stepper {
  std::function<std::unique_ptr<FrequencySolvePlan>(cplx)> make_plan;
  std::function<Eigen::VectorXcd(const Field&)> to_hat;
  std::function<Field(Eigen::VectorXcd)> from_hat;
  std::map<double, std::unique_ptr<FrequencySolvePlan>> plans;

  const FrequencySolvePlan& plan_for(double lambda) {
    for (auto& [key, plan] : plans)
      if (std::abs(key - lambda) <= 1e-12 * lambda) return *plan;
    auto& slot = plans[lambda];
    slot = make_plan(lambda);
    return *slot;
  }
};

EvolutionRun run(Stepper& st, const Field& u0, const Forcing& forcing, TimeScheme scheme,
                 const std::vector<double>& tg, int snapshot_every) {
  if (tg.size() < 2 || tg.front() != 0.0) throw std::invalid_argument("time grid must start at 0 with >= 1 step");
  for (size_t k = 1; k < tg.size(); ++k)
    if (!(tg[k] > tg[k - 1])) throw std::invalid_argument("time grid must be increasing");
  snapshot_every = std::max(1, snapshot_every);
  EvolutionRun out;
  out.scheme = scheme;
  out.times = tg;
  out.snapshot_steps.push_back(0);
  out.snapshots.push_back(u0);

  Eigen::VectorXcd u = st.to_hat(u0);
  Eigen::VectorXcd f_prev;
  if (forcing && scheme == TimeScheme::crank_nicolson) f_prev = st.to_hat(forcing(tg[0]));
  const int K = static_cast<int>(tg.size()) - 1;
  for (int k = 0; k < K; ++k) {
    const double dt = tg[static_cast<size_t>(k) + 1] - tg[static_cast<size_t>(k)];
    Eigen::VectorXcd f_next;
    if (forcing) f_next = st.to_hat(forcing(tg[static_cast<size_t>(k) + 1]));
    if (scheme == TimeScheme::backward_euler) {
      const double lam = 1.0 / dt;
      Eigen::VectorXcd rhs = u * lam;
      if (forcing) rhs += f_next;
      st.plan_for(lam).solve_hat(rhs);
      u = std::move(rhs);
    } else {
      const double tau = 0.5 * dt;
      const double lam = 1.0 / tau;
      Eigen::VectorXcd rhs = 2.0 * u;
      if (forcing) rhs += tau * (f_prev + f_next);
      rhs *= lam;
      st.plan_for(lam).solve_hat(rhs);
      u = rhs - u;
      if (forcing) f_prev = std::move(f_next);
    }
    if ((k + 1) % snapshot_every == 0 || k + 1 == K) {
      out.snapshot_steps.push_back(k + 1);
      out.snapshots.push_back(st.from_hat(u));
    }
  }
  return out;
}

}  // namespace

EvolutionRun evolve(const Field& u0, const Forcing& forcing, const ModelParams& model, TimeScheme scheme,
                    const std::vector<double>& time_grid, int snapshot_every) {
  const GridPtr gp = u0.grid_ptr();
  Stepper st;
  st.make_plan = [&](cplx lam) { return std::make_unique<FrequencySolvePlan>(model, gp, lam); };
  st.to_hat = [&](const Field& f) {
    if (f.values().size() != gp->size()) throw std::invalid_argument("evolve: field does not match the grid");
    Eigen::VectorXcd h = f.values();
    fft_x_forward(*gp, h);
    return h;
  };
  st.from_hat = [&](Eigen::VectorXcd h) {
    fft_x_inverse(*gp, h);
    return Field(gp, std::move(h));
  };
  return run(st, u0, forcing, scheme, time_grid, snapshot_every);
}

EvolutionRun evolve_general(const Field& u0, const Forcing& forcing, const OperatorSpec& spec,
                            const SpaceSpec& space, TimeScheme scheme, const std::vector<double>& time_grid,
                            int snapshot_every) {
  const Reduction red = reduce_to_model(spec, space);
  const GridPtr G = u0.grid_ptr();
  const TransformStep* shear = nullptr;
  double beta = 0.0;
  Eigen::MatrixXd fmap;
  for (const auto& s : red.chain.steps) {
    if (s.kind == TransformKind::shear) shear = &s;
    if (s.kind == TransformKind::power) beta = s.beta;
    if (s.kind == TransformKind::linear_x) fmap = s.matrix;
  }
  if (fmap.size() == 0 && spec.dimension() > 0) fmap = Eigen::MatrixXd::Identity(spec.dimension(), spec.dimension());
  const double pk = std::pow(beta + 1.0, 1.0 / space.p);
  const GridPtr Gm = beta != 0.0 ? G->power_image(beta) : G;

  Stepper st;
  st.make_plan = [&](cplx lam) { return std::make_unique<FrequencySolvePlan>(red.model, Gm, lam, fmap); };
  st.to_hat = [&](const Field& f) {
    const Field g = shear ? apply_shear_inverse(f, shear->shear_b, shear->shear_c) : f;
    Eigen::VectorXcd h = g.values() / pk;
    fft_x_forward(*G, h);
    return h;
  };
  st.from_hat = [&](Eigen::VectorXcd h) {
    fft_x_inverse(*G, h);
    Field u(G, h * pk);
    return shear ? apply_shear(u, shear->shear_b, shear->shear_c) : u;
  };
  return run(st, u0, forcing, scheme, time_grid, snapshot_every);
}

Field heat_closed_form(const GridPtr& grid, int kx, int ny, double t) {
  Field u(grid);
  const double Y = grid->y_max();
  const double xi = grid->has_box() ? 2.0 * M_PI * kx / grid->box()->length : 0.0;
  const double eta = M_PI * ny / Y;
  const double decay = std::exp(-(xi * xi + eta * eta) * t);
  for (Eigen::Index p = 0; p < grid->x_points(); ++p) {
    const double cx = grid->has_box() ? std::cos(xi * grid->x(p)[0]) : 1.0;
    for (int j = 0; j < grid->J(); ++j) u.at(p, j) = cx * std::cos(eta * grid->y()[j]) * decay;
  }
  return u;
}

namespace {

// (sum |v|^p w_j dx^N)^{1/p} with exact cell moments w_j of y^m.
double moment_norm(const Grid& g, const Eigen::VectorXcd& v, double p, const Eigen::VectorXd& w) {
  const int J = g.J();
  const double dxn = std::pow(g.dx(), g.dim());
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]), p) * w[i % J];
  return std::pow(s * dxn, 1.0 / p);
}

double sup_norm(const Eigen::VectorXcd& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

double ContractionReport::max_ratio() const {
  double m = 0.0;
  for (const auto* v : {&l2, &lp, &linf})
    for (double r : *v) m = std::max(m, r);
  return m;
}

ContractionReport contraction_check(const ModelParams& model, const GridPtr& grid, const std::vector<double>& t_set,
                                    double p, int probes, std::uint64_t seed, int steps_per_unit) {
  if (!(model.c_bessel + 1.0 - model.alpha > 0.0))
    throw ParameterError("contraction check needs c + 1 - alpha > 0");
  const double m = model.c_bessel - model.alpha;
  const Eigen::VectorXd w = grid->cell_moments(m);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N01(0.0, 1.0);
  std::vector<Field> initial;
  for (int r = 0; r < probes; ++r) {
    Field u(grid);
    for (Eigen::Index i = 0; i < u.values().size(); ++i) {
      const double re = N01(rng);
      const double im = N01(rng);
      u.values()[i] = cplx(re, im);
    }
    initial.push_back(std::move(u));
  }
  {
    Field u(grid);
    for (Eigen::Index p0 = 0; p0 < grid->x_points(); ++p0) u.at(p0, 0) = 1.0;
    initial.push_back(std::move(u));
  }

  ContractionReport rep;
  for (double t : t_set) {
    double r2 = 0.0, rp = 0.0, rinf = 0.0;
    if (t > 0.0) {
      const int steps = std::max(20, static_cast<int>(std::ceil(t * steps_per_unit)));
      const auto tg = uniform_time_grid(t, steps);
      for (const auto& u0 : initial) {
        const EvolutionRun run = evolve(u0, {}, model, TimeScheme::backward_euler, tg, steps);
        const Eigen::VectorXcd& v = run.final_state().values();
        r2 = std::max(r2, moment_norm(*grid, v, 2.0, w) / moment_norm(*grid, u0.values(), 2.0, w));
        rp = std::max(rp, moment_norm(*grid, v, p, w) / moment_norm(*grid, u0.values(), p, w));
        rinf = std::max(rinf, sup_norm(v) / sup_norm(u0.values()));
      }
    } else {
      r2 = rp = rinf = 1.0;
    }
    rep.times.push_back(t);
    rep.l2.push_back(r2);
    rep.lp.push_back(rp);
    rep.linf.push_back(rinf);
  }
  return rep;
}

MaxRegReport maximal_regularity_check(const ModelParams& model, const GridPtr& grid, double q,
                                      const std::vector<double>& tg, int n_forcings, std::uint64_t seed) {
  if (!(q > 1.0)) throw std::invalid_argument("maximal regularity check needs q > 1");
  const double T = tg.back();
  const Eigen::VectorXd w = grid->cell_moments(model.m);
  const double p = model.p;
  const auto panel = profile_panel(std::max(n_forcings, 1), 0.1 * grid->y_max(), 0.45 * grid->y_max(), seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> N01(0.0, 1.0);

  struct ForcingCase {
    Field shape;
    std::function<double(double)> profile;
  };
  std::vector<ForcingCase> cases;
  for (int i = 0; i < n_forcings; ++i) {
    Field F(grid);
    const Eigen::VectorXd phi = panel[static_cast<size_t>(i)].sample(grid->y());
    const int nmodes = grid->has_box() ? 3 : 1;
    for (int k = 0; k < nmodes; ++k) {
      const double a = N01(rng), b = N01(rng);
      for (Eigen::Index s = 0; s < grid->x_points(); ++s) {
        const double x0 = grid->has_box() ? grid->x(s)[0] : 0.0;
        const double L = grid->has_box() ? grid->box()->length : 1.0;
        const double arg = 2.0 * M_PI * k * x0 / L;
        F.slice(s) += (cplx(a * std::cos(arg), b * std::sin(arg)) * phi.cast<cplx>());
      }
    }
    std::function<double(double)> prof;
    switch (i % 3) {
      case 0:
        prof = [](double) { return 1.0; };
        break;
      case 1:
        prof = [T](double t) { return std::sin(2.0 * M_PI * t / T) + 0.5; };
        break;
      default:
        prof = [T](double t) { return t < 0.5 * T ? 1.0 : 0.0; };
        break;
    }
    cases.push_back({std::move(F), std::move(prof)});
  }
  {
    Field F(grid);
    for (Eigen::Index s = 0; s < grid->x_points(); ++s) F.at(s, 0) = 1.0;
    cases.push_back({std::move(F), [](double) { return 1.0; }});
  }

  MaxRegReport rep;
  for (const auto& fc : cases) {
    Eigen::VectorXcd Fhat = fc.shape.values();
    fft_x_forward(*grid, Fhat);
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(grid->size());
    std::map<double, std::unique_ptr<FrequencySolvePlan>> plans;
    double sdt = 0.0, slu = 0.0, sf = 0.0;
    for (size_t k = 0; k + 1 < tg.size(); ++k) {
      const double dt = tg[k + 1] - tg[k];
      const double lam = 1.0 / dt;
      const FrequencySolvePlan* plan = nullptr;
      for (auto& [key, pl] : plans)
        if (std::abs(key - lam) <= 1e-12 * lam) plan = pl.get();
      if (!plan) {
        auto& slot = plans[lam];
        slot = std::make_unique<FrequencySolvePlan>(model, grid, lam);
        plan = slot.get();
      }
      const double tau = fc.profile(tg[k + 1]);
      Eigen::VectorXcd rhs = u * lam + tau * Fhat;
      plan->solve_hat(rhs);
      Eigen::VectorXcd dtu = (rhs - u) / dt;
      Eigen::VectorXcd lu = dtu - tau * Fhat;
      u = std::move(rhs);
      fft_x_inverse(*grid, dtu);
      fft_x_inverse(*grid, lu);
      const double nf = std::abs(tau) * moment_norm(*grid, fc.shape.values(), p, w);
      sdt += dt * std::pow(moment_norm(*grid, dtu, p, w), q);
      slu += dt * std::pow(moment_norm(*grid, lu, p, w), q);
      sf += dt * std::pow(nf, q);
    }
    const double ndt = std::pow(sdt, 1.0 / q), nlu = std::pow(slu, 1.0 / q), nf = std::pow(sf, 1.0 / q);
    const double ratio = (ndt + nlu) / nf;
    rep.per_forcing.push_back(ratio);
    if (ratio > rep.ratio) {
      rep.ratio = ratio;
      rep.dt_norm = ndt;
      rep.lu_norm = nlu;
      rep.f_norm = nf;
    }
  }
  return rep;
}

}  // namespace degpar
