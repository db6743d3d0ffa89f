#include "degpar/grid.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "degpar/fft.hpp"

namespace degpar {

Grid::Grid(int J, double y_max, double grading, std::optional<XBox> box)
    : J_(J), y_max_(y_max), grading_(grading), box_(box), y_(J), w_(J), e_(J + 1) {
  for (int j = 0; j <= J; ++j) e_[j] = y_max * std::pow(static_cast<double>(j) / J, grading);
  e_[J] = y_max;
  for (int j = 0; j < J; ++j) {
    y_[j] = y_max * std::pow((j + 0.5) / J, grading);
    w_[j] = e_[j + 1] - e_[j];
  }
}

GridPtr Grid::make(int J, double y_max, double grading, std::optional<XBox> box) {
  if (J < 8) throw std::invalid_argument("grid needs J >= 8");
  if (!(y_max > 0.0) || !std::isfinite(y_max)) throw std::invalid_argument("grid needs Y_max > 0");
  if (!(grading >= 1.0) || !std::isfinite(grading)) throw std::invalid_argument("grid needs grading >= 1");
  if (box) {
    if (box->dim < 0) throw std::invalid_argument("x-box dimension must be >= 0");
    if (box->dim > 0) {
      if (!(box->length > 0.0)) throw std::invalid_argument("x-box length must be positive");
      if (box->nx < 2 || box->nx % 2 != 0) throw std::invalid_argument("x-box nx must be even and >= 2");
    }
  }
  return GridPtr(new Grid(J, y_max, grading, box));
}

GridPtr Grid::make_derived(int J, double y_max, double grading, std::optional<XBox> box) {
  if (J < 8 || !(y_max > 0.0) || !(grading > 0.0)) throw std::invalid_argument("invalid derived grid parameters");
  return GridPtr(new Grid(J, y_max, grading, box));
}

GridPtr Grid::power_image(double beta) const {
  const double k = beta + 1.0;
  if (!(k > 0.0)) throw std::invalid_argument("power_image needs beta > -1");
  return GridPtr(new Grid(J_, std::pow(y_max_, k), grading_ * k, box_));
}

GridPtr Grid::with_box(std::optional<XBox> box) const {
  if (box && box->dim > 0 && (box->nx < 2 || box->nx % 2 != 0 || !(box->length > 0.0)))
    throw std::invalid_argument("invalid x-box");
  return GridPtr(new Grid(J_, y_max_, grading_, box));
}

double Grid::power_integral(double a, double b, double s) {
  if (a > 0.0) {
    const double t = (s + 1.0) * std::log(a / b);
    if (s + 1.0 == 0.0) return std::log(b / a);
    return -std::pow(b, s + 1.0) * std::expm1(t) / (s + 1.0);
  }
  if (!(s > -1.0)) throw std::invalid_argument("integral of y^s diverges at 0 for s <= -1");
  return std::pow(b, s + 1.0) / (s + 1.0);
}

double Grid::cell_moment(int j, double s) const {
  if (j == 0 && !(s > -1.0)) return std::pow(y_[0], s) * w_[0];
  return power_integral(e_[j], e_[j + 1], s);
}

Eigen::VectorXd Grid::cell_moments(double s) const {
  Eigen::VectorXd out(J_);
  for (int j = 0; j < J_; ++j) out[j] = cell_moment(j, s);
  return out;
}

Eigen::Index Grid::x_points() const {
  Eigen::Index n = 1;
  for (int d = 0; d < dim(); ++d) n *= box_->nx;
  return n;
}

double Grid::frequency(int k) const {
  if (!has_box()) return 0.0;
  const int n = box_->nx;
  const int kk = k >= n / 2 ? k - n : k;
  return 2.0 * M_PI / box_->length * kk;
}

Eigen::VectorXd Grid::xi(Eigen::Index mode) const {
  const int d = dim();
  Eigen::VectorXd out(d);
  for (int a = d - 1; a >= 0; --a) {
    out[a] = frequency(static_cast<int>(mode % box_->nx));
    mode /= box_->nx;
  }
  return out;
}

Eigen::VectorXd Grid::x(Eigen::Index point) const {
  const int d = dim();
  Eigen::VectorXd out(d);
  for (int a = d - 1; a >= 0; --a) {
    out[a] = dx() * static_cast<double>(point % box_->nx);
    point /= box_->nx;
  }
  return out;
}

Field::Field(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw std::invalid_argument("field needs a grid");
  values_ = Eigen::VectorXcd::Zero(grid_->size());
}

Field::Field(GridPtr grid, Eigen::VectorXcd values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("field needs a grid");
  if (values_.size() != grid_->size()) throw std::invalid_argument("field values do not match grid shape");
}

double lp_norm(const Grid& grid, const Eigen::VectorXcd& values, double p, double m) {
  const int J = grid.J();
  Eigen::VectorXd wm(J);
  for (int j = 0; j < J; ++j) wm[j] = std::pow(grid.y()[j], m) * grid.weights()[j];
  const double dxn = std::pow(grid.dx(), grid.dim());
  double sum = 0.0;
  for (Eigen::Index k = 0; k < grid.x_points(); ++k) {
    for (int j = 0; j < J; ++j) sum += std::pow(std::abs(values[k * J + j]), p) * wm[j];
  }
  return std::pow(sum * dxn, 1.0 / p);
}

double lp_norm(const Field& u, double p, double m) { return lp_norm(u.grid(), u.values(), p, m); }

namespace {

// Weights of the derivative of order `order` (1 or 2) at x of the quadratic
// interpolant through x0, x1, x2.
std::array<double, 3> lagrange3(double x, double x0, double x1, double x2, int order) {
  const double d0 = (x0 - x1) * (x0 - x2);
  const double d1 = (x1 - x0) * (x1 - x2);
  const double d2 = (x2 - x0) * (x2 - x1);
  if (order == 1) return {((x - x1) + (x - x2)) / d0, ((x - x0) + (x - x2)) / d1, ((x - x0) + (x - x1)) / d2};
  return {2.0 / d0, 2.0 / d1, 2.0 / d2};
}

Eigen::VectorXcd fd_apply(const Grid& grid, const Eigen::VectorXcd& u, int order) {
  const int J = grid.J();
  if (u.size() % J != 0) throw std::invalid_argument("finite difference: size is not a multiple of J");
  const auto& y = grid.y();
  Eigen::VectorXcd out(u.size());
  std::vector<std::array<double, 3>> w(J);
  std::vector<int> base(J);
  for (int j = 0; j < J; ++j) {
    const int b = j == 0 ? 0 : (j == J - 1 ? J - 3 : j - 1);
    base[j] = b;
    w[j] = lagrange3(y[j], y[b], y[b + 1], y[b + 2], order);
  }
  for (Eigen::Index s = 0; s < u.size() / J; ++s) {
    const cplx* in = u.data() + s * J;
    cplx* o = out.data() + s * J;
    for (int j = 0; j < J; ++j) {
      const int b = base[j];
      o[j] = w[j][0] * in[b] + w[j][1] * in[b + 1] + w[j][2] * in[b + 2];
    }
  }
  return out;
}

Eigen::VectorXcd times_power(const Grid& grid, const Eigen::VectorXcd& u, double s) {
  const int J = grid.J();
  Eigen::VectorXcd out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = std::pow(grid.y()[i % J], s) * u[i];
  return out;
}

}  // namespace

Eigen::VectorXcd fd_dy(const Grid& grid, const Eigen::VectorXcd& u) { return fd_apply(grid, u, 1); }
Eigen::VectorXcd fd_dyy(const Grid& grid, const Eigen::VectorXcd& u) { return fd_apply(grid, u, 2); }

bool SobolevNormReport::finite() const {
  for (double v : {u, xx, x, yy, y, xy, neumann, oblique})
    if (!std::isfinite(v)) return false;
  return true;
}

SobolevNormReport sobolev_report(const Field& u, const OperatorSpec& spec, const SpaceSpec& space) {
  const Grid& g = u.grid();
  if (g.J() < 8) throw std::invalid_argument("sobolev_report needs J >= 8");
  const int n = g.dim();
  if (n != spec.dimension()) throw std::invalid_argument("sobolev_report: dimension mismatch");
  const double p = space.p, m = space.m, a1 = spec.alpha1, a2 = spec.alpha2;
  const Eigen::VectorXcd& v = u.values();
  const Eigen::VectorXcd dy = fd_dy(g, v);
  const Eigen::VectorXcd dyy = fd_dyy(g, v);

  Eigen::VectorXd grad2 = Eigen::VectorXd::Zero(v.size());
  Eigen::VectorXd hess2 = Eigen::VectorXd::Zero(v.size());
  Eigen::VectorXd mixed2 = Eigen::VectorXd::Zero(v.size());
  Eigen::VectorXcd bgrad = Eigen::VectorXcd::Zero(v.size());
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXcd di = spectral_dx(g, v, i);
    grad2 += di.cwiseAbs2();
    mixed2 += fd_dy(g, di).cwiseAbs2();
    bgrad += spec.drift_b[i] * di;
    for (int j = 0; j < n; ++j) hess2 += spectral_dxx(g, v, i, j).cwiseAbs2();
  }
  auto nrm = [&](const Eigen::VectorXcd& f, double s) { return lp_norm(g, times_power(g, f, s), p, m); };
  auto nrm_re = [&](const Eigen::VectorXd& f2, double s) {
    return nrm(f2.cwiseSqrt().cast<cplx>(), s);
  };

  SobolevNormReport r;
  r.u = nrm(v, 0.0);
  r.xx = nrm_re(hess2, a1);
  r.x = nrm_re(grad2, 0.5 * a1);
  r.yy = nrm(dyy, a2);
  r.y = nrm(dy, 0.5 * a2);
  r.xy = nrm_re(mixed2, 0.5 * (a1 + a2));
  r.neumann = nrm(dy, a2 - 1.0);
  r.oblique = nrm(bgrad + spec.drift_c * dy, a2 - 1.0);
  return r;
}

void write_field_csv(std::ostream& os, const Field& u) {
  const Grid& g = u.grid();
  const int n = g.dim();
  for (int a = 0; a < n; ++a) os << "ix" << a << ',';
  os << "y,re,im\n";
  char buf[96];
  for (Eigen::Index k = 0; k < g.x_points(); ++k) {
    std::vector<long long> idx(static_cast<size_t>(n));
    Eigen::Index rem = k;
    for (int a = n - 1; a >= 0; --a) {
      idx[static_cast<size_t>(a)] = rem % g.nx();
      rem /= g.nx();
    }
    for (int j = 0; j < g.J(); ++j) {
      for (int a = 0; a < n; ++a) os << idx[static_cast<size_t>(a)] << ',';
      const cplx v = u.at(k, j);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.y()[j], v.real(), v.imag());
      os << buf;
    }
  }
}

void write_field_csv(const std::string& path, const Field& u) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_field_csv(os, u);
}

Field read_field_csv(const std::string& path, GridPtr grid) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(is, line);
  Field u(grid);
  const int n = grid->dim();
  Eigen::Index row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (static_cast<int>(vals.size()) != n + 3) throw std::runtime_error("malformed field CSV row in " + path);
    if (row >= u.values().size()) throw std::runtime_error("field CSV has more rows than the grid");
    u.values()[row++] = cplx(vals[static_cast<size_t>(n + 1)], vals[static_cast<size_t>(n + 2)]);
  }
  if (row != u.values().size()) throw std::runtime_error("field CSV row count does not match grid");
  return u;
}

namespace {

constexpr char kMagic[8] = {'D', 'G', 'F', 'I', 'E', 'L', 'D', '1'};

template <class T>
void put(std::ostream& os, T v) {
  static_assert(sizeof(T) == 8);
  unsigned char b[8];
  std::memcpy(b, &v, 8);
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + 8);
  os.write(reinterpret_cast<const char*>(b), 8);
}

template <class T>
T get(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated field blob");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + 8);
  T v;
  std::memcpy(&v, b, 8);
  return v;
}

}  // namespace

void write_field_blob(const std::string& path, const Field& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  const Grid& g = u.grid();
  os.write(kMagic, 8);
  put<std::int64_t>(os, g.dim());
  put<std::int64_t>(os, g.J());
  put<std::int64_t>(os, g.has_box() ? g.nx() : 0);
  put<double>(os, g.has_box() ? g.box()->length : 0.0);
  put<double>(os, g.y_max());
  put<double>(os, g.grading());
  for (const cplx& v : u.values()) {
    put<double>(os, v.real());
    put<double>(os, v.imag());
  }
}

Field read_field_blob(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("bad field blob header");
  const auto dim = get<std::int64_t>(is);
  const auto J = get<std::int64_t>(is);
  const auto nx = get<std::int64_t>(is);
  const double L = get<double>(is);
  const double ymax = get<double>(is);
  const double grading = get<double>(is);
  std::optional<XBox> box;
  if (dim > 0) box = XBox{L, static_cast<int>(nx), static_cast<int>(dim)};
  GridPtr g = Grid::make_derived(static_cast<int>(J), ymax, grading, box);
  Field u(g);
  for (Eigen::Index i = 0; i < u.values().size(); ++i) {
    const double re = get<double>(is);
    const double im = get<double>(is);
    u.values()[i] = cplx(re, im);
  }
  return u;
}

}  // namespace degpar
