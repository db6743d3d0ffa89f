#include "degpar/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace degpar {

namespace {

using PlanKey = std::tuple<int, int, int, int>;  // dim, nx, J, sign

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan get_plan(int dim, int nx, int J, int sign) {
  static std::map<PlanKey, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  const PlanKey key{dim, nx, J, sign};
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  std::vector<int> n(static_cast<size_t>(dim), nx);
  Eigen::Index total = J;
  for (int d = 0; d < dim; ++d) total *= nx;
  // Planning with FFTW_ESTIMATE does not touch the arrays.
  std::vector<fftw_complex> scratch(static_cast<size_t>(total));
  fftw_plan plan = fftw_plan_many_dft(dim, n.data(), J, scratch.data(), nullptr, J, 1, scratch.data(), nullptr, J, 1,
                                      sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan == nullptr) throw std::runtime_error("FFTW plan creation failed");
  cache.emplace(key, plan);
  return plan;
}

void execute(const Grid& grid, Eigen::VectorXcd& data, int sign) {
  if (!grid.has_box()) return;
  if (data.size() != grid.size()) throw std::invalid_argument("fft: data size does not match grid");
  fftw_plan plan = get_plan(grid.dim(), grid.nx(), grid.J(), sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace

void fft_x_forward(const Grid& grid, Eigen::VectorXcd& data) { execute(grid, data, FFTW_FORWARD); }

void fft_x_inverse(const Grid& grid, Eigen::VectorXcd& data) {
  execute(grid, data, FFTW_BACKWARD);
  if (grid.has_box()) data /= static_cast<double>(grid.x_points());
}

Eigen::VectorXcd spectral_dx(const Grid& grid, const Eigen::VectorXcd& data, int axis) {
  if (!grid.has_box() || axis < 0 || axis >= grid.dim()) throw std::invalid_argument("spectral_dx: bad axis");
  Eigen::VectorXcd hat = data;
  fft_x_forward(grid, hat);
  const int J = grid.J();
  for (Eigen::Index k = 0; k < grid.x_points(); ++k) {
    const double xi = grid.xi(k)(axis);
    hat.segment(k * J, J) *= cplx(0.0, xi);
  }
  fft_x_inverse(grid, hat);
  return hat;
}

Eigen::VectorXcd spectral_dxx(const Grid& grid, const Eigen::VectorXcd& data, int i, int j) {
  if (!grid.has_box() || i < 0 || j < 0 || i >= grid.dim() || j >= grid.dim())
    throw std::invalid_argument("spectral_dxx: bad axis");
  Eigen::VectorXcd hat = data;
  fft_x_forward(grid, hat);
  const int J = grid.J();
  for (Eigen::Index k = 0; k < grid.x_points(); ++k) {
    const Eigen::VectorXd xi = grid.xi(k);
    hat.segment(k * J, J) *= -xi(i) * xi(j);
  }
  fft_x_inverse(grid, hat);
  return hat;
}

}  // namespace degpar
