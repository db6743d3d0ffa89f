#pragma once

#include <Eigen/Dense>

#include "degpar/grid.hpp"

namespace degpar {

/// In-place DFT over the x-axes of a field laid out on `grid`, batched over
/// the y-nodes. Forward is unnormalized (sign -1); inverse divides by the
/// number of x-points. No-op for grids without an x-box.
void fft_x_forward(const Grid& grid, Eigen::VectorXcd& data);
void fft_x_inverse(const Grid& grid, Eigen::VectorXcd& data);

/// Spectral derivative along x-axis `axis` (multiplies mode xi by i xi_axis,
/// Nyquist included, so two first derivatives equal the second derivative).
Eigen::VectorXcd spectral_dx(const Grid& grid, const Eigen::VectorXcd& data, int axis);
/// Spectral second derivative D_{x_i} D_{x_j}.
Eigen::VectorXcd spectral_dxx(const Grid& grid, const Eigen::VectorXcd& data, int i, int j);

}  // namespace degpar
