#pragma once

#include <Eigen/Dense>

#include "degpar/grid.hpp"
#include "degpar/params.hpp"

namespace degpar::oracle {

/// (lambda - L) u = f for the model operator on an N = 1 grid, assembled as
/// one sparse system in physical x (dense DFT differentiation matrices
/// Kronecker the 1-d form pieces) and solved by SparseLU.
Field monolithic_resolvent(const ModelParams& model, const GridPtr& grid, cplx lambda, const Field& f);

/// int_a^b y^s dy in closed form.
double power_integral(double a, double b, double s);

}  // namespace degpar::oracle
