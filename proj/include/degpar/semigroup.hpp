#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "degpar/grid.hpp"
#include "degpar/params.hpp"

namespace degpar {

enum class TimeScheme { backward_euler, crank_nicolson };

std::string to_string(TimeScheme scheme);
TimeScheme time_scheme_from_string(const std::string& name);

/// f(t) on the grid; an empty function means no forcing.
using Forcing = std::function<Field(double)>;

struct EvolutionRun {
  TimeScheme scheme = TimeScheme::backward_euler;
  std::vector<double> times;           ///< full time grid t_0 = 0 < ... < t_K
  std::vector<int> snapshot_steps;     ///< indices into `times`
  std::vector<Field> snapshots;
  const Field& final_state() const { return snapshots.back(); }
  /// CSV rows step, t, x-indices, y, Re, Im for every snapshot.
  void write_csv(std::ostream& os) const;
};

/// Uniform time grid with `steps` steps on [0, T].
std::vector<double> uniform_time_grid(double T, int steps);

/// Time stepping of u' = L u + f with L the model operator (scale included).
/// Backward Euler: (I - dt L) u_{k+1} = u_k + dt f_{k+1}. Crank-Nicolson:
/// (I - dt/2 L) u_{k+1} = (I + dt/2 L) u_k + dt/2 (f_k + f_{k+1}).
/// Snapshots are kept every `snapshot_every` steps and at the final time.
EvolutionRun evolve(const Field& u0, const Forcing& forcing, const ModelParams& model, TimeScheme scheme,
                    const std::vector<double>& time_grid, int snapshot_every = 1);

/// The same for a general operator through reduce_to_model.
EvolutionRun evolve_general(const Field& u0, const Forcing& forcing, const OperatorSpec& spec,
                            const SpaceSpec& space, TimeScheme scheme, const std::vector<double>& time_grid,
                            int snapshot_every = 1);

/// cos(k x_1) cos(pi n y / Y) e^{-(k^2 + (pi n / Y)^2) t}: Neumann heat
/// solution on the truncated box for a = 0, alpha = 0, c = 0.
Field heat_closed_form(const GridPtr& grid, int kx, int ny, double t);

struct ContractionReport {
  std::vector<double> times;
  std::vector<double> l2;      ///< max ||u(t)|| / ||u0|| in L^2_{c-alpha}
  std::vector<double> lp;      ///< same in L^p_{c-alpha}
  std::vector<double> linf;    ///< same in L^infinity
  double max_ratio() const;
};

/// Probes ||e^{tL}|| on L^2_{c-alpha}, L^p_{c-alpha} and L^infinity with
/// seeded random fields, by backward Euler with `steps_per_unit` steps per
/// unit time (at least 20 steps per requested time).
ContractionReport contraction_check(const ModelParams& model, const GridPtr& grid, const std::vector<double>& t_set,
                                    double p, int probes, std::uint64_t seed, int steps_per_unit = 400);

struct MaxRegReport {
  double ratio = 0.0;   ///< max over forcings of (||D_t u|| + ||L u||) / ||f|| in L^q(0,T; L^p_m)
  double dt_norm = 0.0;
  double lu_norm = 0.0;
  double f_norm = 0.0;
  std::vector<double> per_forcing;
};

/// Backward Euler from u(0) = 0; D_t u is the scheme's difference quotient,
/// so D_t u - L u = f holds exactly and the check measures the norm split.
/// Forcings: seeded smooth fields with constant, oscillating and switched
/// time profiles, plus a forcing concentrated on the first cell.
MaxRegReport maximal_regularity_check(const ModelParams& model, const GridPtr& grid, double q,
                                      const std::vector<double>& time_grid, int n_forcings, std::uint64_t seed);

}  // namespace degpar
