#pragma once

#include <vector>

#include "kirchhoff/core.hpp"
#include "kirchhoff/modal.hpp"

namespace kirchhoff {

struct FdConfig {
  int num_interior_points = 0;
  double dt = 0.0;           // <= 0 selects safety_factor * dx / wave speed at t = 0
  double t_end = 0.0;
  double safety_factor = 0.9; // fraction of the CFL limit, in (0, 1]
  int sample_stride = 1;

  void validate() const;
};

/// Kirchhoff scalar int |u_x|^2 dx on the grid: trapezoid rule over gradient
/// samples (central differences inside, one-sided second-order stencils at
/// the two ends). This is the solver's own quadrature, independent of the
/// spectral machinery.
double fd_gradient_norm_sq(const GridState& state);

/// One explicit step of the grid solver: velocity-Verlet splitting of the
/// conservative force (a^2 + b S) u_xx with the damping factor folded in
/// implicitly, so the admissible dt is the undamped CFL limit. The CFL
/// constraint dt <= safety * dx / sqrt(a^2 + b S) is re-checked against the
/// current S because the effective wave speed grows with amplitude.
/// Boundary values stay exactly zero.
GridState fd_step(const GridState& state, const WaveParameters& params, double dt,
                  double safety_factor = 1.0);

std::vector<GridState> fd_integrate(const GridState& state0, const WaveParameters& params,
                                    const FdConfig& cfg);

struct DiscrepancySample {
  double time = 0.0;
  double max_diff = 0.0; // max over nodes of |u_modal - u_fd|
  double l2_diff = 0.0;  // sqrt of trapezoid integral of |u_modal - u_fd|^2
};

struct DiscrepancyReport {
  std::vector<DiscrepancySample> samples;
  double max_diff = 0.0; // summary max over all sample times
  double l2_max = 0.0;
};

/// Per-sample distance between a modal trajectory (reconstructed on the fd
/// grid) and an fd trajectory computed from the same parameters and initial
/// data. Sample times must agree; otherwise AlignmentError.
DiscrepancyReport compare_solvers(const std::vector<ModalState>& modal,
                                  const std::vector<GridState>& fd, double length_l);

}  // namespace kirchhoff
