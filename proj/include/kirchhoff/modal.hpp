#pragma once

#include <vector>

#include "kirchhoff/core.hpp"

namespace kirchhoff {

/// Time derivative of a ModalState: (db_n/dt, d2b_n/dt2) per mode.
struct ModalDerivative {
  std::vector<VectorSample> coeff_dot;
  std::vector<VectorSample> coeff_ddot;
};

enum class Scheme {
  rk4,  // classic 4-stage explicit Runge-Kutta, fixed step
  rk45, // Dormand-Prince 5(4) embedded pair, adaptive step
};

struct IntegratorConfig {
  Scheme scheme = Scheme::rk4;
  double dt = 0.0;       // fixed-step size; <= 0 selects the frequency-based default
  double rel_tol = 1e-8; // adaptive: relative local-error tolerance
  double abs_tol = 1e-10;// adaptive: absolute local-error tolerance
  double t_end = 0.0;
  int sample_stride = 1; // record every k-th step (plus the final one)

  void validate() const;
};

/// Sine-series coefficients of initial displacement and velocity profiles:
///   b_n(0) = (2/l) int_0^l u0(x) sin(n pi x / l) dx
/// evaluated by composite Simpson quadrature. quadrature_points is raised to
/// at least 8 N + 1 (and made odd) so the highest retained mode is resolved.
/// Throws BoundaryError when the profiles do not vanish at the endpoints.
ModalState project_initial_data(const Profile& u0, const Profile& u1, double length_l,
                                int num_modes, int quadrature_points = 0);

/// Same projection from sampled data; uses the grid's own nodes (Simpson when
/// the point count is odd, trapezoid otherwise).
ModalState project_initial_data(const GridState& initial, int num_modes);

/// The nonlocal Kirchhoff scalar S = int_0^l |u_x|^2 dx, via Parseval:
///   S = (pi^2 / 2l) sum_n n^2 |b_n|^2.
double gradient_norm_sq(const ModalState& state, double length_l);

/// Galerkin right-hand side: every mode feels the same scalar S, so the modes
/// couple only through it:
///   b_n'' = -2 delta b_n' - (a^2 + b S) (n pi / l)^2 b_n.
ModalDerivative modal_rhs(const ModalState& state, const WaveParameters& params);

/// Fixed-step default: a tenth of the period scale of the fastest retained
/// mode at the initial amplitude, dt = 0.1 (l / N pi) / sqrt(a^2 + b S0).
double default_time_step(const ModalState& state0, const WaveParameters& params);

/// Integrates the modal system from state0 to cfg.t_end and returns the
/// sampled trajectory; the first element equals state0. The Kirchhoff scalar
/// is re-evaluated from the stage state inside every Runge-Kutta stage.
/// Throws StabilityError on adaptive step-size underflow and DivergenceError
/// if the state stops being finite.
std::vector<ModalState> integrate(const ModalState& state0, const WaveParameters& params,
                                  const IntegratorConfig& cfg);

/// Evaluates the sine series on a uniform grid; endpoints are exact zeros.
GridState reconstruct(const ModalState& state, double length_l, int num_points);

}  // namespace kirchhoff
