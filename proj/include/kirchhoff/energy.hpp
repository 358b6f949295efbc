#pragma once

#include <vector>

#include "kirchhoff/core.hpp"
#include "kirchhoff/modal.hpp"

namespace kirchhoff {

// ---------------------------------------------------------------------------
// Functionals of the field at one instant:
//   E = 1/2 int (|u_t|^2 + a^2 |u_x|^2) dx + (b/4) (int |u_x|^2 dx)^2
//   G = int (u . u_t + delta |u|^2) dx
//   V = E + epsilon G
// together with the inequality chain that drives the decay certificate.
// Every functional has two routes: closed-form Parseval sums on ModalState
// and quadrature on GridState. The two must agree on reconstructed states;
// that duality is part of the test suite.
// ---------------------------------------------------------------------------

/// The four field integrals every functional is assembled from.
struct FieldIntegrals {
  double kinetic = 0.0; // int |u_t|^2 dx
  double grad_sq = 0.0; // int |u_x|^2 dx
  double amp_sq = 0.0;  // int |u|^2 dx
  double cross = 0.0;   // int u . u_t dx
};

/// Parseval route: kinetic = (l/2) sum |b_n'|^2, grad_sq = (pi^2/2l) sum n^2 |b_n|^2,
/// amp_sq = (l/2) sum |b_n|^2, cross = (l/2) sum b_n . b_n'.
FieldIntegrals field_integrals(const ModalState& state, double length_l);

/// Quadrature route: trapezoid rule over the nodes; the gradient samples come
/// from fourth-order difference stencils so the quadrature error, not the
/// differentiation error, dominates.
FieldIntegrals field_integrals(const GridState& state);

double energy(const FieldIntegrals& f, const WaveParameters& params);
double energy(const ModalState& state, const WaveParameters& params);
double energy(const GridState& state, const WaveParameters& params);

/// E(0) evaluated directly from the initial profiles by sampling them on a
/// fine grid (num_points nodes) and running the quadrature route.
double initial_energy(const Profile& u0, const Profile& u1, const WaveParameters& params,
                      int num_points = 2049);

double lyapunov_G(const FieldIntegrals& f, const WaveParameters& params);
double lyapunov_G(const ModalState& state, const WaveParameters& params);
double lyapunov_G(const GridState& state, const WaveParameters& params);

/// V = E + epsilon G. epsilon = 0 degenerates to V = E, which is handy for
/// undamped conservation runs; negative epsilon is rejected.
double lyapunov_V(const FieldIntegrals& f, const WaveParameters& params, double epsilon);
double lyapunov_V(const ModalState& state, const WaveParameters& params, double epsilon);
double lyapunov_V(const GridState& state, const WaveParameters& params, double epsilon);

/// Raw (absolute) slacks of the inequality chain; each is nonnegative exactly
/// when its inequality holds at the sampled state:
///   scheefer    = (l^2/pi^2) int|u_x|^2 - int|u|^2
///   schwarz     = (l/(pi a)) E - |int u.u_t|
///   g_upper     = mu0 E - |G|,      mu0 = (l/(pi a)) (1 + 2 delta l/(pi a))
///   g_lower     = G + (l/(pi a)) E
///   sandwich_lo = V - (1 - epsilon l/(pi a)) E
///   sandwich_hi = (1 + epsilon mu0) E - V
///   dg_bound    = (-2E + 2 int|u_t|^2) - (int|u_t|^2 - a^2 S - b S^2)
/// The last entry compares the upper bound used by the decay proof with the
/// exact instantaneous value of dG/dt along the dynamics; the difference is
/// (b/2) S^2, so it is nonnegative for every admissible state.
struct InequalityMargins {
  double scheefer = 0.0;
  double schwarz = 0.0;
  double g_upper = 0.0;
  double g_lower = 0.0;
  double sandwich_lo = 0.0;
  double sandwich_hi = 0.0;
  double dg_bound = 0.0;
};

InequalityMargins inequality_margins(const FieldIntegrals& f, const WaveParameters& params,
                                     double epsilon);
InequalityMargins inequality_margins(const ModalState& state, const WaveParameters& params,
                                     double epsilon);
InequalityMargins inequality_margins(const GridState& state, const WaveParameters& params,
                                     double epsilon);

/// Each slack divided by max(energy_scale, tiny floor): relative slacks stay
/// O(1) as the state decays, which keeps the checks meaningful late in a run.
InequalityMargins relative_margins(const InequalityMargins& m, double energy_scale);

/// Monitoring policy for a trajectory.
struct MonitorConfig {
  double epsilon = 0.0;        // Lyapunov mixing parameter, >= 0
  double rel_tolerance = 1e-10; // allowed relative slack violation

  void validate() const;
};

/// Everything the monitors know about one sample instant.
struct EnergySample {
  double time = 0.0;
  double energy_E = 0.0;
  double lyapunov_G = 0.0;
  double lyapunov_V = 0.0;
  double kinetic = 0.0;
  double grad_sq = 0.0;
  double amp_sq = 0.0;
  double dissipation_residual = 0.0; // 0 at the two endpoint samples
  InequalityMargins margins;          // raw slacks
};

/// Evaluates every functional and margin at each sample and fills the
/// dissipation residual |dE/dt + 2 delta int|u_t|^2| / max(E(0), 1) at
/// interior samples with a three-point derivative that also handles the
/// non-uniform spacing produced by the adaptive integrator.
std::vector<EnergySample> monitor_trajectory(const std::vector<ModalState>& traj,
                                             const WaveParameters& params,
                                             const MonitorConfig& cfg);
std::vector<EnergySample> monitor_trajectory(const std::vector<GridState>& traj,
                                             const WaveParameters& params,
                                             const MonitorConfig& cfg);

/// Central-difference check of dE/dt = -2 delta int|u_t|^2 on a uniformly
/// sampled window. Returns |(E(t+h)-E(t-h))/2h + 2 delta kinetic(t)| divided
/// by max(E at the first sample, 1), one value per interior sample.
/// Throws AlignmentError when the sampling interval is not uniform.
std::vector<double> dissipation_residual(const std::vector<EnergySample>& window,
                                         const WaveParameters& params);

/// Central-difference check of dG/dt <= -2E + 2 int|u_t|^2 on a uniformly
/// sampled window. Returns the slack (right side minus the differenced left
/// side) divided by max(E at the first sample, 1), one value per interior
/// sample; nonnegative up to differencing error when the bound holds.
std::vector<double> dG_bound_check(const std::vector<EnergySample>& window,
                                   const WaveParameters& params);

}  // namespace kirchhoff
