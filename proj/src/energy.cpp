#include "kirchhoff/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kirchhoff {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTinyFloor = 1e-300;

double trapezoid_sum(const std::vector<double>& f, double dx) {
  double sum = 0.5 * (f.front() + f.back());
  for (std::size_t j = 1; j + 1 < f.size(); ++j) sum += f[j];
  return sum * dx;
}

// Fourth-order gradient samples at every node. Interior nodes use the
// standard five-point stencil; the outermost two nodes on each side use
// one-sided/skewed five-point stencils of the same order. Grids with fewer
// than five nodes fall back to second-order differences.
std::vector<VectorSample> gradient_samples_4th(const std::vector<VectorSample>& u, double dx) {
  const std::size_t n = u.size();
  std::vector<VectorSample> g(n);
  if (n < 5) {
    const double inv2 = 1.0 / (2.0 * dx);
    g[0] = inv2 * (-3.0 * u[0] + 4.0 * u[1] + -1.0 * u[2]);
    for (std::size_t j = 1; j + 1 < n; ++j) g[j] = inv2 * (u[j + 1] - u[j - 1]);
    g[n - 1] = inv2 * (3.0 * u[n - 1] + -4.0 * u[n - 2] + u[n - 3]);
    return g;
  }
  const double inv12 = 1.0 / (12.0 * dx);
  g[0] = inv12 * (-25.0 * u[0] + 48.0 * u[1] + -36.0 * u[2] + 16.0 * u[3] + -3.0 * u[4]);
  g[1] = inv12 * (-3.0 * u[0] + -10.0 * u[1] + 18.0 * u[2] + -6.0 * u[3] + u[4]);
  for (std::size_t j = 2; j + 2 < n; ++j)
    g[j] = inv12 * (u[j - 2] + -8.0 * u[j - 1] + 8.0 * u[j + 1] + -1.0 * u[j + 2]);
  g[n - 2] = inv12 * (3.0 * u[n - 1] + 10.0 * u[n - 2] + -18.0 * u[n - 3] + 6.0 * u[n - 4] +
                      -1.0 * u[n - 5]);
  g[n - 1] = inv12 * (25.0 * u[n - 1] + -48.0 * u[n - 2] + 36.0 * u[n - 3] + -16.0 * u[n - 4] +
                      3.0 * u[n - 5]);
  return g;
}

// Three-point first derivative at the middle of (t0,f0), (t1,f1), (t2,f2);
// second order even when the two intervals differ.
double three_point_derivative(double t0, double f0, double t1, double f1, double t2, double f2) {
  const double h0 = t1 - t0;
  const double h1 = t2 - t1;
  return (h0 * h0 * f2 - h1 * h1 * f0 + (h1 * h1 - h0 * h0) * f1) / (h0 * h1 * (h0 + h1));
}

double mu0_of(const WaveParameters& params) {
  const double ratio = params.length_l / (kPi * std::sqrt(params.a_sq));
  return ratio * (1.0 + 2.0 * params.damping_delta * ratio);
}

void check_epsilon(double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw ParameterError("epsilon must be finite and >= 0");
}

void check_uniform_window(const std::vector<EnergySample>& window) {
  if (window.size() < 3)
    throw AlignmentError("need at least three samples for a central difference");
  const double h = window[1].time - window[0].time;
  if (!(h > 0.0)) throw AlignmentError("sample times must increase");
  for (std::size_t k = 2; k < window.size(); ++k) {
    const double hk = window[k].time - window[k - 1].time;
    if (std::abs(hk - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw AlignmentError("dissipation checks require uniform sampling");
  }
}

template <class StateVec>
std::vector<EnergySample> monitor_impl(const StateVec& traj, const WaveParameters& params,
                                       const MonitorConfig& cfg,
                                       FieldIntegrals (*integrals)(const typename StateVec::value_type&,
                                                                   double)) {
  params.validate();
  cfg.validate();
  if (traj.empty()) return {};

  std::vector<EnergySample> out;
  out.reserve(traj.size());
  for (const auto& state : traj) {
    const FieldIntegrals f = integrals(state, params.length_l);
    EnergySample s;
    s.time = state.time;
    s.kinetic = f.kinetic;
    s.grad_sq = f.grad_sq;
    s.amp_sq = f.amp_sq;
    s.energy_E = energy(f, params);
    s.lyapunov_G = lyapunov_G(f, params);
    s.lyapunov_V = s.energy_E + cfg.epsilon * s.lyapunov_G;
    s.margins = inequality_margins(f, params, cfg.epsilon);
    out.push_back(s);
  }

  const double scale = std::max(out.front().energy_E, 1.0);
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    const double dEdt =
        three_point_derivative(out[k - 1].time, out[k - 1].energy_E, out[k].time,
                               out[k].energy_E, out[k + 1].time, out[k + 1].energy_E);
    out[k].dissipation_residual =
        std::abs(dEdt + 2.0 * params.damping_delta * out[k].kinetic) / scale;
  }
  return out;
}

FieldIntegrals grid_integrals_adapter(const GridState& state, double /*length_l*/) {
  return field_integrals(state);
}

}  // namespace

FieldIntegrals field_integrals(const ModalState& state, double length_l) {
  if (!(length_l > 0.0)) throw ParameterError("length_l must be > 0");
  FieldIntegrals f;
  double sum_b = 0.0, sum_bdot = 0.0, sum_n2b = 0.0, sum_cross = 0.0;
  for (int n = 1; n <= state.num_modes(); ++n) {
    const VectorSample& b = state.coeff[static_cast<std::size_t>(n - 1)];
    const VectorSample& bd = state.coeff_dot[static_cast<std::size_t>(n - 1)];
    sum_b += b.norm_sq();
    sum_bdot += bd.norm_sq();
    sum_n2b += static_cast<double>(n) * static_cast<double>(n) * b.norm_sq();
    sum_cross += dot(b, bd);
  }
  const double half_l = 0.5 * length_l;
  f.kinetic = half_l * sum_bdot;
  f.amp_sq = half_l * sum_b;
  f.cross = half_l * sum_cross;
  f.grad_sq = kPi * kPi / (2.0 * length_l) * sum_n2b;
  return f;
}

FieldIntegrals field_integrals(const GridState& state) {
  const std::size_t n = state.u.size();
  if (n < 3) throw ParameterError("grid needs at least three nodes");
  const double dx = state.x_spacing;
  const std::vector<VectorSample> g = gradient_samples_4th(state.u, dx);

  std::vector<double> kin(n), amp(n), grd(n), crs(n);
  for (std::size_t j = 0; j < n; ++j) {
    kin[j] = state.ut[j].norm_sq();
    amp[j] = state.u[j].norm_sq();
    grd[j] = g[j].norm_sq();
    crs[j] = dot(state.u[j], state.ut[j]);
  }
  FieldIntegrals f;
  f.kinetic = trapezoid_sum(kin, dx);
  f.amp_sq = trapezoid_sum(amp, dx);
  f.grad_sq = trapezoid_sum(grd, dx);
  f.cross = trapezoid_sum(crs, dx);
  return f;
}

double energy(const FieldIntegrals& f, const WaveParameters& params) {
  return 0.5 * (f.kinetic + params.a_sq * f.grad_sq) +
         0.25 * params.b_coeff * f.grad_sq * f.grad_sq;
}

double energy(const ModalState& state, const WaveParameters& params) {
  return energy(field_integrals(state, params.length_l), params);
}

double energy(const GridState& state, const WaveParameters& params) {
  return energy(field_integrals(state), params);
}

double initial_energy(const Profile& u0, const Profile& u1, const WaveParameters& params,
                      int num_points) {
  params.validate();
  if (num_points < 5) throw ParameterError("initial_energy needs at least five grid points");
  const GridState g = make_grid_state(u0, u1, params.length_l, num_points);
  return energy(g, params);
}

double lyapunov_G(const FieldIntegrals& f, const WaveParameters& params) {
  return f.cross + params.damping_delta * f.amp_sq;
}

double lyapunov_G(const ModalState& state, const WaveParameters& params) {
  return lyapunov_G(field_integrals(state, params.length_l), params);
}

double lyapunov_G(const GridState& state, const WaveParameters& params) {
  return lyapunov_G(field_integrals(state), params);
}

double lyapunov_V(const FieldIntegrals& f, const WaveParameters& params, double epsilon) {
  check_epsilon(epsilon);
  return energy(f, params) + epsilon * lyapunov_G(f, params);
}

double lyapunov_V(const ModalState& state, const WaveParameters& params, double epsilon) {
  return lyapunov_V(field_integrals(state, params.length_l), params, epsilon);
}

double lyapunov_V(const GridState& state, const WaveParameters& params, double epsilon) {
  return lyapunov_V(field_integrals(state), params, epsilon);
}

InequalityMargins inequality_margins(const FieldIntegrals& f, const WaveParameters& params,
                                     double epsilon) {
  check_epsilon(epsilon);
  const double l = params.length_l;
  const double a = std::sqrt(params.a_sq);
  const double l_over_pia = l / (kPi * a);
  const double mu0 = mu0_of(params);

  const double E = energy(f, params);
  const double G = lyapunov_G(f, params);
  const double V = E + epsilon * G;
  const double S = f.grad_sq;

  InequalityMargins m;
  m.scheefer = (l * l) / (kPi * kPi) * f.grad_sq - f.amp_sq;
  m.schwarz = l_over_pia * E - std::abs(f.cross);
  m.g_upper = mu0 * E - std::abs(G);
  m.g_lower = G + l_over_pia * E;
  m.sandwich_lo = V - (1.0 - epsilon * l_over_pia) * E;
  m.sandwich_hi = (1.0 + epsilon * mu0) * E - V;
  // Exact dG/dt along the dynamics is kinetic - a^2 S - b S^2; the proof
  // bounds it by -2E + 2 kinetic. The slack works out to (b/2) S^2.
  const double dG_exact = f.kinetic - params.a_sq * S - params.b_coeff * S * S;
  m.dg_bound = (-2.0 * E + 2.0 * f.kinetic) - dG_exact;
  return m;
}

InequalityMargins inequality_margins(const ModalState& state, const WaveParameters& params,
                                     double epsilon) {
  return inequality_margins(field_integrals(state, params.length_l), params, epsilon);
}

InequalityMargins inequality_margins(const GridState& state, const WaveParameters& params,
                                     double epsilon) {
  return inequality_margins(field_integrals(state), params, epsilon);
}

InequalityMargins relative_margins(const InequalityMargins& m, double energy_scale) {
  const double inv = 1.0 / std::max(energy_scale, kTinyFloor);
  InequalityMargins r;
  r.scheefer = m.scheefer * inv;
  r.schwarz = m.schwarz * inv;
  r.g_upper = m.g_upper * inv;
  r.g_lower = m.g_lower * inv;
  r.sandwich_lo = m.sandwich_lo * inv;
  r.sandwich_hi = m.sandwich_hi * inv;
  r.dg_bound = m.dg_bound * inv;
  return r;
}

void MonitorConfig::validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw ParameterError("monitor epsilon must be finite and >= 0");
  if (!(rel_tolerance > 0.0)) throw ParameterError("rel_tolerance must be > 0");
}

std::vector<EnergySample> monitor_trajectory(const std::vector<ModalState>& traj,
                                             const WaveParameters& params,
                                             const MonitorConfig& cfg) {
  return monitor_impl(traj, params, cfg, &field_integrals);
}

std::vector<EnergySample> monitor_trajectory(const std::vector<GridState>& traj,
                                             const WaveParameters& params,
                                             const MonitorConfig& cfg) {
  return monitor_impl(traj, params, cfg, &grid_integrals_adapter);
}

std::vector<double> dissipation_residual(const std::vector<EnergySample>& window,
                                         const WaveParameters& params) {
  check_uniform_window(window);
  const double h = window[1].time - window[0].time;
  const double scale = std::max(window.front().energy_E, 1.0);
  std::vector<double> out;
  out.reserve(window.size() - 2);
  for (std::size_t k = 1; k + 1 < window.size(); ++k) {
    const double dEdt = (window[k + 1].energy_E - window[k - 1].energy_E) / (2.0 * h);
    out.push_back(std::abs(dEdt + 2.0 * params.damping_delta * window[k].kinetic) / scale);
  }
  return out;
}

std::vector<double> dG_bound_check(const std::vector<EnergySample>& window,
                                   const WaveParameters& params) {
  (void)params;
  check_uniform_window(window);
  const double h = window[1].time - window[0].time;
  const double scale = std::max(window.front().energy_E, 1.0);
  std::vector<double> out;
  out.reserve(window.size() - 2);
  for (std::size_t k = 1; k + 1 < window.size(); ++k) {
    const double dGdt = (window[k + 1].lyapunov_G - window[k - 1].lyapunov_G) / (2.0 * h);
    const double bound = -2.0 * window[k].energy_E + 2.0 * window[k].kinetic;
    out.push_back((bound - dGdt) / scale);
  }
  return out;
}

}  // namespace kirchhoff
