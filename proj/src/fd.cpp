#include "kirchhoff/fd.hpp"

#include <cmath>

namespace kirchhoff {

namespace {

// Gradient samples at every node: central differences at interior nodes,
// one-sided second-order stencils at the boundary nodes.
void gradient_samples(const std::vector<VectorSample>& u, double dx,
                      std::vector<VectorSample>& g) {
  const std::size_t n = u.size();
  g.resize(n);
  const double inv2 = 1.0 / (2.0 * dx);
  g[0] = inv2 * (-3.0 * u[0] + 4.0 * u[1] + -1.0 * u[2]);
  for (std::size_t j = 1; j + 1 < n; ++j) g[j] = inv2 * (u[j + 1] - u[j - 1]);
  g[n - 1] = inv2 * (3.0 * u[n - 1] + -4.0 * u[n - 2] + u[n - 3]);
}

double trapezoid_norm_sq(const std::vector<VectorSample>& f, double dx) {
  double sum = 0.5 * (f.front().norm_sq() + f.back().norm_sq());
  for (std::size_t j = 1; j + 1 < f.size(); ++j) sum += f[j].norm_sq();
  return sum * dx;
}

void laplacian(const std::vector<VectorSample>& u, double dx, std::vector<VectorSample>& lap) {
  const std::size_t n = u.size();
  lap.assign(n, VectorSample{});
  const double inv = 1.0 / (dx * dx);
  for (std::size_t j = 1; j + 1 < n; ++j)
    lap[j] = inv * (u[j + 1] - 2.0 * u[j] + u[j - 1]);
}

void check_cfl(double dt, double dx, double speed, double safety) {
  if (dt > safety * dx / speed * (1.0 + 1e-12))
    throw StabilityError("fd step violates the CFL constraint dt <= safety*dx/wave_speed");
}

}  // namespace

void FdConfig::validate() const {
  if (num_interior_points < 3) throw ParameterError("need at least three interior points");
  if (!(t_end > 0.0)) throw ParameterError("t_end must be > 0");
  if (!(safety_factor > 0.0 && safety_factor <= 1.0))
    throw ParameterError("safety_factor must lie in (0, 1]");
  if (sample_stride < 1) throw ParameterError("sample_stride must be >= 1");
  if (dt != 0.0 && !(dt > 0.0)) throw ParameterError("dt must be > 0");
}

double fd_gradient_norm_sq(const GridState& state) {
  std::vector<VectorSample> g;
  gradient_samples(state.u, state.x_spacing, g);
  return trapezoid_norm_sq(g, state.x_spacing);
}

GridState fd_step(const GridState& state, const WaveParameters& params, double dt,
                  double safety_factor) {
  const std::size_t n = state.u.size();
  const double dx = state.x_spacing;
  const double delta = params.damping_delta;

  const double s_old = fd_gradient_norm_sq(state);
  check_cfl(dt, dx, std::sqrt(params.a_sq + params.b_coeff * s_old), safety_factor);

  std::vector<VectorSample> lap;
  laplacian(state.u, dx, lap);
  const double c_old = params.a_sq + params.b_coeff * s_old;

  GridState next = state;
  next.time = state.time + dt;
  // Position update with the full acceleration at the old time; endpoints of
  // u and ut are never touched, so they stay exactly zero.
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const VectorSample accel = c_old * lap[j] + -2.0 * delta * state.ut[j];
    next.u[j] = state.u[j] + dt * state.ut[j] + 0.5 * dt * dt * accel;
  }

  const double s_new = fd_gradient_norm_sq(next);
  const double c_new = params.a_sq + params.b_coeff * s_new;
  std::vector<VectorSample> lap_new;
  laplacian(next.u, dx, lap_new);

  // Trapezoidal average of the conservative force; the damping factor is
  // applied implicitly, (1 - delta dt)/(1 + delta dt), which keeps second
  // order and costs nothing in the admissible step size.
  const double damp_num = 1.0 - delta * dt;
  const double damp_den = 1.0 + delta * dt;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const VectorSample mean_force = 0.5 * (c_old * lap[j] + c_new * lap_new[j]);
    next.ut[j] = (1.0 / damp_den) * (damp_num * state.ut[j] + dt * mean_force);
  }

  if (!next.finite()) throw DivergenceError("fd state diverged");
  return next;
}

std::vector<GridState> fd_integrate(const GridState& state0, const WaveParameters& params,
                                    const FdConfig& cfg) {
  state0.validate();
  params.validate();
  cfg.validate();

  const int expected_points = cfg.num_interior_points + 2;
  if (state0.num_points() != expected_points)
    throw ParameterError("initial grid does not match num_interior_points");

  const double dx = state0.x_spacing;
  double dt = cfg.dt;
  if (dt <= 0.0) {
    const double speed0 = std::sqrt(params.a_sq + params.b_coeff * fd_gradient_norm_sq(state0));
    dt = cfg.safety_factor * dx / speed0;
  }

  const long nfull = static_cast<long>(std::floor(cfg.t_end / dt + 1e-9));
  const double remainder = cfg.t_end - static_cast<double>(nfull) * dt;
  const bool partial = remainder > 1e-9 * dt;
  const double t0 = state0.time;

  std::vector<GridState> out;
  out.reserve(static_cast<std::size_t>(nfull / cfg.sample_stride + 2));
  out.push_back(state0);

  GridState s = state0;
  for (long k = 1; k <= nfull; ++k) {
    s = fd_step(s, params, dt, cfg.safety_factor);
    s.time = t0 + static_cast<double>(k) * dt;
    if (k % cfg.sample_stride == 0 || (k == nfull && !partial)) out.push_back(s);
  }
  if (partial) {
    s = fd_step(s, params, remainder, cfg.safety_factor);
    s.time = t0 + cfg.t_end;
    out.push_back(s);
  }
  if (out.size() >= 2 && out[out.size() - 1].time == out[out.size() - 2].time) out.pop_back();
  return out;
}

DiscrepancyReport compare_solvers(const std::vector<ModalState>& modal,
                                  const std::vector<GridState>& fd, double length_l) {
  if (modal.size() != fd.size())
    throw AlignmentError("modal and fd trajectories have different sample counts");

  DiscrepancyReport report;
  report.samples.reserve(modal.size());
  for (std::size_t k = 0; k < modal.size(); ++k) {
    const double tm = modal[k].time;
    const double tf = fd[k].time;
    if (std::abs(tm - tf) > 1e-9 * std::max(1.0, std::abs(tm)))
      throw AlignmentError("modal and fd sample times do not line up");

    const GridState rec = reconstruct(modal[k], length_l, fd[k].num_points());
    DiscrepancySample d;
    d.time = tm;
    std::vector<VectorSample> diff(rec.u.size());
    for (std::size_t j = 0; j < rec.u.size(); ++j) {
      diff[j] = rec.u[j] - fd[k].u[j];
      d.max_diff = std::max(d.max_diff, std::sqrt(diff[j].norm_sq()));
    }
    d.l2_diff = std::sqrt(trapezoid_norm_sq(diff, fd[k].x_spacing));
    report.max_diff = std::max(report.max_diff, d.max_diff);
    report.l2_max = std::max(report.l2_max, d.l2_diff);
    report.samples.push_back(d);
  }
  return report;
}

}  // namespace kirchhoff
