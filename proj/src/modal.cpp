#include "kirchhoff/modal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kirchhoff {

namespace {

constexpr double kPi = std::numbers::pi;

// Flat ODE vector layout: [b_1.v, b_1.w, ..., b_N.v, b_N.w,
//                          bdot_1.v, ..., bdot_N.w], size 4N.
std::vector<double> flatten(const ModalState& s) {
  const std::size_t n = s.coeff.size();
  std::vector<double> y(4 * n);
  for (std::size_t i = 0; i < n; ++i) {
    y[2 * i] = s.coeff[i].v;
    y[2 * i + 1] = s.coeff[i].w;
    y[2 * n + 2 * i] = s.coeff_dot[i].v;
    y[2 * n + 2 * i + 1] = s.coeff_dot[i].w;
  }
  return y;
}

ModalState unflatten(const std::vector<double>& y, double time) {
  const std::size_t n = y.size() / 4;
  ModalState s;
  s.time = time;
  s.coeff.resize(n);
  s.coeff_dot.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.coeff[i] = {y[2 * i], y[2 * i + 1]};
    s.coeff_dot[i] = {y[2 * n + 2 * i], y[2 * n + 2 * i + 1]};
  }
  return s;
}

// RHS on the flat layout. S is computed from the supplied stage vector, so
// adaptive and fixed schemes both treat the nonlocal coupling fully coupled.
void rhs_flat(const std::vector<double>& y, const WaveParameters& p, std::vector<double>& dy) {
  const std::size_t n = y.size() / 4;
  const double l = p.length_l;

  double weighted = 0.0; // sum n^2 |b_n|^2
  for (std::size_t i = 0; i < n; ++i) {
    const double nn = static_cast<double>(i + 1);
    weighted += nn * nn * (y[2 * i] * y[2 * i] + y[2 * i + 1] * y[2 * i + 1]);
  }
  const double S = kPi * kPi / (2.0 * l) * weighted;
  const double stiffness = p.a_sq + p.b_coeff * S;
  const double two_delta = 2.0 * p.damping_delta;

  dy.resize(4 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double omega_sq = stiffness * std::pow((i + 1) * kPi / l, 2);
    dy[2 * i] = y[2 * n + 2 * i];
    dy[2 * i + 1] = y[2 * n + 2 * i + 1];
    dy[2 * n + 2 * i] = -two_delta * y[2 * n + 2 * i] - omega_sq * y[2 * i];
    dy[2 * n + 2 * i + 1] = -two_delta * y[2 * n + 2 * i + 1] - omega_sq * y[2 * i + 1];
  }
}

bool all_finite(const std::vector<double>& y) {
  return std::all_of(y.begin(), y.end(), [](double x) { return std::isfinite(x); });
}

// Composite Simpson of a scalar integrand sampled on an odd uniform grid.
double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  double sum = f.front() + f.back();
  for (std::size_t j = 1; j + 1 < n; ++j) sum += (j % 2 == 1 ? 4.0 : 2.0) * f[j];
  return sum * h / 3.0;
}

double trapezoid(const std::vector<double>& f, double h) {
  double sum = 0.5 * (f.front() + f.back());
  for (std::size_t j = 1; j + 1 < f.size(); ++j) sum += f[j];
  return sum * h;
}

// Sine transform of one sampled component field: (2/l) int f(x) sin(n pi x/l).
VectorSample sine_coefficient(const std::vector<VectorSample>& samples, double length_l, int mode) {
  const std::size_t m = samples.size();
  const double h = length_l / static_cast<double>(m - 1);
  std::vector<double> fv(m), fw(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double x = (j + 1 == m) ? length_l : static_cast<double>(j) * h;
    const double s = std::sin(mode * kPi * x / length_l);
    fv[j] = samples[j].v * s;
    fw[j] = samples[j].w * s;
  }
  const bool odd_count = (m % 2 == 1);
  const double iv = odd_count ? simpson(fv, h) : trapezoid(fv, h);
  const double iw = odd_count ? simpson(fw, h) : trapezoid(fw, h);
  return {2.0 / length_l * iv, 2.0 / length_l * iw};
}

void check_boundary(const std::vector<VectorSample>& samples, const char* what) {
  double scale = 0.0;
  for (const auto& s : samples) scale = std::max(scale, std::sqrt(s.norm_sq()));
  const double tol = 1e-9 * scale + 1e-300;
  if (std::sqrt(samples.front().norm_sq()) > tol || std::sqrt(samples.back().norm_sq()) > tol)
    throw BoundaryError(std::string(what) + " does not vanish at the string ends");
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(t_end > 0.0)) throw ParameterError("t_end must be > 0");
  if (sample_stride < 1) throw ParameterError("sample_stride must be >= 1");
  if (scheme == Scheme::rk45 && !(rel_tol > 0.0 && abs_tol > 0.0))
    throw ParameterError("adaptive tolerances must be > 0");
  if (scheme == Scheme::rk4 && dt != 0.0 && !(dt > 0.0))
    throw ParameterError("dt must be > 0");
}

ModalState project_initial_data(const Profile& u0, const Profile& u1, double length_l,
                                int num_modes, int quadrature_points) {
  if (num_modes < 1) throw ParameterError("num_modes must be >= 1");
  int q = std::max(quadrature_points, 8 * num_modes + 1);
  if (q % 2 == 0) ++q; // Simpson needs an odd point count

  const auto s0 = sample_function_on_grid(u0, length_l, q);
  const auto s1 = sample_function_on_grid(u1, length_l, q);
  check_boundary(s0, "initial displacement");
  check_boundary(s1, "initial velocity");

  ModalState state = ModalState::zero(num_modes);
  for (int n = 1; n <= num_modes; ++n) {
    state.coeff[static_cast<std::size_t>(n - 1)] = sine_coefficient(s0, length_l, n);
    state.coeff_dot[static_cast<std::size_t>(n - 1)] = sine_coefficient(s1, length_l, n);
  }
  return state;
}

ModalState project_initial_data(const GridState& initial, int num_modes) {
  if (num_modes < 1) throw ParameterError("num_modes must be >= 1");
  initial.validate();
  const double l = initial.length();
  ModalState state = ModalState::zero(num_modes, initial.time);
  for (int n = 1; n <= num_modes; ++n) {
    state.coeff[static_cast<std::size_t>(n - 1)] = sine_coefficient(initial.u, l, n);
    state.coeff_dot[static_cast<std::size_t>(n - 1)] = sine_coefficient(initial.ut, l, n);
  }
  return state;
}

double gradient_norm_sq(const ModalState& state, double length_l) {
  double weighted = 0.0;
  for (std::size_t i = 0; i < state.coeff.size(); ++i) {
    const double nn = static_cast<double>(i + 1);
    weighted += nn * nn * state.coeff[i].norm_sq();
  }
  return kPi * kPi / (2.0 * length_l) * weighted;
}

ModalDerivative modal_rhs(const ModalState& state, const WaveParameters& params) {
  state.validate();
  params.validate();
  const double S = gradient_norm_sq(state, params.length_l);
  const double stiffness = params.a_sq + params.b_coeff * S;

  ModalDerivative d;
  d.coeff_dot = state.coeff_dot;
  d.coeff_ddot.resize(state.coeff.size());
  for (std::size_t i = 0; i < state.coeff.size(); ++i) {
    const double omega_sq = stiffness * std::pow((i + 1) * kPi / params.length_l, 2);
    d.coeff_ddot[i] = -2.0 * params.damping_delta * state.coeff_dot[i] + -omega_sq * state.coeff[i];
  }
  return d;
}

double default_time_step(const ModalState& state0, const WaveParameters& params) {
  const double S0 = gradient_norm_sq(state0, params.length_l);
  const double speed = std::sqrt(params.a_sq + params.b_coeff * S0);
  const double n = static_cast<double>(state0.num_modes());
  return 0.1 * (params.length_l / (n * kPi)) / speed;
}

namespace {

// Dormand-Prince 5(4) tableau. The 5th-order solution is propagated; the
// embedded 4th-order difference drives the step controller. FSAL: the last
// stage of an accepted step is the first stage of the next.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,      0.0,        500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784, 11.0 / 84,  0.0};
constexpr double kB4[7] = {5179.0 / 57600,     0.0,          7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

void rk4_step(std::vector<double>& y, double h, const WaveParameters& p,
              std::vector<double>& k1, std::vector<double>& k2, std::vector<double>& k3,
              std::vector<double>& k4, std::vector<double>& tmp) {
  const std::size_t m = y.size();
  rhs_flat(y, p, k1);
  tmp.resize(m);
  for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  rhs_flat(tmp, p, k2);
  for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  rhs_flat(tmp, p, k3);
  for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * k3[i];
  rhs_flat(tmp, p, k4);
  for (std::size_t i = 0; i < m; ++i)
    y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

std::vector<ModalState> integrate_rk4(const ModalState& state0, const WaveParameters& p,
                                      const IntegratorConfig& cfg) {
  const double dt = cfg.dt > 0.0 ? cfg.dt : default_time_step(state0, p);
  const double t0 = state0.time;
  const double span = cfg.t_end;
  // Whole steps of dt, then one shortened step onto t0 + t_end if needed.
  long nfull = static_cast<long>(std::floor(span / dt + 1e-9));
  const double remainder = span - static_cast<double>(nfull) * dt;
  const bool partial = remainder > 1e-9 * dt;

  std::vector<ModalState> out;
  out.reserve(static_cast<std::size_t>(nfull / cfg.sample_stride + 2));
  out.push_back(state0);

  std::vector<double> y = flatten(state0);
  std::vector<double> k1, k2, k3, k4, tmp;
  for (long k = 1; k <= nfull; ++k) {
    rk4_step(y, dt, p, k1, k2, k3, k4, tmp);
    if (k % cfg.sample_stride == 0 || (k == nfull && !partial)) {
      if (!all_finite(y)) throw DivergenceError("modal state diverged during integration");
      out.push_back(unflatten(y, t0 + static_cast<double>(k) * dt));
    }
  }
  if (partial) {
    rk4_step(y, remainder, p, k1, k2, k3, k4, tmp);
    if (!all_finite(y)) throw DivergenceError("modal state diverged during integration");
    out.push_back(unflatten(y, t0 + span));
  }
  // The final step can satisfy both record conditions; keep one copy.
  if (out.size() >= 2 && out[out.size() - 1].time == out[out.size() - 2].time) out.pop_back();
  return out;
}

std::vector<ModalState> integrate_rk45(const ModalState& state0, const WaveParameters& p,
                                       const IntegratorConfig& cfg) {
  const double t0 = state0.time;
  const double t_final = t0 + cfg.t_end;
  const std::size_t m = state0.coeff.size() * 4;

  std::vector<ModalState> out;
  out.push_back(state0);

  std::vector<double> y = flatten(state0);
  std::vector<double> k[7];
  for (auto& ki : k) ki.resize(m);
  std::vector<double> ytmp(m), y5(m), y4(m);

  rhs_flat(y, p, k[0]);

  // Initial step from the default frequency heuristic, clipped to the span.
  double h = std::min(default_time_step(state0, p), cfg.t_end);
  double t = t0;
  long accepted = 0;
  bool first_stage_fresh = true;

  while (t < t_final - 1e-12 * std::max(1.0, std::abs(t_final))) {
    h = std::min(h, t_final - t);
    if (h < 1e-14 * std::max(1.0, std::abs(t)))
      throw StabilityError("adaptive step size underflow (system too stiff at this tolerance)");

    if (!first_stage_fresh) rhs_flat(y, p, k[0]);
    for (int s = 1; s < 7; ++s) {
      for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int j = 0; j < s; ++j) acc += kA[s][j] * k[j][i];
        ytmp[i] = y[i] + h * acc;
      }
      rhs_flat(ytmp, p, k[s]);
    }
    double err_sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double acc5 = 0.0, acc4 = 0.0;
      for (int j = 0; j < 7; ++j) {
        acc5 += kB5[j] * k[j][i];
        acc4 += kB4[j] * k[j][i];
      }
      y5[i] = y[i] + h * acc5;
      y4[i] = y[i] + h * acc4;
      const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      const double e = (y5[i] - y4[i]) / scale;
      err_sq += e * e;
    }
    const double err = std::sqrt(err_sq / static_cast<double>(m));

    if (err <= 1.0) {
      t += h;
      y.swap(y5);
      k[0].swap(k[6]); // FSAL: stage 7 of the accepted step is next step's stage 1
      first_stage_fresh = true;
      ++accepted;
      if (!all_finite(y)) throw DivergenceError("modal state diverged during integration");
      const bool at_end = t >= t_final - 1e-12 * std::max(1.0, std::abs(t_final));
      if (accepted % cfg.sample_stride == 0 || at_end) out.push_back(unflatten(y, at_end ? t_final : t));
    } else {
      first_stage_fresh = false; // k[0] still matches y
    }
    const double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    h *= std::clamp(factor, 0.2, 5.0);
  }
  if (out.size() >= 2 && out[out.size() - 1].time == out[out.size() - 2].time) out.pop_back();
  return out;
}

}  // namespace

std::vector<ModalState> integrate(const ModalState& state0, const WaveParameters& params,
                                  const IntegratorConfig& cfg) {
  state0.validate();
  params.validate();
  cfg.validate();
  if (cfg.scheme == Scheme::rk4) return integrate_rk4(state0, params, cfg);
  return integrate_rk45(state0, params, cfg);
}

GridState reconstruct(const ModalState& state, double length_l, int num_points) {
  if (num_points < 2) throw ParameterError("num_points must be >= 2");
  GridState g = GridState::zero(num_points, length_l, state.time);
  for (int j = 1; j + 1 < num_points; ++j) {
    const double x = j * g.x_spacing;
    VectorSample u{}, ut{};
    for (std::size_t i = 0; i < state.coeff.size(); ++i) {
      const double s = std::sin((i + 1) * kPi * x / length_l);
      u += s * state.coeff[i];
      ut += s * state.coeff_dot[i];
    }
    g.u[static_cast<std::size_t>(j)] = u;
    g.ut[static_cast<std::size_t>(j)] = ut;
  }
  return g;
}

}  // namespace kirchhoff
