#include "kirchhoff/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <thread>

#include "kirchhoff/modal.hpp"

namespace kirchhoff {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* solver_name(SolverChoice s) {
  switch (s) {
    case SolverChoice::modal: return "modal";
    case SolverChoice::fd: return "fd";
    case SolverChoice::both: return "both";
  }
  return "?";
}

const char* scheme_name(Scheme s) { return s == Scheme::rk4 ? "rk4" : "rk45"; }

const char* pass_fail(bool pass) { return pass ? "pass" : "fail"; }

std::string sanitize(std::string text) {
  for (char& ch : text) {
    if (ch == ',') ch = ';';
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return text;
}

double dimensionless_damping_of(const WaveParameters& p) {
  return p.damping_delta * p.length_l / (kPi * std::sqrt(p.a_sq));
}

int auto_stride(double dt, double t_end, bool has_constants, double mu) {
  const double target = has_constants ? 1.0 / (200.0 * mu * dt) : t_end / (2000.0 * dt);
  long stride = static_cast<long>(std::floor(target));
  const long cap = std::max(1L, static_cast<long>(std::floor(t_end / dt / 10.0)));
  stride = std::clamp(stride, 1L, cap);
  return static_cast<int>(stride);
}

double smallest_relative_margin(const EnergySample& s) {
  const InequalityMargins r = relative_margins(s.margins, s.energy_E);
  double worst = r.scheefer;
  worst = std::min(worst, r.schwarz);
  worst = std::min(worst, r.g_upper);
  worst = std::min(worst, r.g_lower);
  worst = std::min(worst, r.sandwich_lo);
  worst = std::min(worst, r.sandwich_hi);
  worst = std::min(worst, r.dg_bound);
  return worst;
}

void append_note(std::string& note, const std::string& extra) {
  if (!note.empty()) note += "; ";
  note += extra;
}

void append_kv(std::string& text, const char* key, const std::string& value) {
  text += key;
  text += " = ";
  text += value;
  text += "\n";
}

}  // namespace

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf);
}

bool RunOutcome::all_pass() const {
  const bool certificate_ok = !has_constants || (report.verdict && report.amplitude_verdict);
  return margins_ok && certificate_ok;
}

RunOutcome execute_run(const RunConfig& cfg) {
  cfg.validate();

  RunOutcome out;
  const WaveParameters& p = cfg.params;
  out.params = p;
  out.solver = cfg.solver;
  out.num_modes = cfg.num_modes;
  out.scheme = cfg.integrator.scheme;

  const ModalState state0 = make_initial_state(cfg.initial, p.length_l, cfg.num_modes);

  // Resolve epsilon and, when it is positive, the whole constant set.
  if (cfg.epsilon.automatic) {
    if (p.damping_delta > 0.0) {
      out.constants = derive_constants(p, cfg.kappa);
      out.epsilon = out.constants.epsilon;
      out.has_constants = true;
    }
  } else if (cfg.epsilon.value > 0.0) {
    DecayConstants c;
    c.epsilon = cfg.epsilon.value;
    c.mu0 = mu0(p);
    c.mu = decay_rate(c.epsilon, c.mu0);
    c.big_M = overshoot_M(c.epsilon, c.mu0, p);
    c.dimensionless_damping = dimensionless_damping_of(p);
    c.validate();
    out.constants = c;
    out.epsilon = c.epsilon;
    out.has_constants = true;
  }

  double t_end = cfg.integrator.t_end;
  if (cfg.t_end_auto) {
    if (!out.has_constants)
      throw ConfigError(
          "solver.t_end: must be explicit when no decay constants are available "
          "(undamped run or epsilon = 0)");
    t_end = 10.0 / out.constants.mu;
  }

  const MonitorConfig mcfg{out.epsilon, out.margin_tolerance};

  if (cfg.solver == SolverChoice::fd) {
    const int points = cfg.fd_interior_points + 2;
    const GridState grid0 = reconstruct(state0, p.length_l, points);
    const double dx = p.length_l / (points - 1);
    const double speed0 =
        std::sqrt(p.a_sq + p.b_coeff * gradient_norm_sq(state0, p.length_l));
    const double dt_fd =
        cfg.dt_auto ? cfg.fd_safety_factor * dx / speed0 : cfg.integrator.dt;
    const int stride = cfg.stride_auto
                           ? auto_stride(dt_fd, t_end, out.has_constants,
                                         out.has_constants ? out.constants.mu : 0.0)
                           : cfg.integrator.sample_stride;
    FdConfig fcfg;
    fcfg.num_interior_points = cfg.fd_interior_points;
    fcfg.dt = dt_fd;
    fcfg.t_end = t_end;
    fcfg.safety_factor = cfg.fd_safety_factor;
    fcfg.sample_stride = stride;
    const std::vector<GridState> traj = fd_integrate(grid0, p, fcfg);
    out.samples = monitor_trajectory(traj, p, mcfg);
    out.resolved_dt = dt_fd;
    out.resolved_stride = stride;
    out.margins_applicable = false; // grid quadrature noise sits above the gate
  } else {
    IntegratorConfig icfg = cfg.integrator;
    icfg.t_end = t_end;
    double dt = icfg.dt;
    if (cfg.dt_auto) dt = default_time_step(state0, p);
    if (icfg.scheme == Scheme::rk4) icfg.dt = dt;
    int stride = icfg.sample_stride;
    if (cfg.stride_auto)
      stride = icfg.scheme == Scheme::rk45
                   ? 1
                   : auto_stride(dt, t_end, out.has_constants,
                                 out.has_constants ? out.constants.mu : 0.0);
    icfg.sample_stride = stride;

    if (cfg.solver == SolverChoice::both) {
      if (icfg.scheme != Scheme::rk4)
        throw ConfigError("solver.scheme: the solver comparison requires rk4");
      const double h = icfg.dt * stride;
      const long intervals = std::max(1L, std::lround(t_end / h));
      const double snapped = static_cast<double>(intervals) * h;
      if (std::abs(snapped - t_end) > 1e-12 * std::max(1.0, t_end))
        append_note(out.note, "t_end adjusted to " + fmt17(snapped) +
                                  " to align the solver samples");
      t_end = snapped;
      icfg.t_end = snapped;
    }

    const std::vector<ModalState> traj = integrate(state0, p, icfg);
    out.samples = monitor_trajectory(traj, p, mcfg);
    out.resolved_dt = icfg.scheme == Scheme::rk4 ? icfg.dt : 0.0;
    out.resolved_stride = stride;
    out.margins_applicable = true;

    if (cfg.solver == SolverChoice::both) {
      const int points = cfg.fd_interior_points + 2;
      const GridState grid0 = reconstruct(state0, p.length_l, points);
      const double dx = p.length_l / (points - 1);
      const double speed0 =
          std::sqrt(p.a_sq + p.b_coeff * gradient_norm_sq(state0, p.length_l));
      const double h = icfg.dt * stride;
      long substeps =
          static_cast<long>(std::ceil(h / (0.5 * cfg.fd_safety_factor * dx / speed0) - 1e-12));
      substeps = std::max(1L, substeps);
      FdConfig fcfg;
      fcfg.num_interior_points = cfg.fd_interior_points;
      fcfg.dt = h / static_cast<double>(substeps);
      fcfg.t_end = t_end;
      fcfg.safety_factor = cfg.fd_safety_factor;
      fcfg.sample_stride = static_cast<int>(substeps);
      const std::vector<GridState> fd_traj = fd_integrate(grid0, p, fcfg);
      out.discrepancy = compare_solvers(traj, fd_traj, p.length_l);
      out.has_discrepancy = true;
    }
  }
  out.resolved_t_end = t_end;

  double worst = std::numeric_limits<double>::infinity();
  for (const EnergySample& s : out.samples) worst = std::min(worst, smallest_relative_margin(s));
  out.worst_margin = out.samples.empty() ? 0.0 : worst;
  out.margins_ok = !out.margins_applicable || out.worst_margin >= -out.margin_tolerance;

  if (out.has_constants) {
    out.report = certify(out.samples, out.constants, p, cfg.tolerance);
    if (out.constants.dimensionless_damping > 1.0)
      append_note(out.note,
                  "overdamped configuration (delta > pi*a/l); epsilon capped below pi*a/l");
  }
  return out;
}

std::string render_csv(const RunOutcome& out) {
  std::string text =
      "t,E,G,V,kinetic,grad_sq,amp_sq,dE_residual,scheefer_margin,sandwich_lo,"
      "sandwich_hi,bound_ME_exp,amp_bound";
  if (out.has_discrepancy) text += ",fd_max_diff,fd_l2_diff";
  text += "\n";
  if (out.samples.empty()) return text;

  const double t0 = out.samples.front().time;
  const double e0 = out.samples.front().energy_E;
  for (std::size_t k = 0; k < out.samples.size(); ++k) {
    const EnergySample& s = out.samples[k];
    const InequalityMargins rel = relative_margins(s.margins, s.energy_E);
    double bound_me = kNaN;
    double amp_bd = kNaN;
    if (out.has_constants) {
      const double elapsed = s.time - t0;
      bound_me = out.constants.big_M * e0 * std::exp(-out.constants.mu * elapsed);
      amp_bd = amplitude_bound(elapsed, out.constants, out.params, e0);
    }
    text += fmt17(s.time);
    text += ',';
    text += fmt17(s.energy_E);
    text += ',';
    text += fmt17(s.lyapunov_G);
    text += ',';
    text += fmt17(s.lyapunov_V);
    text += ',';
    text += fmt17(s.kinetic);
    text += ',';
    text += fmt17(s.grad_sq);
    text += ',';
    text += fmt17(s.amp_sq);
    text += ',';
    text += fmt17(s.dissipation_residual);
    text += ',';
    text += fmt17(rel.scheefer);
    text += ',';
    text += fmt17(rel.sandwich_lo);
    text += ',';
    text += fmt17(rel.sandwich_hi);
    text += ',';
    text += fmt17(bound_me);
    text += ',';
    text += fmt17(amp_bd);
    if (out.has_discrepancy) {
      const DiscrepancySample& d = out.discrepancy.samples[k];
      text += ',';
      text += fmt17(d.max_diff);
      text += ',';
      text += fmt17(d.l2_diff);
    }
    text += '\n';
  }
  return text;
}

std::string render_summary(const RunOutcome& out) {
  std::string text;
  append_kv(text, "solver", solver_name(out.solver));
  append_kv(text, "scheme", scheme_name(out.scheme));
  append_kv(text, "modes", std::to_string(out.num_modes));
  append_kv(text, "dt", fmt17(out.resolved_dt));
  append_kv(text, "t_end", fmt17(out.resolved_t_end));
  append_kv(text, "sample_stride", std::to_string(out.resolved_stride));
  append_kv(text, "samples", std::to_string(out.samples.size()));
  append_kv(text, "length_l", fmt17(out.params.length_l));
  append_kv(text, "damping_delta", fmt17(out.params.damping_delta));
  append_kv(text, "a_sq", fmt17(out.params.a_sq));
  append_kv(text, "b_coeff", fmt17(out.params.b_coeff));
  append_kv(text, "E0", fmt17(out.samples.empty() ? 0.0 : out.samples.front().energy_E));
  append_kv(text, "epsilon", fmt17(out.epsilon));
  if (out.has_constants) {
    append_kv(text, "mu0", fmt17(out.constants.mu0));
    append_kv(text, "mu", fmt17(out.constants.mu));
    append_kv(text, "M", fmt17(out.constants.big_M));
    append_kv(text, "dimensionless_damping", fmt17(out.constants.dimensionless_damping));
    append_kv(text, "max_ratio", fmt17(out.report.max_normalized_ratio));
    append_kv(text, "worst_time", fmt17(out.report.worst_sample_time));
    append_kv(text, "decay_verdict", pass_fail(out.report.verdict));
    append_kv(text, "amplitude_verdict", pass_fail(out.report.amplitude_verdict));
    append_kv(text, "amplitude_worst_ratio", fmt17(out.report.amplitude_worst_ratio));
  }
  append_kv(text, "margins_verdict",
            out.margins_applicable ? pass_fail(out.margins_ok) : "n/a");
  append_kv(text, "worst_margin", fmt17(out.worst_margin));
  if (out.has_discrepancy) {
    append_kv(text, "fd_max_diff", fmt17(out.discrepancy.max_diff));
    append_kv(text, "fd_l2_diff", fmt17(out.discrepancy.l2_max));
  }
  if (!out.note.empty()) append_kv(text, "note", out.note);
  append_kv(text, "overall", pass_fail(out.all_pass()));
  return text;
}

std::string render_certificate(const RunOutcome& out) {
  if (!out.has_constants)
    throw CertificateError("no decay constants available for this run");
  std::string text;
  append_kv(text, "epsilon", fmt17(out.constants.epsilon));
  append_kv(text, "mu0", fmt17(out.constants.mu0));
  append_kv(text, "mu", fmt17(out.constants.mu));
  append_kv(text, "M", fmt17(out.constants.big_M));
  append_kv(text, "dimensionless_damping", fmt17(out.constants.dimensionless_damping));
  append_kv(text, "E0", fmt17(out.report.initial_E0));
  append_kv(text, "max_ratio", fmt17(out.report.max_normalized_ratio));
  append_kv(text, "worst_time", fmt17(out.report.worst_sample_time));
  append_kv(text, "amplitude_worst_ratio", fmt17(out.report.amplitude_worst_ratio));
  append_kv(text, "amplitude_worst_time", fmt17(out.report.amplitude_worst_time));
  append_kv(text, "decay_verdict", pass_fail(out.report.verdict));
  append_kv(text, "amplitude_verdict", pass_fail(out.report.amplitude_verdict));
  if (!out.note.empty()) append_kv(text, "note", out.note);
  append_kv(text, "overall", pass_fail(out.report.verdict && out.report.amplitude_verdict));
  return text;
}

SimulateProduct run_simulate(const RunConfig& cfg) {
  SimulateProduct product;
  product.outcome = execute_run(cfg);
  product.csv = render_csv(product.outcome);
  product.summary = render_summary(product.outcome);
  product.pass = product.outcome.all_pass();
  return product;
}

CertifyProduct run_certify(const RunConfig& cfg) {
  CertifyProduct product;
  product.outcome = execute_run(cfg);
  if (!product.outcome.has_constants) {
    if (cfg.params.damping_delta == 0.0)
      choose_epsilon(cfg.params, cfg.kappa); // throws the canonical message
    throw CertificateError("monitor.epsilon = 0 disables certification");
  }
  product.report = render_certificate(product.outcome);
  product.pass =
      product.outcome.report.verdict && product.outcome.report.amplitude_verdict;
  return product;
}

namespace {

SweepRow run_cell(const RunConfig& base, double delta, double b, double amplitude,
                  std::uint64_t seed) {
  SweepRow row;
  row.delta = delta;
  row.b_coeff = b;
  row.amplitude = amplitude;
  row.seed = seed;
  try {
    RunConfig cfg = base;
    cfg.params.damping_delta = delta;
    cfg.params.b_coeff = b;
    cfg.initial.amplitude = amplitude;
    cfg.initial.seed = seed;
    cfg.csv_path.clear();
    cfg.report_path.clear();
    RunOutcome out = execute_run(cfg);
    if (!out.has_constants)
      throw CertificateError("no decay constants available for this cell");
    row.ok = true;
    row.constants = out.constants;
    row.initial_E0 = out.report.initial_E0;
    row.max_ratio = out.report.max_normalized_ratio;
    row.decay_pass = out.report.verdict;
    row.amplitude_pass = out.report.amplitude_verdict;
    row.status = "ok";
    row.note = sanitize(out.note);
  } catch (const std::exception& e) {
    row.ok = false;
    row.status = "error: " + sanitize(e.what());
  }
  return row;
}

}  // namespace

SweepProduct run_sweep(const SweepConfig& sweep) {
  sweep.validate();

  struct Cell {
    double delta, b, amplitude;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  cells.reserve(sweep.num_cells());
  for (double d : sweep.deltas)
    for (double b : sweep.b_coeffs)
      for (double amp : sweep.amplitudes)
        for (std::uint64_t seed : sweep.seeds) cells.push_back({d, b, amp, seed});

  SweepProduct product;
  product.rows.resize(cells.size());

  int workers = sweep.workers;
  if (workers <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    workers = static_cast<int>(hw == 0 ? 2 : hw);
  }
  workers = std::max(1, std::min<int>(workers, static_cast<int>(cells.size())));

  std::atomic<std::size_t> next{0};
  const auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) break;
      const Cell& c = cells[i];
      product.rows[i] = run_cell(sweep.base, c.delta, c.b, c.amplitude, c.seed);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();

  std::string csv =
      "delta,b,amplitude,seed,epsilon,mu0,mu,M,dimensionless_damping,E0,max_ratio,"
      "decay_verdict,amplitude_verdict,status,note\n";
  for (const SweepRow& row : product.rows) {
    csv += fmt17(row.delta);
    csv += ',';
    csv += fmt17(row.b_coeff);
    csv += ',';
    csv += fmt17(row.amplitude);
    csv += ',';
    csv += std::to_string(row.seed);
    csv += ',';
    if (row.ok) {
      csv += fmt17(row.constants.epsilon);
      csv += ',';
      csv += fmt17(row.constants.mu0);
      csv += ',';
      csv += fmt17(row.constants.mu);
      csv += ',';
      csv += fmt17(row.constants.big_M);
      csv += ',';
      csv += fmt17(row.constants.dimensionless_damping);
      csv += ',';
      csv += fmt17(row.initial_E0);
      csv += ',';
      csv += fmt17(row.max_ratio);
      csv += ',';
      csv += pass_fail(row.decay_pass);
      csv += ',';
      csv += pass_fail(row.amplitude_pass);
    } else {
      for (int k = 0; k < 7; ++k) {
        csv += fmt17(kNaN);
        csv += ',';
      }
      csv += "error,error";
    }
    csv += ',';
    csv += row.status;
    csv += ',';
    csv += row.note;
    csv += '\n';

    if (row.ok && row.decay_pass && row.amplitude_pass)
      ++product.pass_count;
    else if (row.ok)
      ++product.fail_count;
    else
      ++product.error_count;
  }
  product.csv = std::move(csv);
  product.pass = product.error_count == 0 && product.fail_count == 0;

  std::string summary;
  append_kv(summary, "cells", std::to_string(product.rows.size()));
  append_kv(summary, "pass", std::to_string(product.pass_count));
  append_kv(summary, "fail", std::to_string(product.fail_count));
  append_kv(summary, "errors", std::to_string(product.error_count));
  append_kv(summary, "overall", pass_fail(product.pass));
  product.summary = std::move(summary);
  return product;
}

std::string print_constants(const WaveParameters& params, double kappa) {
  params.validate();
  if (!(kappa > 0.0 && kappa < 1.0)) throw ParameterError("kappa must lie in (0, 1)");

  const double pia_over_l = kPi * std::sqrt(params.a_sq) / params.length_l;
  const double m0 = mu0(params);
  const MuMaxResult mm = mu_max(params);

  double eps = kNaN;
  double mu_value = kNaN;
  double big_m = kNaN;
  std::string note;
  if (params.damping_delta > 0.0) {
    eps = choose_epsilon(params, kappa);
    mu_value = decay_rate(eps, m0);
    big_m = overshoot_M(eps, m0, params);
    if (mm.overdamped)
      note = "overdamped configuration (delta > pi*a/l); epsilon capped below pi*a/l";
  } else {
    note = "no certificate: damping_delta = 0";
  }

  std::string text;
  append_kv(text, "length_l", fmt17(params.length_l));
  append_kv(text, "damping_delta", fmt17(params.damping_delta));
  append_kv(text, "a_sq", fmt17(params.a_sq));
  append_kv(text, "b_coeff", fmt17(params.b_coeff));
  append_kv(text, "pia_over_l", fmt17(pia_over_l));
  append_kv(text, "dimensionless_damping", fmt17(dimensionless_damping_of(params)));
  append_kv(text, "mu0", fmt17(m0));
  append_kv(text, "epsilon", fmt17(eps));
  append_kv(text, "mu", fmt17(mu_value));
  append_kv(text, "M", fmt17(big_m));
  append_kv(text, "mu_max", fmt17(mm.mu_max));
  append_kv(text, "cap", fmt17(mm.cap));
  if (!note.empty()) append_kv(text, "note", note);
  return text;
}

}  // namespace kirchhoff
