#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "kirchhoff/fd.hpp"
#include "oracles.hpp"

using namespace kirchhoff;

namespace {

constexpr double kPi = std::numbers::pi;

WaveParameters params_of(double l, double a_sq, double b, double delta) {
  WaveParameters p;
  p.length_l = l;
  p.damping_delta = delta;
  p.a_sq = a_sq;
  p.b_coeff = b;
  return p;
}

GridState fundamental_grid(double amp, double l, int num_points) {
  ModalState s = ModalState::zero(1);
  s.coeff[0] = {amp, 0.0};
  return reconstruct(s, l, num_points);
}

}  // namespace

TEST_CASE("FdConfig validation") {
  FdConfig ok;
  ok.num_interior_points = 9;
  ok.t_end = 1.0;
  CHECK_NOTHROW(ok.validate());

  FdConfig bad = ok;
  bad.num_interior_points = 2;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = ok;
  bad.t_end = 0.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = ok;
  bad.safety_factor = 0.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = ok;
  bad.safety_factor = 1.5;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = ok;
  bad.sample_stride = 0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = ok;
  bad.dt = -1.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("fd_gradient_norm_sq converges at second order to the exact integral") {
  // For u = sin(x) on [0, pi] the exact Kirchhoff scalar is pi/2.
  const double exact = kPi / 2.0;
  const double e_coarse = std::abs(fd_gradient_norm_sq(fundamental_grid(1.0, kPi, 51)) - exact);
  const double e_fine = std::abs(fd_gradient_norm_sq(fundamental_grid(1.0, kPi, 101)) - exact);
  CHECK(e_coarse > 0.0);
  CHECK(e_fine > 0.0);
  const double ratio = e_coarse / e_fine;
  CHECK(ratio > 3.4);
  CHECK(ratio < 4.6);
  CHECK(e_fine < 1e-3);
}

TEST_CASE("fd_gradient_norm_sq scales quadratically with amplitude") {
  const double s1 = fd_gradient_norm_sq(fundamental_grid(1.0, kPi, 101));
  const double s3 = fd_gradient_norm_sq(fundamental_grid(3.0, kPi, 101));
  CHECK(s3 == doctest::Approx(9.0 * s1).epsilon(1e-12));
}

TEST_CASE("fd_step basics") {
  const WaveParameters p = params_of(kPi, 1.0, 0.5, 0.1);
  const GridState g0 = fundamental_grid(0.5, kPi, 41);
  const double dx = g0.x_spacing;

  SUBCASE("endpoints remain exactly zero and time advances") {
    GridState g = g0;
    for (int k = 0; k < 25; ++k) g = fd_step(g, p, 0.25 * dx);
    CHECK(g.u.front().norm_sq() == 0.0);
    CHECK(g.u.back().norm_sq() == 0.0);
    CHECK(g.ut.front().norm_sq() == 0.0);
    CHECK(g.ut.back().norm_sq() == 0.0);
    CHECK(g.time == doctest::Approx(25 * 0.25 * dx).epsilon(1e-12));
    CHECK(g.finite());
  }

  SUBCASE("a step beyond the CFL limit is refused") {
    const double speed = std::sqrt(p.a_sq + p.b_coeff * fd_gradient_norm_sq(g0));
    CHECK_THROWS_AS(fd_step(g0, p, 1.01 * dx / speed), StabilityError);
    CHECK_NOTHROW(fd_step(g0, p, 0.99 * dx / speed));
  }

  SUBCASE("the safety factor tightens the admissible step") {
    const double speed = std::sqrt(p.a_sq + p.b_coeff * fd_gradient_norm_sq(g0));
    const double dt = 0.8 * dx / speed;
    CHECK_NOTHROW(fd_step(g0, p, dt, 1.0));
    CHECK_THROWS_AS(fd_step(g0, p, dt, 0.5), StabilityError);
  }

  SUBCASE("non-finite input surfaces as DivergenceError") {
    // An infinite velocity leaves the gradient integral (and so the CFL
    // wave speed) finite; the step executes and trips the divergence check.
    GridState g = g0;
    g.ut[10].v = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(fd_step(g, p, 0.1 * dx), DivergenceError);
  }
}

TEST_CASE("fd_integrate rejects a grid that contradicts the config") {
  const WaveParameters p = params_of(kPi, 1.0, 0.0, 0.0);
  const GridState g0 = fundamental_grid(1.0, kPi, 41);  // 39 interior points
  FdConfig cfg;
  cfg.num_interior_points = 99;
  cfg.t_end = 1.0;
  CHECK_THROWS_AS(fd_integrate(g0, p, cfg), ParameterError);
}

TEST_CASE("fd_integrate: damped linear mode converges at second order") {
  // l = pi, a^2 = 1: u(x, t) = amp * sin(x) * b(t) with the closed-form
  // damped-oscillator coefficient b.
  const double amp = 0.8;
  const double delta = 0.1;
  const WaveParameters p = params_of(kPi, 1.0, 0.0, delta);
  const oracle::DampedMode ref{delta, 1.0};
  const double t_end = 1.0;

  std::vector<double> spacings, errors;
  for (int interior : {49, 99, 199}) {
    const int points = interior + 2;
    const GridState g0 = fundamental_grid(amp, kPi, points);

    FdConfig cfg;
    cfg.num_interior_points = interior;
    cfg.t_end = t_end;
    cfg.sample_stride = 1 << 30;  // keep only the endpoints of the run
    const auto traj = fd_integrate(g0, p, cfg);
    REQUIRE(traj.size() >= 2);
    const GridState& fin = traj.back();
    CHECK(fin.time == doctest::Approx(t_end).epsilon(1e-12));

    double max_err = 0.0;
    const double bt = ref.b(t_end);
    for (int j = 0; j < fin.num_points(); ++j) {
      const double x = j * fin.x_spacing;
      const double exact = amp * std::sin(x) * bt;
      max_err = std::max(max_err, std::abs(fin.u[static_cast<std::size_t>(j)].v - exact));
    }
    spacings.push_back(fin.x_spacing);
    errors.push_back(max_err);
  }
  CHECK(errors[0] > errors[1]);
  CHECK(errors[1] > errors[2]);
  const double slope = oracle::log_slope(spacings, errors);
  CHECK(slope > 1.8);
  CHECK(slope < 2.2);
  CHECK(errors[2] < 5e-4);
}

TEST_CASE("fd_integrate: sample times and stride bookkeeping") {
  const WaveParameters p = params_of(kPi, 1.0, 0.0, 0.0);
  const GridState g0 = fundamental_grid(0.3, kPi, 23);  // 21 interior points
  FdConfig cfg;
  cfg.num_interior_points = 21;
  cfg.dt = 0.01;
  cfg.t_end = 0.1;
  cfg.sample_stride = 4;
  const auto traj = fd_integrate(g0, p, cfg);
  // Records at steps 0, 4, 8 plus the forced final step 10.
  REQUIRE(traj.size() == 4);
  CHECK(traj[0].time == 0.0);
  CHECK(traj[1].time == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(traj[2].time == doctest::Approx(0.08).epsilon(1e-12));
  CHECK(traj[3].time == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("fd_integrate agrees with the modal solver on a Kirchhoff problem") {
  const double l = kPi;
  const WaveParameters p = params_of(l, 1.0, 0.5, 0.1);
  ModalState m0 = ModalState::zero(2);
  m0.coeff[0] = {0.4, 0.0};
  m0.coeff[1] = {0.0, 0.2};

  const int points = 201;
  const GridState g0 = reconstruct(m0, l, points);

  const double t_end = 0.5;
  FdConfig fcfg;
  fcfg.num_interior_points = points - 2;
  fcfg.t_end = t_end;
  fcfg.sample_stride = 1 << 30;
  const auto fd_traj = fd_integrate(g0, p, fcfg);

  IntegratorConfig mcfg;
  mcfg.scheme = Scheme::rk4;
  mcfg.dt = 1e-4;
  mcfg.t_end = t_end;
  mcfg.sample_stride = 1 << 30;
  const auto modal_traj = integrate(m0, p, mcfg);

  REQUIRE(fd_traj.size() == modal_traj.size());
  const DiscrepancyReport rep = compare_solvers(modal_traj, fd_traj, l);
  REQUIRE(rep.samples.size() == fd_traj.size());
  CHECK(rep.max_diff < 5e-4);
  CHECK(rep.l2_max <= rep.max_diff * std::sqrt(l) * (1.0 + 1e-12));
  CHECK(rep.samples.front().max_diff == 0.0);  // identical initial data
}

TEST_CASE("compare_solvers alignment requirements") {
  ModalState m = ModalState::zero(1);
  m.coeff[0] = {0.5, 0.0};
  const double l = kPi;
  const GridState g = reconstruct(m, l, 33);

  SUBCASE("identical fields give zero discrepancy") {
    const DiscrepancyReport rep = compare_solvers({m}, {g}, l);
    CHECK(rep.max_diff == 0.0);
    CHECK(rep.l2_max == 0.0);
  }
  SUBCASE("sample-count mismatch") {
    CHECK_THROWS_AS(compare_solvers({m, m}, {g}, l), AlignmentError);
  }
  SUBCASE("sample-time mismatch") {
    GridState shifted = g;
    shifted.time = 0.5;
    CHECK_THROWS_AS(compare_solvers({m}, {shifted}, l), AlignmentError);
  }
}
