#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "kirchhoff/modal.hpp"
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

ModalState single_mode(double amp_v, double vel_v = 0.0) {
  ModalState s = ModalState::zero(1);
  s.coeff[0] = {amp_v, 0.0};
  s.coeff_dot[0] = {0.0, 0.0};
  s.coeff_dot[0].v = vel_v;
  return s;
}

}  // namespace

TEST_CASE("project_initial_data: parabolic pluck x(1-x) on the unit interval") {
  // Fourier sine coefficients of x(1-x) are 8/(n pi)^3 for odd n, 0 for even n.
  const Profile u0 = [](double x) { return VectorSample{x * (1.0 - x), 0.0}; };
  const Profile u1 = [](double) { return VectorSample{}; };
  const ModalState s = project_initial_data(u0, u1, 1.0, 8, 4001);
  REQUIRE(s.num_modes() == 8);

  const double odd_expected[4] = {0.258012275465596, 0.00955601020242948, 0.00206409820372474,
                                  0.000752222377450694};
  for (int k = 0; k < 4; ++k) {
    const int n = 2 * k + 1;
    CHECK(std::abs(s.coeff[static_cast<std::size_t>(n - 1)].v - odd_expected[k]) < 1e-9);
  }
  for (int n : {2, 4, 6, 8}) CHECK(std::abs(s.coeff[static_cast<std::size_t>(n - 1)].v) < 1e-12);
  for (const auto& c : s.coeff) CHECK(c.w == 0.0);
  for (const auto& cd : s.coeff_dot) {
    CHECK(std::abs(cd.v) < 1e-15);
    CHECK(std::abs(cd.w) < 1e-15);
  }
}

TEST_CASE("project_initial_data input validation") {
  const Profile zero = [](double) { return VectorSample{}; };
  const Profile bad = [](double) { return VectorSample{0.5, 0.0}; };
  CHECK_THROWS_AS(project_initial_data(bad, zero, 1.0, 4), BoundaryError);
  CHECK_THROWS_AS(project_initial_data(zero, bad, 1.0, 4), BoundaryError);
  CHECK_THROWS_AS(project_initial_data(zero, zero, 1.0, 0), ParameterError);
}

TEST_CASE("grid projection inverts reconstruction on band-limited data") {
  const double l = 1.7;
  ModalState s = ModalState::zero(8);
  s.coeff[0] = {0.9, -0.2};
  s.coeff[2] = {-0.31, 0.05};
  s.coeff[7] = {0.04, 0.11};
  s.coeff_dot[1] = {0.5, 0.25};
  s.coeff_dot[6] = {-0.125, 0.375};

  // An even point count selects the trapezoid rule, which is exact for
  // products of grid-resolved sine modes.
  const GridState g = reconstruct(s, l, 64);
  CHECK(g.u.front().norm_sq() == 0.0);
  CHECK(g.u.back().norm_sq() == 0.0);

  const ModalState back = project_initial_data(g, 8);
  for (int n = 0; n < 8; ++n) {
    const auto i = static_cast<std::size_t>(n);
    CHECK(std::abs(back.coeff[i].v - s.coeff[i].v) < 1e-12);
    CHECK(std::abs(back.coeff[i].w - s.coeff[i].w) < 1e-12);
    CHECK(std::abs(back.coeff_dot[i].v - s.coeff_dot[i].v) < 1e-12);
    CHECK(std::abs(back.coeff_dot[i].w - s.coeff_dot[i].w) < 1e-12);
  }
}

TEST_CASE("gradient_norm_sq: Parseval weighting") {
  SUBCASE("fundamental mode, l = pi") {
    const ModalState s = single_mode(1.0);
    CHECK(gradient_norm_sq(s, kPi) == doctest::Approx(kPi / 2.0).epsilon(1e-14));
  }
  SUBCASE("second harmonic, unit length") {
    ModalState s = ModalState::zero(2);
    s.coeff[1] = {0.0, 1.0};
    CHECK(gradient_norm_sq(s, 1.0) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-14));
  }
  SUBCASE("two-mode sum") {
    ModalState s = ModalState::zero(2);
    s.coeff[0] = {0.3, 0.4};  // |b_1|^2 = 0.25
    s.coeff[1] = {0.0, 0.5};  // |b_2|^2 = 0.25
    // (pi^2 / 2l) (1*0.25 + 4*0.25) with l = 2.
    CHECK(gradient_norm_sq(s, 2.0) == doctest::Approx(kPi * kPi * 0.3125).epsilon(1e-14));
  }
  SUBCASE("velocities do not contribute") {
    ModalState s = ModalState::zero(3);
    s.coeff_dot[0] = {5.0, -7.0};
    CHECK(gradient_norm_sq(s, 1.0) == 0.0);
  }
}

TEST_CASE("modal_rhs: stiffness shared through the nonlocal scalar") {
  SUBCASE("single mode with Kirchhoff feedback") {
    const WaveParameters p = params_of(kPi, 1.0, 1.0, 0.0);
    const ModalState s = single_mode(0.7);
    const ModalDerivative d = modal_rhs(s, p);
    REQUIRE(d.coeff_ddot.size() == 1);
    // S = (pi/2) 0.49, acceleration = -(1 + S) * 0.7.
    CHECK(std::abs(d.coeff_ddot[0].v - (-1.2387831400906495)) < 1e-12);
    CHECK(d.coeff_ddot[0].w == 0.0);
    CHECK(d.coeff_dot[0].v == s.coeff_dot[0].v);
  }
  SUBCASE("damping acts on the velocity only") {
    const WaveParameters p = params_of(kPi, 1.0, 0.0, 0.25);
    ModalState s = ModalState::zero(1);
    s.coeff_dot[0] = {0.2, -0.1};
    const ModalDerivative d = modal_rhs(s, p);
    CHECK(d.coeff_ddot[0].v == doctest::Approx(-0.1).epsilon(1e-14));
    CHECK(d.coeff_ddot[0].w == doctest::Approx(0.05).epsilon(1e-14));
  }
  SUBCASE("every mode sees the same stiffness") {
    const WaveParameters p = params_of(1.0, 2.0, 3.0, 0.0);
    ModalState s = ModalState::zero(3);
    s.coeff[0] = {0.4, 0.0};
    s.coeff[2] = {0.0, 0.1};
    const double S = gradient_norm_sq(s, 1.0);
    const ModalDerivative d = modal_rhs(s, p);
    const double stiffness = 2.0 + 3.0 * S;
    CHECK(d.coeff_ddot[0].v ==
          doctest::Approx(-stiffness * kPi * kPi * 0.4).epsilon(1e-13));
    CHECK(d.coeff_ddot[2].w ==
          doctest::Approx(-stiffness * 9.0 * kPi * kPi * 0.1).epsilon(1e-13));
    CHECK(d.coeff_ddot[1].v == 0.0);
  }
}

TEST_CASE("default_time_step follows the fastest-mode heuristic") {
  const ModalState one = single_mode(1.0);
  CHECK(default_time_step(one, params_of(kPi, 1.0, 0.0, 0.0)) ==
        doctest::Approx(0.1).epsilon(1e-14));
  const ModalState ten = ModalState::zero(10);
  CHECK(default_time_step(ten, params_of(kPi, 1.0, 0.0, 0.0)) ==
        doctest::Approx(0.01).epsilon(1e-14));
  // Kirchhoff stiffening shortens the step: speed^2 = 1 + 2 * (pi/2).
  CHECK(default_time_step(one, params_of(kPi, 1.0, 2.0, 0.0)) ==
        doctest::Approx(0.1 / std::sqrt(1.0 + kPi)).epsilon(1e-14));
}

TEST_CASE("IntegratorConfig validation") {
  IntegratorConfig ok;
  ok.t_end = 1.0;
  CHECK_NOTHROW(ok.validate());

  IntegratorConfig bad = ok;
  bad.t_end = 0.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = ok;
  bad.sample_stride = 0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = ok;
  bad.dt = -0.5;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
  bad = ok;
  bad.scheme = Scheme::rk45;
  bad.rel_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("integrate: damped single mode matches the closed form") {
  // l = pi and a^2 = 1 make omega0 = 1 for the fundamental, so the coefficient
  // solves b'' + 0.2 b' + b = 0 with b(0) = 1, b'(0) = 0.
  const WaveParameters p = params_of(kPi, 1.0, 0.0, 0.1);
  const ModalState s0 = single_mode(1.0);

  IntegratorConfig cfg;
  cfg.scheme = Scheme::rk4;
  cfg.dt = 1e-3;
  cfg.t_end = 5.0;
  cfg.sample_stride = 1000;
  const auto traj = integrate(s0, p, cfg);
  REQUIRE(traj.size() == 6);
  CHECK(traj.front().time == 0.0);
  CHECK(traj.front().coeff[0].v == 1.0);
  CHECK(traj.back().time == doctest::Approx(5.0).epsilon(1e-12));

  const oracle::DampedMode ref{0.1, 1.0};
  for (const auto& st : traj) {
    CHECK(std::abs(st.coeff[0].v - ref.b(st.time)) < 1e-9);
    CHECK(std::abs(st.coeff_dot[0].v - ref.b_dot(st.time)) < 1e-9);
    CHECK(st.coeff[0].w == 0.0);
  }
  CHECK(std::abs(traj[1].coeff[0].v - 0.56897189094609968) < 1e-9);
  CHECK(std::abs(traj[1].coeff_dot[0].v - (-0.76275767851023746)) < 1e-9);
  CHECK(std::abs(traj[5].coeff[0].v - 0.098550667618585927) < 1e-9);
  CHECK(std::abs(traj[5].coeff_dot[0].v - 0.58869679350110471) < 1e-9);
}

TEST_CASE("integrate: adaptive scheme reproduces the fixed-step answer") {
  const WaveParameters p = params_of(kPi, 1.0, 0.0, 0.1);
  const ModalState s0 = single_mode(1.0);

  IntegratorConfig cfg;
  cfg.scheme = Scheme::rk45;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-12;
  cfg.t_end = 5.0;
  const auto traj = integrate(s0, p, cfg);
  REQUIRE(traj.size() >= 2);
  CHECK(traj.front().time == 0.0);
  CHECK(traj.back().time == doctest::Approx(5.0).epsilon(1e-12));

  const oracle::DampedMode ref{0.1, 1.0};
  CHECK(std::abs(traj.back().coeff[0].v - ref.b(5.0)) < 1e-8);
  CHECK(std::abs(traj.back().coeff_dot[0].v - ref.b_dot(5.0)) < 1e-8);
}

TEST_CASE("integrate: undamped Kirchhoff system conserves energy") {
  const double l = kPi;
  const WaveParameters p = params_of(l, 1.0, 1.0, 0.0);
  ModalState s0 = ModalState::zero(2);
  s0.coeff[0] = {0.5, 0.0};
  s0.coeff[1] = {0.0, 0.3};
  s0.coeff_dot[0] = {0.0, 0.2};
  s0.coeff_dot[1] = {0.1, 0.0};

  auto manual_energy = [&](const ModalState& s) {
    double kin = 0.0;
    for (const auto& c : s.coeff_dot) kin += c.norm_sq();
    kin *= l / 2.0;
    const double grad = gradient_norm_sq(s, l);
    return 0.5 * (kin + p.a_sq * grad) + 0.25 * p.b_coeff * grad * grad;
  };
  const double e0 = manual_energy(s0);
  REQUIRE(e0 > 0.0);

  IntegratorConfig cfg;
  cfg.scheme = Scheme::rk4;
  cfg.dt = 1e-3;
  cfg.t_end = 10.0;
  cfg.sample_stride = 100;
  const auto traj = integrate(s0, p, cfg);
  for (const auto& st : traj) CHECK(std::abs(manual_energy(st) - e0) / e0 < 1e-8);
}

TEST_CASE("integrate: zero padding of the mode basis changes nothing") {
  const WaveParameters p = params_of(kPi, 1.0, 0.5, 0.05);
  ModalState two = ModalState::zero(2);
  two.coeff[0] = {0.4, -0.1};
  two.coeff[1] = {0.0, 0.2};
  two.coeff_dot[1] = {0.3, 0.0};

  ModalState four = ModalState::zero(4);
  four.coeff[0] = two.coeff[0];
  four.coeff[1] = two.coeff[1];
  four.coeff_dot[0] = two.coeff_dot[0];
  four.coeff_dot[1] = two.coeff_dot[1];

  IntegratorConfig cfg;
  cfg.scheme = Scheme::rk4;
  cfg.dt = 0.01;
  cfg.t_end = 2.0;
  cfg.sample_stride = 10;
  const auto t2 = integrate(two, p, cfg);
  const auto t4 = integrate(four, p, cfg);
  REQUIRE(t2.size() == t4.size());
  for (std::size_t k = 0; k < t2.size(); ++k) {
    for (std::size_t i = 0; i < 2; ++i) {
      // Bitwise equality: the padded modes contribute exact zeros to S.
      CHECK(t4[k].coeff[i].v == t2[k].coeff[i].v);
      CHECK(t4[k].coeff[i].w == t2[k].coeff[i].w);
      CHECK(t4[k].coeff_dot[i].v == t2[k].coeff_dot[i].v);
      CHECK(t4[k].coeff_dot[i].w == t2[k].coeff_dot[i].w);
    }
    CHECK(t4[k].coeff[2].norm_sq() == 0.0);
    CHECK(t4[k].coeff[3].norm_sq() == 0.0);
  }
}

TEST_CASE("integrate: sampling stride and final-step bookkeeping") {
  const WaveParameters p = params_of(1.0, 1.0, 0.0, 0.0);
  const ModalState s0 = single_mode(0.1);
  IntegratorConfig cfg;
  cfg.dt = 0.1;
  cfg.t_end = 1.0;
  cfg.sample_stride = 3;
  const auto traj = integrate(s0, p, cfg);
  // Records at steps 0, 3, 6, 9 plus the forced final step 10.
  REQUIRE(traj.size() == 5);
  CHECK(traj[1].time == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(traj.back().time == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("integrate: a partial trailing step lands exactly on t_end") {
  const WaveParameters p = params_of(1.0, 1.0, 0.0, 0.0);
  const ModalState s0 = single_mode(0.1);
  IntegratorConfig cfg;
  cfg.dt = 0.03;  // 1.0 / 0.03 is not an integer, so a shortened step remains
  cfg.t_end = 1.0;
  const auto traj = integrate(s0, p, cfg);
  CHECK(traj.back().time == doctest::Approx(1.0).epsilon(1e-14));
  const oracle::DampedMode ref{0.0, kPi * kPi};
  CHECK(std::abs(traj.back().coeff[0].v - 0.1 * ref.b(1.0)) < 1e-5);
}

TEST_CASE("integrate: gross step-size abuse raises DivergenceError") {
  const WaveParameters p = params_of(kPi, 1.0, 1.0, 0.0);
  const ModalState s0 = single_mode(1.0);
  IntegratorConfig cfg;
  cfg.scheme = Scheme::rk4;
  cfg.dt = 3.0;
  cfg.t_end = 60.0;
  CHECK_THROWS_AS(integrate(s0, p, cfg), DivergenceError);
}

TEST_CASE("integrate: unattainable adaptive tolerance raises StabilityError") {
  // A ruinously stiff mode keeps the embedded error estimate representable
  // (nonzero) at every admissible step, so the controller has to shrink all
  // the way into the underflow guard instead of flushing the estimate to
  // zero in floating point.
  const WaveParameters p = params_of(kPi, 1e22, 0.0, 0.1);
  const ModalState s0 = single_mode(1.0);
  IntegratorConfig cfg;
  cfg.scheme = Scheme::rk45;
  cfg.rel_tol = 1e-300;
  cfg.abs_tol = 1e-300;
  cfg.t_end = 1.0;
  CHECK_THROWS_AS(integrate(s0, p, cfg), StabilityError);
}

TEST_CASE("reconstruct evaluates the sine series with exact zero ends") {
  ModalState s = ModalState::zero(2);
  s.coeff[0] = {1.0, 0.0};
  s.coeff[1] = {0.0, 0.5};
  s.coeff_dot[0] = {0.25, 0.0};
  const double l = 2.0;
  const GridState g = reconstruct(s, l, 9);
  REQUIRE(g.num_points() == 9);
  CHECK(g.u.front().norm_sq() == 0.0);
  CHECK(g.u.back().norm_sq() == 0.0);
  for (int j = 0; j < 9; ++j) {
    const double x = j * g.x_spacing;
    const auto i = static_cast<std::size_t>(j);
    CHECK(g.u[i].v == doctest::Approx(std::sin(kPi * x / l)).epsilon(1e-14));
    CHECK(g.u[i].w == doctest::Approx(0.5 * std::sin(2.0 * kPi * x / l)).epsilon(1e-14));
    CHECK(g.ut[i].v == doctest::Approx(0.25 * std::sin(kPi * x / l)).epsilon(1e-14));
  }
  CHECK(g.length() == doctest::Approx(l).epsilon(1e-14));
}
