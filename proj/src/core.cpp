#include "kirchhoff/core.hpp"

#include <algorithm>
#include <cmath>

namespace kirchhoff {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

}  // namespace

void PhysicalString::validate() const {
  require(tension_T0 > 0.0, "tension_T0 must be > 0");
  require(density_rho > 0.0, "density_rho must be > 0");
  require(area_A > 0.0, "area_A must be > 0");
  require(youngs_E >= 0.0, "youngs_E must be >= 0");
  require(length_l > 0.0, "length_l must be > 0");
  require(damping_delta >= 0.0, "damping_delta must be >= 0");
  require(std::isfinite(tension_T0) && std::isfinite(density_rho) && std::isfinite(area_A) &&
              std::isfinite(youngs_E) && std::isfinite(length_l) && std::isfinite(damping_delta),
          "physical constants must be finite");
}

void WaveParameters::validate() const {
  require(length_l > 0.0, "length_l must be > 0");
  require(a_sq > 0.0, "a_sq must be > 0");
  require(b_coeff >= 0.0, "b_coeff must be >= 0");
  require(damping_delta >= 0.0, "damping_delta must be >= 0");
  require(std::isfinite(length_l) && std::isfinite(a_sq) && std::isfinite(b_coeff) &&
              std::isfinite(damping_delta),
          "wave parameters must be finite");
}

WaveParameters derive_wave_parameters(const PhysicalString& phys) {
  phys.validate();
  WaveParameters p;
  p.length_l = phys.length_l;
  p.damping_delta = phys.damping_delta;
  p.a_sq = phys.tension_T0 / (phys.density_rho * phys.area_A);
  p.b_coeff = phys.youngs_E / (2.0 * phys.density_rho * phys.length_l);
  p.validate();
  return p;
}

ModalState ModalState::zero(int num_modes, double time) {
  ModalState s;
  s.time = time;
  s.coeff.assign(static_cast<std::size_t>(num_modes), VectorSample{});
  s.coeff_dot.assign(static_cast<std::size_t>(num_modes), VectorSample{});
  return s;
}

bool ModalState::finite() const {
  for (const auto& c : coeff)
    if (!std::isfinite(c.v) || !std::isfinite(c.w)) return false;
  for (const auto& c : coeff_dot)
    if (!std::isfinite(c.v) || !std::isfinite(c.w)) return false;
  return std::isfinite(time);
}

void ModalState::validate() const {
  require(!coeff.empty(), "modal state needs at least one mode");
  require(coeff.size() == coeff_dot.size(), "coefficient and velocity arrays must match");
  require(finite(), "modal state has non-finite entries");
}

GridState GridState::zero(int num_points, double length_l, double time) {
  GridState g;
  g.time = time;
  g.x_spacing = length_l / (num_points - 1);
  g.u.assign(static_cast<std::size_t>(num_points), VectorSample{});
  g.ut.assign(static_cast<std::size_t>(num_points), VectorSample{});
  return g;
}

bool GridState::finite() const {
  for (const auto& s : u)
    if (!std::isfinite(s.v) || !std::isfinite(s.w)) return false;
  for (const auto& s : ut)
    if (!std::isfinite(s.v) || !std::isfinite(s.w)) return false;
  return std::isfinite(time);
}

void GridState::validate() const {
  require(u.size() >= 2, "grid state needs at least two points");
  require(u.size() == ut.size(), "displacement and velocity grids must match");
  require(x_spacing > 0.0, "grid spacing must be > 0");
  require(finite(), "grid state has non-finite entries");
  if (u.front().norm_sq() != 0.0 || u.back().norm_sq() != 0.0 || ut.front().norm_sq() != 0.0 ||
      ut.back().norm_sq() != 0.0)
    throw BoundaryError("grid state endpoints must be exactly zero");
}

std::vector<VectorSample> sample_function_on_grid(const Profile& profile, double length_l,
                                                  int num_points) {
  if (num_points < 2) throw ParameterError("need at least two grid points");
  if (!(length_l > 0.0)) throw ParameterError("length_l must be > 0");
  std::vector<VectorSample> out(static_cast<std::size_t>(num_points));
  const double h = length_l / (num_points - 1);
  for (int j = 0; j < num_points; ++j) {
    const double x = (j == num_points - 1) ? length_l : j * h;
    out[static_cast<std::size_t>(j)] = profile(x);
  }
  return out;
}

GridState make_grid_state(const Profile& u0, const Profile& u1, double length_l, int num_points) {
  GridState g;
  g.x_spacing = length_l / (num_points - 1);
  g.u = sample_function_on_grid(u0, length_l, num_points);
  g.ut = sample_function_on_grid(u1, length_l, num_points);

  double scale = 0.0;
  for (const auto& s : g.u) scale = std::max(scale, std::sqrt(s.norm_sq()));
  for (const auto& s : g.ut) scale = std::max(scale, std::sqrt(s.norm_sq()));

  // Endpoint values must vanish up to roundoff of the profile evaluation
  // (e.g. sin(pi) != 0 exactly); anything larger is rejected.
  const double tol = 1e-9 * scale + 1e-300;
  for (auto* field : {&g.u, &g.ut}) {
    for (auto* s : {&field->front(), &field->back()}) {
      if (std::sqrt(s->norm_sq()) > tol)
        throw BoundaryError("initial data does not vanish at the string ends");
      *s = VectorSample{};
    }
  }
  g.validate();
  return g;
}

}  // namespace kirchhoff
