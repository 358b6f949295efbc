#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace kirchhoff {

// ---------------------------------------------------------------------------
// Error taxonomy. Everything thrown by the library derives from Error so the
// CLI can map failures onto its exit codes.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical or derived parameter is outside its admissible domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Initial or boundary data violates the fixed-end condition u(0)=u(l)=0.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

/// A time step violates its stability constraint (CFL breach, adaptive
/// step-size underflow).
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// A state stopped being finite during integration.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Two sampled series that must share sample times do not.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Certification is impossible (undamped system) or the supplied trajectory
/// is inconsistent with its own initial energy.
class CertificateError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// One sample of the transverse displacement vector u = (v, w).
/// |u|^2 is always the Euclidean norm v^2 + w^2.
struct VectorSample {
  double v = 0.0;
  double w = 0.0;

  double norm_sq() const { return v * v + w * w; }

  VectorSample& operator+=(const VectorSample& o) {
    v += o.v;
    w += o.w;
    return *this;
  }
};

inline VectorSample operator+(VectorSample a, const VectorSample& b) { return a += b; }
inline VectorSample operator-(const VectorSample& a, const VectorSample& b) {
  return {a.v - b.v, a.w - b.w};
}
inline VectorSample operator*(double s, const VectorSample& a) { return {s * a.v, s * a.w}; }
inline double dot(const VectorSample& a, const VectorSample& b) { return a.v * b.v + a.w * b.w; }

/// Raw material and geometry constants of the string. Units are any
/// consistent system; nothing is enforced at runtime.
struct PhysicalString {
  double tension_T0 = 0.0;    // initial axial tension
  double density_rho = 0.0;   // mass density
  double area_A = 0.0;        // cross-section area
  double youngs_E = 0.0;      // Young's modulus
  double length_l = 0.0;      // string length
  double damping_delta = 0.0; // viscous damping coefficient, >= 0

  /// Throws ParameterError unless all constants are strictly positive
  /// (damping may be zero, which disables certification but allows
  /// conservation runs).
  void validate() const;
};

/// Coefficients of the wave equation
///   u_tt + 2 delta u_t = (a^2 + b int_0^l |u_x|^2 dx) u_xx.
struct WaveParameters {
  double length_l = 0.0;
  double damping_delta = 0.0;
  double a_sq = 0.0;    // linear wave speed squared
  double b_coeff = 0.0; // nonlocal stiffening coefficient, >= 0

  double wave_speed() const { return std::sqrt(a_sq); }

  void validate() const;
};

/// a^2 = T0 / (rho A), b = E / (2 rho l); l and delta copied through.
WaveParameters derive_wave_parameters(const PhysicalString& phys);

/// Sine-basis description of the field at one instant:
///   u(x) = sum_n coeff[n-1] sin(n pi x / l),  n = 1..N.
/// The reconstruction vanishes at x = 0 and x = l for any coefficients, so
/// the fixed-end condition is built in.
struct ModalState {
  double time = 0.0;
  std::vector<VectorSample> coeff;     // b_n
  std::vector<VectorSample> coeff_dot; // d b_n / dt

  int num_modes() const { return static_cast<int>(coeff.size()); }

  static ModalState zero(int num_modes, double time = 0.0);

  bool finite() const;

  /// Throws ParameterError on empty/mismatched coefficient arrays or
  /// non-finite entries.
  void validate() const;
};

/// Collocated samples of u and u_t on a uniform grid covering [0, l],
/// endpoints included. Admissible states hold exact zeros at both ends.
struct GridState {
  double time = 0.0;
  double x_spacing = 0.0;
  std::vector<VectorSample> u;
  std::vector<VectorSample> ut;

  int num_points() const { return static_cast<int>(u.size()); }
  double length() const { return x_spacing * (num_points() - 1); }

  static GridState zero(int num_points, double length_l, double time = 0.0);

  bool finite() const;
  void validate() const;
};

/// Continuous vector-valued profile of x, defined on [0, l].
using Profile = std::function<VectorSample(double)>;

/// Uniform samples of a profile on [0, l], endpoints included. No boundary
/// snapping; callers that need an admissible GridState use make_grid_state.
std::vector<VectorSample> sample_function_on_grid(const Profile& profile, double length_l,
                                                  int num_points);

/// Builds an admissible GridState from displacement and velocity profiles.
/// Endpoint samples must vanish to relative precision; they are then pinned
/// to exact zero. Throws BoundaryError otherwise.
GridState make_grid_state(const Profile& u0, const Profile& u1, double length_l, int num_points);

}  // namespace kirchhoff
