#pragma once

#include <vector>

#include "kirchhoff/core.hpp"
#include "kirchhoff/energy.hpp"

namespace kirchhoff {

// ---------------------------------------------------------------------------
// Explicit decay constants for the damped string and sample-based
// certification of the uniform estimate
//   E(t) <= M exp(-mu (t - t0)) E(t0),  M > 1, mu > 0,
// together with the quasi-steady amplitude bound on int |u|^2 dx.
// ---------------------------------------------------------------------------

/// The certified constants. dimensionless_damping = delta l / (pi a) locates
/// the configuration on the damping axis; the optimum sits at 1/sqrt(2).
struct DecayConstants {
  double epsilon = 0.0;               // Lyapunov mixing parameter, 0 < eps <= delta
  double mu0 = 0.0;                   // (l/(pi a)) (1 + 2 delta l/(pi a))
  double mu = 0.0;                    // decay rate 2 eps / (1 + eps mu0)
  double big_M = 0.0;                 // overshoot (1 + eps mu0)/(1 - eps l/(pi a))
  double dimensionless_damping = 0.0; // delta l / (pi a)

  /// Throws ParameterError unless epsilon > 0, mu0 > 0, mu > 0, big_M > 1,
  /// dimensionless_damping >= 0, all finite.
  void validate() const;
};

/// mu0 = (l/(pi a)) (1 + 2 delta l/(pi a)).
double mu0(const WaveParameters& params);

/// epsilon = min(delta, kappa pi a / l) with kappa in (0,1); keeps the strict
/// inequality epsilon < pi a / l that the overshoot denominator needs while
/// taking epsilon = delta exactly whenever light damping allows it.
/// Throws CertificateError when delta = 0: the decay estimate needs damping.
double choose_epsilon(const WaveParameters& params, double kappa = 0.99);

/// mu = 2 epsilon / (1 + epsilon mu0).
double decay_rate(double epsilon, double mu0_value);

/// M = (1 + epsilon mu0) / (1 - epsilon l/(pi a)); always > 1.
/// Throws ParameterError when epsilon >= pi a / l.
double overshoot_M(double epsilon, double mu0_value, const WaveParameters& params);

/// Best decay rate over admissible epsilon, with the universal cap.
struct MuMaxResult {
  double mu_max = 0.0;             // 2 delta / (1 + (dl)(1 + 2 dl)), dl = delta l/(pi a)
  double cap = 0.0;                // (2/(1 + 2 sqrt 2)) pi a / l, attained at dl = 1/sqrt(2)
  bool overdamped = false;         // delta l/(pi a) > 1: formula evaluated but the
                                   // epsilon = delta choice is no longer admissible
};

MuMaxResult mu_max(const WaveParameters& params);

/// Full constant set for the given configuration.
DecayConstants derive_constants(const WaveParameters& params, double kappa = 0.99);

/// Outcome of checking E(t) exp(mu (t - t0)) / E(t0) <= M over a trajectory.
struct DecayVerdict {
  bool passed = false;
  double max_ratio = 0.0;  // max over samples of E(t) exp(mu (t-t0)) / E(t0)
  double worst_time = 0.0; // sample time attaining the max
};

/// Outcome of checking int|u|^2 dx <= amplitude_bound(t) over a trajectory.
struct AmplitudeVerdict {
  bool passed = false;
  double worst_ratio = 0.0; // max over samples of amp_sq / bound
  double worst_time = 0.0;
};

/// Sample-based check of the decay estimate. E(t0) is taken from the first
/// sample. Throws CertificateError when E(t0) = 0 but a later sample has
/// positive energy (the trajectory cannot have come from that initial state).
DecayVerdict certify_decay(const std::vector<EnergySample>& samples,
                           const DecayConstants& constants, double tolerance = 1e-6);

/// Closed-form bound on int |u|^2 dx at elapsed time t (measured from the
/// instant where the energy equals initial_E0):
///   b > 0: (l^2 a^2/(pi^2 b)) (sqrt(1 + (4b/a^4) M E0 exp(-mu t)) - 1),
///   b = 0: (2 l^2/(pi^2 a^2)) M E0 exp(-mu t)  (the b -> 0 limit).
/// Evaluated in the difference-free form x / (1 + sqrt(1 + x)) so small b
/// does not cancel catastrophically.
double amplitude_bound(double elapsed_t, const DecayConstants& constants,
                       const WaveParameters& params, double initial_E0);

AmplitudeVerdict certify_amplitude(const std::vector<EnergySample>& samples,
                                   const DecayConstants& constants,
                                   const WaveParameters& params, double initial_E0,
                                   double tolerance = 1e-6);

/// Constants plus both verdicts for one trajectory.
struct CertificateReport {
  DecayConstants constants;
  double initial_E0 = 0.0;
  double max_normalized_ratio = 0.0; // decay check maximum
  double worst_sample_time = 0.0;
  bool verdict = false;              // decay estimate pass/fail
  bool amplitude_verdict = false;    // amplitude bound pass/fail
  double amplitude_worst_ratio = 0.0;
  double amplitude_worst_time = 0.0;
};

/// Runs both checks with E(t0) taken from the first sample.
CertificateReport certify(const std::vector<EnergySample>& samples,
                          const DecayConstants& constants, const WaveParameters& params,
                          double tolerance = 1e-6);

}  // namespace kirchhoff
