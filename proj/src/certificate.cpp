#include "kirchhoff/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace kirchhoff {

namespace {

constexpr double kPi = std::numbers::pi;

double pia_over_l(const WaveParameters& params) {
  return kPi * std::sqrt(params.a_sq) / params.length_l;
}

}  // namespace

void DecayConstants::validate() const {
  const bool finite = std::isfinite(epsilon) && std::isfinite(mu0) && std::isfinite(mu) &&
                      std::isfinite(big_M) && std::isfinite(dimensionless_damping);
  if (!finite) throw ParameterError("decay constants must be finite");
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be > 0");
  if (!(mu0 > 0.0)) throw ParameterError("mu0 must be > 0");
  if (!(mu > 0.0)) throw ParameterError("mu must be > 0");
  if (!(big_M > 1.0)) throw ParameterError("big_M must be > 1");
  if (!(dimensionless_damping >= 0.0))
    throw ParameterError("dimensionless_damping must be >= 0");
}

double mu0(const WaveParameters& params) {
  params.validate();
  const double ratio = 1.0 / pia_over_l(params);
  return ratio * (1.0 + 2.0 * params.damping_delta * ratio);
}

double choose_epsilon(const WaveParameters& params, double kappa) {
  params.validate();
  if (!(kappa > 0.0 && kappa < 1.0)) throw ParameterError("kappa must lie in (0, 1)");
  if (params.damping_delta == 0.0)
    throw CertificateError(
        "no decay certificate exists for an undamped string (damping_delta = 0)");
  return std::min(params.damping_delta, kappa * pia_over_l(params));
}

double decay_rate(double epsilon, double mu0_value) {
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be > 0");
  if (!(mu0_value > 0.0)) throw ParameterError("mu0 must be > 0");
  return 2.0 * epsilon / (1.0 + epsilon * mu0_value);
}

double overshoot_M(double epsilon, double mu0_value, const WaveParameters& params) {
  params.validate();
  if (!(epsilon > 0.0)) throw ParameterError("epsilon must be > 0");
  const double limit = pia_over_l(params);
  if (epsilon >= limit)
    throw ParameterError("epsilon must be strictly below pi a / l for the overshoot");
  return (1.0 + epsilon * mu0_value) / (1.0 - epsilon / limit);
}

MuMaxResult mu_max(const WaveParameters& params) {
  params.validate();
  const double dl = params.damping_delta / pia_over_l(params);
  MuMaxResult r;
  r.mu_max = 2.0 * params.damping_delta / (1.0 + dl * (1.0 + 2.0 * dl));
  r.cap = 2.0 / (1.0 + 2.0 * std::sqrt(2.0)) * pia_over_l(params);
  r.overdamped = dl > 1.0;
  return r;
}

DecayConstants derive_constants(const WaveParameters& params, double kappa) {
  DecayConstants c;
  c.epsilon = choose_epsilon(params, kappa);
  c.mu0 = mu0(params);
  c.mu = decay_rate(c.epsilon, c.mu0);
  c.big_M = overshoot_M(c.epsilon, c.mu0, params);
  c.dimensionless_damping = params.damping_delta / pia_over_l(params);
  c.validate();
  return c;
}

DecayVerdict certify_decay(const std::vector<EnergySample>& samples,
                           const DecayConstants& constants, double tolerance) {
  constants.validate();
  if (samples.empty()) throw CertificateError("empty trajectory");
  if (!(tolerance >= 0.0)) throw ParameterError("tolerance must be >= 0");

  const double t0 = samples.front().time;
  const double e0 = samples.front().energy_E;

  DecayVerdict v;
  v.worst_time = t0;
  if (e0 <= 0.0) {
    for (const auto& s : samples)
      if (s.energy_E > 0.0)
        throw CertificateError(
            "trajectory has zero initial energy but positive energy later");
    v.passed = true;
    v.max_ratio = 0.0;
    return v;
  }

  for (const auto& s : samples) {
    const double ratio = s.energy_E * std::exp(constants.mu * (s.time - t0)) / e0;
    if (ratio > v.max_ratio) {
      v.max_ratio = ratio;
      v.worst_time = s.time;
    }
  }
  v.passed = v.max_ratio <= constants.big_M * (1.0 + tolerance);
  return v;
}

double amplitude_bound(double elapsed_t, const DecayConstants& constants,
                       const WaveParameters& params, double initial_E0) {
  constants.validate();
  params.validate();
  if (!(initial_E0 >= 0.0)) throw ParameterError("initial energy must be >= 0");

  const double l = params.length_l;
  const double a_sq = params.a_sq;
  const double decayed = constants.big_M * initial_E0 * std::exp(-constants.mu * elapsed_t);
  if (params.b_coeff == 0.0) return 2.0 * l * l / (kPi * kPi * a_sq) * decayed;

  const double x = 4.0 * params.b_coeff / (a_sq * a_sq) * decayed;
  // (l^2 a^2/(pi^2 b)) (sqrt(1+x) - 1) rewritten without the cancellation.
  return l * l * a_sq / (kPi * kPi * params.b_coeff) * x / (1.0 + std::sqrt(1.0 + x));
}

AmplitudeVerdict certify_amplitude(const std::vector<EnergySample>& samples,
                                   const DecayConstants& constants,
                                   const WaveParameters& params, double initial_E0,
                                   double tolerance) {
  constants.validate();
  params.validate();
  if (samples.empty()) throw CertificateError("empty trajectory");
  if (!(tolerance >= 0.0)) throw ParameterError("tolerance must be >= 0");
  if (initial_E0 <= 0.0) {
    for (const auto& s : samples)
      if (s.energy_E > 0.0)
        throw CertificateError(
            "trajectory has zero initial energy but positive energy later");
  }

  const double t0 = samples.front().time;
  AmplitudeVerdict v;
  v.passed = true;
  v.worst_time = t0;
  for (const auto& s : samples) {
    const double bound = amplitude_bound(s.time - t0, constants, params, initial_E0);
    double ratio;
    if (bound > 0.0) {
      ratio = s.amp_sq / bound;
    } else {
      ratio = s.amp_sq > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    if (ratio > v.worst_ratio) {
      v.worst_ratio = ratio;
      v.worst_time = s.time;
    }
    if (!(s.amp_sq <= bound * (1.0 + tolerance))) v.passed = false;
  }
  return v;
}

CertificateReport certify(const std::vector<EnergySample>& samples,
                          const DecayConstants& constants, const WaveParameters& params,
                          double tolerance) {
  if (samples.empty()) throw CertificateError("empty trajectory");
  CertificateReport r;
  r.constants = constants;
  r.initial_E0 = samples.front().energy_E;
  const DecayVerdict d = certify_decay(samples, constants, tolerance);
  r.max_normalized_ratio = d.max_ratio;
  r.worst_sample_time = d.worst_time;
  r.verdict = d.passed;
  const AmplitudeVerdict a =
      certify_amplitude(samples, constants, params, r.initial_E0, tolerance);
  r.amplitude_verdict = a.passed;
  r.amplitude_worst_ratio = a.worst_ratio;
  r.amplitude_worst_time = a.worst_time;
  return r;
}

}  // namespace kirchhoff
