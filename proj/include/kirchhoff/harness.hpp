#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kirchhoff/certificate.hpp"
#include "kirchhoff/config.hpp"
#include "kirchhoff/energy.hpp"
#include "kirchhoff/fd.hpp"

namespace kirchhoff {

// ---------------------------------------------------------------------------
// Run orchestration: resolve the automatic knobs of a RunConfig, execute the
// chosen solver(s), attach the monitors and the certificate, and render the
// results as CSV and key-value text. All functions are pure with respect to
// the file system; the CLI decides where the strings go.
// ---------------------------------------------------------------------------

/// Everything produced by one run.
struct RunOutcome {
  WaveParameters params;
  SolverChoice solver = SolverChoice::modal;
  int num_modes = 0;
  Scheme scheme = Scheme::rk4;
  double resolved_dt = 0.0;     // modal fixed step (0 when adaptive)
  double resolved_t_end = 0.0;
  int resolved_stride = 1;

  std::vector<EnergySample> samples; // modal samples, or fd samples for solver = fd

  bool has_discrepancy = false;      // solver = both
  DiscrepancyReport discrepancy;

  double epsilon = 0.0;
  bool has_constants = false;
  DecayConstants constants;          // valid when has_constants
  CertificateReport report;          // valid when has_constants

  bool margins_applicable = false;   // margin gate runs only on modal samples
  bool margins_ok = true;
  double worst_margin = 0.0;         // smallest relative slack seen
  double margin_tolerance = 1e-10;

  std::string note;                  // human-readable remarks, may be empty

  /// Overall verdict: margins (when applicable) and certificate (when
  /// constants exist) all pass.
  bool all_pass() const;
};

/// Resolves auto knobs, integrates, monitors, certifies.
RunOutcome execute_run(const RunConfig& cfg);

/// CSV with header
///   t,E,G,V,kinetic,grad_sq,amp_sq,dE_residual,scheefer_margin,sandwich_lo,
///   sandwich_hi,bound_ME_exp,amp_bound
/// one row per sample, 17 significant digits. Margin columns are relative
/// slacks (normalized by the sample's energy); bound columns are nan when no
/// decay constants exist (undamped run). solver = both appends
/// fd_max_diff,fd_l2_diff columns.
std::string render_csv(const RunOutcome& out);

/// Key-value summary block (one "key = value" per line).
std::string render_summary(const RunOutcome& out);

/// Key-value certificate report; requires constants.
std::string render_certificate(const RunOutcome& out);

struct SimulateProduct {
  RunOutcome outcome;
  std::string csv;
  std::string summary;
  bool pass = false;
};

struct CertifyProduct {
  RunOutcome outcome;
  std::string report;
  bool pass = false;
};

SimulateProduct run_simulate(const RunConfig& cfg);

/// Simulation plus certification; throws CertificateError when the
/// configuration cannot be certified (undamped, or epsilon forced to 0).
CertifyProduct run_certify(const RunConfig& cfg);

/// One sweep cell result. Cells that throw are recorded with their error in
/// status and never disturb other cells.
struct SweepRow {
  double delta = 0.0;
  double b_coeff = 0.0;
  double amplitude = 0.0;
  std::uint64_t seed = 0;
  bool ok = false;
  DecayConstants constants;
  double initial_E0 = 0.0;
  double max_ratio = 0.0;
  bool decay_pass = false;
  bool amplitude_pass = false;
  std::string status; // "ok" or "error: ..."
  std::string note;
};

struct SweepProduct {
  std::vector<SweepRow> rows;
  std::string csv;
  std::string summary;
  int pass_count = 0;
  int fail_count = 0;
  int error_count = 0;
  bool pass = false; // every cell ok and certified
};

/// Executes every cell of the grid (delta x b x amplitude x seed, row-major
/// in that order) on a pool of worker threads; output order and content are
/// deterministic for a fixed config.
SweepProduct run_sweep(const SweepConfig& sweep);

/// Pure formula evaluation of mu0, the default epsilon, mu, M, mu_max and
/// the universal cap for the given parameters; no simulation. For delta = 0
/// the epsilon-dependent entries render as nan with an explanatory note.
std::string print_constants(const WaveParameters& params, double kappa = 0.99);

/// Doubles rendered with 17 significant digits (lossless round-trip).
std::string fmt17(double x);

}  // namespace kirchhoff
