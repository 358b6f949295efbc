#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kirchhoff/core.hpp"
#include "kirchhoff/fd.hpp"
#include "kirchhoff/modal.hpp"

namespace kirchhoff {

// ---------------------------------------------------------------------------
// Run configuration: a small INI-style document with sections
//   [parameters] [initial] [solver] [monitor] [output] [sweep]
// Unknown sections and keys are rejected with their full "section.key" path.
// The exact grammar is documented in the README.
// ---------------------------------------------------------------------------

enum class SolverChoice { modal, fd, both };

enum class PresetKind { single_mode, polynomial_bump, random_modes };

/// Named initial-condition presets. The canonical initial state is modal:
/// grid solvers start from the reconstruction of the projected data, so both
/// solvers integrate exactly the same initial condition.
struct InitialSpec {
  PresetKind preset = PresetKind::single_mode;
  int mode = 1;              // single_mode: which sine mode
  double amplitude = 1.0;    // every preset
  int component = 0;         // single_mode: 0 = v, 1 = w
  int count = 4;             // random_modes: how many leading modes
  std::uint64_t seed = 0;    // random_modes
};

/// Lyapunov epsilon policy: automatic (choose from damping and kappa) or an
/// explicit value.
struct EpsilonPolicy {
  bool automatic = true;
  double value = 0.0;
};

struct RunConfig {
  WaveParameters params;
  InitialSpec initial;
  SolverChoice solver = SolverChoice::modal;
  int num_modes = 32;

  IntegratorConfig integrator; // dt/t_end/stride filled once resolved
  bool dt_auto = true;
  bool t_end_auto = true;
  bool stride_auto = true;

  int fd_interior_points = 199;
  double fd_safety_factor = 0.9;

  EpsilonPolicy epsilon;
  double kappa = 0.99;
  double tolerance = 1e-6; // certification tolerance

  std::string csv_path;    // empty: write to stdout
  std::string report_path; // empty: write to stdout

  /// Structural checks that do not depend on auto-resolution.
  void validate() const;
};

struct SweepConfig {
  RunConfig base;
  std::vector<double> deltas;
  std::vector<double> b_coeffs;
  std::vector<double> amplitudes;
  std::vector<std::uint64_t> seeds;
  int workers = 0; // 0: pick from hardware concurrency

  std::size_t num_cells() const {
    return deltas.size() * b_coeffs.size() * amplitudes.size() * seeds.size();
  }

  void validate() const;
};

struct ParsedConfig {
  RunConfig run;
  bool has_sweep = false;
  SweepConfig sweep; // meaningful only when has_sweep
};

/// Parses a configuration document. Throws ConfigError with the offending
/// "section.key" path (or line number for syntax errors).
ParsedConfig parse_config(const std::string& text);

/// Reads the file and parses it; file-system failures become ConfigError.
ParsedConfig load_config_file(const std::string& path);

/// What the constants command needs: parameters and the epsilon fraction.
struct ConstantsQuery {
  WaveParameters params;
  double kappa = 0.99;
};

/// Lenient parse for formula-only queries: [parameters] is required and
/// monitor.kappa is honored; any other well-formed sections are accepted and
/// ignored, so a full run config works here too.
ConstantsQuery parse_constants_config(const std::string& text);
ConstantsQuery load_constants_file(const std::string& path);

/// Builds the canonical modal initial state for a preset.
///   single_mode:      b_mode = amplitude on the chosen component
///   polynomial_bump:  projection of amplitude * 4 x (l - x) / l^2 on v
///   random_modes:     per mode n <= count, each of (b.v, b.w, bdot.v, bdot.w)
///                     drawn uniformly from [-amplitude/n^2, amplitude/n^2)
///                     using a seeded mt19937_64 in a fixed draw order
ModalState make_initial_state(const InitialSpec& spec, double length_l, int num_modes);

}  // namespace kirchhoff
