#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "kirchhoff/config.hpp"
#include "kirchhoff/harness.hpp"

namespace {

using namespace kirchhoff;

// Exit codes: 0 all verdicts pass, 1 certification failure, 2 configuration
// error, 3 numerical divergence or instability.
constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
  std::string out;
  std::uint64_t seed = 0;
  int modes = 0;
  double dt = 0.0;
  double t_end = 0.0;
  double kappa = 0.0;
  CLI::App* cmd = nullptr;

  void attach(CLI::App* c, bool run_flags = true) {
    cmd = c;
    c->add_option("--out", out, "write the primary artifact to this path");
    c->add_option("--kappa", kappa, "override the epsilon fraction in (0,1)");
    if (run_flags) {
      c->add_option("--seed", seed, "override the random preset seed");
      c->add_option("--modes", modes, "override the modal truncation");
      c->add_option("--dt", dt, "override the fixed time step");
      c->add_option("--t-end", t_end, "override the end time");
    }
  }

  bool has(const char* name) const { return cmd->count(name) > 0; }

  void apply(RunConfig& cfg) const {
    if (has("--seed")) cfg.initial.seed = seed;
    if (has("--modes")) cfg.num_modes = modes;
    if (has("--dt")) {
      cfg.integrator.dt = dt;
      cfg.dt_auto = false;
    }
    if (has("--t-end")) {
      cfg.integrator.t_end = t_end;
      cfg.t_end_auto = false;
    }
    if (has("--kappa")) cfg.kappa = kappa;
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open output file '" + path + "'");
  file << text;
  if (!file) throw ConfigError("cannot write output file '" + path + "'");
}

// The primary artifact goes to the chosen path; when no path is given it goes
// to stdout and the human summary moves to stderr so stdout stays parseable.
void emit(const std::string& path, const std::string& artifact, const std::string& summary) {
  if (path.empty()) {
    std::cout << artifact;
    std::cerr << summary;
  } else {
    write_text(path, artifact);
    std::cout << summary;
  }
}

int do_simulate(const std::string& config_path, const CommonFlags& flags) {
  RunConfig cfg = load_config_file(config_path).run;
  flags.apply(cfg);
  const SimulateProduct product = run_simulate(cfg);
  const std::string path = flags.has("--out") ? flags.out : cfg.csv_path;
  emit(path, product.csv, product.summary);
  return product.pass ? kExitPass : kExitFail;
}

int do_certify(const std::string& config_path, const CommonFlags& flags) {
  RunConfig cfg = load_config_file(config_path).run;
  flags.apply(cfg);
  const CertifyProduct product = run_certify(cfg);
  const std::string path = flags.has("--out") ? flags.out : cfg.report_path;
  if (path.empty())
    std::cout << product.report;
  else {
    write_text(path, product.report);
    std::cout << product.report;
  }
  return product.pass ? kExitPass : kExitFail;
}

int do_sweep(const std::string& config_path, const CommonFlags& flags) {
  const ParsedConfig parsed = load_config_file(config_path);
  SweepConfig sweep;
  if (parsed.has_sweep) {
    sweep = parsed.sweep;
  } else {
    sweep.base = parsed.run;
    sweep.deltas = {parsed.run.params.damping_delta};
    sweep.b_coeffs = {parsed.run.params.b_coeff};
    sweep.amplitudes = {parsed.run.initial.amplitude};
    sweep.seeds = {parsed.run.initial.seed};
  }
  flags.apply(sweep.base);
  if (flags.has("--seed")) sweep.seeds = {flags.seed};
  const SweepProduct product = run_sweep(sweep);
  const std::string path = flags.has("--out") ? flags.out : sweep.base.csv_path;
  emit(path, product.csv, product.summary);
  return product.pass ? kExitPass : kExitFail;
}

int do_constants(const std::string& config_path, const CommonFlags& flags) {
  ConstantsQuery query = load_constants_file(config_path);
  if (flags.has("--kappa")) query.kappa = flags.kappa;
  const std::string text = print_constants(query.params, query.kappa);
  if (flags.has("--out"))
    write_text(flags.out, text);
  else
    std::cout << text;
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Damped Kirchhoff string: simulation, monitors, decay certification"};
  app.require_subcommand(1);

  std::string sim_path, cert_path, sweep_path, const_path;
  CommonFlags sim_flags, cert_flags, sweep_flags, const_flags;

  CLI::App* sim = app.add_subcommand("simulate", "integrate one run and write the CSV series");
  sim->add_option("config", sim_path, "configuration file")->required();
  sim_flags.attach(sim);

  CLI::App* cert = app.add_subcommand("certify", "simulate and check the decay estimate");
  cert->add_option("config", cert_path, "configuration file")->required();
  cert_flags.attach(cert);

  CLI::App* swp = app.add_subcommand("sweep", "run a parameter grid of certifications");
  swp->add_option("config", sweep_path, "configuration file")->required();
  sweep_flags.attach(swp);

  CLI::App* cst = app.add_subcommand("constants", "evaluate the decay constants, no simulation");
  cst->add_option("config", const_path, "configuration file")->required();
  const_flags.attach(cst, /*run_flags=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (sim->parsed()) return do_simulate(sim_path, sim_flags);
    if (cert->parsed()) return do_certify(cert_path, cert_flags);
    if (swp->parsed()) return do_sweep(sweep_path, sweep_flags);
    if (cst->parsed()) return do_constants(const_path, const_flags);
  } catch (const StabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
