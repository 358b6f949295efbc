#include "kirchhoff/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace kirchhoff {

namespace {

using KeyMap = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

double parse_double(const std::string& path, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    fail(path, "expected a number, got '" + value + "'");
  }
  if (used != value.size()) fail(path, "expected a number, got '" + value + "'");
  if (!std::isfinite(out)) fail(path, "value must be finite");
  return out;
}

long parse_long(const std::string& path, const std::string& value) {
  std::size_t used = 0;
  long out = 0;
  try {
    out = std::stol(value, &used);
  } catch (const std::exception&) {
    fail(path, "expected an integer, got '" + value + "'");
  }
  if (used != value.size()) fail(path, "expected an integer, got '" + value + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& path, const std::string& value) {
  std::size_t used = 0;
  unsigned long long out = 0;
  try {
    out = std::stoull(value, &used);
  } catch (const std::exception&) {
    fail(path, "expected a nonnegative integer, got '" + value + "'");
  }
  if (used != value.size() || value.find('-') != std::string::npos)
    fail(path, "expected a nonnegative integer, got '" + value + "'");
  return static_cast<std::uint64_t>(out);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string cur;
  for (char ch : value) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) items.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) items.push_back(cur);
  return items;
}

std::vector<double> parse_double_list(const std::string& path, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(parse_double(path, item));
  if (out.empty()) fail(path, "list must not be empty");
  return out;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& path, const std::string& value) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(value)) out.push_back(parse_u64(path, item));
  if (out.empty()) fail(path, "list must not be empty");
  return out;
}

bool is_auto(const std::string& value) { return value == "auto"; }

const std::map<std::string, std::set<std::string>>& section_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"parameters",
       {"length_l", "damping_delta", "a_sq", "b_coeff", "tension_T0", "density_rho",
        "area_A", "youngs_E"}},
      {"initial", {"preset", "mode", "amplitude", "component", "count", "seed"}},
      {"solver",
       {"solver", "scheme", "modes", "dt", "t_end", "sample_stride", "rel_tol", "abs_tol",
        "fd_points", "safety_factor"}},
      {"monitor", {"epsilon", "kappa", "tolerance"}},
      {"output", {"csv", "report"}},
      {"sweep", {"delta", "b", "amplitude", "seed", "workers"}},
  };
  return keys;
}

std::map<std::string, KeyMap> tokenize(const std::string& text) {
  std::map<std::string, KeyMap> sections;
  std::istringstream in(text);
  std::string raw;
  std::string current;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      if (!section_keys().count(current))
        throw ConfigError("unknown section [" + current + "]");
      if (sections.count(current))
        throw ConfigError("duplicate section [" + current + "]");
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    if (current.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    if (!section_keys().at(current).count(key))
      throw ConfigError(current + "." + key + ": unknown key");
    if (!sections[current].emplace(key, value).second)
      throw ConfigError(current + "." + key + ": duplicate key");
  }
  return sections;
}

const std::string* find(const KeyMap& map, const std::string& key) {
  const auto it = map.find(key);
  return it == map.end() ? nullptr : &it->second;
}

WaveParameters interpret_parameters(const KeyMap& map) {
  const bool wave_form = map.count("a_sq") || map.count("b_coeff");
  const bool physical_form = map.count("tension_T0") || map.count("density_rho") ||
                             map.count("area_A") || map.count("youngs_E");
  if (wave_form && physical_form)
    fail("parameters",
         "choose either the wave form (a_sq, b_coeff) or the physical form "
         "(tension_T0, density_rho, area_A, youngs_E), not both");
  if (!wave_form && !physical_form)
    fail("parameters", "missing a_sq (wave form) or the physical constants");

  const auto get = [&](const char* key, const char* full) -> double {
    const std::string* v = find(map, key);
    if (!v) fail(std::string("parameters.") + key, std::string("required by the ") + full);
    return parse_double(std::string("parameters.") + key, *v);
  };
  const auto get_or = [&](const char* key, double fallback) -> double {
    const std::string* v = find(map, key);
    return v ? parse_double(std::string("parameters.") + key, *v) : fallback;
  };

  WaveParameters params;
  if (wave_form) {
    params.length_l = get("length_l", "wave form");
    params.a_sq = get("a_sq", "wave form");
    params.b_coeff = get_or("b_coeff", 0.0);
    params.damping_delta = get_or("damping_delta", 0.0);
  } else {
    PhysicalString phys;
    phys.tension_T0 = get("tension_T0", "physical form");
    phys.density_rho = get("density_rho", "physical form");
    phys.area_A = get("area_A", "physical form");
    phys.youngs_E = get("youngs_E", "physical form");
    phys.length_l = get("length_l", "physical form");
    phys.damping_delta = get_or("damping_delta", 0.0);
    try {
      params = derive_wave_parameters(phys);
    } catch (const ParameterError& e) {
      fail("parameters", e.what());
    }
  }
  try {
    params.validate();
  } catch (const ParameterError& e) {
    fail("parameters", e.what());
  }
  return params;
}

InitialSpec interpret_initial(const KeyMap& map) {
  const std::string* preset = find(map, "preset");
  if (!preset) fail("initial.preset", "required");

  InitialSpec spec;
  std::set<std::string> allowed = {"preset", "amplitude"};
  if (*preset == "single_mode") {
    spec.preset = PresetKind::single_mode;
    allowed.insert({"mode", "component"});
  } else if (*preset == "polynomial_bump") {
    spec.preset = PresetKind::polynomial_bump;
  } else if (*preset == "random_modes") {
    spec.preset = PresetKind::random_modes;
    allowed.insert({"count", "seed"});
  } else {
    fail("initial.preset", "unknown preset '" + *preset + "'");
  }
  for (const auto& [key, value] : map) {
    (void)value;
    if (!allowed.count(key))
      fail("initial." + key, "not a key of preset " + *preset);
  }

  if (const std::string* v = find(map, "amplitude"))
    spec.amplitude = parse_double("initial.amplitude", *v);
  if (const std::string* v = find(map, "mode")) {
    const long mode = parse_long("initial.mode", *v);
    if (mode < 1) fail("initial.mode", "must be >= 1");
    spec.mode = static_cast<int>(mode);
  }
  if (const std::string* v = find(map, "component")) {
    if (*v == "v")
      spec.component = 0;
    else if (*v == "w")
      spec.component = 1;
    else
      fail("initial.component", "must be 'v' or 'w'");
  }
  if (const std::string* v = find(map, "count")) {
    const long count = parse_long("initial.count", *v);
    if (count < 1) fail("initial.count", "must be >= 1");
    spec.count = static_cast<int>(count);
  }
  if (const std::string* v = find(map, "seed")) spec.seed = parse_u64("initial.seed", *v);
  return spec;
}

void interpret_solver(const KeyMap& map, RunConfig& cfg) {
  if (const std::string* v = find(map, "solver")) {
    if (*v == "modal")
      cfg.solver = SolverChoice::modal;
    else if (*v == "fd")
      cfg.solver = SolverChoice::fd;
    else if (*v == "both")
      cfg.solver = SolverChoice::both;
    else
      fail("solver.solver", "must be 'modal', 'fd' or 'both'");
  }
  if (const std::string* v = find(map, "scheme")) {
    if (*v == "rk4")
      cfg.integrator.scheme = Scheme::rk4;
    else if (*v == "rk45")
      cfg.integrator.scheme = Scheme::rk45;
    else
      fail("solver.scheme", "must be 'rk4' or 'rk45'");
  }
  if (const std::string* v = find(map, "modes")) {
    const long modes = parse_long("solver.modes", *v);
    if (modes < 1) fail("solver.modes", "must be >= 1");
    cfg.num_modes = static_cast<int>(modes);
  }
  if (const std::string* v = find(map, "dt")) {
    if (!is_auto(*v)) {
      const double dt = parse_double("solver.dt", *v);
      if (!(dt > 0.0)) fail("solver.dt", "must be > 0 (or 'auto')");
      cfg.integrator.dt = dt;
      cfg.dt_auto = false;
    }
  }
  if (const std::string* v = find(map, "t_end")) {
    if (!is_auto(*v)) {
      const double t_end = parse_double("solver.t_end", *v);
      if (!(t_end > 0.0)) fail("solver.t_end", "must be > 0 (or 'auto')");
      cfg.integrator.t_end = t_end;
      cfg.t_end_auto = false;
    }
  }
  if (const std::string* v = find(map, "sample_stride")) {
    if (!is_auto(*v)) {
      const long stride = parse_long("solver.sample_stride", *v);
      if (stride < 1) fail("solver.sample_stride", "must be >= 1 (or 'auto')");
      cfg.integrator.sample_stride = static_cast<int>(stride);
      cfg.stride_auto = false;
    }
  }
  if (const std::string* v = find(map, "rel_tol")) {
    const double tol = parse_double("solver.rel_tol", *v);
    if (!(tol > 0.0)) fail("solver.rel_tol", "must be > 0");
    cfg.integrator.rel_tol = tol;
  }
  if (const std::string* v = find(map, "abs_tol")) {
    const double tol = parse_double("solver.abs_tol", *v);
    if (!(tol > 0.0)) fail("solver.abs_tol", "must be > 0");
    cfg.integrator.abs_tol = tol;
  }
  if (const std::string* v = find(map, "fd_points")) {
    const long points = parse_long("solver.fd_points", *v);
    if (points < 3) fail("solver.fd_points", "must be >= 3");
    cfg.fd_interior_points = static_cast<int>(points);
  }
  if (const std::string* v = find(map, "safety_factor")) {
    const double s = parse_double("solver.safety_factor", *v);
    if (!(s > 0.0 && s <= 1.0)) fail("solver.safety_factor", "must lie in (0, 1]");
    cfg.fd_safety_factor = s;
  }
}

void interpret_monitor(const KeyMap& map, RunConfig& cfg) {
  if (const std::string* v = find(map, "epsilon")) {
    if (!is_auto(*v)) {
      const double eps = parse_double("monitor.epsilon", *v);
      if (!(eps >= 0.0)) fail("monitor.epsilon", "must be >= 0 (or 'auto')");
      cfg.epsilon.automatic = false;
      cfg.epsilon.value = eps;
    }
  }
  if (const std::string* v = find(map, "kappa")) {
    const double kappa = parse_double("monitor.kappa", *v);
    if (!(kappa > 0.0 && kappa < 1.0)) fail("monitor.kappa", "must lie in (0, 1)");
    cfg.kappa = kappa;
  }
  if (const std::string* v = find(map, "tolerance")) {
    const double tol = parse_double("monitor.tolerance", *v);
    if (!(tol > 0.0)) fail("monitor.tolerance", "must be > 0");
    cfg.tolerance = tol;
  }
}

void interpret_output(const KeyMap& map, RunConfig& cfg) {
  if (const std::string* v = find(map, "csv")) cfg.csv_path = *v;
  if (const std::string* v = find(map, "report")) cfg.report_path = *v;
}

SweepConfig interpret_sweep(const KeyMap& map, const RunConfig& base) {
  SweepConfig sweep;
  sweep.base = base;
  sweep.deltas = {base.params.damping_delta};
  sweep.b_coeffs = {base.params.b_coeff};
  sweep.amplitudes = {base.initial.amplitude};
  sweep.seeds = {base.initial.seed};
  if (const std::string* v = find(map, "delta")) sweep.deltas = parse_double_list("sweep.delta", *v);
  if (const std::string* v = find(map, "b")) sweep.b_coeffs = parse_double_list("sweep.b", *v);
  if (const std::string* v = find(map, "amplitude"))
    sweep.amplitudes = parse_double_list("sweep.amplitude", *v);
  if (const std::string* v = find(map, "seed")) sweep.seeds = parse_u64_list("sweep.seed", *v);
  if (const std::string* v = find(map, "workers")) {
    const long workers = parse_long("sweep.workers", *v);
    if (workers < 1) fail("sweep.workers", "must be >= 1");
    sweep.workers = static_cast<int>(workers);
  }
  for (double d : sweep.deltas)
    if (!(d >= 0.0)) fail("sweep.delta", "entries must be >= 0");
  for (double b : sweep.b_coeffs)
    if (!(b >= 0.0)) fail("sweep.b", "entries must be >= 0");
  sweep.validate();
  return sweep;
}

}  // namespace

void RunConfig::validate() const {
  params.validate();
  if (num_modes < 1) throw ConfigError("solver.modes: must be >= 1");
  if (initial.preset == PresetKind::single_mode && initial.mode > num_modes)
    throw ConfigError("initial.mode: exceeds solver.modes");
  if (initial.preset == PresetKind::random_modes && initial.count > num_modes)
    throw ConfigError("initial.count: exceeds solver.modes");
  if (!(kappa > 0.0 && kappa < 1.0)) throw ConfigError("monitor.kappa: must lie in (0, 1)");
  if (!epsilon.automatic && !(epsilon.value >= 0.0))
    throw ConfigError("monitor.epsilon: must be >= 0");
  if (!(tolerance > 0.0)) throw ConfigError("monitor.tolerance: must be > 0");
  if (fd_interior_points < 3) throw ConfigError("solver.fd_points: must be >= 3");
  if (!(fd_safety_factor > 0.0 && fd_safety_factor <= 1.0))
    throw ConfigError("solver.safety_factor: must lie in (0, 1]");
  if (!dt_auto && !(integrator.dt > 0.0)) throw ConfigError("solver.dt: must be > 0");
  if (!t_end_auto && !(integrator.t_end > 0.0)) throw ConfigError("solver.t_end: must be > 0");
}

void SweepConfig::validate() const {
  base.validate();
  if (deltas.empty() || b_coeffs.empty() || amplitudes.empty() || seeds.empty())
    throw ConfigError("sweep: grid must be non-empty in every dimension");
  if (workers < 0) throw ConfigError("sweep.workers: must be >= 1");
}

ParsedConfig parse_config(const std::string& text) {
  const auto sections = tokenize(text);

  const auto section = [&](const char* name) -> const KeyMap& {
    static const KeyMap empty;
    const auto it = sections.find(name);
    return it == sections.end() ? empty : it->second;
  };

  if (!sections.count("parameters")) fail("parameters", "section required");
  if (!sections.count("initial")) fail("initial", "section required");

  ParsedConfig parsed;
  parsed.run.params = interpret_parameters(section("parameters"));
  parsed.run.initial = interpret_initial(section("initial"));
  interpret_solver(section("solver"), parsed.run);
  interpret_monitor(section("monitor"), parsed.run);
  interpret_output(section("output"), parsed.run);
  parsed.run.validate();

  if (sections.count("sweep")) {
    parsed.has_sweep = true;
    parsed.sweep = interpret_sweep(section("sweep"), parsed.run);
  }
  return parsed;
}

ParsedConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

ConstantsQuery parse_constants_config(const std::string& text) {
  const auto sections = tokenize(text);
  if (!sections.count("parameters")) fail("parameters", "section required");

  ConstantsQuery query;
  query.params = interpret_parameters(sections.at("parameters"));
  const auto monitor = sections.find("monitor");
  if (monitor != sections.end()) {
    if (const std::string* v = find(monitor->second, "kappa")) {
      const double kappa = parse_double("monitor.kappa", *v);
      if (!(kappa > 0.0 && kappa < 1.0)) fail("monitor.kappa", "must lie in (0, 1)");
      query.kappa = kappa;
    }
  }
  return query;
}

ConstantsQuery load_constants_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_constants_config(buffer.str());
}

ModalState make_initial_state(const InitialSpec& spec, double length_l, int num_modes) {
  if (num_modes < 1) throw ConfigError("solver.modes: must be >= 1");
  if (!(length_l > 0.0)) throw ParameterError("length_l must be > 0");
  if (!std::isfinite(spec.amplitude)) throw ConfigError("initial.amplitude: must be finite");

  switch (spec.preset) {
    case PresetKind::single_mode: {
      if (spec.mode > num_modes) throw ConfigError("initial.mode: exceeds solver.modes");
      ModalState state = ModalState::zero(num_modes);
      VectorSample& b = state.coeff[static_cast<std::size_t>(spec.mode - 1)];
      if (spec.component == 0)
        b.v = spec.amplitude;
      else
        b.w = spec.amplitude;
      return state;
    }
    case PresetKind::polynomial_bump: {
      const double amp = spec.amplitude;
      const double l = length_l;
      const Profile u0 = [amp, l](double x) {
        return VectorSample{amp * 4.0 * x * (l - x) / (l * l), 0.0};
      };
      const Profile u1 = [](double) { return VectorSample{}; };
      return project_initial_data(u0, u1, l, num_modes);
    }
    case PresetKind::random_modes: {
      if (spec.count > num_modes) throw ConfigError("initial.count: exceeds solver.modes");
      ModalState state = ModalState::zero(num_modes);
      std::mt19937_64 rng(spec.seed);
      const auto uniform = [&rng]() {
        // 53-bit mantissa draw in [0, 1); spelled out so every platform and
        // library produces the same stream for the same seed.
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
      };
      for (int n = 1; n <= spec.count; ++n) {
        const double scale = spec.amplitude / (static_cast<double>(n) * static_cast<double>(n));
        const auto draw = [&]() { return scale * (2.0 * uniform() - 1.0); };
        VectorSample& b = state.coeff[static_cast<std::size_t>(n - 1)];
        VectorSample& bd = state.coeff_dot[static_cast<std::size_t>(n - 1)];
        b.v = draw();
        b.w = draw();
        bd.v = draw();
        bd.w = draw();
      }
      return state;
    }
  }
  throw ConfigError("initial.preset: unknown preset");
}

}  // namespace kirchhoff
