#include "transhock/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "transhock/linear_fbp.hpp"

namespace transhock {

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::LocateOnly: return "locate-only";
    case RunMode::LinearOnly: return "linear-only";
    case RunMode::Full: return "full";
  }
  return "full";
}

RunMode run_mode_from_string(const std::string& s) {
  if (s == "locate-only") return RunMode::LocateOnly;
  if (s == "linear-only") return RunMode::LinearOnly;
  if (s == "full") return RunMode::Full;
  throw ConfigError("unknown mode '" + s + "' (expected locate-only | linear-only | full)");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw ConfigError("bad integer value for " + key + ": '" + v + "'");
  }
}

}  // namespace

void apply_override(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = unquote(trim(raw));
  if (key == "gas.gamma") c.gas.gamma = to_double(key, v);
  else if (key == "gas.c_v") c.gas.c_v = to_double(key, v);
  else if (key == "gas.s0") c.gas.s0 = to_double(key, v);
  else if (key == "upstream.p") c.upstream_p = to_double(key, v);
  else if (key == "upstream.mach") { c.upstream_mach = to_double(key, v); c.upstream_full_state = false; }
  else if (key == "upstream.q") { c.upstream_q = to_double(key, v); c.upstream_full_state = true; }
  else if (key == "upstream.s") c.upstream_s = to_double(key, v);
  else if (key == "nozzle.length") c.length = to_double(key, v);
  else if (key == "nozzle.sigma") c.sigma = to_double(key, v);
  else if (key == "nozzle.theta") { c.theta_expr = v; c.theta_csv.clear(); }
  else if (key == "nozzle.theta_csv") { c.theta_csv = v; c.theta_expr.clear(); }
  else if (key == "exit_pressure.profile") { c.pressure_expr = v; c.pressure_csv.clear(); }
  else if (key == "exit_pressure.profile_csv") { c.pressure_csv = v; c.pressure_expr.clear(); }
  else if (key == "grids.eta_nodes") c.eta_nodes = to_int(key, v);
  else if (key == "grids.supersonic_xi_nodes") c.supersonic_xi_nodes = to_int(key, v);
  else if (key == "grids.subsonic_xi_nodes") c.subsonic_xi_nodes = to_int(key, v);
  else if (key == "grids.scan_cells") c.scan_cells = to_int(key, v);
  else if (key == "tolerances.root_tol") c.root_tol = to_double(key, v);
  else if (key == "tolerances.compat_tol") c.compat_tol = to_double(key, v);
  else if (key == "tolerances.iter_tol") c.iter_tol = to_double(key, v);
  else if (key == "tolerances.final_tol") c.final_tol = to_double(key, v);
  else if (key == "run.mode") c.mode = run_mode_from_string(v);
  else if (key == "run.threads") c.threads = to_int(key, v);
  else if (key == "run.out") c.out_dir = v;
  else throw ConfigError("unknown configuration key '" + key + "'");
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any [section]");
    apply_override(cfg, section + "." + key, value);
  }
  if (cfg.theta_expr.empty() && cfg.theta_csv.empty())
    throw ConfigError("config: nozzle.theta (or nozzle.theta_csv) is required");
  if (cfg.pressure_expr.empty() && cfg.pressure_csv.empty())
    throw ConfigError("config: exit_pressure.profile (or profile_csv) is required");
  cfg.gas.validate();
  if (!(cfg.length > 0.0)) throw ConfigError("config: nozzle.length must be positive");
  if (cfg.sigma < 0.0) throw ConfigError("config: nozzle.sigma must be non-negative");
  if (!(cfg.root_tol > 0.0) || !(cfg.compat_tol > 0.0) || !(cfg.iter_tol > 0.0) ||
      !(cfg.final_tol > 0.0))
    throw ConfigError("config: tolerances must be positive");
  if (cfg.eta_nodes < 9) throw ConfigError("config: grids.eta_nodes too small");
  // Force a first parse of the expressions so malformed input fails here.
  cfg.make_spec();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

NozzleSpec RunConfig::make_spec() const {
  Profile1D theta = theta_csv.empty()
                        ? Profile1D::expression(theta_expr, 0.0, length, length)
                        : Profile1D::from_csv(theta_csv);
  Profile1D pressure = pressure_csv.empty()
                           ? Profile1D::expression(pressure_expr, 0.0, 1.0, length)
                           : Profile1D::from_csv(pressure_csv);
  return make_nozzle(length, sigma, std::move(theta), std::move(pressure));
}

BackgroundShock RunConfig::make_shock() const {
  double mach = upstream_mach;
  if (upstream_full_state) {
    // Extract the Mach number of the given state; pressure and Mach survive
    // the mass-flux renormalization, the rest does not.
    FlowState u{upstream_p, 0.0, upstream_q, upstream_s};
    mach = derived(u, gas).mach;
  }
  return make_background(upstream_p, mach, gas);
}

TransonicOptions RunConfig::make_transonic_options() const {
  TransonicOptions o;
  o.eta_nodes = eta_nodes;
  o.supersonic_xi_nodes = supersonic_xi_nodes;
  o.subsonic_xi_nodes = subsonic_xi_nodes;
  o.iter_tol = iter_tol;
  o.final_tol = final_tol;
  o.compat_rel = compat_tol;
  return o;
}

LocatorOptions RunConfig::make_locator_options() const {
  LocatorOptions o;
  o.scan_cells = scan_cells;
  o.bisect_rel_tol = root_tol;
  return o;
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  os.precision(17);
  os << "[gas]\n"
     << "gamma = " << gas.gamma << "\n"
     << "c_v = " << gas.c_v << "\n"
     << "s0 = " << gas.s0 << "\n\n"
     << "[upstream]\n"
     << "p = " << upstream_p << "\n"
     << "mach = " << (upstream_full_state
                          ? derived(FlowState{upstream_p, 0.0, upstream_q, upstream_s}, gas).mach
                          : upstream_mach)
     << "\n\n"
     << "[nozzle]\n"
     << "length = " << length << "\n"
     << "sigma = " << sigma << "\n";
  if (!theta_csv.empty())
    os << "theta_csv = \"" << theta_csv << "\"\n";
  else
    os << "theta = \"" << theta_expr << "\"\n";
  os << "\n[exit_pressure]\n";
  if (!pressure_csv.empty())
    os << "profile_csv = \"" << pressure_csv << "\"\n";
  else
    os << "profile = \"" << pressure_expr << "\"\n";
  os << "\n[grids]\n"
     << "eta_nodes = " << eta_nodes << "\n"
     << "supersonic_xi_nodes = " << supersonic_xi_nodes << "\n"
     << "subsonic_xi_nodes = " << subsonic_xi_nodes << "\n"
     << "scan_cells = " << scan_cells << "\n\n"
     << "[tolerances]\n"
     << "root_tol = " << root_tol << "\n"
     << "compat_tol = " << compat_tol << "\n"
     << "iter_tol = " << iter_tol << "\n"
     << "final_tol = " << final_tol << "\n\n"
     << "[run]\n"
     << "mode = \"" << to_string(mode) << "\"\n"
     << "threads = " << threads << "\n"
     << "out = \"" << out_dir << "\"\n";
  return os.str();
}

}  // namespace transhock
