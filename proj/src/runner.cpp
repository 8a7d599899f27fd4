#include "transhock/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "transhock/linear_fbp.hpp"
#include "transhock/locator.hpp"

namespace transhock {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InternalError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const ordered_json& j) {
  write_text(path, j.dump(2) + "\n");
}

// (x, y, value) triplets, full round-trip precision, LF endings.
void write_field_csv(const fs::path& path, const ScalarField2D& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InternalError("cannot write " + path.string());
  const RectGrid& g = f.grid();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j)
      out << fmt17(g.x(i)) << ',' << fmt17(g.y(j)) << ',' << fmt17(f.at(i, j)) << '\n';
}

void write_columns_csv(const fs::path& path, const std::vector<std::vector<double>>& cols) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InternalError("cannot write " + path.string());
  if (cols.empty()) return;
  for (std::size_t r = 0; r < cols.front().size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out << ',';
      out << fmt17(cols[c][r]);
    }
    out << '\n';
  }
}

ordered_json report_to_json(const LocationReport& rep) {
  ordered_json j;
  j["status"] = rep.status;
  j["in_range"] = rep.in_range;
  j["p_star"] = rep.p_star;
  j["kdot"] = rep.kdot;
  j["r_lower"] = rep.r_lower;
  j["r_upper"] = rep.r_upper;
  j["scan_cells"] = rep.scan_cells;
  j["roots"] = ordered_json::array();
  for (const RootInfo& r : rep.roots) {
    ordered_json rj;
    rj["xi_star"] = r.xi_star;
    rj["theta_at_root"] = r.theta_at_root;
    rj["r_prime"] = r.r_prime;
    rj["r_prime_sign"] = r.r_prime_sign;
    rj["residual"] = r.residual;
    rj["degenerate"] = r.degenerate;
    rj["boundary"] = r.boundary;
    j["roots"].push_back(rj);
  }
  return j;
}

ordered_json linear_manifest(const LinearSolution& lin) {
  ordered_json j;
  j["xi_star"] = lin.xi_star;
  j["compat_residual"] = lin.compat_residual;
  j["max_abs"] = {{"p", lin.p.max_abs()},
                  {"theta", lin.theta.max_abs()},
                  {"q", lin.q.max_abs()},
                  {"s", lin.s.max_abs()}};
  double psd = 0.0;
  for (double v : lin.psi_dot_prime) psd = std::max(psd, std::abs(v));
  j["max_abs_psi_dot_prime"] = psd;
  j["grid"] = {{"nx", lin.grid.nx}, {"ny", lin.grid.ny}};
  return j;
}

ordered_json solution_manifest(const ShockSolution& sol, const PhysicalShockCurve& curve) {
  ordered_json j;
  j["xi_star_bar"] = sol.xi_star_bar;
  j["psi_at_wall"] = sol.psi.back();
  j["dxi_star"] = sol.dxi_star;
  j["iterations"] = sol.iterations;
  j["converged"] = sol.converged;
  j["median_contraction_ratio"] = sol.median_ratio;
  j["sup_deviation"] = sol.sup_deviation;
  j["seed_distance"] = sol.seed_distance;
  j["residuals"] = {{"G1", sol.residuals.max_g[0]},
                    {"G2", sol.residuals.max_g[1]},
                    {"G3", sol.residuals.max_g[2]},
                    {"G4", sol.residuals.max_g[3]},
                    {"exit_pressure", sol.residuals.exit_pressure},
                    {"min_pressure_jump", sol.residuals.min_pressure_jump}};
  j["physical_shock"] = {{"x_wall", curve.x_wall}, {"y_wall", curve.y_wall}};
  ordered_json log = ordered_json::array();
  for (const IterationLogEntry& e : sol.log)
    log.push_back({{"k", e.k},
                   {"step", e.step},
                   {"ratio", e.ratio},
                   {"dxi_star", e.dxi_star},
                   {"seed_distance", e.seed_distance}});
  j["log"] = log;
  return j;
}

// Side-selecting state sampler used for the physical mapping.
FlowState mixed_state(const ShockSolution& sol, double xi, double eta) {
  const std::vector<double>& psi = sol.psi;
  const RectGrid& sg = sol.grid;
  const double he = sg.hy();
  int j = std::clamp(static_cast<int>(eta / he), 0, sg.ny - 2);
  const double t = (eta - j * he) / he;
  const double psi_eta = psi[j] * (1.0 - t) + psi[j + 1] * t;
  if (xi < psi_eta) {
    return FlowState{bicubic_sample(sol.supersonic.p, xi, eta),
                     bicubic_sample(sol.supersonic.theta, xi, eta),
                     bicubic_sample(sol.supersonic.q, xi, eta),
                     bicubic_sample(sol.supersonic.s, xi, eta)};
  }
  // Pull back onto the fixed rectangle.
  const double L = sol.supersonic.grid.lx;
  const double xi_fixed = L + (L - sol.xi_star_bar) / (L - psi_eta) * (xi - L);
  const double xc = std::clamp(xi_fixed, sg.x0, sg.x0 + sg.lx);
  return FlowState{bicubic_sample(sol.p, xc, eta), bicubic_sample(sol.theta, xc, eta),
                   bicubic_sample(sol.q, xc, eta), bicubic_sample(sol.s, xc, eta)};
}

struct RootArtifacts {
  bool solved = false;
  std::string error;
  RunStatus error_status = RunStatus::Ok;
  double psi_wall = 0.0;
  double x_wall_physical = 0.0;
  double y_wall_physical = 0.0;
  double location_drift = 0.0;  // |x of wall crossing - xi_star|
  int iterations = 0;
  double median_ratio = 0.0;
};

}  // namespace

std::string validate_config(const RunConfig& cfg) {
  ordered_json j;
  try {
    const NozzleSpec spec = cfg.make_spec();
    const BackgroundShock bg = cfg.make_shock();
    const GasConstants& g = cfg.gas;
    const DerivedState dm = bg.minus();
    const DerivedState dp = bg.plus();
    j["upstream"] = {{"mach", dm.mach}, {"supersonic", dm.mach > 1.0}};
    j["downstream"] = {{"mach", dp.mach}, {"subsonic", dp.mach < 1.0}};
    j["entropy_condition"] = bg.jump_p() > 0.0;

    const auto compat = spec.inlet_compatibility();
    j["inlet_compatibility"] = {{"theta0", compat[0]},
                                {"theta_prime0", compat[1]},
                                {"theta_second0", compat[2]},
                                {"warn", spec.compatibility_violation() >= 1e-6}};
    double theta_sup = 0.0;
    for (int i = 0; i <= 512; ++i)
      theta_sup = std::max(theta_sup, std::abs(spec.theta(spec.length * i / 512.0)));
    j["wall"] = {{"theta_sup", theta_sup},
                 {"height_at_exit", wall_height(spec, spec.length)}};

    const LocationReport rep = find_admissible_locations(spec, bg, g, cfg.make_locator_options());
    j["range"] = {{"r_lower", rep.r_lower},
                  {"r_upper", rep.r_upper},
                  {"p_star", rep.p_star},
                  {"in_range", rep.in_range},
                  {"status", rep.status}};
    const std::size_t n_adm = rep.admissible().size();
    j["admissible_locations"] = n_adm;
    if (!rep.in_range)
      j["verdict"] = "no admissible location (receiver pressure out of range)";
    else
      j["verdict"] = std::to_string(n_adm) + " admissible location" + (n_adm == 1 ? "" : "s") +
                     " expected";

    const RectGrid sup = default_supersonic_grid(spec, bg, cfg.eta_nodes,
                                                 cfg.supersonic_xi_nodes > 0
                                                     ? cfg.supersonic_xi_nodes
                                                     : 257);
    const double kappa = supersonic_kappa(bg);
    j["supersonic_grid"] = {{"nx", sup.nx},
                            {"ny", sup.ny},
                            {"cfl", sup.hx() / (kappa * sup.hy())},
                            {"stable", sup.hx() <= kappa * sup.hy()}};
  } catch (const std::exception& e) {
    j["error"] = e.what();
  }
  return j.dump(2) + "\n";
}

RunOutcome run_pipeline(const RunConfig& cfg, const std::string& out_dir) {
  RunOutcome outcome;
  const fs::path out(out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    outcome.status = RunStatus::ConfigError;
    outcome.message = "cannot create output directory " + out_dir;
    return outcome;
  }

  auto fail = [&](RunStatus st, const std::string& msg) {
    ordered_json diag;
    diag["status"] = static_cast<int>(st);
    diag["message"] = msg;
    diag["config_echo"] = cfg.echo();
    write_json(out / "diagnostics.json", diag);
    outcome.status = st;
    outcome.message = msg;
    return outcome;
  };

  NozzleSpec spec;
  BackgroundShock bg;
  try {
    spec = cfg.make_spec();
    bg = cfg.make_shock();
  } catch (const std::exception& e) {
    return fail(RunStatus::ConfigError, e.what());
  }
  const GasConstants& g = cfg.gas;

  LocationReport rep;
  try {
    rep = find_admissible_locations(spec, bg, g, cfg.make_locator_options());
    write_json(out / "locations.json", report_to_json(rep));
  } catch (const std::exception& e) {
    return fail(RunStatus::InternalFailure, e.what());
  }
  if (!rep.in_range)
    return fail(RunStatus::PstarOutOfRange,
                "receiver pressure level outside the attainable range [" +
                    fmt17(rep.r_lower) + ", " + fmt17(rep.r_upper) + "]");

  const std::vector<RootInfo> roots = rep.admissible();
  if (roots.empty() && cfg.mode != RunMode::LocateOnly)
    return fail(RunStatus::PstarOutOfRange, "no nondegenerate interior location available");

  ordered_json summary;
  summary["mode"] = to_string(cfg.mode);
  summary["status"] = "ok";
  summary["root_count"] = roots.size();
  summary["location_report"] = report_to_json(rep);

  if (cfg.mode == RunMode::LocateOnly) {
    summary["config_echo"] = cfg.echo();
    outcome.summary_json = summary.dump(2) + "\n";
    write_text(out / "summary.json", outcome.summary_json);
    return outcome;
  }

  // Per-root solves, dispatched to a small worker pool; artifacts land in
  // per-root directories so the workers never contend.
  std::vector<RootArtifacts> results(roots.size());
  std::atomic<std::size_t> cursor{0};
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_workers =
      std::min<std::size_t>(roots.size(),
                            cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : hw);

  auto solve_root = [&](std::size_t idx) {
    const RootInfo& root = roots[idx];
    RootArtifacts& art = results[idx];
    char name[32];
    std::snprintf(name, sizeof(name), "root_%02zu", idx);
    const fs::path root_dir = out / name;
    fs::create_directories(root_dir / "linear");
    try {
      const RectGrid sup_grid = default_supersonic_grid(
          spec, bg, cfg.eta_nodes, cfg.supersonic_xi_nodes > 0 ? cfg.supersonic_xi_nodes : 257);
      const RectGrid sub_grid =
          default_subsonic_grid(root.xi_star, spec, cfg.eta_nodes, cfg.subsonic_xi_nodes);
      const LinearSupersonic lin_sup = solve_linear_supersonic(spec, bg, sup_grid);
      const LinearSolution lin =
          solve_linear_subsonic(root.xi_star, spec, bg, g, lin_sup, sub_grid);
      ordered_json lin_manifest = linear_manifest(lin);
      lin_manifest["config_echo"] = cfg.echo();
      write_json(root_dir / "linear" / "manifest.json", lin_manifest);
      write_field_csv(root_dir / "linear" / "p_dot.csv", lin.p);
      write_field_csv(root_dir / "linear" / "theta_dot.csv", lin.theta);
      write_field_csv(root_dir / "linear" / "q_dot.csv", lin.q);
      write_field_csv(root_dir / "linear" / "s_dot.csv", lin.s);
      {
        std::vector<double> eta(sub_grid.ny);
        for (int j = 0; j < sub_grid.ny; ++j) eta[j] = sub_grid.y(j);
        write_columns_csv(root_dir / "linear" / "psi_dot_prime.csv",
                          {eta, lin.psi_dot_prime});
      }

      if (cfg.mode == RunMode::Full) {
        fs::create_directories(root_dir / "nonlinear");
        TransonicOptions topts = cfg.make_transonic_options();
        const ShockSolution sol = solve_transonic(spec, bg, g, root.xi_star, topts);
        std::vector<double> eta(sol.grid.ny);
        for (int j = 0; j < sol.grid.ny; ++j) eta[j] = sol.grid.y(j);
        const PhysicalShockCurve curve = lagrange_to_physical(
            eta, sol.psi,
            [&](double xi, double et) { return mixed_state(sol, xi, et); }, g);
        ordered_json manifest = solution_manifest(sol, curve);
        manifest["config_echo"] = cfg.echo();
        write_json(root_dir / "nonlinear" / "manifest.json", manifest);
        write_field_csv(root_dir / "nonlinear" / "p.csv", sol.p);
        write_field_csv(root_dir / "nonlinear" / "theta.csv", sol.theta);
        write_field_csv(root_dir / "nonlinear" / "q.csv", sol.q);
        write_field_csv(root_dir / "nonlinear" / "s.csv", sol.s);
        write_columns_csv(root_dir / "nonlinear" / "psi.csv", {eta, sol.psi, sol.psi_prime});
        write_columns_csv(root_dir / "nonlinear" / "shock_physical.csv", {curve.x, curve.y});
        art.psi_wall = sol.psi.back();
        art.x_wall_physical = curve.x_wall;
        art.y_wall_physical = curve.y_wall;
        art.location_drift = std::abs(curve.x_wall - root.xi_star);
        art.iterations = sol.iterations;
        art.median_ratio = sol.median_ratio;
      } else {
        art.psi_wall = root.xi_star;
      }
      art.solved = true;
    } catch (const SolvabilityError& e) {
      art.error = e.what();
      art.error_status = RunStatus::SolvabilityFailure;
    } catch (const ContractionError& e) {
      art.error = e.what();
      art.error_status = RunStatus::NoContraction;
    } catch (const std::exception& e) {
      art.error = e.what();
      art.error_status = RunStatus::InternalFailure;
    }
  };

  std::vector<std::thread> workers;
  workers.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w)
    workers.emplace_back([&] {
      for (;;) {
        const std::size_t idx = cursor.fetch_add(1);
        if (idx >= roots.size()) return;
        solve_root(idx);
      }
    });
  for (std::thread& t : workers) t.join();

  ordered_json per_root = ordered_json::array();
  RunStatus worst = RunStatus::Ok;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const RootArtifacts& art = results[i];
    ordered_json rj;
    rj["xi_star"] = roots[i].xi_star;
    rj["solved"] = art.solved;
    if (art.solved) {
      rj["psi_at_wall"] = art.psi_wall;
      if (cfg.mode == RunMode::Full) {
        rj["shock_at_wall_physical_x"] = art.x_wall_physical;
        rj["shock_at_wall_physical_y"] = art.y_wall_physical;
        rj["location_drift"] = art.location_drift;
        rj["iterations"] = art.iterations;
        rj["median_contraction_ratio"] = art.median_ratio;
      }
    } else {
      rj["error"] = art.error;
      if (static_cast<int>(art.error_status) > static_cast<int>(worst))
        worst = art.error_status;
    }
    per_root.push_back(rj);
  }
  summary["solutions"] = per_root;
  summary["distinct_solutions"] =
      static_cast<int>(std::count_if(results.begin(), results.end(),
                                     [](const RootArtifacts& a) { return a.solved; }));
  summary["config_echo"] = cfg.echo();

  if (worst != RunStatus::Ok) {
    summary["status"] = "partial-failure";
    outcome.summary_json = summary.dump(2) + "\n";
    write_text(out / "summary.json", outcome.summary_json);
    std::string msg = "one or more roots failed";
    for (const RootArtifacts& a : results)
      if (!a.solved) msg = a.error;
    ordered_json diag;
    diag["status"] = static_cast<int>(worst);
    diag["message"] = msg;
    diag["config_echo"] = cfg.echo();
    write_json(out / "diagnostics.json", diag);
    outcome.status = worst;
    outcome.message = msg;
    return outcome;
  }

  outcome.summary_json = summary.dump(2) + "\n";
  write_text(out / "summary.json", outcome.summary_json);
  return outcome;
}

}  // namespace transhock
