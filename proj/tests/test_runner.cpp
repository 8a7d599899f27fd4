#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "transhock/runner.hpp"

using namespace transhock;
namespace fs = std::filesystem;

namespace {

std::string wavy_config(int k, double sigma, double pressure_level,
                        const std::string& mode) {
  std::ostringstream os;
  os << "[gas]\n"
        "gamma = 1.4\n"
        "c_v = 1.0\n"
        "s0 = 0.0\n"
        "[upstream]\n"
        "p = 0.17857142857142858\n"
        "mach = 2.0\n"
        "[nozzle]\n"
        "length = 1.0\n"
     << "sigma = " << sigma << "\n"
     << "theta = \"sin(" << 2 * k << "*pi*x/L)\"\n"
     << "[exit_pressure]\n"
     << "profile = \"" << pressure_level << "\"\n"
     << "[grids]\n"
        "eta_nodes = 65\n"
        "[run]\n"
     << "mode = \"" << mode << "\"\n";
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing and overrides") {
  const RunConfig cfg = parse_config(wavy_config(2, 0.01, -0.1, "locate-only"));
  CHECK(cfg.gas.gamma == 1.4);
  CHECK(cfg.sigma == 0.01);
  CHECK(cfg.mode == RunMode::LocateOnly);
  CHECK(cfg.eta_nodes == 65);

  // A full upstream state resolves to the same background as (p, Mach).
  RunConfig full = cfg;
  apply_override(full, "upstream.q", "1.0");
  apply_override(full, "upstream.s", "-0.8064758658669485");  // rho = 1 at this p
  const BackgroundShock a = cfg.make_shock();
  const BackgroundShock b = full.make_shock();
  CHECK(b.minus().mach == doctest::Approx(a.minus().mach).epsilon(1e-12));
  CHECK(b.u_plus.p == doctest::Approx(a.u_plus.p).epsilon(1e-12));

  RunConfig c2 = cfg;
  apply_override(c2, "run.threads", "3");
  apply_override(c2, "grids.scan_cells", "8192");
  CHECK(c2.threads == 3);
  CHECK(c2.scan_cells == 8192);
  CHECK_THROWS_AS(apply_override(c2, "no.such_key", "1"), ConfigError);
  CHECK_THROWS_AS(apply_override(c2, "run.threads", "many"), ConfigError);

  CHECK_THROWS_AS(parse_config("[nozzle]\ntheta = \"sin((x\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("key_without_section = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(wavy_config(1, -0.1, 0.0, "full")), ConfigError);
  CHECK_THROWS_AS(parse_config(wavy_config(1, 0.1, 0.0, "sideways")), ConfigError);
}

TEST_CASE("config echo round-trips") {
  const RunConfig cfg = parse_config(wavy_config(1, 0.004, -0.3, "full"));
  const std::string echo1 = cfg.echo();
  const RunConfig cfg2 = parse_config(echo1);
  CHECK(cfg2.echo() == echo1);
}

TEST_CASE("validation reports the range condition and admissible count") {
  const RunConfig cfg = parse_config(wavy_config(2, 0.01, -0.1, "locate-only"));
  const std::string report = validate_config(cfg);
  CHECK(report.find("\"in_range\": true") != std::string::npos);
  CHECK(report.find("4 admissible locations expected") != std::string::npos);

  RunConfig far = cfg;
  apply_override(far, "exit_pressure.profile", "9.0");
  const std::string r2 = validate_config(far);
  CHECK(r2.find("no admissible location") != std::string::npos);

  RunConfig slow = cfg;
  apply_override(slow, "upstream.mach", "0.8");
  const std::string r3 = validate_config(slow);
  CHECK(r3.find("error") != std::string::npos);
}

TEST_CASE("locate-only pipeline writes locations and a summary") {
  const fs::path out = fs::temp_directory_path() / "ts_runner_locate";
  fs::remove_all(out);
  const RunConfig cfg = parse_config(wavy_config(2, 0.01, -0.1, "locate-only"));
  const RunOutcome outcome = run_pipeline(cfg, out.string());
  REQUIRE(outcome.status == RunStatus::Ok);
  CHECK(fs::exists(out / "locations.json"));
  CHECK(fs::exists(out / "summary.json"));
  const std::string locations = slurp(out / "locations.json");
  CHECK(locations.find("\"status\": \"ok\"") != std::string::npos);
  // 4 interior crossings for the 2-bump wall
  CHECK(outcome.summary_json.find("\"root_count\": 4") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("identical configs produce byte-identical artifacts") {
  const fs::path out1 = fs::temp_directory_path() / "ts_runner_det1";
  const fs::path out2 = fs::temp_directory_path() / "ts_runner_det2";
  fs::remove_all(out1);
  fs::remove_all(out2);
  const RunConfig cfg = parse_config(wavy_config(3, 0.01, -0.08, "locate-only"));
  REQUIRE(run_pipeline(cfg, out1.string()).status == RunStatus::Ok);
  REQUIRE(run_pipeline(cfg, out2.string()).status == RunStatus::Ok);
  CHECK(slurp(out1 / "locations.json") == slurp(out2 / "locations.json"));
  CHECK(slurp(out1 / "summary.json") == slurp(out2 / "summary.json"));

  // Re-running from the echoed configuration reproduces the artifacts.
  const RunConfig echoed = parse_config(cfg.echo());
  const fs::path out3 = fs::temp_directory_path() / "ts_runner_det3";
  fs::remove_all(out3);
  REQUIRE(run_pipeline(echoed, out3.string()).status == RunStatus::Ok);
  CHECK(slurp(out1 / "locations.json") == slurp(out3 / "locations.json"));
  fs::remove_all(out1);
  fs::remove_all(out2);
  fs::remove_all(out3);
}

TEST_CASE("out-of-range pressure maps to the dedicated status") {
  const fs::path out = fs::temp_directory_path() / "ts_runner_range";
  fs::remove_all(out);
  const RunConfig cfg = parse_config(wavy_config(1, 0.01, 7.5, "locate-only"));
  const RunOutcome outcome = run_pipeline(cfg, out.string());
  CHECK(outcome.status == RunStatus::PstarOutOfRange);
  CHECK(fs::exists(out / "diagnostics.json"));
  CHECK(!fs::exists(out / "summary.json"));
  fs::remove_all(out);
}

TEST_CASE("perturbed full run writes physical-shock artifacts per root") {
  const fs::path out = fs::temp_directory_path() / "ts_runner_full";
  fs::remove_all(out);
  RunConfig cfg = parse_config(wavy_config(1, 0.0025, -0.2, "full"));
  cfg.eta_nodes = 65;
  const RunOutcome outcome = run_pipeline(cfg, out.string());
  REQUIRE(outcome.status == RunStatus::Ok);
  // one converged branch per admissible crossing of the 1-bump wall
  CHECK(outcome.summary_json.find("\"distinct_solutions\": 2") != std::string::npos);
  for (const char* root : {"root_00", "root_01"}) {
    CHECK(fs::exists(out / root / "nonlinear" / "shock_physical.csv"));
    CHECK(fs::exists(out / root / "nonlinear" / "psi.csv"));
    const std::string manifest = slurp(out / root / "nonlinear" / "manifest.json");
    CHECK(manifest.find("\"converged\": true") != std::string::npos);
    CHECK(manifest.find("location_drift") == std::string::npos);  // lives in summary
  }
  // the wall crossing stays near the seed location: drift recorded per root
  CHECK(outcome.summary_json.find("\"location_drift\"") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("worker count does not change the artifacts") {
  const fs::path out1 = fs::temp_directory_path() / "ts_runner_thr1";
  const fs::path out2 = fs::temp_directory_path() / "ts_runner_thr2";
  fs::remove_all(out1);
  fs::remove_all(out2);
  RunConfig cfg = parse_config(wavy_config(1, 0.0025, -0.2, "full"));
  cfg.eta_nodes = 65;
  cfg.threads = 1;
  REQUIRE(run_pipeline(cfg, out1.string()).status == RunStatus::Ok);
  cfg.threads = 2;
  REQUIRE(run_pipeline(cfg, out2.string()).status == RunStatus::Ok);
  // the echoed configuration legitimately differs in its threads entry
  auto strip_threads = [](std::string s) {
    for (std::string::size_type p; (p = s.find("threads = ")) != std::string::npos;)
      s.erase(p, s.find("\\n", p) - p + 2);
    return s;
  };
  for (const char* name :
       {"locations.json", "root_00/nonlinear/manifest.json", "root_01/nonlinear/manifest.json",
        "root_00/nonlinear/psi.csv", "root_01/nonlinear/p.csv"})
    CHECK(strip_threads(slurp(out1 / name)) == strip_threads(slurp(out2 / name)));
  fs::remove_all(out1);
  fs::remove_all(out2);
}

TEST_CASE("sampled wall profile from csv drives the pipeline") {
  const fs::path dir = fs::temp_directory_path() / "ts_runner_csv";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path csv = dir / "theta.csv";
  {
    std::ofstream out(csv);
    out << "x,theta\n";
    for (int i = 0; i <= 256; ++i) {
      const double x = i / 256.0;
      out << x << "," << std::sin(2.0 * M_PI * x) << "\n";
    }
  }
  RunConfig cfg = parse_config(wavy_config(1, 0.01, -0.2, "locate-only"));
  apply_override(cfg, "nozzle.theta_csv", csv.string());
  const RunOutcome outcome = run_pipeline(cfg, (dir / "out").string());
  REQUIRE(outcome.status == RunStatus::Ok);
  CHECK(outcome.summary_json.find("\"root_count\": 2") != std::string::npos);

  // linear-only mode stops after the first-order fields
  apply_override(cfg, "run.mode", "linear-only");
  const RunOutcome lin = run_pipeline(cfg, (dir / "out_lin").string());
  REQUIRE(lin.status == RunStatus::Ok);
  CHECK(fs::exists(dir / "out_lin" / "root_00" / "linear" / "manifest.json"));
  CHECK(!fs::exists(dir / "out_lin" / "root_00" / "nonlinear"));
  fs::remove_all(dir);
}

TEST_CASE("zero perturbation full run reports the exact background") {
  const fs::path out = fs::temp_directory_path() / "ts_runner_bg";
  fs::remove_all(out);
  // sigma = 0 with an expanding shape: one admissible location, no iterations.
  std::string text = wavy_config(1, 0.0, 0.0, "full");
  RunConfig cfg = parse_config(text);
  apply_override(cfg, "nozzle.theta", "sin(pi*x/L)^2");
  apply_override(cfg, "exit_pressure.profile", "0.068");
  const RunOutcome outcome = run_pipeline(cfg, out.string());
  REQUIRE(outcome.status == RunStatus::Ok);
  CHECK(outcome.summary_json.find("\"iterations\": 0") != std::string::npos);
  CHECK(fs::exists(out / "root_00" / "nonlinear" / "manifest.json"));
  CHECK(fs::exists(out / "root_00" / "nonlinear" / "psi.csv"));
  CHECK(fs::exists(out / "root_00" / "linear" / "manifest.json"));
  const std::string manifest = slurp(out / "root_00" / "nonlinear" / "manifest.json");
  CHECK(manifest.find("\"converged\": true") != std::string::npos);
  fs::remove_all(out);
}
