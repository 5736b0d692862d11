#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <vector>

#include "phasorctl/cli.hpp"
#include "phasorctl/io.hpp"

#include <sys/wait.h>

namespace fs = std::filesystem;
using phasorctl::io::json;

namespace {

const fs::path kConfigs = PHASORCTL_CONFIG_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "phasorctl");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = phasorctl::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("phasorctl_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) { return phasorctl::io::read_text(p); }

}  // namespace

TEST_CASE("lyap on the bundled scalar config", "[cli]") {
  auto dir = scratch("lyap");
  auto r = run_cli({"lyap", (kConfigs / "lyap_scalar.json").string(), "--out", dir.string()});
  REQUIRE(r.code == phasorctl::cli::kExitOk);
  CHECK(r.out.rfind("lyap:", 0) == 0);
  auto j = phasorctl::io::read_json(dir / "lyap.json");
  CHECK(j.contains("P"));
  fs::remove_all(dir);
}

TEST_CASE("riccati on the bundled scalar config", "[cli]") {
  auto dir = scratch("riccati");
  auto r = run_cli({"riccati", (kConfigs / "riccati_scalar.json").string(), "--out", dir.string()});
  REQUIRE(r.code == phasorctl::cli::kExitOk);
  CHECK(fs::exists(dir / "riccati.json"));
  fs::remove_all(dir);
}

TEST_CASE("unknown keys and bad overrides are validation errors", "[cli]") {
  auto dir = scratch("unknown");
  auto r = run_cli({"lyap", (kConfigs / "lyap_scalar.json").string(), "--out", dir.string(), "--set", "colour=1"});
  CHECK(r.code == phasorctl::cli::kExitValidation);
  auto err = json::parse(r.err);
  CHECK(err["error"]["message"].get<std::string>().find("colour") != std::string::npos);
  CHECK(err["error"]["category"] == "validation");

  auto bad = run_cli({"lyap", (kConfigs / "lyap_scalar.json").string(), "--out", dir.string(), "--set", "N=10"});
  CHECK(bad.code == phasorctl::cli::kExitValidation);
  auto cmd = run_cli({"frobnicate", (kConfigs / "lyap_scalar.json").string(), "--out", dir.string()});
  CHECK(cmd.code == phasorctl::cli::kExitValidation);
  fs::remove_all(dir);
}

TEST_CASE("numerical and io failures map to their exit codes", "[cli]") {
  auto dir = scratch("codes");
  auto unstable = run_cli({"lyap", (kConfigs / "lyap_scalar.json").string(), "--out", dir.string(), "--set", "A=[[1.0]]"});
  CHECK(unstable.code == phasorctl::cli::kExitNumerical);
  CHECK(json::parse(unstable.err)["error"]["code"] == "unstable");
  auto missing = run_cli({"lyap", (dir / "nope.json").string(), "--out", dir.string()});
  CHECK(missing.code == phasorctl::cli::kExitIo);
  fs::remove_all(dir);
}

TEST_CASE("equilibrium reruns are byte identical", "[cli]") {
  auto a = scratch("eq_a");
  auto b = scratch("eq_b");
  auto cfg = (kConfigs / "equilibrium.json").string();
  REQUIRE(run_cli({"equilibrium", cfg, "--out", a.string()}).code == 0);
  REQUIRE(run_cli({"equilibrium", cfg, "--out", b.string()}).code == 0);
  CHECK(slurp(a / "equilibrium.json") == slurp(b / "equilibrium.json"));
  auto j = phasorctl::io::read_json(a / "equilibrium.json");
  CHECK(j["within_bounds"] == true);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("simulate, export, reuse and report", "[cli]") {
  auto dir = scratch("sim");
  auto cfg = (kConfigs / "startup.json").string();
  auto r = run_cli({"simulate", cfg, "--out", dir.string(), "--duration", "0.1", "--set", "scenarios.0.record_phasors=true"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "controller.json"));
  CHECK(fs::exists(dir / "startup.csv"));
  CHECK(fs::exists(dir / "startup_phasors.json"));
  auto m = phasorctl::io::read_json(dir / "startup_metrics.json");
  CHECK(m["scenario"] == "startup");
  const std::string first = slurp(dir / "startup.csv");

  // the exported bundle drives an identical run
  auto reuse_dir = scratch("sim_reuse");
  json reuse = phasorctl::io::read_json(cfg);
  json slim = {{"controller", (dir / "controller.json").string()}, {"scenarios", reuse["scenarios"]}};
  slim["scenarios"][0]["duration"] = 0.1;
  slim["scenarios"][0]["record_phasors"] = true;
  phasorctl::io::write_atomic(reuse_dir / "cfg.json", slim.dump());
  REQUIRE(run_cli({"simulate", (reuse_dir / "cfg.json").string(), "--out", reuse_dir.string()}).code == 0);
  CHECK(slurp(reuse_dir / "startup.csv") == first);

  json rep = {{"metrics", {(dir / "startup_metrics.json").string()}}};
  phasorctl::io::write_atomic(dir / "report_cfg.json", rep.dump());
  auto rr = run_cli({"report", (dir / "report_cfg.json").string(), "--out", dir.string()});
  REQUIRE(rr.code == 0);
  auto report = phasorctl::io::read_json(dir / "report.json");
  CHECK(report["runs"].size() == 1);
  fs::remove_all(dir);
  fs::remove_all(reuse_dir);
}

TEST_CASE("decompose and reconstruct through files", "[cli]") {
  auto dir = scratch("phasor");
  std::string csv = "t,x1\n";
  const double dt = 1.0 / 64;
  for (int i = 0; i < 200; ++i) {
    const double t = i * dt;
    csv += std::to_string(t) + "," + std::to_string(std::sin(2 * 3.141592653589793 * t)) + "\n";
  }
  phasorctl::io::write_atomic(dir / "x.csv", csv);
  json dc = {{"period", 1.0}, {"h", 2}, {"N", 64}, {"input", (dir / "x.csv").string()}};
  phasorctl::io::write_atomic(dir / "dc.json", dc.dump());
  REQUIRE(run_cli({"decompose", (dir / "dc.json").string(), "--out", dir.string()}).code == 0);
  json rc = {{"input", (dir / "phasors.json").string()}, {"mode", "noncausal"}, {"offset", 0.5}};
  phasorctl::io::write_atomic(dir / "rc.json", rc.dump());
  REQUIRE(run_cli({"reconstruct", (dir / "rc.json").string(), "--out", dir.string()}).code == 0);
  auto x = phasorctl::io::signal_from_csv(slurp(dir / "reconstructed.csv"));
  CHECK(x.count() > 0);
  fs::remove_all(dir);
}

TEST_CASE("output directory precedence", "[cli]") {
  auto env_dir = scratch("env");
  auto flag_dir = scratch("flag");
  auto cfg = (kConfigs / "lyap_scalar.json").string();
  ::setenv("PHASORCTL_OUT_DIR", env_dir.string().c_str(), 1);
  REQUIRE(run_cli({"lyap", cfg}).code == 0);
  CHECK(fs::exists(env_dir / "lyap.json"));
  REQUIRE(run_cli({"lyap", cfg, "--out", flag_dir.string()}).code == 0);
  CHECK(fs::exists(flag_dir / "lyap.json"));
  ::unsetenv("PHASORCTL_OUT_DIR");
  fs::remove_all(env_dir);
  fs::remove_all(flag_dir);
}

TEST_CASE("installed executable reports exit codes", "[cli]") {
  auto dir = scratch("exe");
  const std::string tool = PHASORCTL_TOOL;
  const std::string cfg = (kConfigs / "lyap_scalar.json").string();
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status(tool + " lyap " + cfg + " --out " + dir.string()) == 0);
  CHECK(status(tool + " lyap " + cfg + " --out " + dir.string() + " --set bogus=1") == 2);
  CHECK(status(tool + " --help") == 0);
  fs::remove_all(dir);
}
