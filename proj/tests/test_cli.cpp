#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "dengue/version.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int status = -1;
  std::string output;  // stdout and stderr interleaved
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + DENGUESIM_BIN + "\" " + args + " 2>&1";
  std::FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult res;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) res.output.append(buf, n);
  const int rc = pclose(pipe);
  res.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return res;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const char* tag) : path(fs::temp_directory_path() / tag) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string arg() const { return "--out \"" + path.string() + "\""; }
};

json slurp_json(const fs::path& file) {
  std::ifstream in(file);
  REQUIRE(in.good());
  return json::parse(in);
}

std::size_t count_lines(const fs::path& file) {
  std::ifstream in(file);
  REQUIRE(in.good());
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("cli help and version") {
  const CliResult help = run_cli("--help");
  CHECK(help.status == 0);
  CHECK(contains(help.output, "simulate"));
  CHECK(contains(help.output, "sweep"));
  CHECK(contains(help.output, "validate"));

  const CliResult ver = run_cli("--version");
  CHECK(ver.status == 0);
  CHECK(contains(ver.output, dengue::kArtifactVersion));

  const CliResult none = run_cli("");
  CHECK(none.status == 2);
  CHECK(contains(none.output, "\"error\":\"usage\""));
}

TEST_CASE("simulate writes trajectory and result bundle") {
  const TempDir tmp("dengue_cli_sim");
  const CliResult r = run_cli("simulate " + tmp.arg());
  CHECK(r.status == 0);
  CHECK(contains(r.output, "scenario    baseline (SIR-ASI)"));
  CHECK(contains(r.output, "rhs evaluations"));
  CHECK(fs::exists(tmp.path / "baseline_timeseries.csv"));

  const json bundle = slurp_json(tmp.path / "baseline_result.json");
  CHECK(bundle["kind"] == "result_bundle");
  CHECK(bundle["summary"]["peak_I_h"].get<double>() ==
        doctest::Approx(79392.415144657731).epsilon(1e-12));
  CHECK(bundle["summary"]["final_R_h"].get<double>() ==
        doctest::Approx(471143.99902425526).epsilon(1e-12));
  const std::string hash = bundle["provenance"]["config_hash"];
  CHECK(hash.rfind("fnv1a64:", 0) == 0);
  CHECK(bundle["timeseries"]["times"].size() == 366);
}

TEST_CASE("simulate applies overrides") {
  const TempDir tmp("dengue_cli_set");
  const CliResult r = run_cli("simulate --set c_m=0.25 --set scenario.name=fogged " + tmp.arg());
  CHECK(r.status == 0);
  const json bundle = slurp_json(tmp.path / "fogged_result.json");
  // R0 < 1 here, so the ten index cases only decay.
  CHECK(bundle["summary"]["peak_I_h"].get<double>() == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(bundle["summary"]["r0"].get<double>() < 1.0);
}

TEST_CASE("simulate with a vaccine override runs the seven-compartment system") {
  const TempDir tmp("dengue_cli_svir");
  const CliResult r = run_cli("simulate --set psi=0.05 --set p=0.8 --set sigma=0.2 " + tmp.arg());
  CHECK(r.status == 0);
  CHECK(contains(r.output, "(SVIR)"));
  std::ifstream in(tmp.path / "baseline_timeseries.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,S_h,V_h,I_h,R_h,A_m,S_m,I_m");
}

TEST_CASE("cli error channels and exit codes") {
  const CliResult missing = run_cli("simulate --config /nonexistent/x.json");
  CHECK(missing.status == 2);
  CHECK(contains(missing.output, "\"error\":\"config\""));
  CHECK(contains(missing.output, "config not found"));

  const CliResult invalid = run_cli("simulate --set c_m=1.5");
  CHECK(invalid.status == 2);
  CHECK(contains(invalid.output, "\"error\":\"validation\""));
  CHECK(contains(invalid.output, "c_m"));

  const TempDir tmp("dengue_cli_starve");
  const CliResult starved = run_cli("simulate --set max_steps=5 " + tmp.arg());
  CHECK(starved.status == 1);
  CHECK(contains(starved.output, "\"error\":\"integration\""));
  CHECK(contains(starved.output, "scenario 'baseline'"));

  const CliResult badfmt = run_cli("simulate --format xml");
  CHECK(badfmt.status == 2);
  CHECK(contains(badfmt.output, "\"error\":\"usage\""));
}

TEST_CASE("analyze reports the equilibrium structure") {
  const TempDir tmp("dengue_cli_ana");
  const CliResult r = run_cli("analyze --format json " + tmp.arg());
  CHECK(r.status == 0);
  CHECK(contains(r.output, "R0          2.456379757 closed form"));
  CHECK(contains(r.output, "R0          2.456379757 next-generation matrix at dfe_biotic"));
  CHECK(contains(r.output, "-> 3 equilibria"));
  CHECK(contains(r.output, "endemic"));

  const json rep = slurp_json(tmp.path / "baseline_report.json");
  CHECK(rep["kind"] == "equilibrium_report");
  CHECK(rep["equilibria"].size() == 3);
  CHECK(rep["trichotomy_case"] == "M>0,xi<chi");
}

TEST_CASE("analyze with oviposition shut off finds only the trivial equilibrium") {
  const TempDir tmp("dengue_cli_phi0");
  const CliResult r = run_cli("analyze --set phi=0 " + tmp.arg());
  CHECK(r.status == 0);
  CHECK(contains(r.output, "undefined (chi < 0)"));
  CHECK(contains(r.output, "-> 1 equilibria"));
  CHECK(contains(r.output, "dfe_trivial"));
}

TEST_CASE("sweep writes per-level series and a summary table") {
  const TempDir tmp("dengue_cli_sweep");
  const CliResult r = run_cli("sweep --axis c_A --values 0,0.25,0.5,0.75,1 " + tmp.arg());
  CHECK(r.status == 0);
  const fs::path dir = tmp.path / "sweep_c_A";
  CHECK(count_lines(dir / "summary.csv") == 6);  // header + five levels
  CHECK(fs::exists(dir / "baseline_c_A_0_timeseries.csv"));
  CHECK(fs::exists(dir / "baseline_c_A_0.25_timeseries.csv"));

  const json sum = slurp_json(dir / "summary.json");
  CHECK(sum["kind"] == "sweep_summary");
  REQUIRE(sum["runs"].size() == 5);
  double prev = 1e300;
  for (const json& run : sum["runs"]) {
    REQUIRE(run["ok"].get<bool>());
    const double peak = run["summary"]["peak_I_h"].get<double>();
    CHECK(peak <= prev);  // more larvicide, smaller epidemic
    prev = peak;
  }
}

TEST_CASE("sweep rejects a bad axis or level list") {
  const CliResult bad_axis = run_cli("sweep --axis gamma --values 0,1");
  CHECK(bad_axis.status == 2);
  CHECK(contains(bad_axis.output, "\"error\":\"config\""));
  CHECK(contains(bad_axis.output, "sigma_w_linked"));

  const CliResult bad_values = run_cli("sweep --axis c_m --values 0,zz");
  CHECK(bad_values.status == 2);
  CHECK(contains(bad_values.output, "comma-separated numbers"));
}

TEST_CASE("validate prints the configuration fingerprint") {
  const CliResult builtin = run_cli("validate");
  CHECK(builtin.status == 0);
  CHECK(contains(builtin.output, "config ok: SIR-ASI scenario 'baseline', fnv1a64:"));

  // The shipped baseline file must be indistinguishable from the built-in defaults.
  const CliResult file =
      run_cli(std::string("validate --config \"") + DENGUE_CONFIG_DIR + "/baseline.json\"");
  CHECK(file.status == 0);
  CHECK(file.output == builtin.output);

  const CliResult svir = run_cli("validate --set psi=0.1");
  CHECK(svir.status == 0);
  CHECK(contains(svir.output, "SVIR"));
  CHECK_FALSE(contains(svir.output, builtin.output.substr(builtin.output.find("fnv1a64:"))));
}

TEST_CASE("figures emits the full data suite") {
  const TempDir tmp("dengue_cli_figs");
  const CliResult r = run_cli("figures " + tmp.arg());
  CHECK(r.status == 0);
  CHECK(contains(r.output, "7 figure entries"));
  const fs::path dir = tmp.path / "figures";
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "01_no_control_humans.csv"));
  CHECK(fs::exists(dir / "02_adulticide_I_h.csv"));
  CHECK(fs::exists(dir / "07_vaccine_coverage_I_h.csv"));
  const json manifest = slurp_json(dir / "manifest.json");
  CHECK(manifest["entries"].size() == 7);
}
