#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "bclab/lab.hpp"

using namespace bclab;
namespace fs = std::filesystem;

namespace {

std::string lab_exe() {
  const char* exe = std::getenv("LAB_EXE");
  REQUIRE_MESSAGE(exe != nullptr, "LAB_EXE must point at the lab binary");
  return exe;
}

int run_command(const std::string& cmd) {
  const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
  REQUIRE(raw != -1);
  return WEXITSTATUS(raw);
}

struct TempDir {
  fs::path path;
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path = fs::temp_directory_path() /
           ("bclab_test_" + std::to_string(rng()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

fs::path write_config(const fs::path& dir, const std::string& name,
                      const std::string& body) {
  const fs::path p = dir / name;
  std::ofstream out(p);
  out << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing file: " << p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parser accepts the documented keys and nothing else") {
  const ExperimentConfig cfg = ExperimentConfig::parse_string(
      "# comment\n"
      "scenario = green-identity\n"
      "n = 96\n"
      "length = 1.5\n"
      "bump_shape = sin2\n"
      "seed = 7\n"
      "tol_green_identity = 1e-11\n");
  CHECK(cfg.scenario == "green-identity");
  CHECK(cfg.n == 96);
  CHECK(cfg.length == 1.5);
  CHECK(cfg.bump_shape == BumpShape::sin2);
  CHECK(cfg.seed == 7);
  REQUIRE(cfg.tolerance_overrides.count("tol_green_identity") == 1);
  CHECK(cfg.tolerance_overrides.at("tol_green_identity") == 1e-11);

  CHECK_THROWS_AS(ExperimentConfig::parse_string("mystery_key = 3\n"),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse_string("n = not_a_number\n"),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse_string("just some text\n"),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse_file("/nonexistent/x.cfg"),
                  ConfigError);
}

TEST_CASE("config validation enforces resolution and causality guards") {
  ExperimentConfig cfg;
  cfg.scenario = "green-identity";
  cfg.n = 16;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.n = 64;
  CHECK_NOTHROW(cfg.validate());

  cfg.t_final = 3.0;  // beyond the domain length of 2
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.allow_guard_violation = true;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("unknown scenarios are configuration errors") {
  ExperimentConfig cfg;
  cfg.scenario = "does-not-exist";
  CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
  cfg.scenario.clear();
  CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
}

TEST_CASE("scenario catalog names every experiment with its claim") {
  const auto scenarios = list_scenarios();
  REQUIRE(scenarios.size() == 10);
  const char* expected[] = {
      "green-identity",      "duhamel-consistency",  "oracle-agreement",
      "duality-auxiliary",   "duality-aux1",         "duality-aux2",
      "reachability-forward", "reachability-backward", "deficiency-table",
      "part-classification",
  };
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    CHECK(scenarios[k].name == expected[k]);
    CHECK(scenarios[k].claim.size() > 20);
  }
}

TEST_CASE("cli runs a passing scenario and writes report plus manifest") {
  TempDir tmp;
  const fs::path cfg = write_config(tmp.path, "ok.cfg",
                                    "scenario = green-identity\n"
                                    "n = 64\n"
                                    "output_dir = " +
                                        (tmp.path / "out").string() + "\n");
  CHECK(run_command(lab_exe() + " run " + cfg.string()) == 0);

  const std::string report = slurp(tmp.path / "out" / "green-identity.json");
  CHECK(report.find("\"pass\": true") != std::string::npos);
  const std::string manifest = slurp(tmp.path / "out" / "run_manifest.json");
  CHECK(manifest.find("green-identity") != std::string::npos);
  CHECK(manifest.find("started_at") != std::string::npos);
}

TEST_CASE("cli exit codes separate tolerance failures from config errors") {
  TempDir tmp;
  const std::string out_line =
      "output_dir = " + (tmp.path / "out").string() + "\n";

  // exit 1: the experiment runs but a pinned tolerance cannot be met
  const fs::path fail_cfg = write_config(
      tmp.path, "fail.cfg",
      "scenario = green-identity\nn = 64\ntol_green_identity = 1e-30\n" +
          out_line);
  CHECK(run_command(lab_exe() + " run " + fail_cfg.string()) == 1);
  const std::string report = slurp(tmp.path / "out" / "green-identity.json");
  CHECK(report.find("\"pass\": false") != std::string::npos);

  // exit 2: configuration problems of several kinds
  const fs::path bad_scenario = write_config(
      tmp.path, "bad_scenario.cfg", "scenario = not-a-scenario\n" + out_line);
  CHECK(run_command(lab_exe() + " run " + bad_scenario.string()) == 2);

  const fs::path bad_key = write_config(
      tmp.path, "bad_key.cfg",
      "scenario = green-identity\nwhatever = 1\n" + out_line);
  CHECK(run_command(lab_exe() + " run " + bad_key.string()) == 2);

  const fs::path small_n = write_config(
      tmp.path, "small_n.cfg", "scenario = green-identity\nn = 8\n" + out_line);
  CHECK(run_command(lab_exe() + " run " + small_n.string()) == 2);

  CHECK(run_command(lab_exe() + " run /nonexistent.cfg") == 2);
  CHECK(run_command(lab_exe()) == 2);
  CHECK(run_command(lab_exe() + " frobnicate") == 2);
}

TEST_CASE("cli list prints the catalog in both formats") {
  TempDir tmp;
  const fs::path txt = tmp.path / "list.txt";
  REQUIRE(std::system(
              (lab_exe() + " list > " + txt.string() + " 2>/dev/null").c_str()) == 0);
  const std::string listing = slurp(txt);
  for (const auto& s : list_scenarios()) {
    CHECK(listing.find(s.name) != std::string::npos);
  }

  const fs::path js = tmp.path / "list.json";
  REQUIRE(std::system((lab_exe() + " list --json > " + js.string() +
                       " 2>/dev/null")
                          .c_str()) == 0);
  const std::string json_listing = slurp(js);
  CHECK(json_listing.front() == '[');
  CHECK(json_listing.find("\"claim\"") != std::string::npos);
}

TEST_CASE("repeated runs are byte-identical including traces") {
  TempDir tmp;
  const std::string base =
      "scenario = duality-aux1\n"
      "n = 64\n";
  const fs::path cfg_a = write_config(
      tmp.path, "a.cfg", base + "output_dir = " + (tmp.path / "a").string() + "\n");
  const fs::path cfg_b = write_config(
      tmp.path, "b.cfg", base + "output_dir = " + (tmp.path / "b").string() + "\n");
  REQUIRE(run_command(lab_exe() + " run " + cfg_a.string()) == 0);
  REQUIRE(run_command(lab_exe() + " run " + cfg_b.string()) == 0);

  CHECK(slurp(tmp.path / "a" / "duality-aux1.json") ==
        slurp(tmp.path / "b" / "duality-aux1.json"));
  CHECK(slurp(tmp.path / "a" / "duality-aux1_control.csv") ==
        slurp(tmp.path / "b" / "duality-aux1_control.csv"));
  CHECK(slurp(tmp.path / "a" / "duality-aux1_port_trace.csv") ==
        slurp(tmp.path / "b" / "duality-aux1_port_trace.csv"));
}

TEST_CASE("trace files carry the documented header and shape") {
  TempDir tmp;
  const fs::path cfg = write_config(
      tmp.path, "oa.cfg",
      "scenario = oracle-agreement\nn = 64\ntol_solver = 1\noutput_dir = " +
          (tmp.path / "out").string() + "\n");
  REQUIRE(run_command(lab_exe() + " run " + cfg.string()) == 0);

  for (const char* name :
       {"oracle-agreement_state_direct_c1.csv",
        "oracle-agreement_state_direct_c2.csv",
        "oracle-agreement_state_oracle_c1.csv"}) {
    const std::string body = slurp(tmp.path / "out" / name);
    REQUIRE(body.rfind("t,x,re,im\n", 0) == 0);
    const long rows = std::count(body.begin(), body.end(), '\n');
    CHECK(rows == 65);  // header plus one row per node
  }
}

TEST_CASE("the output root environment variable overrides the config") {
  TempDir tmp;
  const fs::path cfg = write_config(
      tmp.path, "env.cfg",
      "scenario = green-identity\nn = 64\noutput_dir = " +
          (tmp.path / "from_config").string() + "\n");
  const fs::path env_root = tmp.path / "from_env";
  CHECK(run_command("LAB_OUTPUT_ROOT=" + env_root.string() + " " + lab_exe() +
                    " run " + cfg.string()) == 0);
  CHECK(fs::exists(env_root / "green-identity.json"));
  CHECK_FALSE(fs::exists(tmp.path / "from_config"));
}

TEST_CASE("cli refinement study reports sizes, errors, and orders") {
  TempDir tmp;
  const fs::path cfg = write_config(
      tmp.path, "conv.cfg",
      "output_dir = " + (tmp.path / "out").string() + "\n");
  CHECK(run_command(lab_exe() + " converge green-identity --sizes 48,64 " +
                    cfg.string()) == 0);
  const std::string report =
      slurp(tmp.path / "out" / "convergence_green-identity.json");
  CHECK(report.find("\"exact\": true") != std::string::npos);

  CHECK(run_command(lab_exe() + " converge green-identity --sizes 64 " +
                    cfg.string()) == 2);
  CHECK(run_command(lab_exe() + " converge green-identity --sizes 64,48 " +
                    cfg.string()) == 2);
  CHECK(run_command(lab_exe() + " converge green-identity --sizes x,y " +
                    cfg.string()) == 2);
  CHECK(run_command(lab_exe() + " converge reachability-forward --sizes 48,64 " +
                    cfg.string()) == 2);
}

TEST_CASE("convergence study api fits second order for the solvers") {
  TempDir tmp;
  ExperimentConfig cfg;
  cfg.output_dir = (tmp.path / "out").string();
  const ConvergenceResult r =
      convergence_study("oracle-agreement", {64, 128, 256}, cfg);
  REQUIRE(r.errors.size() == 3);
  REQUIRE(r.orders.size() == 2);
  for (const double p : r.orders) {
    CHECK(p >= 1.7);
    CHECK(p <= 2.3);
  }
  CHECK(r.errors[2] <= 5e-3);
  CHECK(r.pass);
}
