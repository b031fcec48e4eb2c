#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "epiwave/config.hpp"
#include "epiwave/csv.hpp"

using namespace epiwave;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(EPIWAVE_CLI_BIN) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path d = fs::temp_directory_path() / ("epiwave_test_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> read_kv_csv(const fs::path& p) {
  std::map<std::string, std::string> kv;
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    kv[line.substr(0, comma)] = line.substr(comma + 1);
  }
  return kv;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string small_sim_cfg(const std::string& extra = "") {
  return "mu=0.83\neta=0.001\nphi=0.35\nbeta1=0.005\nbeta2=0.003\n"
         "beta=0.0011\nb1=100\nb2=0.1\nd_h=0.2\nd_v=0.5\n"
         "grid.length=500\ngrid.n=201\ntime.t_end=5\ntime.dt=auto\n"
         "time.snapshot_every=1\nic.split_at=200\nout.dir=out\n" +
         extra;
}

}  // namespace

TEST_CASE("shortest round-trip double formatting") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> e(-300, 300);
  for (int i = 0; i < 5000; ++i) {
    const double x = u(rng) * std::pow(10.0, e(rng));
    const std::string s = fmt_double(x);
    CHECK(std::stod(s) == x);
  }
  CHECK(fmt_double(0.5) == "0.5");
  CHECK(fmt_double(50.0) == "50");
}

TEST_CASE("config parsing contract") {
  CHECK_THROWS_WITH_AS(parse_config_text("eta=1\n"), doctest::Contains("mu"),
                       ConfigError);
  const std::string base = small_sim_cfg();
  CHECK_NOTHROW(parse_config_text(base));
  CHECK_THROWS_WITH_AS(parse_config_text(base + "bogus_key=3\n"),
                       doctest::Contains("bogus_key"), ConfigError);
  CHECK_THROWS_AS(parse_config_text(base + "grid.n=2.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("mu=\n"), ConfigError);
  const auto cfg = parse_config_text(base + "# trailing comment\n");
  CHECK(cfg.params.mu == 0.83);
  CHECK(cfg.grid_n == 201);
  CHECK(!cfg.dt.has_value());
}

TEST_CASE("analyze reproduces the reference summary") {
  const auto out = fresh_dir("analyze");
  const auto r = run_cli("analyze --config " EPIWAVE_TABLE2_CFG " --out " +
                         out.string());
  CHECK(r.exit_code == 0);
  const auto kv = read_kv_csv(out / "summary.csv");
  CHECK(std::abs(std::stod(kv.at("r0")) - 34.20) < 0.01);
  CHECK(std::abs(std::stod(kv.at("c_star")) - 0.3410) < 0.0005);
  CHECK(std::abs(std::stod(kv.at("lambda_star")) - 0.3583) < 0.001);
  CHECK(std::abs(std::stod(kv.at("e1_x2")) - 33.87) < 0.01);
}

TEST_CASE("analyze flags subcritical rates") {
  const auto out = fresh_dir("analyze_sub");
  const auto r = run_cli("analyze --config " EPIWAVE_SUBCRIT_CFG " --out " +
                         out.string());
  CHECK(r.exit_code == 0);
  const auto kv = read_kv_csv(out / "summary.csv");
  CHECK(std::abs(std::stod(kv.at("r0")) - 0.342) < 0.001);
  CHECK(kv.at("e1") == "none");
  CHECK(kv.at("c_star") == "subcritical");
  CHECK(r.output.find("none") != std::string::npos);
}

TEST_CASE("config errors map to exit code 2") {
  const auto dir = fresh_dir("cfg_err");
  write_file(dir / "missing.cfg", "eta=1\nphi=1\n");
  const auto r = run_cli("analyze --config " + (dir / "missing.cfg").string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("mu") != std::string::npos);

  write_file(dir / "unknown.cfg", small_sim_cfg("nonsense=1\n"));
  CHECK(run_cli("analyze --config " + (dir / "unknown.cfg").string()).exit_code == 2);
}

TEST_CASE("invalid parameters map to exit code 3") {
  const auto dir = fresh_dir("bad_params");
  std::string cfg = small_sim_cfg();
  cfg.replace(cfg.find("mu=0.83"), 7, "mu=-1.0");
  write_file(dir / "bad.cfg", cfg);
  const auto r = run_cli("analyze --config " + (dir / "bad.cfg").string());
  CHECK(r.exit_code == 3);
}

TEST_CASE("dispersion sampling and range checks") {
  const auto out = fresh_dir("disp");
  const auto r = run_cli("dispersion --config " EPIWAVE_TABLE2_CFG
                         " --lambda-min 0.01 --lambda-max 10 --samples 500 --out " +
                         out.string());
  CHECK(r.exit_code == 0);
  const std::string text = slurp(out / "dispersion.csv");
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == "lambda,alpha_min,alpha_max,c_lambda");
  double min_c = 1e300;
  std::vector<double> cs;
  std::string trailer;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0 || line.rfind("#", 0) == 0) {
      trailer = line;
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(row, cell, ',')) cells.push_back(std::stod(cell));
    REQUIRE(cells.size() == 4);
    cs.push_back(cells[3]);
    min_c = std::min(min_c, cells[3]);
  }
  CHECK(cs.size() == 500);
  CHECK(std::abs(min_c - 0.3410) < 1e-3);
  CHECK(trailer.find("lambda_star=") != std::string::npos);
  CHECK(trailer.find("c_star=") != std::string::npos);

  // The sampled curve dips once: the discrete slope changes sign exactly once.
  int sign_changes = 0;
  for (std::size_t i = 2; i < cs.size(); ++i) {
    const bool was_down = cs[i - 1] < cs[i - 2];
    const bool now_down = cs[i] < cs[i - 1];
    if (was_down != now_down) ++sign_changes;
  }
  CHECK(sign_changes == 1);

  const auto out2 = fresh_dir("disp2");
  const auto r2 = run_cli("dispersion --config " EPIWAVE_TABLE2_CFG
                          " --lambda-min 0.1 --lambda-max 1 --samples 2 --out " +
                          out2.string());
  CHECK(r2.exit_code == 0);
  std::istringstream in2(slurp(out2 / "dispersion.csv"));
  int data_rows = 0;
  while (std::getline(in2, line))
    if (!line.empty() && line[0] != '#' && line.find("lambda,") != 0) ++data_rows;
  CHECK(data_rows == 2);

  CHECK(run_cli("dispersion --config " EPIWAVE_TABLE2_CFG
                " --lambda-min 0 --lambda-max 1 --samples 10")
            .exit_code == 4);

  const auto out3 = fresh_dir("disp_sub");
  CHECK(run_cli("dispersion --config " EPIWAVE_SUBCRIT_CFG
                " --lambda-min 0.01 --lambda-max 10 --samples 50 --out " +
                out3.string())
            .exit_code == 0);
  CHECK(slurp(out3 / "dispersion.csv").find("# subcritical") != std::string::npos);
  CHECK(run_cli("dispersion --config " EPIWAVE_TABLE2_CFG
                " --lambda-min 1 --lambda-max 0.5 --samples 10")
            .exit_code == 4);
}

TEST_CASE("simulate: determinism, IC echo, manifest round-trip") {
  const auto dir = fresh_dir("sim");
  write_file(dir / "run.cfg", small_sim_cfg());
  const auto out1 = dir / "o1";
  const auto out2 = dir / "o2";
  CHECK(run_cli("simulate --config " + (dir / "run.cfg").string() + " --out " +
                out1.string())
            .exit_code == 0);
  CHECK(run_cli("simulate --config " + (dir / "run.cfg").string() + " --out " +
                out2.string())
            .exit_code == 0);

  std::vector<fs::path> names;
  for (const auto& e : fs::directory_iterator(out1)) names.push_back(e.path().filename());
  REQUIRE(!names.empty());
  for (const auto& n : names) CHECK(slurp(out1 / n) == slurp(out2 / n));

  // t = 0 snapshot equals the configured piecewise IC.
  const std::string snap0 = slurp(out1 / "snap_0.csv");
  std::istringstream in(snap0);
  std::string line;
  std::getline(in, line);
  CHECK(line == "y,x1,x2,x3,x4");
  std::getline(in, line);  // node at y = 0 carries the endemic state
  CHECK(line.substr(0, 2) == "0,");
  CHECK(line.find("33.87464556403103") != std::string::npos);

  // Rebuild a config from the manifest echo; outputs must be byte-identical.
  const auto kv = read_kv_csv(out1 / "manifest.csv");
  std::string echo_cfg;
  for (const auto& [k, v] : kv)
    if (k.rfind("derived.", 0) != 0) echo_cfg += k + " = " + v + "\n";
  write_file(dir / "echo.cfg", echo_cfg);
  const auto out3 = dir / "o3";
  CHECK(run_cli("simulate --config " + (dir / "echo.cfg").string() + " --out " +
                out3.string())
            .exit_code == 0);
  for (const auto& n : names) CHECK(slurp(out1 / n) == slurp(out3 / n));
}

TEST_CASE("simulate reports a front speed on the reference configuration") {
  const auto out = fresh_dir("sim_speed");
  const auto r = run_cli("simulate --config " EPIWAVE_TABLE2_CFG " --out " +
                         out.string());
  CHECK(r.exit_code == 0);
  const auto kv = read_kv_csv(out / "report_speed.csv");
  const double speed = std::stod(kv.at("speed"));
  // The t_end = 50 window sits deep in the pulled-front transient; the fitted
  // speed lands well under the dispersion minimum 0.3410 at this horizon.
  CHECK(speed > 0.1);
  CHECK(speed < 0.3410);
  CHECK(kv.at("extinct") == "0");
  CHECK(fs::exists(out / "report_conservation.csv"));
  CHECK(fs::exists(out / "report_lyapunov.csv"));
  CHECK(fs::exists(out / "report_harnack.csv"));
  CHECK(fs::exists(out / "report_comparability.csv"));
  CHECK(fs::exists(out / "front.csv"));
}

TEST_CASE("simulate flags extinction when the subcritical decay is fast") {
  // Transmission cut a hundredfold and vector mortality raised so the decay
  // rate is order one; infected fields collapse within the run.
  const auto dir = fresh_dir("sim_ext");
  write_file(dir / "ext.cfg",
             "mu=0.83\neta=0.5\nphi=0.35\nbeta1=0.00005\nbeta2=0.00003\n"
             "beta=0.0011\nb1=100\nb2=0.1\nd_h=0.2\nd_v=0.5\n"
             "grid.length=500\ngrid.n=201\ntime.t_end=100\ntime.dt=auto\n"
             "time.snapshot_every=10\nic.split_at=200\nout.dir=out\n");
  const auto out = dir / "o";
  const auto r = run_cli("simulate --config " + (dir / "ext.cfg").string() +
                         " --out " + out.string());
  CHECK(r.exit_code == 0);
  const auto kv = read_kv_csv(out / "report_speed.csv");
  CHECK(kv.at("extinct") == "1");
  CHECK(std::stod(kv.at("x2_final_max")) < 1e-6 * std::stod(kv.at("x2_initial_max")));
}

TEST_CASE("simulate reports instability with exit code 5") {
  const auto dir = fresh_dir("sim_unstable");
  std::string cfg = small_sim_cfg();
  cfg.replace(cfg.find("time.dt=auto"), 12, "time.dt=5.0");
  cfg.replace(cfg.find("time.t_end=5"), 12, "time.t_end=99");
  write_file(dir / "bad.cfg", cfg);
  const auto r = run_cli("simulate --config " + (dir / "bad.cfg").string() +
                         " --out " + (dir / "o").string());
  CHECK(r.exit_code == 5);
  CHECK(r.output.find("last stable") != std::string::npos);
}

TEST_CASE("certify passes above the minimal speed and rejects below") {
  const auto out = fresh_dir("cert");
  const auto ok = run_cli("certify --config " EPIWAVE_TABLE2_CFG
                          " --c 0.5 --out " + out.string());
  CHECK(ok.exit_code == 0);
  const std::string text = slurp(out / "certificate.csv");
  CHECK(text.find("b0_separation") != std::string::npos);
  CHECK(text.find("lower_x2_inequality") != std::string::npos);
  CHECK(ok.output.find("PASSED") != std::string::npos);

  const auto bad = run_cli("certify --config " EPIWAVE_TABLE2_CFG
                           " --c 0.3 --out " + out.string());
  CHECK(bad.exit_code == 6);
}

TEST_CASE("environment variable steers the output directory") {
  const auto dir = fresh_dir("env_out");
  write_file(dir / "run.cfg", small_sim_cfg());
  const std::string cmd = "EPIWAVE_OUT=" + (dir / "env_dir").string() + " " +
                          EPIWAVE_CLI_BIN " analyze --config " +
                          (dir / "run.cfg").string() + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) {
  }
  CHECK(WEXITSTATUS(pclose(pipe)) == 0);
  CHECK(fs::exists(dir / "env_dir" / "summary.csv"));
}
