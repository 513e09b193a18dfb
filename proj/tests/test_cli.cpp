#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "common.hpp"

// End-to-end checks of the command-line tool: each test spawns the built
// binary against configs written into a temp directory and inspects exit
// codes and output files.

using namespace regforge;
using namespace testutil;
namespace fs = std::filesystem;

namespace {

const char* cli_path() { return REGFORGE_CLI_PATH; }

struct Workdir {
  fs::path path;
  Workdir() {
    path = fs::temp_directory_path() /
           ("regforge_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(rand()));
    fs::create_directories(path);
  }
  ~Workdir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

int run(const std::string& args, const std::string& redirect = "") {
  std::string cmd = std::string("REGFORGE_LOG=quiet ") + cli_path() + " " + args;
  if (!redirect.empty()) cmd += " > " + redirect + " 2>/dev/null";
  else cmd += " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

// small, fast instance: coarse grid, single nonzero frequency
void write_config(const std::string& path, const std::string& freqs,
                  double conductivity = 1.0) {
  std::ofstream out(path);
  out << R"({
  "plant": {
    "n_grid": 32,
    "domain": [0, 1],
    "conductivity": )" << conductivity << R"(,
    "disturbance": {"boundary": [[1, 0]]}
  },
  "signals": {
    "frequencies": )" << freqs << R"(,
    "reference": {"amplitudes": [[0.5], [1.0]]},
    "disturbance": {"amplitudes": [[0.0], [0.3]]}
  },
  "simulation": {"t_final": 30, "dt": 0.01}
})";
}

}  // namespace

TEST_CASE("cli: design writes a controller file and exits 0") {
  Workdir wd;
  write_config(wd.file("cfg.json"), "[0, 3.141592653589793]");
  const int rc = run("design --config " + wd.file("cfg.json") + " --out " +
                     wd.file("ctrl.json"));
  REQUIRE(rc == 0);
  const io::json j = io::load_json(wd.file("ctrl.json"));
  REQUIRE(j.at("schema_version").get<int>() == 1);
  REQUIRE(j.at("certificates").at("closed_loop_abscissa").get<double>() < 0.0);
  REQUIRE(j.at("certificates").at("sylvester_residual").get<double>() <= 1e-8);
}

TEST_CASE("cli: invalid frequency list is a config error (exit 1)") {
  Workdir wd;
  write_config(wd.file("cfg.json"), "[0, 2, 2]");
  REQUIRE(run("design --config " + wd.file("cfg.json")) == 1);
  write_config(wd.file("cfg2.json"), "[1, 2]");
  REQUIRE(run("design --config " + wd.file("cfg2.json")) == 1);
  REQUIRE(run("design --config " + wd.file("missing.json")) == 1);
  REQUIRE(run("design") == 1);  // missing required option
}

TEST_CASE("cli: transmission zero surfaces as a design error (exit 2)") {
  // at omega = 2000 the boundary transfer value is far below the
  // transmission-zero threshold relative to the omega = 0 value
  Workdir wd;
  write_config(wd.file("cfg.json"), "[0, 2000]");
  REQUIRE(run("design --config " + wd.file("cfg.json")) == 2);
}

TEST_CASE("cli: simulate produces trajectory and metrics, hash is enforced") {
  Workdir wd;
  write_config(wd.file("cfg.json"), "[0, 3.141592653589793]");
  REQUIRE(run("design --config " + wd.file("cfg.json") + " --out " +
              wd.file("ctrl.json")) == 0);
  REQUIRE(run("simulate --config " + wd.file("cfg.json") + " --controller " +
              wd.file("ctrl.json") + " --out " + wd.file("traj.csv") +
              " --metrics " + wd.file("metrics.json")) == 0);
  {
    std::ifstream in(wd.file("traj.csv"));
    std::string header;
    std::getline(in, header);
    REQUIRE(header == "t,y,y_ref,e,u");
    size_t lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    REQUIRE(lines == 3001);  // t_final / dt + 1
  }
  const io::json m = io::load_json(wd.file("metrics.json"));
  REQUIRE(m.at("terminal_error_sup").get<double>() <= 1e-2);

  // a detuned plant: hash mismatch without --force, accepted with it
  write_config(wd.file("other.json"), "[0, 3.141592653589793]", 1.05);
  REQUIRE(run("simulate --config " + wd.file("other.json") + " --controller " +
              wd.file("ctrl.json") + " --out " + wd.file("t2.csv") +
              " --metrics " + wd.file("m2.json")) == 1);
  REQUIRE(run("simulate --config " + wd.file("other.json") + " --controller " +
              wd.file("ctrl.json") + " --force --out " + wd.file("t2.csv") +
              " --metrics " + wd.file("m2.json")) == 0);
}

TEST_CASE("cli: simulate respects --dt and --t-final overrides") {
  Workdir wd;
  write_config(wd.file("cfg.json"), "[0, 3.141592653589793]");
  REQUIRE(run("design --config " + wd.file("cfg.json") + " --out " +
              wd.file("ctrl.json")) == 0);
  REQUIRE(run("simulate --config " + wd.file("cfg.json") + " --controller " +
              wd.file("ctrl.json") + " --dt 0.05 --t-final 1 --out " +
              wd.file("traj.csv") + " --metrics " + wd.file("m.json")) == 0);
  std::ifstream in(wd.file("traj.csv"));
  size_t lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  REQUIRE(lines == 22);  // header + 21 samples
}

TEST_CASE("cli: verify passes on the designed pair and writes a report") {
  Workdir wd;
  write_config(wd.file("cfg.json"), "[0, 3.141592653589793]");
  REQUIRE(run("design --config " + wd.file("cfg.json") + " --out " +
              wd.file("ctrl.json")) == 0);
  REQUIRE(run("verify --config " + wd.file("cfg.json") + " --controller " +
              wd.file("ctrl.json") + " --out " + wd.file("report.json")) == 0);
  const io::json rep = io::load_json(wd.file("report.json"));
  REQUIRE(rep.at("pass").get<bool>());
  REQUIRE(rep.at("checks").size() >= 5);
}

TEST_CASE("cli: verify flags a tampered controller (exit 3)") {
  Workdir wd;
  write_config(wd.file("cfg.json"), "[0, 3.141592653589793]");
  REQUIRE(run("design --config " + wd.file("cfg.json") + " --out " +
              wd.file("ctrl.json")) == 0);
  io::json j = io::load_json(wd.file("ctrl.json"));

  // kill the internal-model gain: loop loses the marginal modes' damping.
  // K2 must stay consistent with K0 + K1 HK, so set K1 = 0 and K2 = K0.
  io::json broken = j;
  broken["matrices"]["K1"] = io::to_json(
      Mat::Zero(1, io::mat_from_json(j["matrices"]["K1"]).cols()));
  broken["matrices"]["K2"] = j["matrices"]["K0"];
  io::save_json(broken, wd.file("broken.json"));
  REQUIRE(run("verify --config " + wd.file("cfg.json") + " --controller " +
              wd.file("broken.json") + " --out " + wd.file("r1.json")) == 3);

  // perturbed HK: stability may survive but the identity residual cannot
  io::json skew = j;
  const Mat HK = io::mat_from_json(j["matrices"]["HK"]);
  const Mat K0 = io::mat_from_json(j["matrices"]["K0"]);
  const Mat K1 = io::mat_from_json(j["matrices"]["K1"]);
  const Mat HK2 = 1.01 * HK;
  skew["matrices"]["HK"] = io::to_json(HK2);
  skew["matrices"]["K2"] = io::to_json(Mat(K0 + K1 * HK2));
  io::save_json(skew, wd.file("skew.json"));
  REQUIRE(run("verify --config " + wd.file("cfg.json") + " --controller " +
              wd.file("skew.json") + " --out " + wd.file("r2.json")) == 3);
}

TEST_CASE("cli: freqresp tabulates routes and marks the omega = 0 pole") {
  Workdir wd;
  write_config(wd.file("cfg.json"), "[0, 3.141592653589793]");
  REQUIRE(run("freqresp --config " + wd.file("cfg.json") +
                  " --omega 0 3.141592653589793",
              wd.file("table.csv")) == 0);
  std::ifstream in(wd.file("table.csv"));
  std::string header, row0, row_pi;
  std::getline(in, header);
  REQUIRE(header == "omega,P,PK_direct,PK_reduced,GK,disagreement,flags");
  std::getline(in, row0);
  // omega = 0: open-loop pole, direct route still produces a value
  REQUIRE(row0.find("pole(P)") != std::string::npos);
  REQUIRE(row0.find("pole(reduced)") != std::string::npos);
  REQUIRE(row0.find("pole(direct)") == std::string::npos);
  std::getline(in, row_pi);
  // omega = pi: both routes agree
  const auto last_comma = row_pi.rfind(',');
  REQUIRE(row_pi.substr(last_comma + 1).empty());  // no flags
  const auto dis_start = row_pi.rfind(',', last_comma - 1) + 1;
  const double dis =
      std::stod(row_pi.substr(dis_start, last_comma - dis_start));
  REQUIRE(dis <= 1e-9);
}

TEST_CASE("cli: freqresp with no frequencies prints only the header") {
  Workdir wd;
  write_config(wd.file("cfg.json"), "[0, 3.141592653589793]");
  REQUIRE(run("freqresp --config " + wd.file("cfg.json"), wd.file("t.csv")) ==
          0);
  std::ifstream in(wd.file("t.csv"));
  std::string header, extra;
  std::getline(in, header);
  REQUIRE(header == "omega,P,PK_direct,PK_reduced,GK,disagreement,flags");
  REQUIRE_FALSE(std::getline(in, extra));
}
