#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "common.hpp"

using namespace regforge;
using namespace testutil;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("regforge_io_" + std::to_string(::getpid()) + "_" +
            std::to_string(rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("profile json: all kinds round trip") {
  for (const Profile& p :
       {Profile::constant(2.5), Profile::gaussian(1.2, 0.3, 0.05),
        Profile::sampled({0.1, 0.4, 0.9, 1.6})}) {
    const Profile q = io::profile_from_json(io::to_json(p));
    for (double xi : {0.0, 0.25, 0.61, 1.0})
      REQUIRE(q(xi, 0.0, 1.0) == Approx(p(xi, 0.0, 1.0)).margin(1e-14));
  }
  // the scale factor is folded into the serialized values
  const Profile scaled = Profile::constant(2.0).scaled(3.0);
  const Profile back = io::profile_from_json(io::to_json(scaled));
  REQUIRE(back(0.5, 0.0, 1.0) == Approx(6.0));

  // shorthand forms
  REQUIRE(io::profile_from_json(io::json(1.5))(0.3, 0.0, 1.0) == Approx(1.5));
  REQUIRE(io::profile_from_json(io::json::array({0.0, 2.0}))(0.5, 0.0, 1.0) ==
          Approx(1.0));
  REQUIRE_THROWS_AS(io::profile_from_json(io::json{{"type", "spline"}}),
                    InvalidConfig);
}

TEST_CASE("matrix json: round trip and shape errors") {
  std::mt19937 rng(61);
  const Mat M = random_matrix(3, 4, rng);
  REQUIRE((io::mat_from_json(io::to_json(M)) - M).norm() == 0.0);
  const CMat C = M.cast<Complex>() + Complex(0, 1) * random_matrix(3, 4, rng).cast<Complex>();
  REQUIRE((io::cmat_from_json(io::to_json(C)) - C).norm() == 0.0);
  REQUIRE_THROWS_AS(io::mat_from_json(io::json::array()), InvalidConfig);
  REQUIRE_THROWS_AS(io::mat_from_json(io::json::parse("[[1,2],[3]]")),
                    InvalidConfig);
}

TEST_CASE("plant_hash: deterministic and sensitive") {
  const PlantConfig a = nominal_config().plant;
  REQUIRE(io::plant_hash(a) == io::plant_hash(a));
  PlantConfig b = a;
  b.n_grid = 51;
  REQUIRE(io::plant_hash(a) != io::plant_hash(b));
  b = a;
  b.conductivity = a.conductivity.scaled(1.0 + 1e-12);
  REQUIRE(io::plant_hash(a) != io::plant_hash(b));
}

TEST_CASE("config json: parse, defaults, and error mapping") {
  const io::json j = io::json::parse(R"({
    "plant": {"n_grid": 32, "domain": [0, 1],
              "disturbance": {"boundary": [[1, 0]]}},
    "signals": {"frequencies": [0, 3.141592653589793],
                "reference": {"amplitudes": [[0.5], [1.0]]}},
    "design": {"hk_truncation": 12},
    "simulation": {"t_final": 10, "dt": 0.01}
  })");
  const io::RunConfig cfg = io::config_from_json(j);
  REQUIRE(cfg.plant.n_grid == 32);
  REQUIRE(cfg.signals.frequencies.size() == 2);
  REQUIRE(cfg.signals.ref_phases == std::vector<double>{0.0, 0.0});
  REQUIRE(cfg.design.hk_truncation.has_value());
  REQUIRE(*cfg.design.hk_truncation == 12);
  REQUIRE(cfg.design.im_q_weight == Approx(4.0));  // struct default preserved
  REQUIRE(cfg.simulation.resolved_dt() == Approx(0.01));

  io::SimulationOptions sim;
  sim.t_final = 20.0;
  REQUIRE(sim.resolved_dt() == Approx(0.02));

  REQUIRE_THROWS_AS(io::config_from_json(io::json{{"plant", io::json::object()}}),
                    io::json::exception);
  TempDir tmp;
  {
    std::ofstream out(tmp.file("bad.json"));
    out << "{ not json";
  }
  REQUIRE_THROWS_AS(io::load_config(tmp.file("bad.json")), InvalidConfig);
  REQUIRE_THROWS_AS(io::load_config(tmp.file("missing.json")), InvalidConfig);
  {
    std::ofstream out(tmp.file("noplant.json"));
    out << R"({"signals": {"frequencies": [0]}})";
  }
  REQUIRE_THROWS_AS(io::load_config(tmp.file("noplant.json")), InvalidConfig);
}

TEST_CASE("controller json: exact round trip") {
  const DesignResult& d = nominal_design();
  const io::json j = io::controller_to_json(d.controller);
  const ControllerRealization back = io::controller_from_json(j);
  REQUIRE((back.K1 - d.controller.K1).norm() == 0.0);
  REQUIRE((back.K2 - d.controller.K2).norm() == 0.0);
  REQUIRE((back.L - d.controller.L).norm() == 0.0);
  REQUIRE((back.HK - d.controller.HK).norm() == 0.0);
  REQUIRE((back.internal_model.G1 - d.controller.internal_model.G1).norm() == 0.0);
  REQUIRE((back.plant.A - d.controller.plant.A).norm() == 0.0);
  REQUIRE(back.plant_hash == d.controller.plant_hash);
  REQUIRE(back.im_abscissa == d.controller.im_abscissa);
  // the reloaded controller drives the same closed loop
  const ClosedLoopSystem cl = assemble_closed_loop(d.plant, back);
  REQUIRE((cl.Ae - d.closed_loop.Ae).norm() == 0.0);
}

TEST_CASE("controller json: tampering and version gates") {
  const DesignResult& d = nominal_design();
  io::json j = io::controller_to_json(d.controller);
  j["matrices"]["K2"][0][0] = j["matrices"]["K2"][0][0].get<double>() + 1.0;
  REQUIRE_THROWS_AS(io::controller_from_json(j), InvalidConfig);

  j = io::controller_to_json(d.controller);
  j["schema_version"] = 999;
  REQUIRE_THROWS_AS(io::controller_from_json(j), InvalidConfig);
}

TEST_CASE("format_double: shortest round-trip representation") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 3e300, 0.0}) {
    const std::string s = io::format_double(v);
    REQUIRE(std::stod(s) == v);
  }
  REQUIRE(io::format_double(0.5) == "0.5");
}

TEST_CASE("trajectory csv: header and values") {
  SimResult sim;
  sim.t = {0.0, 0.5};
  sim.y = {Vec::Constant(1, 1.5), Vec::Constant(1, 0.25)};
  sim.y_ref = {Vec::Constant(1, 1.0), Vec::Constant(1, 0.5)};
  sim.e = {Vec::Constant(1, 0.5), Vec::Constant(1, -0.25)};
  sim.u = {Vec::Constant(1, 0.0), Vec::Constant(1, 2.0)};
  TempDir tmp;
  const std::string path = tmp.file("traj.csv");
  io::write_trajectory_csv(sim, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "t,y,y_ref,e,u");
  std::getline(in, line);
  REQUIRE(line == "0,1.5,1,0.5,0");
  std::getline(in, line);
  REQUIRE(line == "0.5,0.25,0.5,-0.25,2");
}

TEST_CASE("design output: byte-identical across repeated runs") {
  io::RunConfig cfg = nominal_config();
  cfg.plant.n_grid = 20;
  cfg.signals.frequencies = {0.0, M_PI};
  cfg.signals.ref_amplitudes = {Vec::Constant(1, 0.5), Vec::Constant(1, 1.0)};
  cfg.signals.ref_phases = {0.0, 0.0};
  cfg.signals.dist_amplitudes = {Vec::Zero(2), (Vec(2) << 0.3, 0.0).finished()};
  cfg.signals.dist_phases = {0.0, 0.0};
  const DesignResult a = design_pipeline(cfg);
  const DesignResult b = design_pipeline(cfg);
  REQUIRE(io::controller_to_json(a.controller).dump() ==
          io::controller_to_json(b.controller).dump());
}

TEST_CASE("metrics json: fields present") {
  SimResult sim;
  sim.t = {0.0, 1.0};
  sim.terminal_error_sup = 1e-4;
  sim.fitted_decay_rate = 0.5;
  sim.weighted_integral = 2.0;
  const io::json m = io::metrics_to_json(sim);
  REQUIRE(m.at("terminal_error_sup").get<double>() == Approx(1e-4));
  REQUIRE(m.at("fitted_decay_rate").get<double>() == Approx(0.5));
  REQUIRE(m.at("samples").get<size_t>() == 2);
}
