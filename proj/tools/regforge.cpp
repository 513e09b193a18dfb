// regforge: synthesis and verification of internal-model error-feedback
// controllers for boundary-controlled 1D reaction-diffusion plants.
//
// Subcommands: design | simulate | verify | freqresp
// Exit codes:  0 ok, 1 config error, 2 design error, 3 verification failure.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "regforge/regforge.hpp"

namespace {

using namespace regforge;

int log_level() {
  const char* env = std::getenv("REGFORGE_LOG");
  if (!env) return 1;
  const std::string v = env;
  if (v == "quiet" || v == "0") return 0;
  if (v == "debug" || v == "2") return 2;
  return 1;
}

void info(const std::string& msg) {
  if (log_level() >= 1) std::cout << msg << "\n";
}

void debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[debug] " << msg << "\n";
}

int cmd_design(const std::string& config_path, std::string out_path) {
  const io::RunConfig cfg = io::load_config(config_path);
  if (out_path.empty()) out_path = cfg.output.controller;
  debug("designing from " + config_path);
  const DesignResult r = design_pipeline(cfg);

  io::json j = io::controller_to_json(r.controller);
  j["certificates"]["margin_feedback"] = r.gains.margin_feedback;
  j["certificates"]["margin_injection"] = r.gains.margin_injection;
  j["certificates"]["closed_loop_abscissa"] = r.closed_loop_abscissa;
  j["certificates"]["sylvester_residual"] = r.sylvester_rel_residual;
  io::json fv = io::json::array();
  for (const auto& v : r.freqdata.values)
    fv.push_back({{"omega", v.omega},
                  {"PK", io::to_json(v.PK)},
                  {"PKI", io::to_json(v.PKI)}});
  j["freqdata"] = fv;
  j["design_options"] = {{"q_weight", cfg.design.q_weight},
                         {"r_weight", cfg.design.r_weight},
                         {"im_q_weight", cfg.design.im_q_weight},
                         {"im_r_weight", cfg.design.im_r_weight},
                         {"tz_tol", cfg.design.tz_tol},
                         {"stab_floor", cfg.design.stab_floor}};
  if (cfg.design.hk_truncation)
    j["design_options"]["hk_truncation"] = *cfg.design.hk_truncation;
  io::save_json(j, out_path);

  info("controller written to " + out_path);
  info("  margin_feedback      = " + std::to_string(r.gains.margin_feedback));
  info("  margin_injection     = " + std::to_string(r.gains.margin_injection));
  info("  internal model absc. = " + std::to_string(r.controller.im_abscissa));
  info("  closed-loop abscissa = " + std::to_string(r.closed_loop_abscissa));
  info("  sylvester residual   = " + std::to_string(r.sylvester_rel_residual));
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& ctrl_path,
                 std::string out_path, std::string metrics_path, bool force,
                 double dt_override, double t_final_override) {
  io::RunConfig cfg = io::load_config(config_path);
  if (out_path.empty()) out_path = cfg.output.trajectory;
  if (metrics_path.empty()) metrics_path = cfg.output.metrics;
  if (dt_override > 0.0) cfg.simulation.dt = dt_override;
  if (t_final_override > 0.0) cfg.simulation.t_final = t_final_override;

  const ControllerRealization ctrl =
      io::controller_from_json(io::load_json(ctrl_path));
  const std::string hash = io::plant_hash(cfg.plant);
  if (ctrl.plant_hash != hash && !force)
    throw HashMismatch("controller was designed for a different plant (hash " +
                       ctrl.plant_hash + " vs " + hash +
                       "); pass --force for deliberate mismatch studies");

  const StateSpaceModel plant = discretize(cfg.plant);
  cfg.signals.validate(plant.p(), plant.nd());
  const ClosedLoopSystem cl = assemble_closed_loop(plant, ctrl);
  const SimResult sim =
      simulate(cl, cfg.signals, Vec::Zero(cl.dim()), cfg.simulation.t_final,
               cfg.simulation.resolved_dt());
  io::write_trajectory_csv(sim, out_path);
  io::save_json(io::metrics_to_json(sim), metrics_path);
  info("trajectory written to " + out_path);
  info("  terminal_error_sup = " + std::to_string(sim.terminal_error_sup));
  info("  fitted_decay_rate  = " + std::to_string(sim.fitted_decay_rate));
  return 0;
}

int cmd_verify(const std::string& config_path, const std::string& ctrl_path,
               std::string out_path) {
  const io::RunConfig cfg = io::load_config(config_path);
  if (out_path.empty()) out_path = cfg.output.report;
  const ControllerRealization ctrl =
      io::controller_from_json(io::load_json(ctrl_path));
  const VerifyReport rep = verify_pipeline(cfg, ctrl);
  io::save_json(report_to_json(rep), out_path);
  for (const auto& c : rep.checks)
    info(std::string(c.pass ? "[pass] " : "[FAIL] ") + c.name + " (value " +
         std::to_string(c.value) + ", threshold " +
         std::to_string(c.threshold) + ")");
  info("report written to " + out_path);
  return rep.pass() ? 0 : 3;
}

int cmd_freqresp(const std::string& config_path,
                 const std::vector<double>& omegas) {
  const io::RunConfig cfg = io::load_config(config_path);
  const StateSpaceModel plant = discretize(cfg.plant);
  const Mat K0 = design_K0(plant, cfg.design.q_weight, cfg.design.r_weight);

  std::cout << "omega,P,PK_direct,PK_reduced,GK,disagreement,flags\n";
  for (double w : omegas) {
    std::cout << w << ",";
    std::string flags;
    std::string p_str = "-", pk_d = "-", pk_r = "-", gk = "-", dis = "-";
    try {
      const auto [P, Ppsi] = transfer_value(plant, Complex(0.0, w));
      (void)Ppsi;
      p_str = io::format_double(P(0, 0).real()) + (P(0, 0).imag() < 0 ? "-" : "+") +
              io::format_double(std::abs(P(0, 0).imag())) + "i";
    } catch (const ResolventPole&) {
      flags += "pole(P);";
    }
    FreqValue direct;
    bool have_direct = false;
    try {
      direct = eval_PK_PKI_direct(plant, K0, w);
      have_direct = true;
      pk_d = io::format_double(direct.PK(0, 0).real()) +
             (direct.PK(0, 0).imag() < 0 ? "-" : "+") +
             io::format_double(std::abs(direct.PK(0, 0).imag())) + "i";
    } catch (const ResolventPole&) {
      flags += "pole(direct);";
    }
    try {
      const FreqValue red = eval_PK_PKI_reduced(plant, K0, w);
      pk_r = io::format_double(red.PK(0, 0).real()) +
             (red.PK(0, 0).imag() < 0 ? "-" : "+") +
             io::format_double(std::abs(red.PK(0, 0).imag())) + "i";
      const Eigen::Index n = plant.n();
      const CMat M = Complex(0.0, w) * CMat::Identity(n, n) -
                     plant.A.cast<Complex>();
      const CMat GK =
          K0.cast<Complex>() * numerics::solve_linear(M, plant.B.cast<Complex>());
      gk = io::format_double(GK(0, 0).real()) +
           (GK(0, 0).imag() < 0 ? "-" : "+") +
           io::format_double(std::abs(GK(0, 0).imag())) + "i";
      if (have_direct)
        dis = io::format_double(
            ((direct.PK - red.PK).norm() + (direct.PKI - red.PKI).norm()) /
            std::max(1e-300, direct.PK.norm() + direct.PKI.norm()));
    } catch (const ResolventPole&) {
      flags += "pole(reduced);";
    }
    std::cout << p_str << "," << pk_d << "," << pk_r << "," << gk << "," << dis
              << "," << flags << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"internal-model output-regulation controller toolkit"};
  app.require_subcommand(1);

  std::string config_path, ctrl_path, out_path, metrics_path;
  bool force = false;
  double dt_override = 0.0, t_final_override = 0.0;
  std::vector<double> omegas;

  auto* design = app.add_subcommand("design", "design a controller");
  design->add_option("--config", config_path)->required();
  design->add_option("--out", out_path);

  auto* sim = app.add_subcommand("simulate", "simulate the closed loop");
  sim->add_option("--config", config_path)->required();
  sim->add_option("--controller", ctrl_path)->required();
  sim->add_option("--out", out_path);
  sim->add_option("--metrics", metrics_path);
  sim->add_flag("--force", force, "allow plant-hash mismatch");
  sim->add_option("--dt", dt_override);
  sim->add_option("--t-final", t_final_override);

  auto* verify = app.add_subcommand("verify", "verify the RORP properties");
  verify->add_option("--config", config_path)->required();
  verify->add_option("--controller", ctrl_path)->required();
  verify->add_option("--out", out_path);

  auto* freq = app.add_subcommand("freqresp", "tabulate transfer values");
  freq->add_option("--config", config_path)->required();
  freq->add_option("--omega", omegas);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (design->parsed()) return cmd_design(config_path, out_path);
    if (sim->parsed())
      return cmd_simulate(config_path, ctrl_path, out_path, metrics_path, force,
                          dt_override, t_final_override);
    if (verify->parsed()) return cmd_verify(config_path, ctrl_path, out_path);
    if (freq->parsed()) return cmd_freqresp(config_path, omegas);
  } catch (const regforge::InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const regforge::InvalidFrequencies& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const regforge::HashMismatch& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const regforge::Error& e) {
    std::cerr << "design error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
