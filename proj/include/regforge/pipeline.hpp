#pragma once

#include <string>
#include <vector>

#include "regforge/io.hpp"

namespace regforge {

// Everything the design stage produces, including the certificates the CLI
// prints and the verify stage re-checks.
struct DesignResult {
  StateSpaceModel plant;
  StabilizingGains gains;
  FreqData freqdata;
  ControllerRealization controller;
  ClosedLoopSystem closed_loop;
  double closed_loop_abscissa = 0.0;
  double sylvester_rel_residual = 0.0;
};

// discretize -> K0/L -> frequency data (direct route, transmission-zero
// gate) -> B1/HK -> K1 -> assemble, then certify the closed loop.
inline DesignResult design_pipeline(const io::RunConfig& cfg) {
  DesignResult r;
  r.plant = discretize(cfg.plant);
  cfg.signals.validate(r.plant.p(), r.plant.nd());
  r.gains = design_gains(r.plant, cfg.design.q_weight, cfg.design.r_weight);
  r.freqdata = compute_freqdata(r.plant, r.gains.K0, cfg.signals.frequencies,
                                cfg.design.tz_tol);

  Mat HK = r.freqdata.HK;
  if (cfg.design.hk_truncation) {
    const Mat basis = neumann_eigenbasis(cfg.plant, *cfg.design.hk_truncation);
    HK = build_HK_truncated(r.plant, r.gains.K0, cfg.signals.frequencies, basis);
  }

  const InternalModel im = build_internal_model(
      cfg.signals.frequencies, static_cast<int>(r.plant.p()));
  if (!hautus_controllable(im.G1, r.freqdata.B1))
    throw TransmissionZero("design: (G1, B1) fails the Hautus test");
  const Mat K1 = design_K1(im.G1, r.freqdata.B1, cfg.design.im_q_weight,
                           cfg.design.im_r_weight);

  r.controller = assemble_controller(im, r.gains.L, r.gains.K0, K1, HK, r.plant);
  r.controller.im_abscissa =
      numerics::spectral_abscissa(im.G1 + r.freqdata.B1 * K1);
  r.controller.plant_hash = io::plant_hash(cfg.plant);

  r.closed_loop = assemble_closed_loop(r.plant, r.controller);
  r.closed_loop_abscissa = numerics::spectral_abscissa(r.closed_loop.Ae);
  r.sylvester_rel_residual =
      sylvester_residual(r.freqdata.HK, im, r.plant, r.gains.K0);
  return r;
}

struct VerifyCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// The RORP properties as machine checks: stability certificate, blocking
// zeros at the design frequencies, Sylvester residual of the stored H_K,
// route cross-check at the nonzero frequencies, and the robustness sweep.
inline VerifyReport verify_pipeline(const io::RunConfig& cfg,
                                    const ControllerRealization& ctrl) {
  VerifyReport rep;
  const StateSpaceModel plant = discretize(cfg.plant);
  cfg.signals.validate(plant.p(), plant.nd());
  const ClosedLoopSystem cl = assemble_closed_loop(plant, ctrl);

  const auto cert = certify_stability(cl, cfg.design.stab_floor);
  rep.checks.push_back({"closed_loop_stable", cert.pass, cert.abscissa,
                        -cfg.design.stab_floor});

  if (cert.pass) {
    const double be_scale = cl.Be.norm();
    for (double w : ctrl.internal_model.frequencies) {
      const double nrm = error_transfer_at(cl, w).norm() / be_scale;
      rep.checks.push_back(
          {"blocking_zero_at_" + std::to_string(w), nrm <= 1e-8, nrm, 1e-8});
      if (w != 0.0) {
        const double nrm_neg = error_transfer_at(cl, -w).norm() / be_scale;
        rep.checks.push_back({"blocking_zero_at_-" + std::to_string(w),
                              nrm_neg <= 1e-8, nrm_neg, 1e-8});
      }
    }
  }

  // Sylvester residual of the stored HK against the plant the controller
  // observer copy carries (its own K0).
  const double syl =
      sylvester_residual(ctrl.HK, ctrl.internal_model, ctrl.plant, ctrl.K0);
  rep.checks.push_back({"sylvester_residual", syl <= 1e-8, syl, 1e-8});

  // Route cross-check at the nonzero design frequencies.
  for (double w : ctrl.internal_model.frequencies) {
    if (w == 0.0) continue;
    const FreqValue a = eval_PK_PKI_direct(plant, ctrl.K0, w);
    const FreqValue b = eval_PK_PKI_reduced(plant, ctrl.K0, w);
    const double diff =
        ((a.PK - b.PK).norm() + (a.PKI - b.PKI).norm()) /
        std::max(1e-300, a.PK.norm() + a.PKI.norm());
    rep.checks.push_back(
        {"route_equivalence_at_" + std::to_string(w), diff <= 1e-9, diff, 1e-9});
  }

  // Robustness sweep (RORP (c)): small conductivity perturbations with the
  // unchanged controller must stay stable and keep tracking.
  const double dt = cfg.simulation.resolved_dt();
  const auto sweep = robustness_suite(cfg.plant, ctrl, cfg.signals,
                                      {-0.1, 0.0, 0.1}, cfg.simulation.t_final,
                                      dt, cfg.design.stab_floor);
  for (const auto& entry : sweep) {
    rep.checks.push_back({"robust_stable_delta_" + std::to_string(entry.delta),
                          entry.stable, entry.abscissa,
                          -cfg.design.stab_floor});
    if (entry.stable)
      rep.checks.push_back(
          {"robust_tracking_delta_" + std::to_string(entry.delta),
           entry.terminal_error_sup <= 1e-3, entry.terminal_error_sup, 1e-3});
  }
  return rep;
}

inline io::json report_to_json(const VerifyReport& rep) {
  io::json arr = io::json::array();
  for (const auto& c : rep.checks)
    arr.push_back({{"name", c.name},
                   {"pass", c.pass},
                   {"value", c.value},
                   {"threshold", c.threshold}});
  return io::json{{"pass", rep.pass()}, {"checks", arr}};
}

}  // namespace regforge
