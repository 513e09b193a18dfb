#pragma once

#include <cmath>
#include <vector>

#include "regforge/controller.hpp"
#include "regforge/signals.hpp"

namespace regforge {

// Closed loop of plant and controller, state x_e = (x, z1, xhat), exogenous
// input w_e = (w_dist, y_ref), output e = y - y_ref.
struct ClosedLoopSystem {
  Mat Ae, Be, Ce, De;
  Eigen::Index n_plant = 0, n_im = 0, n_obs = 0;
  Mat K;  // controller output map, for reading u off the state

  Eigen::Index dim() const { return n_plant + n_im + n_obs; }
};

inline ClosedLoopSystem assemble_closed_loop(const StateSpaceModel& plant,
                                             const ControllerRealization& ctrl) {
  if (plant.p() != ctrl.internal_model.p)
    throw DimensionMismatch("closed loop: plant p vs internal model p");
  if (plant.n() != ctrl.plant.n() || plant.m() != ctrl.plant.m())
    throw DimensionMismatch("closed loop: plant vs controller observer copy");
  const Eigen::Index n = plant.n(), p = plant.p(), nd = plant.nd();
  const Mat G1c = ctrl.generator();
  const Mat G2c = ctrl.input_map();
  const Mat K = ctrl.output_map();
  const Eigen::Index nc = G1c.rows();

  ClosedLoopSystem cl;
  cl.n_plant = n;
  cl.n_im = ctrl.internal_model.dim();
  cl.n_obs = ctrl.plant.n();
  cl.K = K;
  cl.Ae = Mat::Zero(n + nc, n + nc);
  cl.Ae.topLeftCorner(n, n) = plant.A;
  cl.Ae.topRightCorner(n, nc) = plant.B * K;
  cl.Ae.bottomLeftCorner(nc, n) = G2c * plant.C;
  cl.Ae.bottomRightCorner(nc, nc) = G1c + G2c * plant.D * K;

  cl.Be = Mat::Zero(n + nc, nd + p);
  cl.Be.topLeftCorner(n, nd) = plant.Bd;
  cl.Be.bottomLeftCorner(nc, nd) = G2c * plant.Dd;
  cl.Be.bottomRightCorner(nc, p) = -G2c;

  cl.Ce = Mat::Zero(p, n + nc);
  cl.Ce.leftCols(n) = plant.C;
  cl.Ce.rightCols(nc) = plant.D * K;

  cl.De = Mat::Zero(p, nd + p);
  cl.De.leftCols(nd) = plant.Dd;
  cl.De.rightCols(p) = -Mat::Identity(p, p);
  return cl;
}

struct StabilityCertificate {
  double abscissa = 0.0;
  bool pass = false;
};

inline StabilityCertificate certify_stability(const ClosedLoopSystem& cl,
                                              double stab_floor = 1e-6) {
  StabilityCertificate cert;
  cert.abscissa = numerics::spectral_abscissa(cl.Ae);
  cert.pass = cert.abscissa <= -stab_floor;
  return cert;
}

// Closed-loop transfer from w_e to e at i w. Vanishes at the design
// frequencies of a stable designed instance (internal-model blocking zeros).
inline CMat error_transfer_at(const ClosedLoopSystem& cl, double omega) {
  const Eigen::Index N = cl.dim();
  const CMat M = Complex(0.0, omega) * CMat::Identity(N, N) - cl.Ae.cast<Complex>();
  CMat X;
  try {
    X = numerics::solve_linear(M, cl.Be.cast<Complex>());
  } catch (const SingularMatrix& e) {
    throw ResolventPole(std::string("error_transfer_at: i*omega in closed-loop "
                                    "spectrum: ") +
                        e.what());
  }
  return cl.Ce.cast<Complex>() * X + cl.De.cast<Complex>();
}

struct SimResult {
  std::vector<double> t;
  std::vector<Vec> y, y_ref, e, u;
  Vec final_state;
  // metrics over the trajectory
  double terminal_error_sup = 0.0;  // sup ||e|| over the final 20% window
  double fitted_decay_rate = 0.0;   // alpha-hat from the error envelope
  double weighted_integral = 0.0;   // int e^{2 alpha t} ||e||^2 dt, truncated
};

namespace detail {

// Envelope decay fit: window maxima of ||e||, drop the terminal plateau,
// least-squares slope of the log envelope. Returns 0 when the envelope gives
// fewer than three usable points.
inline double fit_decay_rate(const std::vector<double>& t,
                             const std::vector<Vec>& e) {
  const size_t n = t.size();
  if (n < 16) return 0.0;
  const size_t n_win = 40;
  const size_t per = n / n_win;
  std::vector<double> tm, em;
  for (size_t wdx = 0; wdx < n_win; ++wdx) {
    double best = 0.0, tbest = t[wdx * per];
    for (size_t i = wdx * per; i < std::min(n, (wdx + 1) * per); ++i) {
      const double v = e[i].norm();
      if (v > best) {
        best = v;
        tbest = t[i];
      }
    }
    tm.push_back(tbest);
    em.push_back(best);
  }
  double peak = 0.0;
  for (double v : em) peak = std::max(peak, v);
  double plateau = 0.0;
  for (size_t wdx = n_win - n_win / 5; wdx < n_win; ++wdx)
    plateau = std::max(plateau, em[wdx]);
  const double floor = std::max({10.0 * plateau, 1e-13, 1e-11 * peak});
  // drop the initial fast transient: fit only the tail of the envelope
  const double ceil = 0.05 * peak;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (size_t wdx = 0; wdx < n_win; ++wdx) {
    if (em[wdx] <= floor || em[wdx] > ceil) continue;
    const double x = tm[wdx], y = std::log(em[wdx]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt < 3) return 0.0;
  const double denom = cnt * sxx - sx * sx;
  if (denom <= 0.0) return 0.0;
  const double slope = (cnt * sxy - sx * sy) / denom;
  return -slope;
}

}  // namespace detail

// Crank-Nicolson integration of the closed loop driven by the exogenous
// signals, with the input evaluated at half-steps (second order). Stability
// of the loop is not required; diagnosing failed designs is a use case.
inline SimResult simulate(const ClosedLoopSystem& cl, const ExoSignalSpec& spec,
                          const Vec& x0, double t_final, double dt) {
  if (!(dt > 0.0) || !(t_final > 0.0))
    throw InvalidConfig("simulate: need dt > 0 and t_final > 0");
  const Eigen::Index N = cl.dim();
  if (x0.size() != N) throw DimensionMismatch("simulate: initial state size");

  const auto steps = static_cast<size_t>(std::ceil(t_final / dt));
  const Mat I = Mat::Identity(N, N);
  Eigen::PartialPivLU<Mat> lhs(I - 0.5 * dt * cl.Ae);
  if (lhs.matrixLU().diagonal().cwiseAbs().minCoeff() <=
      numerics::Tol::pivot_rel * cl.Ae.norm())
    throw StepRejected("simulate: Crank-Nicolson system singular at this dt");
  const Mat rhs_op = I + 0.5 * dt * cl.Ae;

  auto we_at = [&](double t) {
    Vec w(cl.Be.cols());
    const Vec wd = spec.eval_dist(t);
    const Vec yr = spec.eval_ref(t);
    if (wd.size() + yr.size() != cl.Be.cols())
      throw DimensionMismatch("simulate: signal dims vs Be");
    w << wd, yr;
    return w;
  };

  SimResult out;
  out.t.reserve(steps + 1);
  Vec x = x0;
  auto record = [&](double t, const Vec& xe) {
    const Vec w = we_at(t);
    const Vec err = cl.Ce * xe + cl.De * w;
    const Vec yr = spec.eval_ref(t);
    out.t.push_back(t);
    out.e.push_back(err);
    out.y_ref.push_back(yr);
    out.y.push_back(err + yr);
    out.u.push_back(cl.K * xe.tail(cl.n_im + cl.n_obs));
  };
  record(0.0, x);
  for (size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Vec w_half = we_at(t + 0.5 * dt);
    x = lhs.solve(rhs_op * x + dt * (cl.Be * w_half));
    if (!x.allFinite()) throw StepRejected("simulate: state diverged (non-finite)");
    record(t + dt, x);
  }
  out.final_state = x;

  const double t_cut = 0.8 * t_final;
  for (size_t i = 0; i < out.t.size(); ++i)
    if (out.t[i] >= t_cut)
      out.terminal_error_sup = std::max(out.terminal_error_sup, out.e[i].norm());
  out.fitted_decay_rate = detail::fit_decay_rate(out.t, out.e);
  const double alpha = out.fitted_decay_rate;
  double integral = 0.0;
  for (size_t i = 0; i + 1 < out.t.size(); ++i) {
    const double f0 = std::exp(2.0 * alpha * out.t[i]) * out.e[i].squaredNorm();
    const double f1 =
        std::exp(2.0 * alpha * out.t[i + 1]) * out.e[i + 1].squaredNorm();
    integral += 0.5 * (f0 + f1) * (out.t[i + 1] - out.t[i]);
  }
  out.weighted_integral = integral;
  return out;
}

struct RobustnessEntry {
  double delta = 0.0;
  double abscissa = 0.0;
  bool stable = false;
  double terminal_error_sup = 0.0;
};

// RORP robustness sweep: scale the conductivity by (1 + delta), keep the
// controller, re-certify stability and re-simulate. Tracking is only claimed
// for entries that remain stable.
inline std::vector<RobustnessEntry> robustness_suite(
    const PlantConfig& nominal, const ControllerRealization& ctrl,
    const ExoSignalSpec& spec, const std::vector<double>& deltas,
    double t_final, double dt, double stab_floor = 1e-6) {
  std::vector<RobustnessEntry> report;
  for (double delta : deltas) {
    PlantConfig cfg = nominal;
    cfg.conductivity = nominal.conductivity.scaled(1.0 + delta);
    const StateSpaceModel plant = discretize(cfg);
    const ClosedLoopSystem cl = assemble_closed_loop(plant, ctrl);
    const auto cert = certify_stability(cl, stab_floor);
    RobustnessEntry entry;
    entry.delta = delta;
    entry.abscissa = cert.abscissa;
    entry.stable = cert.pass;
    const SimResult sim =
        simulate(cl, spec, Vec::Zero(cl.dim()), t_final, dt);
    entry.terminal_error_sup = sim.terminal_error_sup;
    report.push_back(entry);
  }
  return report;
}

}  // namespace regforge
