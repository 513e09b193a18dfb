#pragma once

// Shared fixtures for the test suites: the standard heat-plant instance
// (unit domain, constant conductivity, frequencies {0, pi, 2 pi}) and small
// hand-built systems. The designed instance is computed once per binary.

#include <random>

#include "regforge/regforge.hpp"

namespace testutil {

using namespace regforge;

// Scalar plant A = -1, B = C = 1, D = 0, unit quadrature weight. Small enough
// that every gain and transfer value has a hand value.
inline StateSpaceModel scalar_model() {
  StateSpaceModel sys;
  sys.A = Mat::Constant(1, 1, -1.0);
  sys.B = Mat::Constant(1, 1, 1.0);
  sys.C = Mat::Constant(1, 1, 1.0);
  sys.D = Mat::Zero(1, 1);
  sys.Bd = Mat::Zero(1, 0);
  sys.Dd = Mat::Zero(1, 0);
  sys.weights = Vec::Ones(1);
  return sys;
}

// The heat-equation design instance used across suites: (0,1), c = 1, r = 0,
// n_grid = 50, flux input and output at the right boundary, one distributed
// and one boundary disturbance channel, frequencies {0, pi, 2 pi}.
inline io::RunConfig nominal_config() {
  io::RunConfig cfg;
  cfg.plant.n_grid = 50;
  cfg.plant.dist_distributed.push_back(Profile::gaussian(1.0, 0.3, 0.1));
  cfg.plant.dist_boundary.push_back({1.0, 0.0});
  cfg.signals.frequencies = {0.0, M_PI, 2.0 * M_PI};
  // y_ref(t) = cos(pi t) + 0.5
  cfg.signals.ref_amplitudes = {Vec::Constant(1, 0.5), Vec::Constant(1, 1.0),
                                Vec::Zero(1)};
  cfg.signals.ref_phases = {0.0, 0.0, 0.0};
  cfg.signals.dist_amplitudes = {Vec::Zero(2),
                                 (Vec(2) << 0.3, 0.0).finished(),
                                 (Vec(2) << 0.0, 0.4).finished()};
  cfg.signals.dist_phases = {0.0, 0.0, 0.0};
  cfg.simulation.t_final = 30.0;
  cfg.simulation.dt = 0.003;
  return cfg;
}

inline const DesignResult& nominal_design() {
  static const DesignResult result = design_pipeline(nominal_config());
  return result;
}

inline Mat random_matrix(Eigen::Index n, Eigen::Index m, std::mt19937& rng) {
  std::normal_distribution<double> dist;
  Mat M(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) M(i, j) = dist(rng);
  return M;
}

inline Mat random_hurwitz(Eigen::Index n, std::mt19937& rng) {
  Mat M = random_matrix(n, n, rng);
  const double shift = numerics::spectral_abscissa(M);
  return M - (shift + 0.5) * Mat::Identity(n, n);
}

}  // namespace testutil
