#pragma once

#include <vector>

#include "regforge/signals.hpp"

namespace regforge {

// Internal-model pair: G1 = diag(0_p, w_1 Omega_p, ..., w_q Omega_p) with
// Omega_p = [[0, I],[-I, 0]], G2 = [I, I, 0, I, 0, ..., I, 0]^T. Block
// ordering is fixed: zero block first, then ascending frequencies.
struct InternalModel {
  Mat G1;                         // p(2q+1) x p(2q+1)
  Mat G2;                         // p(2q+1) x p
  std::vector<double> frequencies;
  int p = 1;

  Eigen::Index dim() const { return G1.rows(); }
};

inline InternalModel build_internal_model(const std::vector<double>& frequencies,
                                          int p) {
  validate_frequencies(frequencies);
  if (p < 1) throw InvalidConfig("internal model: p must be >= 1");
  const auto q = static_cast<Eigen::Index>(frequencies.size()) - 1;
  const Eigen::Index dim = p * (2 * q + 1);

  InternalModel im;
  im.frequencies = frequencies;
  im.p = p;
  im.G1 = Mat::Zero(dim, dim);
  im.G2 = Mat::Zero(dim, p);
  const Mat Ip = Mat::Identity(p, p);
  im.G2.topRows(p) = Ip;
  for (Eigen::Index k = 1; k <= q; ++k) {
    const Eigen::Index off = p + (k - 1) * 2 * p;
    const double w = frequencies[static_cast<size_t>(k)];
    im.G1.block(off, off + p, p, p) = w * Ip;
    im.G1.block(off + p, off, p, p) = -w * Ip;
    im.G2.block(off, 0, p, p) = Ip;
  }
  return im;
}

}  // namespace regforge
