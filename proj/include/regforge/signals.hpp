#pragma once

#include <cmath>
#include <vector>

#include "regforge/numerics.hpp"

namespace regforge {

// Frequencies shared by reference and disturbance; the controller design
// consumes only these. Amplitudes and phases are simulation-side data.
inline void validate_frequencies(const std::vector<double>& omega) {
  if (omega.empty()) throw InvalidFrequencies("frequency list is empty");
  if (omega.front() != 0.0)
    throw InvalidFrequencies("first frequency must be 0 (constant mode)");
  for (size_t k = 1; k < omega.size(); ++k)
    if (!(omega[k] > omega[k - 1]))
      throw InvalidFrequencies("frequencies must be strictly increasing");
}

// Exogenous signal class: finite cosine sums with known frequencies
// 0 = w_0 < w_1 < ... < w_q and per-frequency amplitude vectors and phases.
struct ExoSignalSpec {
  std::vector<double> frequencies;
  std::vector<Vec> ref_amplitudes;   // each length p
  std::vector<double> ref_phases;    // in [0, 2 pi)
  std::vector<Vec> dist_amplitudes;  // each length n_d
  std::vector<double> dist_phases;

  size_t q() const { return frequencies.size() - 1; }

  void validate(Eigen::Index p, Eigen::Index n_d) const {
    validate_frequencies(frequencies);
    const size_t nf = frequencies.size();
    if (ref_amplitudes.size() != nf || ref_phases.size() != nf)
      throw InvalidConfig("signals: reference amplitudes/phases length mismatch");
    if (dist_amplitudes.size() != nf || dist_phases.size() != nf)
      throw InvalidConfig("signals: disturbance amplitudes/phases length mismatch");
    for (const auto& a : ref_amplitudes)
      if (a.size() != p) throw InvalidConfig("signals: reference amplitude dim != p");
    for (const auto& b : dist_amplitudes)
      if (b.size() != n_d)
        throw InvalidConfig("signals: disturbance amplitude dim != n_d");
    auto phase_ok = [](double th) { return th >= 0.0 && th < 2.0 * M_PI; };
    for (double th : ref_phases)
      if (!phase_ok(th)) throw InvalidConfig("signals: reference phase out of [0,2pi)");
    for (double th : dist_phases)
      if (!phase_ok(th)) throw InvalidConfig("signals: disturbance phase out of [0,2pi)");
  }

  Vec eval_ref(double t) const {
    Vec y = Vec::Zero(ref_amplitudes.empty() ? 0 : ref_amplitudes[0].size());
    const size_t nk = std::min(frequencies.size(), ref_amplitudes.size());
    for (size_t k = 0; k < nk; ++k)
      y += ref_amplitudes[k] * std::cos(frequencies[k] * t + ref_phases[k]);
    return y;
  }

  Vec eval_dist(double t) const {
    Vec w = Vec::Zero(dist_amplitudes.empty() ? 0 : dist_amplitudes[0].size());
    const size_t nk = std::min(frequencies.size(), dist_amplitudes.size());
    for (size_t k = 0; k < nk; ++k)
      w += dist_amplitudes[k] * std::cos(frequencies[k] * t + dist_phases[k]);
    return w;
  }
};

}  // namespace regforge
