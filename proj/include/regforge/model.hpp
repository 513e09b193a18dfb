#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "regforge/numerics.hpp"

namespace regforge {

// Spatial coefficient profile, evaluable at any point of the domain so the
// same plant description can be discretized on any grid.
struct Profile {
  enum class Kind { Constant, Gaussian, Samples };
  Kind kind = Kind::Constant;
  double value = 0.0;                 // Constant
  double amplitude = 1.0;             // Gaussian
  double center = 0.5;
  double width = 0.1;
  std::vector<double> samples;        // Samples, uniform over [a,b]
  double scale = 1.0;                 // multiplicative factor (perturbations)

  static Profile constant(double v) {
    Profile p;
    p.kind = Kind::Constant;
    p.value = v;
    return p;
  }
  static Profile gaussian(double amplitude, double center, double width) {
    Profile p;
    p.kind = Kind::Gaussian;
    p.amplitude = amplitude;
    p.center = center;
    p.width = width;
    return p;
  }
  static Profile sampled(std::vector<double> s) {
    Profile p;
    p.kind = Kind::Samples;
    p.samples = std::move(s);
    return p;
  }

  Profile scaled(double factor) const {
    Profile p = *this;
    p.scale *= factor;
    return p;
  }

  double operator()(double xi, double a, double b) const {
    switch (kind) {
      case Kind::Constant:
        return scale * value;
      case Kind::Gaussian: {
        const double z = (xi - center) / width;
        return scale * amplitude * std::exp(-0.5 * z * z);
      }
      case Kind::Samples: {
        if (samples.empty()) throw InvalidConfig("Profile: empty sample list");
        if (samples.size() == 1) return scale * samples[0];
        // linear interpolation on the uniform sample grid
        const double s = (xi - a) / (b - a) * static_cast<double>(samples.size() - 1);
        const auto i0 = static_cast<size_t>(
            std::clamp(std::floor(s), 0.0, static_cast<double>(samples.size() - 2)));
        const double w = s - static_cast<double>(i0);
        return scale * ((1.0 - w) * samples[i0] + w * samples[i0 + 1]);
      }
    }
    throw InvalidConfig("Profile: bad kind");
  }
};

// Continuous description of the 1D boundary-controlled reaction-diffusion
// plant: x_t = (c x')' + r x on (a,b), Neumann flux input weighted by b_in,
// boundary output weighted by c_out, plus disturbance channels.
struct PlantConfig {
  double domain_a = 0.0;
  double domain_b = 1.0;
  Profile conductivity = Profile::constant(1.0);
  Profile reaction = Profile::constant(0.0);
  std::array<double, 2> input_weight{0.0, 1.0};   // flux weight at a, b
  std::array<double, 2> output_weight{0.0, 1.0};  // output weight at a, b
  std::vector<Profile> dist_distributed;               // one per channel
  std::vector<std::array<double, 2>> dist_boundary;    // one pair per channel
  int n_grid = 50;

  int n_dist() const {
    return static_cast<int>(dist_distributed.size() + dist_boundary.size());
  }

  PlantConfig with_n_grid(int n) const {
    PlantConfig c = *this;
    c.n_grid = n;
    return c;
  }

  void validate() const {
    if (domain_b <= domain_a) throw InvalidConfig("plant: empty domain");
    if (n_grid < 10) throw InvalidConfig("plant: n_grid must be >= 10");
    if (input_weight[0] == 0.0 && input_weight[1] == 0.0 &&
        output_weight[0] == 0.0 && output_weight[1] == 0.0)
      throw InvalidConfig("plant: input and output weights both zero");
    const int n = n_grid;
    const double h = (domain_b - domain_a) / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double xi = domain_a + j * h;
      if (conductivity(xi, domain_a, domain_b) <= 0.0)
        throw InvalidConfig("plant: conductivity must be positive on the grid");
    }
  }
};

// Finite-dimensional surrogate (A, B, B_d, C, D, D_d) together with the
// trapezoid quadrature weights that define the discrete inner product.
struct StateSpaceModel {
  Mat A, B, Bd, C, D, Dd;
  Vec weights;
  double domain_a = 0.0, domain_b = 1.0;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }
  Eigen::Index p() const { return C.rows(); }
  Eigen::Index nd() const { return Bd.cols(); }

  // Weighted inner product <x, y> = sum_i w_i x_i y_i.
  double inner(const Vec& x, const Vec& y) const {
    return (x.array() * weights.array() * y.array()).sum();
  }
};

// Second-order central finite differences on a uniform grid including both
// boundary nodes. Homogeneous-Neumann structure is built into A by ghost-node
// elimination; the flux input enters B at the boundary rows.
inline StateSpaceModel discretize(const PlantConfig& cfg) {
  cfg.validate();
  const int n = cfg.n_grid;
  const double a = cfg.domain_a, b = cfg.domain_b;
  const double h = (b - a) / (n - 1);

  auto c_at = [&](double xi) { return cfg.conductivity(xi, a, b); };
  auto node = [&](int j) { return a + j * h; };

  StateSpaceModel sys;
  sys.domain_a = a;
  sys.domain_b = b;
  sys.A = Mat::Zero(n, n);
  for (int j = 1; j < n - 1; ++j) {
    const double cm = c_at(node(j) - 0.5 * h);
    const double cp = c_at(node(j) + 0.5 * h);
    sys.A(j, j - 1) = cm / (h * h);
    sys.A(j, j) = -(cm + cp) / (h * h);
    sys.A(j, j + 1) = cp / (h * h);
  }
  const double c_half_lo = c_at(node(0) + 0.5 * h);
  const double c_half_hi = c_at(node(n - 1) - 0.5 * h);
  sys.A(0, 0) = -2.0 * c_half_lo / (h * h);
  sys.A(0, 1) = 2.0 * c_half_lo / (h * h);
  sys.A(n - 1, n - 1) = -2.0 * c_half_hi / (h * h);
  sys.A(n - 1, n - 2) = 2.0 * c_half_hi / (h * h);
  for (int j = 0; j < n; ++j)
    sys.A(j, j) += cfg.reaction(node(j), a, b);

  // Flux input through the eliminated ghost node: entry 2 c(node)/h * weight.
  sys.B = Mat::Zero(n, 1);
  sys.B(0, 0) = 2.0 * c_at(node(0)) / h * cfg.input_weight[0];
  sys.B(n - 1, 0) = 2.0 * c_at(node(n - 1)) / h * cfg.input_weight[1];

  sys.C = Mat::Zero(1, n);
  sys.C(0, 0) = cfg.output_weight[0];
  sys.C(0, n - 1) = cfg.output_weight[1];

  const int n_d = cfg.n_dist();
  sys.Bd = Mat::Zero(n, std::max(n_d, 0));
  int col = 0;
  for (const auto& prof : cfg.dist_distributed) {
    for (int j = 0; j < n; ++j) sys.Bd(j, col) = prof(node(j), a, b);
    ++col;
  }
  for (const auto& pair : cfg.dist_boundary) {
    sys.Bd(0, col) = 2.0 * c_at(node(0)) / h * pair[0];
    sys.Bd(n - 1, col) = 2.0 * c_at(node(n - 1)) / h * pair[1];
    ++col;
  }

  sys.D = Mat::Zero(1, 1);
  sys.Dd = Mat::Zero(1, std::max(n_d, 0));

  sys.weights = Vec::Constant(n, h);
  sys.weights(0) = 0.5 * h;
  sys.weights(n - 1) = 0.5 * h;
  return sys;
}

// First N vectors of the Neumann cosine basis {1, sqrt(2) cos(k pi s)},
// sampled on the grid and re-orthonormalized (modified Gram-Schmidt) in the
// weighted discrete inner product. Returned as columns of an n x N matrix.
inline Mat neumann_eigenbasis(const PlantConfig& cfg, int N) {
  if (N < 0 || N > cfg.n_grid)
    throw InvalidConfig("neumann_eigenbasis: N out of range");
  const int n = cfg.n_grid;
  const double a = cfg.domain_a, b = cfg.domain_b;
  const double h = (b - a) / (n - 1);
  Vec w = Vec::Constant(n, h);
  w(0) = 0.5 * h;
  w(n - 1) = 0.5 * h;

  Mat psi(n, N);
  const double len = b - a;
  for (int k = 0; k < N; ++k)
    for (int j = 0; j < n; ++j) {
      const double s = (a + j * h - a) / len;
      psi(j, k) = (k == 0) ? 1.0 / std::sqrt(len)
                           : std::sqrt(2.0 / len) * std::cos(k * M_PI * s);
    }
  for (int k = 0; k < N; ++k) {
    for (int l = 0; l < k; ++l) {
      const double proj = (psi.col(k).array() * w.array() * psi.col(l).array()).sum();
      psi.col(k) -= proj * psi.col(l);
    }
    const double nrm =
        std::sqrt((psi.col(k).array() * w.array() * psi.col(k).array()).sum());
    if (nrm < 1e-12)
      throw InvalidConfig("neumann_eigenbasis: basis degenerated on this grid");
    psi.col(k) /= nrm;
  }
  return psi;
}

// Transfer function value P(lambda) = C (lambda - A)^-1 B + D together with
// the resolvent row C (lambda - A)^-1.
inline std::pair<CMat, CMat> transfer_value(const StateSpaceModel& sys,
                                            Complex lambda) {
  const Eigen::Index n = sys.n();
  CMat M = lambda * CMat::Identity(n, n) - sys.A.cast<Complex>();
  CMat XB, Z;
  try {
    XB = numerics::solve_linear(M, sys.B.cast<Complex>());
    // resolvent row via the transposed system (no conjugation)
    Z = numerics::solve_linear(M.transpose(), sys.C.transpose().cast<Complex>());
  } catch (const SingularMatrix& e) {
    throw ResolventPole(std::string("transfer_value: lambda in spectrum (") +
                        e.what() + ")");
  }
  CMat P = sys.C.cast<Complex>() * XB + sys.D.cast<Complex>();
  CMat Ppsi = Z.transpose();
  return {P, Ppsi};
}

}  // namespace regforge
