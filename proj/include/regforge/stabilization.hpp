#pragma once

#include <utility>

#include "regforge/model.hpp"

namespace regforge {

struct HurwitzCertificate {
  bool hurwitz = false;
  double abscissa = 0.0;
};

inline HurwitzCertificate is_hurwitz(const Mat& M) {
  const double abscissa = numerics::spectral_abscissa(M);
  return {abscissa < 0.0, abscissa};
}

// Bounded stabilizing gains of the plant, with their certificates.
struct StabilizingGains {
  Mat K0;                       // m x n state feedback, A + B K0 Hurwitz
  Mat L;                        // n x p output injection, A + L C Hurwitz
  double margin_feedback = 0.0;   // -max Re spec(A + B K0)
  double margin_injection = 0.0;  // -max Re spec(A + L C)
};

// LQR state feedback K0 = -R^-1 B^T X. The state cost is weighted by the
// quadrature matrix W so it approximates the integral of |x|^2 over the
// domain, which keeps the gain kernel grid-independent.
inline Mat design_K0(const StateSpaceModel& sys, double q_weight = 1.0,
                     double r_weight = 1.0) {
  const Mat Q = q_weight * Mat(sys.weights.asDiagonal());
  const Mat R = r_weight * Mat::Identity(sys.m(), sys.m());
  const Mat X = numerics::solve_care(sys.A, sys.B, Q, R);
  Mat K0 = -(R.llt().solve(sys.B.transpose() * X));
  const auto cert = is_hurwitz(sys.A + sys.B * K0);
  if (!cert.hurwitz)
    throw NotStabilizable("design_K0: closed loop not Hurwitz (abscissa " +
                          std::to_string(cert.abscissa) + ")");
  return K0;
}

// Output injection from the dual Riccati equation on (A^T, C^T). The dual
// state cost carries the inverse quadrature weight: the dual of the weighted
// inner product lives in the dual space, and this choice makes L the weighted
// transpose of the state-feedback design applied to the dual system (and
// keeps the injection kernel grid-independent).
inline Mat design_L(const StateSpaceModel& sys, double q_weight = 1.0,
                    double r_weight = 1.0) {
  const Mat Q = q_weight * Mat(sys.weights.cwiseInverse().asDiagonal());
  const Mat R = r_weight * Mat::Identity(sys.p(), sys.p());
  Mat X;
  try {
    X = numerics::solve_care(sys.A.transpose(), sys.C.transpose(), Q, R);
  } catch (const NotStabilizable& e) {
    throw NotDetectable(std::string("design_L: dual pair not stabilizable: ") +
                        e.what());
  }
  Mat L = -(X * sys.C.transpose() * R.llt().solve(Mat::Identity(sys.p(), sys.p())));
  const auto cert = is_hurwitz(sys.A + L * sys.C);
  if (!cert.hurwitz)
    throw NotDetectable("design_L: observer loop not Hurwitz (abscissa " +
                        std::to_string(cert.abscissa) + ")");
  return L;
}

inline StabilizingGains design_gains(const StateSpaceModel& sys,
                                     double q_weight = 1.0,
                                     double r_weight = 1.0) {
  StabilizingGains g;
  g.K0 = design_K0(sys, q_weight, r_weight);
  g.L = design_L(sys, q_weight, r_weight);
  g.margin_feedback = -numerics::spectral_abscissa(sys.A + sys.B * g.K0);
  g.margin_injection = -numerics::spectral_abscissa(sys.A + g.L * sys.C);
  return g;
}

// Hautus test: (G1, B1) is controllable iff [lambda I - G1, B1] has full row
// rank at every eigenvalue lambda of G1. Rank through singular values with a
// relative threshold.
inline bool hautus_controllable(const Mat& G1, const Mat& B1,
                                double rel_tol = 1e-10) {
  if (B1.rows() != G1.rows())
    throw DimensionMismatch("hautus_controllable: row count mismatch");
  const Eigen::Index n = G1.rows();
  const CVec lam = numerics::eigenvalues(G1);
  CMat pencil(n, n + B1.cols());
  const double scale = std::max({G1.norm(), B1.norm(), 1.0});
  for (Eigen::Index i = 0; i < n; ++i) {
    pencil.leftCols(n) =
        lam(i) * CMat::Identity(n, n) - G1.cast<Complex>();
    pencil.rightCols(B1.cols()) = B1.cast<Complex>();
    Eigen::JacobiSVD<CMat> svd(pencil);
    if (svd.singularValues().minCoeff() <= rel_tol * scale) return false;
  }
  return true;
}

}  // namespace regforge
