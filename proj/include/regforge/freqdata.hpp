#pragma once

#include <string>
#include <vector>

#include "regforge/internal_model.hpp"
#include "regforge/model.hpp"

namespace regforge {

// Transfer-function data of the pre-stabilized plant at one frequency:
// PK = P_K(i w) and PKI = P_KI(i w). Values at -i w follow by conjugation
// (real plant), so only the +i w side is stored.
struct FreqValue {
  double omega = 0.0;
  CMat PK;   // p x m
  CMat PKI;  // p x n
};

struct FreqData {
  std::vector<FreqValue> values;  // one per design frequency, ascending
  Mat B1;                         // p(2q+1) x m
  Mat HK;                         // p(2q+1) x n
};

// Single boundary-value probe: solve (i w - (A + B K0)) x0 = B u0 + psi0 and
// return y0 = (C + D K0) x0 + D u0 = P_K(i w) u0 + P_KI(i w) psi0.
inline CVec eval_probe_direct(const StateSpaceModel& sys, const Mat& K0,
                              double omega, const CVec& u0, const CVec& psi0) {
  const Eigen::Index n = sys.n();
  const Mat AK = sys.A + sys.B * K0;
  const Mat CK = sys.C + sys.D * K0;
  const CMat M = Complex(0.0, omega) * CMat::Identity(n, n) - AK.cast<Complex>();
  CMat rhs = sys.B.cast<Complex>() * u0 + psi0;
  CMat x0;
  try {
    x0 = numerics::solve_linear(M, rhs);
  } catch (const SingularMatrix& e) {
    throw ResolventPole(std::string("eval_probe_direct: i*omega in spectrum of "
                                    "A+BK0 (K0 not stabilizing?): ") +
                        e.what());
  }
  return CK.cast<Complex>() * x0 + sys.D.cast<Complex>() * u0;
}

// Direct route (default, valid at omega = 0): full P_K and P_KI at +i w from
// one factorization of (i w - (A + B K0)).
inline FreqValue eval_PK_PKI_direct(const StateSpaceModel& sys, const Mat& K0,
                                    double omega) {
  const Eigen::Index n = sys.n();
  const Mat AK = sys.A + sys.B * K0;
  const Mat CK = sys.C + sys.D * K0;
  const CMat M = Complex(0.0, omega) * CMat::Identity(n, n) - AK.cast<Complex>();
  FreqValue v;
  v.omega = omega;
  try {
    const CMat XB = numerics::solve_linear(M, sys.B.cast<Complex>());
    v.PK = CK.cast<Complex>() * XB + sys.D.cast<Complex>();
    const CMat Z = numerics::solve_linear(M.transpose(),
                                          CK.transpose().cast<Complex>());
    v.PKI = Z.transpose();
  } catch (const SingularMatrix& e) {
    throw ResolventPole(std::string("eval_PK_PKI_direct: pole at i*omega: ") +
                        e.what());
  }
  return v;
}

// Reduced route: P_K = P (I - G_K)^-1 with G_K = K0 R(.,A) B, and
// P_KI = C R(.,A) + P_K K0 R(.,A). Needs i w in the resolvent set of A, so it
// fails by design at omega = 0 for the pure Neumann plant.
inline FreqValue eval_PK_PKI_reduced(const StateSpaceModel& sys, const Mat& K0,
                                     double omega) {
  const Eigen::Index n = sys.n();
  const CMat M = Complex(0.0, omega) * CMat::Identity(n, n) - sys.A.cast<Complex>();
  CMat XB, ZC, ZK;
  try {
    XB = numerics::solve_linear(M, sys.B.cast<Complex>());
    ZC = numerics::solve_linear(M.transpose(), sys.C.transpose().cast<Complex>());
    ZK = numerics::solve_linear(M.transpose(), K0.transpose().cast<Complex>());
  } catch (const SingularMatrix& e) {
    throw ResolventPole(std::string("eval_PK_PKI_reduced: i*omega in spectrum "
                                    "of A: ") +
                        e.what());
  }
  const CMat P = sys.C.cast<Complex>() * XB + sys.D.cast<Complex>();
  const CMat GK = K0.cast<Complex>() * XB;  // K0 R(.,A) B, m x m
  const CMat CR = ZC.transpose();
  const CMat K0R = ZK.transpose();
  FreqValue v;
  v.omega = omega;
  const CMat I = CMat::Identity(GK.rows(), GK.cols());
  CMat inv;
  try {
    inv = numerics::solve_linear(I - GK, CMat::Identity(GK.rows(), GK.cols()));
  } catch (const SingularMatrix& e) {
    throw ResolventPole(std::string("eval_PK_PKI_reduced: i*omega in spectrum "
                                    "of A+BK0: ") +
                        e.what());
  }
  v.PK = P * inv;
  v.PKI = CR + v.PK * K0R;
  return v;
}

namespace detail {

// Real block of a complex value row: [Re M; -Im M], the real form of
// (1/2)[M + conj(M); i M - i conj(M)].
inline Mat real_block(const CMat& M) {
  Mat out(2 * M.rows(), M.cols());
  out.topRows(M.rows()) = M.real();
  out.bottomRows(M.rows()) = -M.imag();
  return out;
}

inline void check_real_residue(const CMat& zero_freq_value, const char* what) {
  if (zero_freq_value.imag().cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, zero_freq_value.norm()))
    throw NonRealResidue(std::string(what) +
                         ": value at omega=0 has nonzero imaginary part");
}

}  // namespace detail

// B1 = [P_K(0); B1^1; ...; B1^q] with B1^k = [Re P_K(i w_k); -Im P_K(i w_k)].
inline Mat build_B1(const std::vector<FreqValue>& values) {
  if (values.empty()) throw InvalidFrequencies("build_B1: no frequency values");
  const Eigen::Index p = values[0].PK.rows(), m = values[0].PK.cols();
  const auto q = static_cast<Eigen::Index>(values.size()) - 1;
  detail::check_real_residue(values[0].PK, "build_B1");
  Mat B1(p * (2 * q + 1), m);
  B1.topRows(p) = values[0].PK.real();
  for (Eigen::Index k = 1; k <= q; ++k)
    B1.middleRows(p + (k - 1) * 2 * p, 2 * p) =
        detail::real_block(values[static_cast<size_t>(k)].PK);
  return B1;
}

// H_K = [P_KI(0); H_K^1; ...; H_K^q] assembled from the resolvent route.
inline Mat build_HK(const std::vector<FreqValue>& values) {
  if (values.empty()) throw InvalidFrequencies("build_HK: no frequency values");
  const Eigen::Index p = values[0].PKI.rows(), n = values[0].PKI.cols();
  const auto q = static_cast<Eigen::Index>(values.size()) - 1;
  detail::check_real_residue(values[0].PKI, "build_HK");
  Mat HK(p * (2 * q + 1), n);
  HK.topRows(p) = values[0].PKI.real();
  for (Eigen::Index k = 1; k <= q; ++k)
    HK.middleRows(p + (k - 1) * 2 * p, 2 * p) =
        detail::real_block(values[static_cast<size_t>(k)].PKI);
  return HK;
}

// Finite-rank truncation H_K^N: one boundary-value solve per basis vector per
// frequency, summed as H_K^N = sum_n <., psi_n> P_KI(i w_k) psi_n. Equals
// H_K composed with the rank-N orthogonal projection onto span{psi_n} in the
// weighted inner product.
inline Mat build_HK_truncated(const StateSpaceModel& sys, const Mat& K0,
                              const std::vector<double>& frequencies,
                              const Mat& basis) {
  validate_frequencies(frequencies);
  const Eigen::Index n = sys.n(), p = sys.p();
  const Eigen::Index N = basis.cols();
  const auto q = static_cast<Eigen::Index>(frequencies.size()) - 1;
  const CVec u0 = CVec::Zero(sys.m());
  Mat HKN = Mat::Zero(p * (2 * q + 1), n);
  for (Eigen::Index k = 0; k <= q; ++k) {
    const double w = frequencies[static_cast<size_t>(k)];
    // P_KI(i w) psi_j for every basis vector, sharing one factorization
    const Mat AK = sys.A + sys.B * K0;
    const Mat CK = sys.C + sys.D * K0;
    const CMat M = Complex(0.0, w) * CMat::Identity(n, n) - AK.cast<Complex>();
    CMat X;
    try {
      X = numerics::solve_linear(M, basis.cast<Complex>());
    } catch (const SingularMatrix& e) {
      throw ResolventPole(std::string("build_HK_truncated: pole at i*omega: ") +
                          e.what());
    }
    const CMat Y = CK.cast<Complex>() * X;  // p x N, columns P_KI(i w) psi_j
    CMat block = CMat::Zero(p, n);
    for (Eigen::Index j = 0; j < N; ++j) {
      const Vec wpsi = sys.weights.asDiagonal() * basis.col(j);
      block += Y.col(j) * wpsi.transpose().cast<Complex>();
    }
    if (k == 0) {
      detail::check_real_residue(block, "build_HK_truncated");
      HKN.topRows(p) = block.real();
    } else {
      HKN.middleRows(p + (k - 1) * 2 * p, 2 * p) = detail::real_block(block);
    }
  }
  return HKN;
}

// Relative residual of the Sylvester identity
// G1 H_K = H_K (A + B K0) + G2 (C + D K0), the independent oracle for H_K.
inline double sylvester_residual(const Mat& HK, const InternalModel& im,
                                 const StateSpaceModel& sys, const Mat& K0) {
  const Mat AK = sys.A + sys.B * K0;
  const Mat CK = sys.C + sys.D * K0;
  const Mat rhs = im.G2 * CK;
  const Mat res = im.G1 * HK - HK * AK - rhs;
  return res.norm() / rhs.norm();
}

// H_K by directly solving the Sylvester equation (Kronecker route); used as
// the independent construction oracle against build_HK.
inline Mat solve_HK_sylvester(const InternalModel& im,
                              const StateSpaceModel& sys, const Mat& K0) {
  const Mat AK = sys.A + sys.B * K0;
  const Mat CK = sys.C + sys.D * K0;
  return numerics::solve_sylvester(im.G1, AK, im.G2 * CK);
}

// Transmission-zero check at the design frequencies: the smallest singular
// value of P_K(i w_k) must stay above tz_tol relative to the largest value
// over all frequencies.
struct TransmissionZeroReport {
  bool pass = false;
  double scale = 0.0;
  std::vector<double> omegas;
  std::vector<double> margins;  // sigma_min per frequency
};

inline TransmissionZeroReport check_transmission_zeros(
    const std::vector<FreqValue>& values, double tz_tol = 1e-8) {
  TransmissionZeroReport rep;
  for (const auto& v : values) {
    Eigen::JacobiSVD<CMat> svd(v.PK);
    rep.omegas.push_back(v.omega);
    rep.margins.push_back(svd.singularValues().minCoeff());
    rep.scale = std::max(rep.scale, svd.singularValues().maxCoeff());
  }
  rep.pass = true;
  for (double mgn : rep.margins)
    if (mgn < tz_tol * rep.scale) rep.pass = false;
  return rep;
}

inline void require_no_transmission_zeros(const TransmissionZeroReport& rep,
                                          double tz_tol = 1e-8) {
  if (rep.pass) return;
  std::string msg = "transmission zero at design frequencies:";
  for (size_t i = 0; i < rep.omegas.size(); ++i)
    if (rep.margins[i] < tz_tol * rep.scale)
      msg += " " + std::to_string(rep.omegas[i]);
  throw TransmissionZero(msg);
}

// Full frequency-data pipeline: direct-route values at every design
// frequency, transmission-zero gate, then B1 and H_K assembly.
inline FreqData compute_freqdata(const StateSpaceModel& sys, const Mat& K0,
                                 const std::vector<double>& frequencies,
                                 double tz_tol = 1e-8) {
  validate_frequencies(frequencies);
  FreqData fd;
  for (double w : frequencies)
    fd.values.push_back(eval_PK_PKI_direct(sys, K0, w));
  require_no_transmission_zeros(check_transmission_zeros(fd.values, tz_tol),
                                tz_tol);
  fd.B1 = build_B1(fd.values);
  fd.HK = build_HK(fd.values);
  return fd;
}

}  // namespace regforge
