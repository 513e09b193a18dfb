#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "regforge/errors.hpp"

namespace regforge {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

namespace numerics {

// Named tolerances shared across the toolkit. Values are defaults; the
// operations take them as arguments where a caller may want to override.
struct Tol {
  static constexpr double solve_rel = 1e-10;        // linear solve backward error
  static constexpr double pivot_rel = 1e-13;        // singularity threshold
  static constexpr double lyapunov_rel = 1e-9;      // Lyapunov residual
  static constexpr double care_rel = 1e-8;          // Riccati residual
  static constexpr double expm_norm_cap = 1e4;      // overflow guard on ||Mt||
  static constexpr double stab_margin = 0.1;        // modal pre-stabilization band
  static constexpr int care_max_iter = 60;
};

inline void require_finite(const Mat& M, const char* what) {
  if (!M.allFinite()) throw InvalidConfig(std::string(what) + ": non-finite entries");
}

// Solves M X = RHS for square complex M with a pivot-based singularity check.
// Throws SingularMatrix when a pivot falls below pivot_rel * ||M||, which is
// how resolvent evaluations detect lambda in (or numerically near) the
// spectrum.
inline CMat solve_linear(const CMat& M, const CMat& rhs,
                         double pivot_rel = Tol::pivot_rel) {
  if (M.rows() != M.cols()) throw DimensionMismatch("solve_linear: M not square");
  if (rhs.rows() != M.rows())
    throw DimensionMismatch("solve_linear: RHS row count mismatch");
  Eigen::PartialPivLU<CMat> lu(M);
  const double scale = M.norm();
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (min_pivot <= pivot_rel * scale)
    throw SingularMatrix("solve_linear: pivot " + std::to_string(min_pivot) +
                         " below threshold (matrix singular or nearly so)");
  return lu.solve(rhs);
}

inline Mat solve_linear_real(const Mat& M, const Mat& rhs,
                             double pivot_rel = Tol::pivot_rel) {
  if (M.rows() != M.cols()) throw DimensionMismatch("solve_linear: M not square");
  if (rhs.rows() != M.rows())
    throw DimensionMismatch("solve_linear: RHS row count mismatch");
  Eigen::PartialPivLU<Mat> lu(M);
  const double scale = M.norm();
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (min_pivot <= pivot_rel * scale)
    throw SingularMatrix("solve_linear: pivot below threshold");
  return lu.solve(rhs);
}

// All eigenvalues of a real square matrix, with multiplicity.
inline CVec eigenvalues(const Mat& M) {
  if (M.rows() != M.cols()) throw DimensionMismatch("eigenvalues: not square");
  require_finite(M, "eigenvalues");
  Eigen::EigenSolver<Mat> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw ConvergenceFailure("eigenvalues: QR iteration did not converge");
  return es.eigenvalues();
}

inline double spectral_abscissa(const Mat& M) {
  return eigenvalues(M).real().maxCoeff();
}

// Kronecker product, dense. Desk-scale only (result is (ra*rb) x (ca*cb)).
inline Mat kron(const Mat& A, const Mat& B) {
  Mat K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

// Solves the Sylvester equation A X - X B = C via the Kronecker-product
// linear system. X has shape (A.rows() x B.rows()).
inline Mat solve_sylvester(const Mat& A, const Mat& B, const Mat& C) {
  const Eigen::Index m = A.rows(), n = B.rows();
  if (A.cols() != m || B.cols() != n || C.rows() != m || C.cols() != n)
    throw DimensionMismatch("solve_sylvester: inconsistent shapes");
  const Mat Im = Mat::Identity(m, m), In = Mat::Identity(n, n);
  Mat op = kron(In, A) - kron(B.transpose(), Im);
  Eigen::Map<const Vec> c(C.data(), C.size());
  Vec x = solve_linear_real(op, c);
  return Eigen::Map<const Mat>(x.data(), m, n);
}

// Solves A^T X + X A + Q = 0 for symmetric X, A Hurwitz. Kronecker route:
// (I (x) A^T + A^T (x) I) vec(X) = -vec(Q).
inline Mat solve_lyapunov(const Mat& A, const Mat& Q) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || Q.rows() != n || Q.cols() != n)
    throw DimensionMismatch("solve_lyapunov: inconsistent shapes");
  const double abscissa = spectral_abscissa(A);
  if (abscissa >= 0.0)
    throw NotHurwitz("solve_lyapunov: spectral abscissa " +
                     std::to_string(abscissa) + " >= 0");
  const Mat I = Mat::Identity(n, n);
  Mat op = kron(I, A.transpose()) + kron(A.transpose(), I);
  Mat negQ = -Q;
  Eigen::Map<const Vec> q(negQ.data(), negQ.size());
  Vec x = solve_linear_real(op, q);
  Mat X = Eigen::Map<const Mat>(x.data(), n, n);
  return 0.5 * (X + X.transpose());  // symmetrize rounding residue
}

namespace detail {

// Modal pre-stabilization: gain F with A + B F Hurwitz, moving every
// eigenvalue with Re >= -margin to distinct targets near -1 while leaving the
// already-decayed modes untouched. Works on the (small) unstable invariant
// subspace through the left eigenvector rows.
inline Mat prestabilize(const Mat& A, const Mat& B, double margin) {
  const Eigen::Index n = A.rows(), m = B.cols();
  Eigen::EigenSolver<Mat> es(A);
  if (es.info() != Eigen::Success)
    throw ConvergenceFailure("prestabilize: eigensolver failed");
  const CVec lam = es.eigenvalues();
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < n; ++i)
    if (lam(i).real() >= -margin) idx.push_back(i);
  if (idx.empty()) return Mat::Zero(m, n);

  const CMat V = es.eigenvectors();
  const CMat Vinv = solve_linear(V, CMat::Identity(n, n));
  const Eigen::Index k = static_cast<Eigen::Index>(idx.size());
  CMat Y(k, n);   // left rows spanning the unstable subspace
  CVec lu(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    Y.row(r) = Vinv.row(idx[static_cast<size_t>(r)]);
    lu(r) = lam(idx[static_cast<size_t>(r)]);
  }
  const CMat bu = Y * B.cast<Complex>();

  // Place at mu_j = -1 - j/4 (distinct, real) by the Sylvester similarity
  // a_u X - X diag(mu) = b_u G with a deterministic G of ones.
  const CMat G = CMat::Ones(m, k);
  CMat X(k, k);
  const CMat buG = bu * G;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      const Complex mu(-1.0 - 0.25 * static_cast<double>(j), 0.0);
      X(i, j) = buG(i, j) / (lu(i) - mu);
    }
  CMat Fu;
  try {
    Fu = -(G * solve_linear(X, CMat::Identity(k, k)));
  } catch (const SingularMatrix&) {
    throw NotStabilizable("prestabilize: unstable modes not reachable from B");
  }
  Mat F = (Fu * Y).real();
  if (spectral_abscissa(A + B * F) >= 0.0)
    throw NotStabilizable("prestabilize: placed gain failed the Hurwitz check");
  return F;
}

}  // namespace detail

// Stabilizing solution of A^T X + X A - X B R^-1 B^T X + Q = 0 by
// Newton-Kleinman iteration, each step a Lyapunov solve. Initialization is
// modal pre-stabilization of the finitely many nearly unstable modes.
inline Mat solve_care(const Mat& A, const Mat& B, const Mat& Q, const Mat& R,
                      double rel_tol = Tol::care_rel,
                      int max_iter = Tol::care_max_iter,
                      double stab_margin = Tol::stab_margin) {
  const Eigen::Index n = A.rows(), m = B.cols();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != m || R.cols() != m)
    throw DimensionMismatch("solve_care: inconsistent shapes");
  if ((Q - Q.transpose()).norm() > 1e-10 * std::max(1.0, Q.norm()))
    throw InvalidConfig("solve_care: Q not symmetric");
  Eigen::LLT<Mat> Rchol(R);
  if (Rchol.info() != Eigen::Success)
    throw InvalidConfig("solve_care: R not positive definite");

  Mat F = detail::prestabilize(A, B, stab_margin);  // u = F x stabilizing
  Mat X = Mat::Zero(n, n);
  auto residual = [&](const Mat& Xc) {
    const Mat AtX = A.transpose() * Xc;
    const Mat XBRB = Xc * B * Rchol.solve(B.transpose() * Xc);
    const Mat res = AtX + AtX.transpose() - XBRB + Q;
    const double denom =
        std::max(1.0, 2.0 * AtX.norm() + XBRB.norm() + Q.norm());
    return res.norm() / denom;
  };
  for (int it = 0; it < max_iter; ++it) {
    const Mat Acl = A + B * F;
    const Mat Qbar = Q + F.transpose() * R * F;
    X = solve_lyapunov(Acl, Qbar);
    const Mat Fnew = -Rchol.solve(B.transpose() * X);
    const double step = (Fnew - F).norm() / std::max(1.0, Fnew.norm());
    F = Fnew;
    if (step < 1e-12 || residual(X) < rel_tol) {
      if (residual(X) < rel_tol) return 0.5 * (X + X.transpose());
    }
  }
  if (residual(X) < rel_tol) return 0.5 * (X + X.transpose());
  throw ConvergenceFailure("solve_care: Newton-Kleinman hit iteration cap, residual " +
                           std::to_string(residual(X)));
}

// exp(M t) by scaling-and-squaring with the degree-13 Pade approximant.
inline Mat matrix_exponential(const Mat& M, double t) {
  if (M.rows() != M.cols()) throw DimensionMismatch("matrix_exponential: not square");
  if (!std::isfinite(t)) throw InvalidConfig("matrix_exponential: t not finite");
  const Eigen::Index n = M.rows();
  Mat A = M * t;
  const double nrm = A.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  if (nrm > Tol::expm_norm_cap)
    throw Overflow("matrix_exponential: ||Mt|| = " + std::to_string(nrm) +
                   " exceeds cap");
  int squarings = 0;
  const double theta13 = 5.371920351148152;
  if (nrm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    A /= std::pow(2.0, squarings);
  }
  static const double b[] = {64764752532480000.0, 32382376266240000.0,
                             7771770303897600.0,  1187353796428800.0,
                             129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,
                             1323241920.0,        40840800.0,
                             960960.0,            16380.0,
                             182.0,               1.0};
  const Mat I = Mat::Identity(n, n);
  const Mat A2 = A * A, A4 = A2 * A2, A6 = A4 * A2;
  const Mat U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 +
                     b[5] * A4 + b[3] * A2 + b[1] * I);
  const Mat V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 +
                b[4] * A4 + b[2] * A2 + b[0] * I;
  Mat R = solve_linear_real(V - U, V + U);
  for (int i = 0; i < squarings; ++i) R = R * R;
  return R;
}

}  // namespace numerics
}  // namespace regforge
