#pragma once

#include <string>
#include <vector>

#include "regforge/freqdata.hpp"
#include "regforge/stabilization.hpp"

namespace regforge {

// K1 so that G1 + B1 K1 is Hurwitz, via LQR with identity weights. Unique and
// deterministic, and well conditioned for the skew-symmetric G1.
inline Mat design_K1(const Mat& G1, const Mat& B1, double q_weight = 1.0,
                     double r_weight = 1.0) {
  const Eigen::Index nz = G1.rows(), m = B1.cols();
  const Mat Q = q_weight * Mat::Identity(nz, nz);
  const Mat R = r_weight * Mat::Identity(m, m);
  Mat X;
  try {
    X = numerics::solve_care(G1, B1, Q, R);
  } catch (const NotStabilizable& e) {
    throw NotStabilizable(std::string("design_K1: (G1, B1) not stabilizable "
                                      "(transmission-zero check failed or "
                                      "skipped): ") +
                          e.what());
  }
  Mat K1 = -(R.llt().solve(B1.transpose() * X));
  const auto cert = is_hurwitz(G1 + B1 * K1);
  if (!cert.hurwitz)
    throw NotStabilizable("design_K1: G1 + B1 K1 not Hurwitz");
  return K1;
}

// The full error-feedback controller: internal model (G1, G2), observer copy
// of the plant with output injection L, and gains K1, K2 = K0 + K1 H_K.
// State (z1, xhat), input e = y - y_ref, output u = K1 z1 + K2 xhat.
struct ControllerRealization {
  InternalModel internal_model;
  Mat L;   // n x p
  Mat K0;  // m x n (the stabilizing part of K2, kept for audit)
  Mat K1;  // m x p(2q+1)
  Mat K2;  // m x n
  Mat HK;  // p(2q+1) x n
  StateSpaceModel plant;  // observer copy (A, B, C, D) + weights
  double im_abscissa = 0.0;  // max Re spec(G1 + B1 K1), certified < 0
  std::string plant_hash;

  Eigen::Index dim() const { return internal_model.dim() + plant.n(); }

  // Flattened (script-G1, script-G2, K) form used for closed-loop assembly
  // and simulation: generator [[G1, 0],[(B+LD)K1, A+LC+(B+LD)K2]],
  // input map [G2; -L], output map [K1, K2].
  Mat generator() const {
    const Eigen::Index nz = internal_model.dim(), n = plant.n();
    const Mat BLD = plant.B + L * plant.D;
    Mat G = Mat::Zero(nz + n, nz + n);
    G.topLeftCorner(nz, nz) = internal_model.G1;
    G.bottomLeftCorner(n, nz) = BLD * K1;
    G.bottomRightCorner(n, n) = plant.A + L * plant.C + BLD * K2;
    return G;
  }
  Mat input_map() const {
    Mat G2c(internal_model.dim() + plant.n(), internal_model.G2.cols());
    G2c.topRows(internal_model.dim()) = internal_model.G2;
    G2c.bottomRows(plant.n()) = -L;
    return G2c;
  }
  Mat output_map() const {
    Mat K(K1.rows(), internal_model.dim() + plant.n());
    K.leftCols(internal_model.dim()) = K1;
    K.rightCols(plant.n()) = K2;
    return K;
  }

  Vec control_output(const Vec& z1, const Vec& xhat) const {
    return K1 * z1 + K2 * xhat;
  }
};

inline ControllerRealization assemble_controller(const InternalModel& im,
                                                 const Mat& L, const Mat& K0,
                                                 const Mat& K1, const Mat& HK,
                                                 const StateSpaceModel& plant) {
  const Eigen::Index n = plant.n(), m = plant.m(), p = plant.p();
  const Eigen::Index nz = im.dim();
  if (L.rows() != n || L.cols() != p) throw DimensionMismatch("controller: L");
  if (K0.rows() != m || K0.cols() != n) throw DimensionMismatch("controller: K0");
  if (K1.rows() != m || K1.cols() != nz) throw DimensionMismatch("controller: K1");
  if (HK.rows() != nz || HK.cols() != n) throw DimensionMismatch("controller: HK");
  if (im.G2.cols() != p) throw DimensionMismatch("controller: G2 vs plant p");
  ControllerRealization c;
  c.internal_model = im;
  c.L = L;
  c.K0 = K0;
  c.K1 = K1;
  c.HK = HK;
  c.K2 = K0 + K1 * HK;
  c.plant = plant;
  return c;
}

}  // namespace regforge
