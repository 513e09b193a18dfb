#include <catch2/catch_amalgamated.hpp>

#include "common.hpp"

using namespace regforge;
using namespace testutil;
using Catch::Approx;

TEST_CASE("is_hurwitz: hand examples") {
  auto cert = is_hurwitz(Mat::Constant(1, 1, -1.0));
  REQUIRE(cert.hurwitz);
  REQUIRE(cert.abscissa == Approx(-1.0));

  const InternalModel im = build_internal_model({0.0, M_PI}, 1);
  cert = is_hurwitz(im.G1);  // spectrum on the axis
  REQUIRE_FALSE(cert.hurwitz);
  REQUIRE(cert.abscissa == Approx(0.0).margin(1e-12));

  Mat M(2, 2);
  M << 0, 1, -1, -1;  // s^2 + s + 1, roots at -1/2 +- i sqrt(3)/2
  cert = is_hurwitz(M);
  REQUIRE(cert.hurwitz);
  REQUIRE(cert.abscissa == Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("design_K0: scalar hand value -(sqrt(2) - 1)") {
  const Mat K0 = design_K0(scalar_model());
  REQUIRE(std::abs(K0(0, 0) + (std::sqrt(2.0) - 1.0)) <= 1e-10);
  const auto cert = is_hurwitz(Mat::Constant(1, 1, -1.0 + K0(0, 0)));
  REQUIRE(cert.hurwitz);
  REQUIRE(cert.abscissa == Approx(-std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("design_K0: zero state cost on a stable plant gives K0 = 0") {
  const Mat K0 = design_K0(scalar_model(), 0.0, 1.0);
  REQUIRE(K0.norm() <= 1e-12);
}

TEST_CASE("design_K0 / design_L: heat plant margins are positive") {
  const StateSpaceModel sys = discretize(nominal_config().plant);
  const StabilizingGains g = design_gains(sys);
  REQUIRE(g.margin_feedback > 0.0);
  REQUIRE(g.margin_injection > 0.0);
  REQUIRE(is_hurwitz(sys.A + sys.B * g.K0).hurwitz);
  REQUIRE(is_hurwitz(sys.A + g.L * sys.C).hurwitz);
}

TEST_CASE("design_L: scalar hand value") {
  // dual of the scalar plant is the same plant, unit weight: L = -(sqrt(2)-1)
  const Mat L = design_L(scalar_model());
  REQUIRE(std::abs(L(0, 0) + (std::sqrt(2.0) - 1.0)) <= 1e-10);
}

TEST_CASE("design_L: weighted duality with design_K0 on the dual plant") {
  io::RunConfig cfg = nominal_config();
  cfg.plant.n_grid = 30;
  const StateSpaceModel sys = discretize(cfg.plant);
  const Mat L = design_L(sys);

  // dual system: A^T, input C^T, weights W^-1; L equals the transposed gain
  StateSpaceModel dual;
  dual.A = sys.A.transpose();
  dual.B = sys.C.transpose();
  dual.C = sys.B.transpose();
  dual.D = Mat::Zero(1, 1);
  dual.Bd = Mat::Zero(sys.n(), 0);
  dual.Dd = Mat::Zero(1, 0);
  dual.weights = sys.weights.cwiseInverse();
  const Mat K0d = design_K0(dual);
  REQUIRE((L - K0d.transpose()).norm() <= 1e-9 * std::max(1.0, L.norm()));
}

TEST_CASE("hautus_controllable: trivial and degenerate cases") {
  // scalar integrator with nonzero input
  REQUIRE(hautus_controllable(Mat::Zero(1, 1), Mat::Constant(1, 1, 0.5)));
  // zero input block: uncontrollable
  REQUIRE_FALSE(hautus_controllable(Mat::Zero(1, 1), Mat::Zero(1, 1)));

  const InternalModel im = build_internal_model({0.0, M_PI}, 1);
  Mat B1(3, 1);
  B1 << 1.0, 0.4, -0.3;
  REQUIRE(hautus_controllable(im.G1, B1));
  // kill the oscillator rows: the +-i pi modes decouple
  B1 << 1.0, 0.0, 0.0;
  REQUIRE_FALSE(hautus_controllable(im.G1, B1));

  REQUIRE_THROWS_AS(hautus_controllable(Mat::Zero(2, 2), Mat::Zero(3, 1)),
                    DimensionMismatch);
}
