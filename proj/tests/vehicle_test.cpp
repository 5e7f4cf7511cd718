// Bicycle-model error dynamics: matrix entries re-derived from first
// principles, road profile lookup, and one RK4 step against the exact
// matrix exponential.

#include <cmath>

#include "certctrl/vehicle.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace certctrl;

namespace {

void params_validation() {
  VehicleParams p;
  p.validate();
  REQUIRE_NEAR(p.m, 2000.0, 0.0);
  REQUIRE_NEAR(p.i_z, 3900.0, 0.0);

  VehicleParams bad = p;
  bad.m = 0.0;
  REQUIRE_THROWS(bad.validate());
  bad = p;
  bad.l_f = 1.6;  // nose-heavy layout rejected
  REQUIRE_THROWS(bad.validate());
  bad = p;
  bad.i_z = 100.0;  // i_z * l_r / l_f < m
  REQUIRE_THROWS(bad.validate());
}

void matrices_match_hand_derivation() {
  VehicleParams p;
  const double cf = 1.0e5, cr = 1.0e5, v = 25.0;
  const DynamicsMatrices md = build_matrices(p, cf, cr, v);

  // Lateral force balance: m(s1'' ) = 2Cf(steer - (s1' + lf s2')/V + s2)
  //                                  + 2Cr(-(s1' - lr s2')/V + s2) - mV r.
  // Yaw balance mirrors it through the moment arms. Written out, row 2:
  REQUIRE_NEAR(md.A(1, 1), -2.0 * (cf + cr) / (p.m * v), 1e-12);
  REQUIRE_NEAR(md.A(1, 1), -8.0, 1e-12);  // 4e5 / (2000 * 25)
  REQUIRE_NEAR(md.A(1, 2), 2.0 * (cf + cr) / p.m, 1e-12);
  REQUIRE_NEAR(md.A(1, 2), 200.0, 1e-12);
  REQUIRE_NEAR(md.A(1, 3), 2.0 * (cr * p.l_r - cf * p.l_f) / (p.m * v),
               1e-12);
  REQUIRE_NEAR(md.A(1, 3), 0.8, 1e-12);  // 2e5 * 0.2 / 5e4
  // Row 4 (yaw):
  REQUIRE_NEAR(md.A(3, 1), -2.0 * (cf * p.l_f - cr * p.l_r) / (p.i_z * v),
               1e-12);
  REQUIRE_NEAR(md.A(3, 2), 2.0 * (cf * p.l_f - cr * p.l_r) / p.i_z, 1e-12);
  REQUIRE_NEAR(md.A(3, 3),
               -2.0 * (cf * p.l_f * p.l_f + cr * p.l_r * p.l_r) / (p.i_z * v),
               1e-12);
  // Integrator rows and zero blocks.
  REQUIRE_NEAR(md.A(0, 1), 1.0, 0.0);
  REQUIRE_NEAR(md.A(2, 3), 1.0, 0.0);
  REQUIRE_NEAR(md.A.col(0).norm(), 0.0, 0.0);
  REQUIRE_NEAR(md.A(0, 0) + md.A(0, 2) + md.A(0, 3) + md.A(2, 0) +
                   md.A(2, 1) + md.A(2, 2),
               0.0, 0.0);

  // Steering enters through the front axle only.
  REQUIRE_NEAR(md.b[0], 0.0, 0.0);
  REQUIRE_NEAR(md.b[1], 2.0 * cf / p.m, 1e-12);
  REQUIRE_NEAR(md.b[1], 100.0, 1e-12);
  REQUIRE_NEAR(md.b[2], 0.0, 0.0);
  REQUIRE_NEAR(md.b[3], 2.0 * cf * p.l_f / p.i_z, 1e-12);

  // Desired-yaw-rate feedthrough.
  REQUIRE_NEAR(md.g[1],
               -2.0 * (cf * p.l_f - cr * p.l_r) / (p.m * v) - v, 1e-12);
  REQUIRE_NEAR(md.g[3],
               -2.0 * (cf * p.l_f * p.l_f + cr * p.l_r * p.l_r) / (p.i_z * v),
               1e-12);

  REQUIRE_THROWS(build_matrices(p, 0.0, cr, v));
  REQUIRE_THROWS(build_matrices(p, cf, cr, 0.0));
  REQUIRE_THROWS(build_matrices(p, cf, cr, -5.0));
}

void yaw_rate_and_divergence() {
  REQUIRE_NEAR(desired_yaw_rate(20.0, 250.0), 0.08, 1e-15);
  REQUIRE_NEAR(desired_yaw_rate(0.0, 250.0), 0.0, 0.0);
  REQUIRE_NEAR(desired_yaw_rate(30.0, kStraightRadius), 3e-8, 1e-15);
  REQUIRE_THROWS(desired_yaw_rate(20.0, 0.5));
  REQUIRE_THROWS(desired_yaw_rate(-1.0, 250.0));

  ErrorState s;
  REQUIRE(!diverged(s));
  s.s2_dot = kBlowUpBound * 1.001;
  REQUIRE(diverged(s));
  REQUIRE_NEAR(s.inf_norm(), kBlowUpBound * 1.001, 1e-9);
  ErrorState neg{-3.0, 1.0, 2.0, -0.5};
  REQUIRE_NEAR(neg.inf_norm(), 3.0, 0.0);
  REQUIRE_NEAR((ErrorState::from_vec(neg.vec())).s1, -3.0, 0.0);
}

void road_profile_lookup() {
  RoadProfile rp;
  rp.segments = {{3.0, 0.0, kStraightRadius},
                 {9.0, 55555.0, 220.0},
                 {5.0, 0.0, 280.0}};
  rp.validate();
  REQUIRE_NEAR(rp.total_time(), 17.0, 1e-12);

  REQUIRE_NEAR(rp.radius_at(0.0), kStraightRadius, 0.0);
  REQUIRE_NEAR(rp.radius_at(2.999), kStraightRadius, 0.0);
  REQUIRE_NEAR(rp.radius_at(3.0), 220.0, 0.0);
  REQUIRE_NEAR(rp.radius_at(11.999), 220.0, 0.0);
  REQUIRE_NEAR(rp.radius_at(12.5), 280.0, 0.0);
  REQUIRE_NEAR(rp.radius_at(99.0), 280.0, 0.0);  // sticks past the end

  // stiffness == 0 defers to the episode's true value.
  REQUIRE_NEAR(rp.stiffness_at(1.0, 7.0e4), 7.0e4, 0.0);
  REQUIRE_NEAR(rp.stiffness_at(4.0, 7.0e4), 55555.0, 0.0);
  REQUIRE_NEAR(rp.stiffness_at(16.0, 7.0e4), 7.0e4, 0.0);
  REQUIRE_NEAR(rp.stiffness_at(99.0, 7.0e4), 7.0e4, 0.0);

  RoadProfile bad = rp;
  bad.segments[1].radius = 50.0;  // below r_min = 100
  REQUIRE_THROWS(bad.validate());
  bad = rp;
  bad.segments[0].duration = 0.0;
  REQUIRE_THROWS(bad.validate());
  bad.segments.clear();
  REQUIRE_THROWS(bad.validate());

  const RoadProfile straight = RoadProfile::straight(12.0);
  straight.validate();
  REQUIRE_NEAR(straight.total_time(), 12.0, 0.0);
  REQUIRE_NEAR(straight.radius_at(5.0), kStraightRadius, 0.0);
}

void rk4_step_matches_matrix_exponential() {
  VehicleParams p;
  const DynamicsMatrices md = build_matrices(p, 8.0e4, 9.0e4, 20.0);

  // Homogeneous case: one RK4 step vs expm(A dt) x0.
  const ErrorState s0{0.3, -0.1, 0.05, 0.2};
  const double dt = 1e-3;
  const Eigen::MatrixXd e = oracle::expm(md.A * dt);
  const Eigen::Vector4d exact = e * s0.vec();
  const ErrorState s1 = step(s0, 0.0, md, 0.0, dt);
  REQUIRE_NEAR((s1.vec() - exact).norm(), 0.0, 1e-10);

  // Forced case: constant input handled through the augmented system
  // [A c; 0 0] so the hold is exact.
  const double steer = 0.02, r_des = 0.05;
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(5, 5);
  aug.topLeftCorner(4, 4) = md.A;
  aug.topRightCorner(4, 1) = md.b * steer + md.g * r_des;
  Eigen::VectorXd z0(5);
  z0 << s0.vec(), 1.0;
  const Eigen::VectorXd z1 = oracle::expm(aug * dt) * z0;
  const ErrorState f1 = step(s0, steer, md, r_des, dt);
  REQUIRE_NEAR((f1.vec() - z1.head(4)).norm(), 0.0, 1e-10);

  // Error scales like dt^5 per step: halving dt shrinks the one-step
  // defect by ~32x (>= 12x even with roundoff credit).
  const double dt2 = dt * 8.0;  // work at a coarser dt so the defect is visible
  const Eigen::Vector4d exact2 = oracle::expm(md.A * dt2) * s0.vec();
  const double e_coarse = (step(s0, 0.0, md, 0.0, dt2).vec() - exact2).norm();
  const Eigen::Vector4d exact3 = oracle::expm(md.A * (dt2 / 2.0)) * s0.vec();
  const double e_fine =
      (step(s0, 0.0, md, 0.0, dt2 / 2.0).vec() - exact3).norm();
  REQUIRE(e_fine > 0.0);
  REQUIRE(e_coarse / e_fine >= 12.0);

  REQUIRE_THROWS(step(s0, 0.0, md, 0.0, 0.0));
}

void run_all() {
  params_validation();
  matrices_match_hand_derivation();
  yaw_rate_and_divergence();
  road_profile_lookup();
  rk4_step_matches_matrix_exponential();
}

}  // namespace

TEST_MAIN("vehicle_test")
