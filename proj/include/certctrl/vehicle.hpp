#pragma once

#include <Eigen/Dense>
#include <vector>

namespace certctrl {

struct VehicleParams {
  double m = 2000.0;    // mass, kg
  double i_z = 3900.0;  // yaw inertia, kg m^2
  double l_f = 1.3;     // CG to front axle, m
  double l_r = 1.5;     // CG to rear axle, m

  void validate() const;  // positivity plus l_r >= l_f, i_z*l_r/l_f >= m
};

// One stretch of road. stiffness == 0 means "use the episode's true
// stiffness" and is filled in by the caller before simulation.
struct RoadSegment {
  double duration = 0.0;   // s
  double stiffness = 0.0;  // cornering stiffness, N/rad
  double radius = 0.0;     // curve radius, m (1e9 encodes straight)
};

struct RoadProfile {
  std::vector<RoadSegment> segments;
  double r_min = 100.0;       // smallest admissible radius, m
  double rdot_bound = 0.01;   // bound on |R'/R^2|, 1/(m s) scale

  double total_time() const;
  double stiffness_at(double t, double fallback) const;
  double radius_at(double t) const;
  void validate() const;  // radii >= r_min, durations > 0

  static RoadProfile straight(double duration);
};

// Lateral/yaw error state relative to the lane center line:
// [offset, offset rate, heading error, heading error rate].
struct ErrorState {
  double s1 = 0.0;
  double s1_dot = 0.0;
  double s2 = 0.0;
  double s2_dot = 0.0;

  Eigen::Vector4d vec() const { return {s1, s1_dot, s2, s2_dot}; }
  static ErrorState from_vec(const Eigen::Vector4d& v) {
    return {v[0], v[1], v[2], v[3]};
  }
  double inf_norm() const;
};

// s_dot = A s + b steer + g yaw_rate_des
struct DynamicsMatrices {
  Eigen::Matrix4d A;
  Eigen::Vector4d b;
  Eigen::Vector4d g;
};

// Constant-speed linear bicycle model in error coordinates. Requires
// V > 0 and positive stiffness.
DynamicsMatrices build_matrices(const VehicleParams& p, double c_f, double c_r,
                                double v);

// V / R. Rejects radii below min_radius.
double desired_yaw_rate(double v, double radius, double min_radius = 1.0);

// Classical RK4 over one step with zero-order-hold inputs.
ErrorState step(const ErrorState& s, double steer, const DynamicsMatrices& md,
                double yaw_rate_des, double dt);

// Simulations flag divergence once the state passes this, and stop.
constexpr double kBlowUpBound = 1e3;

inline bool diverged(const ErrorState& s) { return s.inf_norm() > kBlowUpBound; }

// Radius value used to encode a straight lane.
constexpr double kStraightRadius = 1e9;

}  // namespace certctrl
