#pragma once

#include <Eigen/Dense>
#include <array>

#include "certctrl/interval.hpp"
#include "certctrl/stiffness.hpp"
#include "certctrl/vehicle.hpp"

namespace certctrl {

// Projection sets for the adaptive estimates, derived from a stiffness
// interval, the design velocity, and road-geometry limits (smallest
// curve radius r_lo, curvature-rate bound rdot_bound).
struct UncertaintyBounds {
  Interval omega;                     // input gain w = C_f / C_hat
  std::array<Interval, 4> theta_box;  // per-coordinate bounds on theta
  double delta = 0.0;                 // curvature disturbance level
  double d_sigma = 0.0;               // curvature-rate disturbance level
  Eigen::RowVector4d b_m_dagger;      // left pseudo-inverse row of b_m

  double sigma_bound() const { return delta + d_sigma; }

  // L = max over the box of ||theta||_1.
  double theta_l1_max() const {
    double l = 0.0;
    for (const auto& iv : theta_box) l += iv.max_abs();
    return l;
  }
};

UncertaintyBounds uncertainty_bounds(const VehicleParams& p,
                                     const StiffnessInterval& interval,
                                     double v, double r_lo, double rdot_bound,
                                     const Eigen::RowVector4d& k_m);

// Matched-uncertainty parameters realized by a particular true
// stiffness; used to validate that the bounds cover reality.
double true_input_gain(double c_true, double c_hat);
Eigen::Vector4d true_theta(const VehicleParams& p, double c_true,
                           double c_hat, double v,
                           const Eigen::RowVector4d& k_m);
double true_sigma(const VehicleParams& p, double c_true, double c_hat,
                  double v, double yaw_rate_des);

}  // namespace certctrl
