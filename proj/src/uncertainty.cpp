#include "certctrl/uncertainty.hpp"

#include <stdexcept>

namespace certctrl {
namespace {

Eigen::RowVector4d pseudo_inverse_row(const VehicleParams& p, double c_hat) {
  Eigen::RowVector4d d;
  d << 0.0, p.m / (4.0 * c_hat), 0.0, p.i_z / (4.0 * c_hat * p.l_f);
  return d;
}

}  // namespace

UncertaintyBounds uncertainty_bounds(const VehicleParams& p,
                                     const StiffnessInterval& interval,
                                     double v, double r_lo, double rdot_bound,
                                     const Eigen::RowVector4d& k_m) {
  p.validate();
  interval.validate();
  if (!(v > 0.0))
    throw std::invalid_argument("uncertainty_bounds: v must be positive");
  if (!(r_lo > 0.0))
    throw std::invalid_argument("uncertainty_bounds: r_lo must be positive");
  if (rdot_bound < 0.0)
    throw std::invalid_argument("uncertainty_bounds: rdot_bound < 0");

  const double c_hat = interval.nominal;
  const double c_lo = interval.lo;
  const double c_hi = interval.hi;

  UncertaintyBounds ub;
  ub.omega = make_interval(c_lo / c_hat, c_hi / c_hat);
  ub.b_m_dagger = pseudo_inverse_row(p, c_hat);

  // Shared disturbance factor: the worst-case curvature torque mismatch.
  const double factor = 2.0 * c_hi * p.l_f +
                        c_hi * p.l_r * (p.l_r / p.l_f - 1.0) +
                        p.m * v * v / 2.0;
  ub.delta = factor / (2.0 * c_hat * r_lo);
  ub.d_sigma = rdot_bound * factor / (2.0 * c_hat);

  // Relative stiffness mismatch interval (front and rear share the
  // interval, so it enters both the gain-coupled and base terms).
  const Interval xi = make_interval(c_hat / c_hi - 1.0, c_hat / c_lo - 1.0);

  // Base interval for the velocity-scaled coordinates (2 and 4): the
  // inertia-weighted image of the stiffness mismatch.
  const double front_heavy = (p.m + p.i_z) / (2.0 * p.m);
  const double rear_light = (p.i_z * p.l_r / p.l_f - p.m) / (2.0 * p.m);
  const Interval base =
      make_interval(-front_heavy * (c_hi - c_hat) / c_lo +
                        rear_light * (c_lo - c_hat) / c_hi,
                    -front_heavy * (c_lo - c_hat) / c_hi +
                        rear_light * (c_hi - c_hat) / c_lo);

  // Theta(V) = (1/V)(Theta1 x ... x Theta4), with coordinates 1/3 purely
  // gain-coupled and 2/4 carrying the base mismatch. This is the design
  // envelope, not the exact image of the stiffness interval: the heading
  // coordinate's stiffness sensitivity has a velocity-free component the
  // closed form leaves out, so at speed the realized parameters can sit
  // outside the box even for in-interval truths (and always do for far
  // mismatches). The projection law then pins the estimates at the
  // boundary; adaptation degrades gracefully when the interval is right
  // and is the failure channel when perception hands over a wrong one.
  ub.theta_box[0] = k_m[0] * xi;
  ub.theta_box[1] = (1.0 / v) * base + k_m[1] * xi;
  ub.theta_box[2] = k_m[2] * xi;
  ub.theta_box[3] = (1.0 / v) * base + k_m[3] * xi;
  return ub;
}

double true_input_gain(double c_true, double c_hat) {
  if (!(c_true > 0.0) || !(c_hat > 0.0))
    throw std::invalid_argument("true_input_gain: stiffness must be > 0");
  return c_true / c_hat;
}

Eigen::Vector4d true_theta(const VehicleParams& p, double c_true,
                           double c_hat, double v,
                           const Eigen::RowVector4d& k_m) {
  const double w = true_input_gain(c_true, c_hat);
  const DynamicsMatrices truth = build_matrices(p, c_true, c_true, v);
  const DynamicsMatrices design = build_matrices(p, c_hat, c_hat, v);
  const Eigen::RowVector4d row =
      (1.0 / w) * (pseudo_inverse_row(p, c_hat) * (truth.A - design.A)) +
      (1.0 / w - 1.0) * k_m;
  return row.transpose();
}

double true_sigma(const VehicleParams& p, double c_true, double c_hat,
                  double v, double yaw_rate_des) {
  const DynamicsMatrices truth = build_matrices(p, c_true, c_true, v);
  return pseudo_inverse_row(p, c_hat).dot(truth.g) * yaw_rate_des;
}

}  // namespace certctrl
