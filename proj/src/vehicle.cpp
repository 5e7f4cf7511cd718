#include "certctrl/vehicle.hpp"

#include <cmath>
#include <stdexcept>

namespace certctrl {

void VehicleParams::validate() const {
  if (!(m > 0.0) || !(i_z > 0.0) || !(l_f > 0.0) || !(l_r > 0.0))
    throw std::invalid_argument("vehicle: parameters must be positive");
  // The adaptive-control uncertainty bounds assume a rear-heavy layout.
  if (l_r < l_f)
    throw std::invalid_argument("vehicle: requires l_r >= l_f");
  if (i_z * l_r / l_f - m < 0.0)
    throw std::invalid_argument("vehicle: requires i_z*l_r/l_f >= m");
}

double RoadProfile::total_time() const {
  double t = 0.0;
  for (const auto& seg : segments) t += seg.duration;
  return t;
}

double RoadProfile::stiffness_at(double t, double fallback) const {
  double acc = 0.0;
  for (const auto& seg : segments) {
    acc += seg.duration;
    if (t < acc) return seg.stiffness > 0.0 ? seg.stiffness : fallback;
  }
  const auto& last = segments.back();
  return last.stiffness > 0.0 ? last.stiffness : fallback;
}

double RoadProfile::radius_at(double t) const {
  double acc = 0.0;
  for (const auto& seg : segments) {
    acc += seg.duration;
    if (t < acc) return seg.radius;
  }
  return segments.back().radius;
}

void RoadProfile::validate() const {
  if (segments.empty())
    throw std::invalid_argument("road: at least one segment required");
  if (!(r_min > 0.0))
    throw std::invalid_argument("road: r_min must be positive");
  for (const auto& seg : segments) {
    if (!(seg.duration > 0.0))
      throw std::invalid_argument("road: segment duration must be positive");
    if (seg.radius < r_min)
      throw std::invalid_argument("road: segment radius below r_min");
    if (seg.stiffness < 0.0)
      throw std::invalid_argument("road: segment stiffness must be >= 0");
  }
}

RoadProfile RoadProfile::straight(double duration) {
  RoadProfile rp;
  rp.segments.push_back({duration, 0.0, kStraightRadius});
  return rp;
}

double ErrorState::inf_norm() const {
  return vec().cwiseAbs().maxCoeff();
}

DynamicsMatrices build_matrices(const VehicleParams& p, double c_f, double c_r,
                                double v) {
  p.validate();
  if (!(c_f > 0.0) || !(c_r > 0.0))
    throw std::invalid_argument("build_matrices: stiffness must be positive");
  if (!(v > 0.0))
    throw std::invalid_argument("build_matrices: velocity must be positive");

  DynamicsMatrices md;
  md.A.setZero();
  md.A(0, 1) = 1.0;
  md.A(2, 3) = 1.0;
  md.A(1, 1) = -2.0 * (c_f + c_r) / (p.m * v);
  md.A(1, 2) = 2.0 * (c_f + c_r) / p.m;
  md.A(1, 3) = 2.0 * (-c_f * p.l_f + c_r * p.l_r) / (p.m * v);
  md.A(3, 1) = -2.0 * (c_f * p.l_f - c_r * p.l_r) / (p.i_z * v);
  md.A(3, 2) = 2.0 * (c_f * p.l_f - c_r * p.l_r) / p.i_z;
  md.A(3, 3) = -2.0 * (c_f * p.l_f * p.l_f + c_r * p.l_r * p.l_r) /
               (p.i_z * v);

  md.b << 0.0, 2.0 * c_f / p.m, 0.0, 2.0 * c_f * p.l_f / p.i_z;

  md.g << 0.0,
      -2.0 * (c_f * p.l_f - c_r * p.l_r) / (p.m * v) - v,
      0.0,
      -2.0 * (c_f * p.l_f * p.l_f + c_r * p.l_r * p.l_r) / (p.i_z * v);
  return md;
}

double desired_yaw_rate(double v, double radius, double min_radius) {
  if (!(min_radius > 0.0))
    throw std::invalid_argument("desired_yaw_rate: min_radius must be > 0");
  if (radius < min_radius)
    throw std::invalid_argument("desired_yaw_rate: radius below minimum");
  if (v < 0.0)
    throw std::invalid_argument("desired_yaw_rate: velocity must be >= 0");
  return v / radius;
}

ErrorState step(const ErrorState& s, double steer, const DynamicsMatrices& md,
                double yaw_rate_des, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const Eigen::Vector4d c = md.b * steer + md.g * yaw_rate_des;
  const Eigen::Vector4d x = s.vec();
  const Eigen::Vector4d k1 = md.A * x + c;
  const Eigen::Vector4d k2 = md.A * (x + 0.5 * dt * k1) + c;
  const Eigen::Vector4d k3 = md.A * (x + 0.5 * dt * k2) + c;
  const Eigen::Vector4d k4 = md.A * (x + dt * k3) + c;
  return ErrorState::from_vec(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace certctrl
