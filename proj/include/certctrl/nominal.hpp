#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "certctrl/vehicle.hpp"

namespace certctrl {

// Reference model the adaptive loop regresses onto: the design-stiffness
// plant under the placed state feedback.
struct NominalModel {
  Eigen::Matrix4d a_m;      // A(c_hat, v) - b(c_hat) k_m
  Eigen::Vector4d b_m;      // b(c_hat)
  Eigen::Vector4d c;        // output projection (lateral offset)
  Eigen::RowVector4d k_m;   // state-feedback gains
  double k_g = 0.0;         // -1 / (c' a_m^{-1} b_m)
  double c_hat = 0.0;
  double v = 0.0;
};

// Pole placement via Ackermann's formula on (A(c_hat, v), b(c_hat)).
// `poles` must have negative real parts and be closed under conjugation.
// Throws when the pair is numerically uncontrollable or the placed
// eigenvalues fail to match the targets.
NominalModel build_nominal(const VehicleParams& p, double c_hat, double v,
                           const std::vector<std::complex<double>>& poles);

// Solves a_m P + P a_m' = -Q for symmetric positive definite P.
// Requires a_m Hurwitz and Q symmetric positive definite; the returned P
// is symmetrized and residual-checked against 1e-10 * ||Q||_F.
Eigen::Matrix4d lyapunov_solve(const Eigen::Matrix4d& a_m,
                               const Eigen::Matrix4d& q);

}  // namespace certctrl
