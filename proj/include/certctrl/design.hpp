#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "certctrl/nominal.hpp"
#include "certctrl/stiffness.hpp"
#include "certctrl/uncertainty.hpp"
#include "certctrl/vehicle.hpp"

namespace certctrl {

struct DesignOptions {
  double v_min = 1.0;
  double v_max = 30.0;
  double lambda_gp = 0.95;  // L1-norm budget for the filtered reference loop
  double k_bar = 600.0;     // filter gain cap
  std::vector<std::complex<double>> poles = {
      {-0.3, 6.0}, {-0.3, -6.0}, {-6.0, 0.0}, {-7.0, 0.0}};
  double r_lo = 100.0;
  double rdot_bound = 0.01;
  double v_tol = 0.05;      // outer bisection resolution, m/s
  double k_rel_tol = 0.05;  // inner bisection relative resolution

  void validate() const;
};

struct DesignResult {
  double v_star = 0.0;
  double k_star = 0.0;
  double g_norm = 0.0;   // worst-case ||G||_1 at (v_star, k_star) over Omega
  bool feasible = false;  // false: fall back to stopping the vehicle
};

// L1 norm of the impulse response of c'(sI - A)^{-1} b (1 - F(s)) with
// F(s) = wk / (s + wk). Computed by integrating the augmented impulse
// response until its envelope decays below 1e-9. A must be Hurwitz.
double l1_norm_filtered(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& c, double wk);

// Same norm on the nominal lane-keeping loop for filter gain k and
// input-gain realization w in Omega.
double l1_norm_g(const NominalModel& nm, double k, double w);

// Largest velocity in [v_min, v_max] for which a filter gain k <= k_bar
// keeps ||G||_1 <= lambda_gp at the endpoints and midpoint of Omega,
// while lambda_gp stays below 1/L of the theta bounds at that velocity.
// k_star is the smallest such gain at v_star. The feasible velocities
// form an interior interval (theta bounds grow at both ends), so the
// upper edge is bracketed by a coarse top-down scan and then bisected.
// Infeasible problems return v_star = 0 (stop) with feasible = false.
DesignResult design_parameters(const VehicleParams& p,
                               const StiffnessInterval& interval,
                               const DesignOptions& opt);

}  // namespace certctrl
