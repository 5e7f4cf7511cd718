#pragma once

#include <Eigen/Dense>

#include "certctrl/interval.hpp"
#include "certctrl/nominal.hpp"
#include "certctrl/uncertainty.hpp"

namespace certctrl {

// Runtime state of the adaptive loop. u_ad is the low-pass adaptive
// component of the steer command; eta at each step is formed with the
// u_ad that was applied over the previous interval (one-step delay),
// which closes the otherwise algebraic loop.
struct AdaptiveState {
  Eigen::Vector4d s_hat = Eigen::Vector4d::Zero();
  double w_hat = 1.0;
  Eigen::Vector4d theta_hat = Eigen::Vector4d::Zero();
  double sigma_hat = 0.0;
  double u_ad = 0.0;
};

// Smooth projection of a raw adaptation rate: inside the inner set the
// rate passes through; across the margin shell (fraction `margin_frac`
// of the half-width) outward rates fade to zero, so the estimate cannot
// leave [set.lo, set.hi]. Degenerate sets pin the estimate.
double project_rate(double est, double rate, const Interval& set,
                    double margin_frac = 0.05);

// Advances the state predictor one step of RK4:
//   s_hat' = a_m s_hat + b_m (w_hat u_ad + theta_hat . s + sigma_hat)
// with the measured state and estimates held over the step.
void predictor_step(AdaptiveState& st, const NominalModel& nm,
                    const Eigen::Vector4d& s_meas, double dt);

// Euler update of (w_hat, theta_hat, sigma_hat) from the predictor
// error, rates projected into the bound sets. Enforces gamma * dt <= 50.
void adaptation_step(AdaptiveState& st, const NominalModel& nm,
                     const UncertaintyBounds& ub, const Eigen::Matrix4d& p_lyap,
                     const Eigen::Vector4d& s_meas, double gamma, double dt,
                     double margin_frac = 0.05);

// Computes the steer command -k_m s + u_ad, then advances the adaptive
// component: u_ad' = -k (eta - k_g r) with eta = w_hat u_ad +
// theta_hat . s + sigma_hat. Returns the command applied over [t, t+dt).
double control_law(AdaptiveState& st, const NominalModel& nm,
                   const Eigen::Vector4d& s_meas, double k_filter,
                   double reference_r, double dt);

}  // namespace certctrl
