#include "certctrl/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace certctrl {

double project_rate(double est, double rate, const Interval& set,
                    double margin_frac) {
  if (!(margin_frac > 0.0) || !(margin_frac < 1.0))
    throw std::invalid_argument("project_rate: margin_frac out of (0, 1)");
  const double rho = 0.5 * set.width();
  if (rho <= 0.0) return 0.0;  // degenerate set: estimate is pinned
  const double center = set.mid();
  const double rho0 = rho * (1.0 - margin_frac);
  const double x = est - center;
  const double f = (x * x - rho0 * rho0) / (rho * rho - rho0 * rho0);
  if (f <= 0.0 || rate * x <= 0.0) return rate;  // interior or inward
  return rate * (1.0 - std::min(f, 1.0));
}

void predictor_step(AdaptiveState& st, const NominalModel& nm,
                    const Eigen::Vector4d& s_meas, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("predictor_step: dt <= 0");
  const double matched =
      st.w_hat * st.u_ad + st.theta_hat.dot(s_meas) + st.sigma_hat;
  const Eigen::Vector4d c = nm.b_m * matched;
  const Eigen::Vector4d x = st.s_hat;
  const Eigen::Vector4d k1 = nm.a_m * x + c;
  const Eigen::Vector4d k2 = nm.a_m * (x + 0.5 * dt * k1) + c;
  const Eigen::Vector4d k3 = nm.a_m * (x + 0.5 * dt * k2) + c;
  const Eigen::Vector4d k4 = nm.a_m * (x + dt * k3) + c;
  st.s_hat = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void adaptation_step(AdaptiveState& st, const NominalModel& nm,
                     const UncertaintyBounds& ub, const Eigen::Matrix4d& p_lyap,
                     const Eigen::Vector4d& s_meas, double gamma, double dt,
                     double margin_frac) {
  if (!(gamma > 0.0)) throw std::invalid_argument("adaptation_step: gamma <= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("adaptation_step: dt <= 0");
  if (gamma * dt > 50.0)
    throw std::invalid_argument("adaptation_step: gamma * dt exceeds 50");

  const Eigen::Vector4d s_tilde = st.s_hat - s_meas;
  const double err = s_tilde.dot(p_lyap * nm.b_m);

  const Interval sigma_set{-ub.sigma_bound(), ub.sigma_bound()};
  st.w_hat += dt * gamma *
              project_rate(st.w_hat, -err * st.u_ad, ub.omega, margin_frac);
  for (int i = 0; i < 4; ++i) {
    st.theta_hat[i] +=
        dt * gamma *
        project_rate(st.theta_hat[i], -err * s_meas[i], ub.theta_box[i],
                     margin_frac);
  }
  st.sigma_hat +=
      dt * gamma * project_rate(st.sigma_hat, -err, sigma_set, margin_frac);

  // The smooth projection already fades outward rates; the clamp only
  // guards the Euler overshoot of a rate that started inside the shell.
  st.w_hat = std::clamp(st.w_hat, ub.omega.lo, ub.omega.hi);
  for (int i = 0; i < 4; ++i) {
    st.theta_hat[i] =
        std::clamp(st.theta_hat[i], ub.theta_box[i].lo, ub.theta_box[i].hi);
  }
  st.sigma_hat = std::clamp(st.sigma_hat, sigma_set.lo, sigma_set.hi);
}

double control_law(AdaptiveState& st, const NominalModel& nm,
                   const Eigen::Vector4d& s_meas, double k_filter,
                   double reference_r, double dt) {
  if (!(k_filter > 0.0))
    throw std::invalid_argument("control_law: k_filter must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("control_law: dt <= 0");
  const double steer = -nm.k_m.dot(s_meas) + st.u_ad;
  const double eta =
      st.w_hat * st.u_ad + st.theta_hat.dot(s_meas) + st.sigma_hat;
  st.u_ad += dt * (-k_filter * (eta - nm.k_g * reference_r));
  return steer;
}

}  // namespace certctrl
