#pragma once

#include <Eigen/Dense>
#include <functional>

#include "certctrl/smoothing.hpp"

namespace certctrl {

using Regressor = std::function<double(const Eigen::VectorXd&)>;

struct PercentileBounds {
  double p_lo = 0.0;  // Phi(PhiInv(p) - eps/sigma)
  double p_hi = 0.0;  // Phi(PhiInv(p) + eps/sigma)
};

// Percentile levels whose smoothed values bracket the smoothed p-th
// percentile of any input within L2 distance eps.
PercentileBounds percentile_bounds(double p, double eps, double noise_std);

struct CertifiedInterval {
  double lower = 0.0;
  double upper = 0.0;
  double epsilon = 0.0;
  double p_lo = 0.0;
  double p_hi = 0.0;
  double beta = 0.0;
  double h_star = 0.0;  // empirical smoothed median at x
};

// Distribution-free certificate for median smoothing: with probability
// >= 1 - alpha over the n draws, the smoothed median at every x + delta
// with ||delta||_2 <= eps lies in [lower, upper]. The two percentile
// estimates use order statistics at Clopper-Pearson-adjusted indices
// (alpha/2 per side); the interval is widened to at least h* +/- beta.
// Throws std::runtime_error("insufficient samples") when n is too small
// to place either order statistic at the requested confidence.
CertifiedInterval certified_interval(const Regressor& model,
                                     const Eigen::VectorXd& x,
                                     const SmoothingConfig& cfg, double eps,
                                     double beta);

}  // namespace certctrl
