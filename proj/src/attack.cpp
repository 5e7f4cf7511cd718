#include "certctrl/attack.hpp"

#include <cmath>
#include <stdexcept>

#include "certctrl/rng.hpp"

namespace certctrl {

void AttackConfig::validate() const {
  if (epsilon < 0.0)
    throw std::invalid_argument("attack: epsilon must be >= 0");
  if (steps < 1) throw std::invalid_argument("attack: steps must be >= 1");
}

AttackResult pgd_attack(
    const std::function<double(const Eigen::VectorXd&)>& value,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
    const Eigen::VectorXd& x, const AttackConfig& cfg) {
  cfg.validate();
  const int dim = static_cast<int>(x.size());
  const double sign =
      cfg.objective == AttackConfig::Objective::kStability ? 1.0 : -1.0;

  AttackResult out;
  out.clean_value = value(x);
  out.delta = Eigen::VectorXd::Zero(dim);
  out.objective_value = out.clean_value;
  if (cfg.epsilon == 0.0) return out;

  double best = sign * out.clean_value;

  // Uniform start inside the ball: Gaussian direction, radius by the
  // d-th root of a uniform draw.
  SplitMix64 g = sample_rng(cfg.seed, /*stream=*/7, 0);
  Eigen::VectorXd delta = gaussian_vector(cfg.seed, /*stream=*/8, 0, dim);
  const double nrm = delta.norm();
  if (nrm > 0.0) {
    delta *= cfg.epsilon *
             std::pow(g.uniform01(), 1.0 / static_cast<double>(dim)) / nrm;
  } else {
    delta.setZero();
  }

  const double step =
      cfg.step_size > 0.0 ? cfg.step_size : 2.5 * cfg.epsilon / cfg.steps;

  auto consider = [&](const Eigen::VectorXd& d) {
    const double v = value(x + d);
    if (sign * v > best) {
      best = sign * v;
      out.delta = d;
      out.objective_value = v;
    }
  };
  consider(delta);

  for (int it = 0; it < cfg.steps; ++it) {
    Eigen::VectorXd gr = grad(x + delta);
    const double gn = gr.norm();
    if (gn <= 1e-30) break;  // flat objective: nothing to climb
    delta += (sign * step / gn) * gr;
    const double dn = delta.norm();
    if (dn > cfg.epsilon) delta *= cfg.epsilon / dn;
    consider(delta);
  }
  return out;
}

}  // namespace certctrl
