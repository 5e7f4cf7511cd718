#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

namespace certctrl {

// Projected gradient attack on a scalar perception objective inside an
// L2 ball. STABILITY drives the perceived stiffness up (certifying a
// grippier road than reality); EFFICIENCY drives it down (forcing a
// conservative crawl).
struct AttackConfig {
  enum class Objective { kStability, kEfficiency };

  Objective objective = Objective::kStability;
  double epsilon = 12.0;   // L2 budget
  int steps = 60;
  double step_size = 0.0;  // <= 0: 2.5 * epsilon / steps
  std::uint64_t seed = 1;

  void validate() const;
};

struct AttackResult {
  Eigen::VectorXd delta;
  double objective_value = 0.0;  // at x + delta
  double clean_value = 0.0;      // at x
};

// `value` and `grad` evaluate the differentiable objective (the base
// model's stiffness read-out). Starts from a uniform draw in the ball,
// takes normalized gradient steps projected back onto the ball, and
// returns the best iterate, never worse than delta = 0 for the chosen
// direction. epsilon == 0 returns the zero perturbation.
AttackResult pgd_attack(
    const std::function<double(const Eigen::VectorXd&)>& value,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
    const Eigen::VectorXd& x, const AttackConfig& cfg);

}  // namespace certctrl
