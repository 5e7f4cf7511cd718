#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace certctrl {

using Classifier = std::function<int(const Eigen::VectorXd&)>;

struct SmoothingConfig {
  double noise_std = 0.5;  // isotropic Gaussian sigma
  int n0 = 100;            // selection-phase samples
  int n = 2000;            // estimation-phase samples
  double alpha = 0.01;     // certificate failure probability
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

// Label universe plus, per label, the set of labels that are acceptable
// stand-ins when that label is predicted. Every safe set contains its
// own label; labels are matched by index and ties always resolve to the
// lowest index.
struct SafeSetPolicy {
  std::vector<std::string> labels;
  std::vector<std::vector<int>> safe_sets;

  int num_labels() const { return static_cast<int>(labels.size()); }
  void validate() const;

  // Weather and road-surface tables used by the default experiments.
  static SafeSetPolicy weather_default();
  static SafeSetPolicy road_default();
};

struct CertificateOutcome {
  int predicted_label = -1;
  bool abstain = true;
  double radius = 0.0;  // certified L2 radius, > 0 iff !abstain
  double p_safe_lower = 0.0;
  double p_unsafe_upper = 1.0;
  std::vector<int> safe_set;   // S(predicted_label)
  std::vector<long> counts;    // estimation-phase votes per label
};

// Draws `count` noisy evaluations of the classifier around x and counts
// votes per label. Sample i uses the (cfg.seed, stream, i) key, so two
// calls with distinct streams are independent and the result does not
// depend on evaluation order.
std::vector<long> sample_under_noise(const Classifier& model,
                                     const Eigen::VectorXd& x,
                                     const SmoothingConfig& cfg, int count,
                                     int num_labels, std::uint64_t stream);

// Plurality vote under noise, no certificate. Used for benign accuracy.
int smoothed_predict(const Classifier& model, const Eigen::VectorXd& x,
                     const SmoothingConfig& cfg, int num_labels);

// Two-phase certification: n0 samples pick the top label a, n fresh
// samples lower-bound the probability mass of the safe set S(a) via an
// exact Clopper-Pearson bound. With probability >= 1 - alpha over the
// sampling, every x + delta with ||delta||_2 <= radius keeps the
// smoothed prediction inside S(a). Abstains (radius absent) when the
// bound does not clear 1/2.
CertificateOutcome certify_safe_set(const Classifier& model,
                                    const Eigen::VectorXd& x,
                                    const SafeSetPolicy& policy,
                                    const SmoothingConfig& cfg);

}  // namespace certctrl
