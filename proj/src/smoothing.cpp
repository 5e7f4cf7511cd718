#include "certctrl/smoothing.hpp"

#include <algorithm>
#include <stdexcept>

#include "certctrl/binomial.hpp"
#include "certctrl/normal.hpp"
#include "certctrl/rng.hpp"

namespace certctrl {

void SmoothingConfig::validate() const {
  if (!(noise_std > 0.0))
    throw std::invalid_argument("smoothing: noise_std must be positive");
  if (n0 < 1 || n < 1)
    throw std::invalid_argument("smoothing: sample counts must be >= 1");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("smoothing: alpha must lie in (0, 1)");
}

void SafeSetPolicy::validate() const {
  if (labels.empty()) throw std::invalid_argument("policy: no labels");
  if (safe_sets.size() != labels.size())
    throw std::invalid_argument("policy: one safe set per label required");
  for (int l = 0; l < num_labels(); ++l) {
    bool self = false;
    for (int m : safe_sets[l]) {
      if (m < 0 || m >= num_labels())
        throw std::invalid_argument("policy: safe set member out of range");
      if (m == l) self = true;
    }
    if (!self)
      throw std::invalid_argument("policy: safe set must contain own label");
  }
}

SafeSetPolicy SafeSetPolicy::weather_default() {
  SafeSetPolicy p;
  p.labels = {"sunny", "light_rain", "heavy_rain", "snow"};
  p.safe_sets = {
      {0, 1, 2, 3},  // sunny: anything at most as grippy is acceptable
      {1, 2, 3},     // light rain
      {2, 3},        // heavy rain
      {3},           // snow
  };
  return p;
}

SafeSetPolicy SafeSetPolicy::road_default() {
  SafeSetPolicy p;
  p.labels = {"asphalt", "cobblestone", "sand"};
  p.safe_sets = {
      {0, 1, 2},
      {1, 2},
      {2},
  };
  return p;
}

std::vector<long> sample_under_noise(const Classifier& model,
                                     const Eigen::VectorXd& x,
                                     const SmoothingConfig& cfg, int count,
                                     int num_labels, std::uint64_t stream) {
  cfg.validate();
  if (count < 1) throw std::invalid_argument("sample_under_noise: count < 1");
  if (num_labels < 1)
    throw std::invalid_argument("sample_under_noise: num_labels < 1");

  const int dim = static_cast<int>(x.size());
  std::vector<long> counts(num_labels, 0);
  for (int i = 0; i < count; ++i) {
    const Eigen::VectorXd noisy =
        x + cfg.noise_std * gaussian_vector(cfg.seed, stream, i, dim);
    const int label = model(noisy);
    if (label < 0 || label >= num_labels)
      throw std::runtime_error("sample_under_noise: label out of range");
    ++counts[label];
  }
  return counts;
}

namespace {

// Streams 0/1 feed certification (selection/estimation); stream 2 feeds
// plain smoothed prediction, so it never shares draws with a certificate.
constexpr std::uint64_t kSelectStream = 0;
constexpr std::uint64_t kEstimateStream = 1;
constexpr std::uint64_t kPredictStream = 2;

int top_label(const std::vector<long>& counts) {
  return static_cast<int>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());
}

}  // namespace

int smoothed_predict(const Classifier& model, const Eigen::VectorXd& x,
                     const SmoothingConfig& cfg, int num_labels) {
  return top_label(
      sample_under_noise(model, x, cfg, cfg.n, num_labels, kPredictStream));
}

CertificateOutcome certify_safe_set(const Classifier& model,
                                    const Eigen::VectorXd& x,
                                    const SafeSetPolicy& policy,
                                    const SmoothingConfig& cfg) {
  cfg.validate();
  policy.validate();
  const int num_labels = policy.num_labels();

  const std::vector<long> select = sample_under_noise(
      model, x, cfg, cfg.n0, num_labels, kSelectStream);
  const int a_hat = top_label(select);
  const std::vector<int>& safe = policy.safe_sets[a_hat];

  const std::vector<long> counts = sample_under_noise(
      model, x, cfg, cfg.n, num_labels, kEstimateStream);
  long safe_count = 0;
  for (int l : safe) safe_count += counts[l];

  CertificateOutcome out;
  out.predicted_label = a_hat;
  out.safe_set = safe;
  out.counts = counts;
  out.p_safe_lower = clopper_pearson_lower(safe_count, cfg.n, cfg.alpha);
  out.p_unsafe_upper = 1.0 - out.p_safe_lower;

  // Radius (sigma/2) * (PhiInv(p_safe) - PhiInv(p_unsafe)); positive
  // exactly when p_safe_lower clears 1/2, otherwise abstain.
  if (out.p_safe_lower > 0.5) {
    out.abstain = false;
    out.radius = 0.5 * cfg.noise_std *
                 (inverse_normal_cdf(out.p_safe_lower) -
                  inverse_normal_cdf(out.p_unsafe_upper));
  } else {
    out.abstain = true;
    out.radius = 0.0;
  }
  return out;
}

}  // namespace certctrl
