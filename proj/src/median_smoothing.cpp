#include "certctrl/median_smoothing.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "certctrl/binomial.hpp"
#include "certctrl/normal.hpp"
#include "certctrl/rng.hpp"

namespace certctrl {

PercentileBounds percentile_bounds(double p, double eps, double noise_std) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("percentile_bounds: p must lie in (0, 1)");
  if (eps < 0.0)
    throw std::invalid_argument("percentile_bounds: eps must be >= 0");
  if (!(noise_std > 0.0))
    throw std::invalid_argument("percentile_bounds: noise_std must be > 0");
  const double z = inverse_normal_cdf(p);
  return PercentileBounds{normal_cdf(z - eps / noise_std),
                          normal_cdf(z + eps / noise_std)};
}

CertifiedInterval certified_interval(const Regressor& model,
                                     const Eigen::VectorXd& x,
                                     const SmoothingConfig& cfg, double eps,
                                     double beta) {
  cfg.validate();
  if (eps < 0.0)
    throw std::invalid_argument("certified_interval: eps must be >= 0");
  if (beta < 0.0)
    throw std::invalid_argument("certified_interval: beta must be >= 0");

  const PercentileBounds pb = percentile_bounds(0.5, eps, cfg.noise_std);
  const double conf = 1.0 - 0.5 * cfg.alpha;  // alpha/2 per side
  const long n = cfg.n;
  const long k_lo = lower_order_index(n, pb.p_lo, conf);
  const long m_hi = upper_order_index(n, pb.p_hi, conf);
  if (k_lo == 0 || m_hi == n + 1) {
    throw std::runtime_error("insufficient samples");
  }

  const int dim = static_cast<int>(x.size());
  std::vector<double> ys(n);
  for (long i = 0; i < n; ++i) {
    ys[static_cast<std::size_t>(i)] = model(
        x + cfg.noise_std *
                gaussian_vector(cfg.seed, /*stream=*/0,
                                static_cast<std::uint64_t>(i), dim));
  }
  std::sort(ys.begin(), ys.end());

  const double h_star =
      (n % 2 == 1)
          ? ys[static_cast<std::size_t>(n / 2)]
          : 0.5 * (ys[static_cast<std::size_t>(n / 2 - 1)] +
                   ys[static_cast<std::size_t>(n / 2)]);

  CertifiedInterval out;
  out.epsilon = eps;
  out.p_lo = pb.p_lo;
  out.p_hi = pb.p_hi;
  out.beta = beta;
  out.h_star = h_star;
  out.lower = std::min(ys[static_cast<std::size_t>(k_lo - 1)], h_star - beta);
  out.upper = std::max(ys[static_cast<std::size_t>(m_hi - 1)], h_star + beta);
  return out;
}

}  // namespace certctrl
