#include "certctrl/binomial.hpp"

#include <cmath>
#include <stdexcept>

namespace certctrl {
namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;  // n and alpha in this codebase stay far from the slow region
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("incomplete_beta: a, b must be positive");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * beta_cf(a, b, x) / a;
  }
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double binomial_sf(long k, long n, double p) {
  if (n < 0) throw std::invalid_argument("binomial_sf: n < 0");
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  // P(X >= k) = I_p(k, n - k + 1)
  return incomplete_beta(static_cast<double>(k),
                         static_cast<double>(n - k + 1), p);
}

double binomial_cdf(long k, long n, double p) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  return 1.0 - binomial_sf(k + 1, n, p);
}

double clopper_pearson_lower(long k, long n, double alpha) {
  if (n <= 0) throw std::invalid_argument("clopper_pearson_lower: n <= 0");
  if (k < 0 || k > n) {
    throw std::invalid_argument("clopper_pearson_lower: k out of [0, n]");
  }
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("clopper_pearson_lower: alpha out of (0, 1)");
  }
  if (k == 0) return 0.0;

  // binomial_sf(k, n, .) grows monotonically from 0 to 1 on [0, 1];
  // the bound is the root of sf(k, n, p) = alpha.
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (binomial_sf(k, n, mid) > alpha) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo;
}

long lower_order_index(long n, double q, double conf) {
  if (n <= 0) throw std::invalid_argument("lower_order_index: n <= 0");
  // sf(k) nonincreasing in k; find largest k in [1, n] with sf >= conf.
  if (binomial_sf(1, n, q) < conf) return 0;
  long lo = 1, hi = n;
  while (lo < hi) {
    const long mid = (lo + hi + 1) / 2;
    if (binomial_sf(mid, n, q) >= conf) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

long upper_order_index(long n, double q, double conf) {
  if (n <= 0) throw std::invalid_argument("upper_order_index: n <= 0");
  // cdf(m-1) nondecreasing in m; find smallest m in [1, n] with cdf >= conf.
  if (binomial_cdf(n - 1, n, q) < conf) return n + 1;
  long lo = 1, hi = n;
  while (lo < hi) {
    const long mid = (lo + hi) / 2;
    if (binomial_cdf(mid - 1, n, q) >= conf) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

}  // namespace certctrl
