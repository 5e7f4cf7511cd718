// Normal CDF/quantile and binomial tail machinery against independent
// oracles: quadrature for the Gaussian, exact long-double enumeration
// for the binomial, bisection for the Clopper-Pearson bound.

#include <cmath>

#include "certctrl/binomial.hpp"
#include "certctrl/normal.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace certctrl;

namespace {

void normal_cdf_matches_quadrature() {
  for (double x = -8.0; x <= 8.0 + 1e-9; x += 0.25)
    REQUIRE_NEAR(normal_cdf(x), oracle::normal_cdf(x), 1e-12);

  // Frozen anchors (classical table values).
  REQUIRE_NEAR(normal_cdf(0.0), 0.5, 0.0);
  REQUIRE_NEAR(normal_cdf(1.0), 0.841344746068543, 1e-12);
  REQUIRE_NEAR(normal_cdf(-2.0), 0.022750131948179, 1e-12);
  REQUIRE_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);

  // Symmetry and monotonicity.
  for (double x = 0.0; x <= 6.0; x += 0.5)
    REQUIRE_NEAR(normal_cdf(x) + normal_cdf(-x), 1.0, 1e-14);
  double prev = -1.0;
  for (double x = -10.0; x <= 10.0; x += 0.1) {
    const double c = normal_cdf(x);
    REQUIRE(c >= prev);
    prev = c;
  }
}

void normal_quantile_inverts_cdf() {
  REQUIRE_NEAR(inverse_normal_cdf(0.5), 0.0, 1e-12);
  REQUIRE_NEAR(inverse_normal_cdf(0.975), 1.959963984540054, 1e-9);
  REQUIRE_NEAR(inverse_normal_cdf(0.995), 2.575829303548901, 1e-9);

  for (double x = -5.0; x <= 5.0 + 1e-9; x += 0.25)
    REQUIRE_NEAR(inverse_normal_cdf(normal_cdf(x)), x, 1e-9);
  for (double p = 0.001; p < 1.0; p += 0.037)
    REQUIRE_NEAR(normal_cdf(inverse_normal_cdf(p)), p, 1e-12);

  REQUIRE_THROWS(inverse_normal_cdf(0.0));
  REQUIRE_THROWS(inverse_normal_cdf(1.0));
  REQUIRE_THROWS(inverse_normal_cdf(-0.1));
  REQUIRE_THROWS(inverse_normal_cdf(1.1));
}

void binomial_tails_match_enumeration() {
  for (int n = 1; n <= 20; n += 3) {
    for (double p = 0.05; p <= 0.95 + 1e-9; p += 0.15) {
      for (int k = 0; k <= n; ++k) {
        REQUIRE_NEAR(binomial_sf(k, n, p), (double)oracle::binom_sf(n, k, p),
                     1e-12);
        REQUIRE_NEAR(binomial_cdf(k, n, p), (double)oracle::binom_cdf(n, k, p),
                     1e-12);
      }
    }
  }
  // Edge rows.
  REQUIRE_NEAR(binomial_sf(0, 10, 0.3), 1.0, 0.0);
  REQUIRE_NEAR(binomial_cdf(10, 10, 0.3), 1.0, 1e-15);
  REQUIRE_NEAR(binomial_sf(10, 10, 0.5), std::pow(0.5, 10), 1e-15);
}

void incomplete_beta_spot_checks() {
  // I_x(1, b) = 1 - (1-x)^b and I_x(a, 1) = x^a, plus symmetry.
  for (double x = 0.1; x <= 0.9 + 1e-9; x += 0.2) {
    REQUIRE_NEAR(incomplete_beta(1.0, 3.0, x), 1.0 - std::pow(1.0 - x, 3.0),
                 1e-12);
    REQUIRE_NEAR(incomplete_beta(4.0, 1.0, x), std::pow(x, 4.0), 1e-12);
    REQUIRE_NEAR(incomplete_beta(2.5, 3.5, x),
                 1.0 - incomplete_beta(3.5, 2.5, 1.0 - x), 1e-12);
  }
}

void clopper_pearson_matches_bisection() {
  for (int n = 1; n <= 20; ++n) {
    for (int k = 0; k <= n; ++k) {
      for (double alpha : {0.05, 0.01}) {
        REQUIRE_NEAR(clopper_pearson_lower(k, n, alpha),
                     oracle::cp_lower(k, n, alpha), 1e-9);
      }
    }
  }
  // Documented endpoints: nothing observed -> 0; everything observed ->
  // the p with p^n = alpha.
  REQUIRE_NEAR(clopper_pearson_lower(0, 50, 0.05), 0.0, 0.0);
  REQUIRE_NEAR(clopper_pearson_lower(10, 10, 0.05), std::pow(0.05, 0.1),
               1e-12);
  REQUIRE_NEAR(clopper_pearson_lower(1, 1, 0.05), 0.05, 1e-12);

  // The defining property at a bigger n: the bound p_lo keeps
  // P(Bin(n, p_lo) >= k) <= alpha, and nudging it up breaks that.
  const int n = 2000, k = 1873;
  const double alpha = 0.01;
  const double p_lo = clopper_pearson_lower(k, n, alpha);
  REQUIRE((double)oracle::binom_sf(n, k, p_lo) <= alpha + 1e-12);
  REQUIRE((double)oracle::binom_sf(n, k, p_lo + 1e-6) > alpha);
}

void order_indices_bracket_quantiles() {
  // lower_order_index(n, q, conf) is the largest k with
  // P(Bin(n, q) >= k) >= conf, i.e. X_(k) undershoots the q-quantile
  // with confidence conf. upper_order_index mirrors it from above.
  const struct {
    long n;
    double q, conf;
  } cases[] = {{2000, 0.5, 0.995}, {2000, 0.309, 0.995}, {500, 0.8, 0.975},
               {100, 0.5, 0.975},  {100, 0.05, 0.9},     {50, 0.3, 0.99}};
  for (const auto& c : cases) {
    const long k = lower_order_index(c.n, c.q, c.conf);
    if (k >= 1) {
      REQUIRE((double)oracle::binom_sf((int)c.n, (int)k, c.q) >= c.conf);
      REQUIRE((double)oracle::binom_sf((int)c.n, (int)k + 1, c.q) < c.conf);
    } else {
      REQUIRE(k == 0);
      REQUIRE((double)oracle::binom_sf((int)c.n, 1, c.q) < c.conf);
    }
    const long m = upper_order_index(c.n, c.q, c.conf);
    if (m <= c.n) {
      // P(X_(m) >= q-quantile) = P(Bin(n, q) <= m - 1) >= conf, minimal m.
      REQUIRE((double)oracle::binom_cdf((int)c.n, (int)m - 1, c.q) >= c.conf);
      REQUIRE(m == 1 ||
              (double)oracle::binom_cdf((int)c.n, (int)m - 2, c.q) < c.conf);
    } else {
      REQUIRE(m == c.n + 1);
    }
  }

  // Symmetry at the median: the bracket is symmetric about (n+1)/2.
  const long lo = lower_order_index(999, 0.5, 0.975);
  const long hi = upper_order_index(999, 0.5, 0.975);
  REQUIRE(lo + hi == 1000);
}

void run_all() {
  normal_cdf_matches_quadrature();
  normal_quantile_inverts_cdf();
  binomial_tails_match_enumeration();
  incomplete_beta_spot_checks();
  clopper_pearson_matches_bisection();
  order_indices_bracket_quantiles();
}

}  // namespace

TEST_MAIN("stats_test")
