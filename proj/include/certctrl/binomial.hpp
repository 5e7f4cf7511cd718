#pragma once

namespace certctrl {

// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double incomplete_beta(double a, double b, double x);

// P(X >= k) for X ~ Binomial(n, p). Exact via the beta identity.
double binomial_sf(long k, long n, double p);

// P(X <= k).
double binomial_cdf(long k, long n, double p);

// Exact one-sided Clopper-Pearson lower confidence bound: the largest
// p_lo with P(Bin(n, p_lo) >= k) <= alpha (0 when k == 0), so that
// P(p_lo > p_true) <= alpha for every p_true. k to alpha^(1/n) at k == n.
double clopper_pearson_lower(long k, long n, double alpha);

// Order-statistic indices (1-based) for distribution-free quantile
// confidence bounds from n i.i.d. samples.
//
// lower_order_index: largest k with P(Bin(n, q) >= k) >= conf, so the
// k-th smallest sample is a lower bound for the q-quantile with
// probability >= conf. Returns 0 when no index works.
long lower_order_index(long n, double q, double conf);

// upper_order_index: smallest m with P(Bin(n, q) <= m - 1) >= conf, so
// the m-th smallest sample is an upper bound for the q-quantile with
// probability >= conf. Returns n + 1 when no index works.
long upper_order_index(long n, double q, double conf);

}  // namespace certctrl
