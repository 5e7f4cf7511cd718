#pragma once

// Ground-truth references used by the tests. Everything here is
// computed by a different method than the library under test: CDFs by
// quadrature instead of erfc, quantiles by bisection, binomial tails by
// exact long-double enumeration, matrix exponentials by Pade (Eigen's
// unsupported module), L1 norms by closed forms on first-order systems.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

// ---- quadrature -----------------------------------------------------

inline double simpson_rec(const std::function<double(double)>& f, double a,
                          double fa, double b, double fb, double m, double fm,
                          double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-13) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

// ---- standard normal ------------------------------------------------

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846);
}

inline double normal_cdf(double x) {
  if (x < -13.0) return 0.0;
  if (x > 13.0) return 1.0;
  if (x >= 0.0) return 0.5 + integrate(normal_pdf, 0.0, x);
  return 0.5 - integrate(normal_pdf, x, 0.0);
}

inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("oracle quantile: p outside (0,1)");
  double lo = -13.0, hi = 13.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---- exact binomial (long double enumeration) -----------------------

inline long double binom_coeff(int n, int k) {
  if (k < 0 || k > n) return 0.0L;
  long double c = 1.0L;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

inline long double binom_pmf(int n, int k, long double p) {
  if (k < 0 || k > n) return 0.0L;
  return binom_coeff(n, k) * std::pow(p, (long double)k) *
         std::pow(1.0L - p, (long double)(n - k));
}

// P(X >= k)
inline long double binom_sf(int n, int k, long double p) {
  long double s = 0.0L;
  for (int i = k; i <= n; ++i) s += binom_pmf(n, i, p);
  return s;
}

// P(X <= k)
inline long double binom_cdf(int n, int k, long double p) {
  long double s = 0.0L;
  for (int i = 0; i <= k && i <= n; ++i) s += binom_pmf(n, i, p);
  return s;
}

// Largest p with P(Bin(n, p) >= k) <= alpha; 0 when k == 0. P(X >= k)
// is increasing in p, so plain bisection works.
inline double cp_lower(int k, int n, double alpha) {
  if (k <= 0) return 0.0;
  long double lo = 0.0L, hi = 1.0L;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    (binom_sf(n, k, mid) <= (long double)alpha ? lo : hi) = mid;
  }
  return (double)(0.5L * (lo + hi));
}

// ---- matrix exponential ---------------------------------------------

inline Eigen::MatrixXd expm(const Eigen::MatrixXd& a) { return a.exp(); }

// Random Hurwitz matrix: negative-real-part eigenvalues pushed through
// a random well-conditioned similarity.
inline Eigen::MatrixXd random_hurwitz(std::mt19937_64& g, int n) {
  std::uniform_real_distribution<double> ur(0.2, 4.0);
  std::uniform_real_distribution<double> us(-1.0, 1.0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  int i = 0;
  while (i < n) {
    if (i + 1 < n && us(g) > 0.3) {  // complex pair as a 2x2 block
      const double re = -ur(g), im = ur(g);
      d(i, i) = re;
      d(i, i + 1) = im;
      d(i + 1, i) = -im;
      d(i + 1, i + 1) = re;
      i += 2;
    } else {
      d(i, i) = -ur(g);
      ++i;
    }
  }
  for (;;) {
    Eigen::MatrixXd s = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return us(g); });
    const auto lu = s.fullPivLu();
    if (lu.isInvertible() && lu.rcond() > 1e-3)
      return s * d * lu.inverse();
  }
}

// ---- L1 norm closed form --------------------------------------------
// H(s) = 1/(s+1), F(s) = wk/(s+wk), G = H (1 - F). The impulse response
// g(t) = (wk e^{-wk t} - e^{-t}) / (wk - 1) starts positive, crosses
// zero once at t* = ln(wk)/(wk-1), and integrates to zero over [0,inf),
// so ||g||_1 = 2 * integral up to t*.
inline double l1_first_order(double wk) {
  if (std::fabs(wk - 1.0) < 1e-7) {  // g(t) = (1 - t) e^{-t}, t* = 1
    return 2.0 * std::exp(-1.0);
  }
  const double ts = std::log(wk) / (wk - 1.0);
  return 2.0 * (std::exp(-ts) - std::exp(-wk * ts)) / (wk - 1.0);
}

// ---- collinear nearest-centroid smoothing ---------------------------
// Centroid coordinates `pos` (sorted) along a line, query coordinate u,
// isotropic sigma: class masses are slab probabilities between the
// midpoint boundaries.
inline std::vector<double> slab_masses(const std::vector<double>& pos,
                                       double u, double sigma) {
  const int n = static_cast<int>(pos.size());
  std::vector<double> m(n, 0.0);
  double prev = -1e308;
  for (int i = 0; i < n; ++i) {
    const double next = i + 1 < n ? 0.5 * (pos[i] + pos[i + 1]) : 1e308;
    const double a = prev <= -1e307 ? 0.0 : normal_cdf((prev - u) / sigma);
    const double b = next >= 1e307 ? 1.0 : normal_cdf((next - u) / sigma);
    m[i] = b - a;
    prev = next;
  }
  return m;
}

inline int slab_argmax(const std::vector<double>& pos, double u,
                       double sigma) {
  const std::vector<double> m = slab_masses(pos, u, sigma);
  int best = 0;
  for (int i = 1; i < static_cast<int>(m.size()); ++i)
    if (m[i] > m[best]) best = i;  // ties stay at the lowest index
  return best;
}

}  // namespace oracle
