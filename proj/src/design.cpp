#include "certctrl/design.hpp"

#include <cmath>
#include <stdexcept>

namespace certctrl {
namespace {

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m) {
  // Scaling and squaring with a Taylor series; ample for the small,
  // well-scaled systems handled here.
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  const Eigen::MatrixXd a = m * scale;
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = (term * a) / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

double spectral_abscissa(const Eigen::MatrixXd& a) {
  const Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  double worst = -1e300;
  for (int i = 0; i < a.rows(); ++i)
    worst = std::max(worst, es.eigenvalues()[i].real());
  return worst;
}

// Integral of |y| over one cell assuming y is linear between samples.
double cell_abs_area(double y0, double y1, double h) {
  if (y0 * y1 >= 0.0) return 0.5 * (std::fabs(y0) + std::fabs(y1)) * h;
  return 0.5 * h * (y0 * y0 + y1 * y1) / (std::fabs(y0) + std::fabs(y1));
}

}  // namespace

double l1_norm_filtered(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                        const Eigen::VectorXd& c, double wk) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n || b.size() != n || c.size() != n)
    throw std::invalid_argument("l1_norm_filtered: dimension mismatch");
  if (wk < 0.0)
    throw std::invalid_argument("l1_norm_filtered: wk must be >= 0");
  if (spectral_abscissa(a) >= 0.0)
    throw std::invalid_argument("l1_norm_filtered: A must be Hurwitz");

  // Augment with the filter state: y = c'x - z, z' = wk (c'x - z).
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = a;
  aug.bottomLeftCorner(1, n) = wk * c.transpose();
  aug(n, n) = -wk;
  Eigen::VectorXd x(n + 1);
  x.head(n) = b;
  x[n] = 0.0;

  const Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  double rate = wk;
  for (int i = 0; i < n; ++i) rate = std::max(rate, std::abs(es.eigenvalues()[i]));
  rate = std::max(rate, 1e-3);
  const double h = 0.05 / rate;
  const Eigen::MatrixXd step = matrix_exponential(aug * h);

  const double x0_norm = std::max(1.0, x.norm());
  auto output = [&](const Eigen::VectorXd& v) {
    return c.dot(v.head(n)) - v[n];
  };

  // Simpson over sample pairs when the sign is constant, linear-crossing
  // areas otherwise; exact state propagation via the exponential.
  double total = 0.0;
  double y0 = output(x);
  constexpr long kMaxSteps = 20000000;
  for (long i = 0; i < kMaxSteps; i += 2) {
    const Eigen::VectorXd x1 = step * x;
    const Eigen::VectorXd x2 = step * x1;
    const double y1 = output(x1);
    const double y2 = output(x2);
    if ((y0 >= 0.0 && y1 >= 0.0 && y2 >= 0.0) ||
        (y0 <= 0.0 && y1 <= 0.0 && y2 <= 0.0)) {
      total += (h / 3.0) * (std::fabs(y0) + 4.0 * std::fabs(y1) +
                            std::fabs(y2));
    } else {
      total += cell_abs_area(y0, y1, h) + cell_abs_area(y1, y2, h);
    }
    x = x2;
    y0 = y2;
    if (x.norm() < 1e-9 * x0_norm) return total;
  }
  throw std::runtime_error("l1_norm_filtered: impulse response did not decay");
}

double l1_norm_g(const NominalModel& nm, double k, double w) {
  if (!(w > 0.0)) throw std::invalid_argument("l1_norm_g: w must be positive");
  if (k < 0.0) throw std::invalid_argument("l1_norm_g: k must be >= 0");
  return l1_norm_filtered(nm.a_m, nm.b_m, nm.c, w * k);
}

void DesignOptions::validate() const {
  if (!(v_min > 0.0) || !(v_max >= v_min))
    throw std::invalid_argument("design: need 0 < v_min <= v_max");
  if (!(lambda_gp > 0.0))
    throw std::invalid_argument("design: lambda_gp must be positive");
  if (!(k_bar > 0.0))
    throw std::invalid_argument("design: k_bar must be positive");
  if (poles.size() != 4)
    throw std::invalid_argument("design: exactly 4 pole targets required");
  if (!(r_lo > 0.0) || rdot_bound < 0.0)
    throw std::invalid_argument("design: bad road geometry limits");
  if (!(v_tol > 0.0) || !(k_rel_tol > 0.0))
    throw std::invalid_argument("design: tolerances must be positive");
}

namespace {

struct GainSearch {
  bool ok = false;
  double k = 0.0;
  double norm = 0.0;
};

// Smallest filter gain k <= k_bar with ||G||_1 <= lambda_gp at the
// endpoints and midpoint of Omega. ||G||_1 decreases in k, so bisection
// applies; k_bar infeasible means the velocity is infeasible.
GainSearch smallest_feasible_k(const NominalModel& nm, const Interval& omega,
                               double lambda_gp, double k_bar,
                               double k_rel_tol) {
  const double ws[3] = {omega.lo, omega.mid(), omega.hi};
  auto worst_norm = [&](double k) {
    double worst = 0.0;
    for (double w : ws) worst = std::max(worst, l1_norm_g(nm, k, w));
    return worst;
  };

  const double top = worst_norm(k_bar);
  if (top > lambda_gp) return GainSearch{false, 0.0, top};

  double lo = 0.0, hi = k_bar;  // lo infeasible or zero, hi feasible
  double hi_norm = top;
  while (hi - lo > k_rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0) break;
    const double nmid = worst_norm(mid);
    if (nmid <= lambda_gp) {
      hi = mid;
      hi_norm = nmid;
    } else {
      lo = mid;
    }
  }
  return GainSearch{true, hi, hi_norm};
}

}  // namespace

DesignResult design_parameters(const VehicleParams& p,
                               const StiffnessInterval& interval,
                               const DesignOptions& opt) {
  p.validate();
  interval.validate();
  opt.validate();

  struct Probe {
    bool ok = false;
    GainSearch gain;
  };
  auto probe = [&](double v) -> Probe {
    try {
      const NominalModel nm = build_nominal(p, interval.nominal, v, opt.poles);
      const UncertaintyBounds ub = uncertainty_bounds(
          p, interval, v, opt.r_lo, opt.rdot_bound, nm.k_m);
      // Stability of the adaptive loop needs lambda_gp strictly below the
      // reciprocal of the worst theta L1 size at this velocity.
      const double l = ub.theta_l1_max();
      if (l > 0.0 && !(opt.lambda_gp < 1.0 / l)) return {};
      const GainSearch gs = smallest_feasible_k(nm, ub.omega, opt.lambda_gp,
                                                opt.k_bar, opt.k_rel_tol);
      return Probe{gs.ok, gs};
    } catch (const std::exception&) {
      return {};  // numerically degenerate velocity: treat as infeasible
    }
  };

  const Probe at_max = probe(opt.v_max);
  if (at_max.ok) {
    return DesignResult{opt.v_max, at_max.gain.k, at_max.gain.norm, true};
  }

  // The theta bounds blow up both as V -> 0 (1/V terms) and as V grows
  // (V^2 curvature term), so the feasible velocities form an interior
  // interval. Scan down from v_max for the highest feasible grid point
  // to bracket the upper edge, then bisect the bracket.
  constexpr int kScanPoints = 64;
  const double span = opt.v_max - opt.v_min;
  double lo = 0.0, hi = 0.0;
  Probe best;
  for (int i = 1; i <= kScanPoints; ++i) {
    const double v =
        opt.v_max - span * static_cast<double>(i) / kScanPoints;
    const Probe pr = probe(v);
    if (pr.ok) {
      lo = v;
      hi = opt.v_max - span * static_cast<double>(i - 1) / kScanPoints;
      best = pr;
      break;
    }
  }
  if (!best.ok) {
    return DesignResult{0.0, 0.0, 0.0, false};  // degenerate: stop
  }

  while (hi - lo > opt.v_tol) {
    const double mid = 0.5 * (lo + hi);
    const Probe pm = probe(mid);
    if (pm.ok) {
      lo = mid;
      best = pm;
    } else {
      hi = mid;
    }
  }
  return DesignResult{lo, best.gain.k, best.gain.norm, true};
}

}  // namespace certctrl
