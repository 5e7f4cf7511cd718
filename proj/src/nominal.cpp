#include "certctrl/nominal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace certctrl {
namespace {

bool is_hurwitz(const Eigen::Matrix4d& a) {
  const Eigen::EigenSolver<Eigen::Matrix4d> es(a);
  for (int i = 0; i < 4; ++i) {
    if (es.eigenvalues()[i].real() >= 0.0) return false;
  }
  return true;
}

// Real coefficients of prod_i (s - p_i), constant term first.
std::vector<double> char_poly(const std::vector<std::complex<double>>& poles) {
  std::vector<std::complex<double>> coef{1.0};
  for (const auto& p : poles) {
    std::vector<std::complex<double>> next(coef.size() + 1, 0.0);
    for (std::size_t i = 0; i < coef.size(); ++i) {
      next[i + 1] += coef[i];
      next[i] -= p * coef[i];
    }
    coef = std::move(next);
  }
  std::vector<double> real_coef(coef.size());
  for (std::size_t i = 0; i < coef.size(); ++i) {
    if (std::fabs(coef[i].imag()) > 1e-9 * (1.0 + std::abs(coef[i])))
      throw std::invalid_argument(
          "build_nominal: poles must be closed under conjugation");
    real_coef[i] = coef[i].real();
  }
  return real_coef;
}

}  // namespace

NominalModel build_nominal(const VehicleParams& p, double c_hat, double v,
                           const std::vector<std::complex<double>>& poles) {
  if (poles.size() != 4)
    throw std::invalid_argument("build_nominal: exactly 4 poles required");
  for (const auto& pole : poles) {
    if (!(pole.real() < 0.0))
      throw std::invalid_argument("build_nominal: poles must be stable");
  }

  const DynamicsMatrices md = build_matrices(p, c_hat, c_hat, v);
  const std::vector<double> coef = char_poly(poles);  // c0..c3, then 1

  Eigen::Matrix4d ctrb;
  Eigen::Vector4d col = md.b;
  for (int i = 0; i < 4; ++i) {
    ctrb.col(i) = col;
    col = md.A * col;
  }
  const Eigen::JacobiSVD<Eigen::Matrix4d> svd(ctrb);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (!(smin > 1e-12 * smax))
    throw std::invalid_argument("build_nominal: (A, b) is uncontrollable");

  // phi(A) by Horner, then Ackermann: k = e4' Co^{-1} phi(A).
  Eigen::Matrix4d phi = md.A + coef[3] * Eigen::Matrix4d::Identity();
  phi = phi * md.A + coef[2] * Eigen::Matrix4d::Identity();
  phi = phi * md.A + coef[1] * Eigen::Matrix4d::Identity();
  phi = phi * md.A + coef[0] * Eigen::Matrix4d::Identity();

  const Eigen::Vector4d e4 = Eigen::Vector4d::Unit(3);
  const Eigen::Vector4d y = ctrb.transpose().fullPivLu().solve(e4);
  const Eigen::RowVector4d k_m = (phi.transpose() * y).transpose();

  NominalModel nm;
  nm.a_m = md.A - md.b * k_m;
  nm.b_m = md.b;
  nm.c = Eigen::Vector4d::Unit(0);
  nm.k_m = k_m;
  nm.c_hat = c_hat;
  nm.v = v;

  if (!is_hurwitz(nm.a_m))
    throw std::runtime_error("build_nominal: placed model is not Hurwitz");

  // Placement sanity: achieved spectrum must match the targets.
  Eigen::EigenSolver<Eigen::Matrix4d> es(nm.a_m);
  std::vector<std::complex<double>> want(poles), got(4);
  for (int i = 0; i < 4; ++i) got[i] = es.eigenvalues()[i];
  auto by_parts = [](const std::complex<double>& a,
                     const std::complex<double>& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  };
  std::sort(want.begin(), want.end(), by_parts);
  std::sort(got.begin(), got.end(), by_parts);
  double scale = 0.0;
  for (const auto& w : want) scale = std::max(scale, std::abs(w));
  for (int i = 0; i < 4; ++i) {
    if (std::abs(want[i] - got[i]) > 1e-6 * std::max(1.0, scale))
      throw std::runtime_error("build_nominal: pole placement failed");
  }

  const double dc = nm.c.dot(nm.a_m.fullPivLu().solve(nm.b_m));
  if (std::fabs(dc) < 1e-14)
    throw std::runtime_error("build_nominal: output DC gain vanishes");
  nm.k_g = -1.0 / dc;
  return nm;
}

Eigen::Matrix4d lyapunov_solve(const Eigen::Matrix4d& a_m,
                               const Eigen::Matrix4d& q) {
  if ((q - q.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, q.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("lyapunov_solve: Q must be symmetric");
  if (!is_hurwitz(a_m))
    throw std::invalid_argument("lyapunov_solve: A must be Hurwitz");

  // Vectorize: (I (x) A + A (x) I) vec(P) = vec(-Q).
  Eigen::Matrix<double, 16, 16> k = Eigen::Matrix<double, 16, 16>::Zero();
  for (int j = 0; j < 4; ++j) {
    k.block<4, 4>(4 * j, 4 * j) += a_m;
    for (int i = 0; i < 4; ++i) {
      for (int r = 0; r < 4; ++r) k(4 * j + r, 4 * i + r) += a_m(j, i);
    }
  }
  const Eigen::Matrix<double, 16, 1> rhs =
      -Eigen::Map<const Eigen::Matrix<double, 16, 1>>(q.data());
  const auto lu = k.fullPivLu();
  Eigen::Matrix<double, 16, 1> vec_p = lu.solve(rhs);
  // One round of iterative refinement keeps the residual near roundoff.
  vec_p += lu.solve(rhs - k * vec_p);

  Eigen::Matrix4d p = Eigen::Map<Eigen::Matrix4d>(vec_p.data());
  p = 0.5 * (p + p.transpose()).eval();

  const double residual = (a_m * p + p * a_m.transpose() + q).norm();
  if (residual > 1e-10 * q.norm())
    throw std::runtime_error("lyapunov_solve: residual too large");
  const Eigen::LLT<Eigen::Matrix4d> llt(p);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("lyapunov_solve: P is not positive definite");
  return p;
}

}  // namespace certctrl
