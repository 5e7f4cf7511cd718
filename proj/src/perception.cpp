#include "certctrl/perception.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "certctrl/normal.hpp"

namespace certctrl {

void StiffnessTable::validate() const {
  policy.validate();
  if (rows.size() != policy.labels.size())
    throw std::invalid_argument("table: one stiffness row per label");
  for (const auto& r : rows) r.validate();
  // Safe sets must only contain labels that are at most as grippy:
  // standing in for a slipperier surface is the conservative direction.
  for (int l = 0; l < policy.num_labels(); ++l) {
    for (int m : policy.safe_sets[l]) {
      if (rows[m].hi > rows[l].hi)
        throw std::invalid_argument(
            "table: safe set member exceeds own stiffness bound");
    }
  }
}

StiffnessTable StiffnessTable::weather_default() {
  StiffnessTable t;
  t.policy = SafeSetPolicy::weather_default();
  t.rows = {
      StiffnessInterval::centered(80000.0, 120000.0),  // sunny
      StiffnessInterval::centered(60000.0, 80000.0),   // light rain
      StiffnessInterval::centered(40000.0, 60000.0),   // heavy rain
      StiffnessInterval::centered(20000.0, 40000.0),   // snow
  };
  t.validate();
  return t;
}

StiffnessTable StiffnessTable::road_default() {
  StiffnessTable t;
  t.policy = SafeSetPolicy::road_default();
  t.rows = {
      StiffnessInterval::centered(40000.0, 60000.0),  // asphalt
      StiffnessInterval::centered(40000.0, 60000.0),  // cobblestone
      StiffnessInterval::centered(30000.0, 45000.0),  // sand
  };
  t.validate();
  return t;
}

StiffnessInterval label_to_stiffness(int label, const StiffnessTable& table) {
  if (label < 0 || label >= table.policy.num_labels())
    throw std::invalid_argument("label_to_stiffness: label out of range");
  return table.rows[label];
}

StiffnessInterval safe_set_hull(const StiffnessTable& table,
                                const std::vector<int>& safe_set) {
  if (safe_set.empty())
    throw std::invalid_argument("safe_set_hull: empty safe set");
  double lo = 1e300, hi = -1e300;
  for (int l : safe_set) {
    const StiffnessInterval& r = label_to_stiffness(l, table);
    lo = std::min(lo, r.lo);
    hi = std::max(hi, r.hi);
  }
  return StiffnessInterval::centered(lo, hi);
}

SyntheticClassifier::SyntheticClassifier(
    std::vector<Eigen::VectorXd> centroids, double sharpness)
    : centroids_(std::move(centroids)), sharpness_(sharpness) {
  if (centroids_.size() < 2)
    throw std::invalid_argument("classifier: need at least two centroids");
  if (!(sharpness_ > 0.0))
    throw std::invalid_argument("classifier: sharpness must be positive");
  const auto dim = centroids_.front().size();
  for (const auto& c : centroids_) {
    if (c.size() != dim)
      throw std::invalid_argument("classifier: centroid dims differ");
  }

  base_ = centroids_.front();
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(dim);
  for (const auto& c : centroids_) {
    dir = c - base_;
    if (dir.norm() > 1e-12) break;
  }
  collinear_ = dir.norm() > 1e-12;
  if (collinear_) {
    axis_ = dir.normalized();
    positions_.resize(centroids_.size());
    for (std::size_t i = 0; i < centroids_.size(); ++i) {
      const Eigen::VectorXd rel = centroids_[i] - base_;
      positions_[i] = axis_.dot(rel);
      if ((rel - positions_[i] * axis_).norm() > 1e-9) {
        collinear_ = false;
        break;
      }
    }
  }
}

int SyntheticClassifier::operator()(const Eigen::VectorXd& x) const {
  int best = 0;
  double best_d2 = (x - centroids_[0]).squaredNorm();
  for (int l = 1; l < num_labels(); ++l) {
    const double d2 = (x - centroids_[l]).squaredNorm();
    if (d2 < best_d2) {  // strict: ties stay on the lowest index
      best_d2 = d2;
      best = l;
    }
  }
  return best;
}

Classifier SyntheticClassifier::as_fn() const {
  return [self = *this](const Eigen::VectorXd& x) { return self(x); };
}

double SyntheticClassifier::expected_value(
    const Eigen::VectorXd& x, const std::vector<double>& values) const {
  if (static_cast<int>(values.size()) != num_labels())
    throw std::invalid_argument("expected_value: one value per label");
  // Softmax over -sharpness * squared distance, max-shifted.
  std::vector<double> score(values.size());
  double top = -1e300;
  for (int l = 0; l < num_labels(); ++l) {
    score[l] = -sharpness_ * (x - centroids_[l]).squaredNorm();
    top = std::max(top, score[l]);
  }
  double z = 0.0, acc = 0.0;
  for (int l = 0; l < num_labels(); ++l) {
    const double e = std::exp(score[l] - top);
    z += e;
    acc += e * values[l];
  }
  return acc / z;
}

Eigen::VectorXd SyntheticClassifier::expected_value_grad(
    const Eigen::VectorXd& x, const std::vector<double>& values) const {
  if (static_cast<int>(values.size()) != num_labels())
    throw std::invalid_argument("expected_value_grad: one value per label");
  std::vector<double> score(values.size());
  double top = -1e300;
  for (int l = 0; l < num_labels(); ++l) {
    score[l] = -sharpness_ * (x - centroids_[l]).squaredNorm();
    top = std::max(top, score[l]);
  }
  std::vector<double> prob(values.size());
  double z = 0.0;
  for (int l = 0; l < num_labels(); ++l) {
    prob[l] = std::exp(score[l] - top);
    z += prob[l];
  }
  double mean_v = 0.0;
  for (int l = 0; l < num_labels(); ++l) {
    prob[l] /= z;
    mean_v += prob[l] * values[l];
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
  for (int l = 0; l < num_labels(); ++l) {
    const Eigen::VectorXd score_grad = -2.0 * sharpness_ * (x - centroids_[l]);
    g += prob[l] * (values[l] - mean_v) * score_grad;
  }
  return g;
}

double SyntheticClassifier::axis_coordinate(const Eigen::VectorXd& x) const {
  if (!collinear_)
    throw std::logic_error("axis_coordinate: centroids are not collinear");
  return axis_.dot(x - base_);
}

std::vector<double> SyntheticClassifier::smoothed_masses(
    const Eigen::VectorXd& x, double noise_std) const {
  if (!collinear_)
    throw std::logic_error("smoothed_masses: centroids are not collinear");
  if (!(noise_std > 0.0))
    throw std::invalid_argument("smoothed_masses: noise_std must be > 0");

  // Along the axis the decision regions are Voronoi cells of the
  // projected centroid positions; the isotropic noise projects to a
  // 1-D Gaussian, so each mass is a difference of normal CDFs.
  std::vector<int> order(centroids_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return positions_[a] < positions_[b];
  });

  const double u = axis_coordinate(x);
  std::vector<double> mass(centroids_.size(), 0.0);
  double lo = -1e300;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double hi =
        (i + 1 < order.size())
            ? 0.5 * (positions_[order[i]] + positions_[order[i + 1]])
            : 1e300;
    const double phi_hi =
        (hi > 1e299) ? 1.0 : normal_cdf((hi - u) / noise_std);
    const double phi_lo =
        (lo < -1e299) ? 0.0 : normal_cdf((lo - u) / noise_std);
    mass[order[i]] = phi_hi - phi_lo;
    lo = hi;
  }
  return mass;
}

SyntheticRegressor::SyntheticRegressor(Eigen::VectorXd w, double b,
                                       double range_lo, double range_hi,
                                       double margin)
    : w_(std::move(w)), b_(b), lo_(range_lo), hi_(range_hi), margin_(margin) {
  if (w_.norm() <= 0.0)
    throw std::invalid_argument("regressor: weight must be nonzero");
  if (!(range_hi > range_lo))
    throw std::invalid_argument("regressor: empty output range");
  if (!(margin > 0.0) || !(2.0 * margin < range_hi - range_lo))
    throw std::invalid_argument("regressor: bad clamp margin");
}

double SyntheticRegressor::squash(double t) const {
  const double lo_knee = lo_ + margin_;
  const double hi_knee = hi_ - margin_;
  if (t < lo_knee) return lo_ + margin_ * std::exp((t - lo_knee) / margin_);
  if (t > hi_knee) return hi_ - margin_ * std::exp(-(t - hi_knee) / margin_);
  return t;
}

double SyntheticRegressor::operator()(const Eigen::VectorXd& x) const {
  return squash(w_.dot(x) + b_);
}

Eigen::VectorXd SyntheticRegressor::grad(const Eigen::VectorXd& x) const {
  const double t = w_.dot(x) + b_;
  const double lo_knee = lo_ + margin_;
  const double hi_knee = hi_ - margin_;
  double slope = 1.0;
  if (t < lo_knee) slope = std::exp((t - lo_knee) / margin_);
  if (t > hi_knee) slope = std::exp(-(t - hi_knee) / margin_);
  return slope * w_;
}

double SyntheticRegressor::smoothed_percentile(const Eigen::VectorXd& x,
                                               double noise_std,
                                               double p) const {
  if (!(noise_std > 0.0))
    throw std::invalid_argument("smoothed_percentile: noise_std must be > 0");
  // w . (x + noise) is Gaussian and squash is strictly increasing, so
  // percentiles commute with the read-out.
  const double t = w_.dot(x) + b_;
  return squash(t + inverse_normal_cdf(p) * noise_std * w_.norm());
}

std::vector<Eigen::VectorXd> collinear_centroids(int num_labels, int dim,
                                                 double spacing) {
  if (num_labels < 2 || dim < 1 || !(spacing > 0.0))
    throw std::invalid_argument("collinear_centroids: bad arguments");
  const Eigen::VectorXd axis =
      Eigen::VectorXd::Ones(dim) / std::sqrt(static_cast<double>(dim));
  std::vector<Eigen::VectorXd> cs(num_labels);
  for (int l = 0; l < num_labels; ++l) cs[l] = spacing * l * axis;
  return cs;
}

}  // namespace certctrl
