#pragma once

#include <Eigen/Dense>
#include <vector>

#include "certctrl/smoothing.hpp"
#include "certctrl/stiffness.hpp"

namespace certctrl {

// Label policy plus the stiffness interval each label stands for.
struct StiffnessTable {
  SafeSetPolicy policy;
  std::vector<StiffnessInterval> rows;

  void validate() const;
  static StiffnessTable weather_default();
  static StiffnessTable road_default();
};

StiffnessInterval label_to_stiffness(int label, const StiffnessTable& table);

// Hull of the stiffness intervals over a safe set: the interval handed
// to the controller when the certificate pins that set.
StiffnessInterval safe_set_hull(const StiffnessTable& table,
                                const std::vector<int>& safe_set);

// Nearest-centroid classifier. When the centroids are collinear the
// smoothed class masses have a closed form (the decision regions are
// slabs along the common axis), which the certification tests use as
// ground truth. `sharpness` only shapes the softmax surrogate exposed
// for gradient attacks; decisions are hard nearest-centroid with ties
// resolved to the lowest label index.
class SyntheticClassifier {
 public:
  SyntheticClassifier(std::vector<Eigen::VectorXd> centroids,
                      double sharpness);

  int operator()(const Eigen::VectorXd& x) const;
  Classifier as_fn() const;
  int num_labels() const { return static_cast<int>(centroids_.size()); }
  const std::vector<Eigen::VectorXd>& centroids() const { return centroids_; }

  // Softmax-weighted expectation of `values` (one per label) and its
  // gradient; the differentiable surrogate that attacks climb.
  double expected_value(const Eigen::VectorXd& x,
                        const std::vector<double>& values) const;
  Eigen::VectorXd expected_value_grad(const Eigen::VectorXd& x,
                                      const std::vector<double>& values) const;

  // Exact smoothed class masses under N(0, noise_std^2 I); requires
  // collinear centroids.
  bool collinear() const { return collinear_; }
  std::vector<double> smoothed_masses(const Eigen::VectorXd& x,
                                      double noise_std) const;
  // Signed coordinate of x along the common centroid axis.
  double axis_coordinate(const Eigen::VectorXd& x) const;

 private:
  std::vector<Eigen::VectorXd> centroids_;
  double sharpness_;
  bool collinear_ = false;
  Eigen::VectorXd axis_;            // unit direction of the common line
  Eigen::VectorXd base_;            // point on the line
  std::vector<double> positions_;   // centroid coordinates along axis_
};

// Monotone regressor: affine read-out of the scene smoothly clamped
// into [range_lo, range_hi]. The map stays exactly affine away from the
// clamp margins, and is strictly increasing in w . x everywhere, so the
// smoothed median at x is squash(w . x + b) in closed form.
class SyntheticRegressor {
 public:
  SyntheticRegressor(Eigen::VectorXd w, double b, double range_lo,
                     double range_hi, double margin);

  double operator()(const Eigen::VectorXd& x) const;
  Eigen::VectorXd grad(const Eigen::VectorXd& x) const;

  double squash(double t) const;
  // Exact smoothed percentile under N(0, noise_std^2 I).
  double smoothed_percentile(const Eigen::VectorXd& x, double noise_std,
                             double p) const;

  const Eigen::VectorXd& w() const { return w_; }
  double bias() const { return b_; }

 private:
  Eigen::VectorXd w_;
  double b_, lo_, hi_, margin_;
};

// Centroids evenly spaced along the normalized all-ones direction.
std::vector<Eigen::VectorXd> collinear_centroids(int num_labels, int dim,
                                                 double spacing);

}  // namespace certctrl
