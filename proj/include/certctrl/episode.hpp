#pragma once

#include <Eigen/Dense>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "certctrl/attack.hpp"
#include "certctrl/design.hpp"
#include "certctrl/median_smoothing.hpp"
#include "certctrl/perception.hpp"
#include "certctrl/smoothing.hpp"
#include "certctrl/vehicle.hpp"

namespace certctrl {

enum class Mode {
  kClassification,  // certified safe-set classification
  kRegression,      // certified median regression
  kNonrobustCls,    // raw classifier, own-row interval
  kNonrobustReg,    // raw regressor, +/- beta interval
};

const char* mode_name(Mode m);

struct PipelineConfig {
  VehicleParams vehicle;
  StiffnessTable table = StiffnessTable::weather_default();
  SmoothingConfig smoothing;
  DesignOptions design;
  RoadProfile road;  // per-episode true stiffness fills stiffness == 0

  int scene_dim = 16;
  double scene_spacing = 4.0;  // centroid separation along the axis
  double cluster_std = 0.02;
  double sharpness = 1.0;

  double dt = 1e-3;
  double lane_half_width = 1.75;
  double gamma = 1e4;
  double q_scale = 1.0;  // Lyapunov right-hand side Q = q_scale * I

  double reg_epsilon = 1.0;  // certification budget without an attack
  double beta = 0.0;         // 0: estimate from a validation split
  int beta_validation = 48;

  std::uint64_t seed = 0;

  void validate() const;
  static PipelineConfig defaults();
};

// Perception models assembled from the scene geometry: collinear label
// centroids (stiffness decreasing along the axis) and the affine
// stiffness read-out matching the endpoint labels.
struct PerceptionBundle {
  SyntheticClassifier classifier;
  SyntheticRegressor regressor;
  std::vector<double> row_values;  // nominal stiffness per label

  static PerceptionBundle build(const PipelineConfig& cfg);
};

struct EpisodeResult {
  Mode mode = Mode::kClassification;
  int true_label = -1;
  double true_c = 0.0;
  int predicted_label = -1;  // classification modes only
  double reg_prediction = 0.0;
  bool abstained = false;
  double certified_radius = 0.0;
  double attack_norm = 0.0;
  double interval_lo = 0.0;
  double interval_hi = 0.0;
  bool covered = false;
  bool design_feasible = false;
  double v_commanded = 0.0;
  double k_filter = 0.0;
  double instability = 0.0;
  bool diverged = false;
  double sup_err = 0.0;
  double final_second_mean = 0.0;
  double beta_used = 0.0;
};

// min(200, sup_t ||s||_inf / lane_half_width).
double instability_metric(double sup_inf_norm, double lane_half_width);

struct TraceRow {
  double t = 0.0;
  ErrorState s;
  double steer = 0.0;
  double u_ad = 0.0;
  double w_hat = 0.0;
  Eigen::Vector4d theta_hat = Eigen::Vector4d::Zero();
  double sigma_hat = 0.0;
};

struct SimOutcome {
  double sup_inf_norm = 0.0;
  bool diverged = false;
  double final_second_mean = 0.0;  // mean ||s||_inf over the last second
};

// Runs the adaptive lane-keeping loop over the road profile at constant
// commanded velocity. Per step: adaptation from the predictor error,
// predictor advance, filtered control update, then the true plant (true
// stiffness from the road, falling back to true_c). Stops early and
// flags divergence when the state passes the blow-up bound.
SimOutcome simulate_closed_loop(const VehicleParams& vp,
                                const RoadProfile& road, double true_c,
                                double v, double k_filter,
                                const NominalModel& nm,
                                const UncertaintyBounds& ub,
                                const Eigen::Matrix4d& p_lyap, double gamma,
                                double dt, const ErrorState& s0,
                                std::vector<TraceRow>* trace = nullptr);

// Memoizes design_parameters on the (quantized) interval. Intervals are
// widened outward to a 500 N/rad grid before lookup, which keeps the
// cache small and only makes the design more conservative.
class DesignCache {
 public:
  StiffnessInterval quantize(const StiffnessInterval& iv) const;
  DesignResult lookup(const VehicleParams& p, const StiffnessInterval& iv,
                      const DesignOptions& opt);

 private:
  std::mutex mu_;
  std::map<std::pair<long, long>, DesignResult> cache_;
};

// 95th percentile of |empirical smoothed median - true stiffness| over
// a pinned validation split; the regression interval half-width floor.
double estimate_beta(const PipelineConfig& cfg, const PerceptionBundle& pb,
                     double noise_std);

// Scene draw for a labeled episode: the label's centroid plus isotropic
// cluster noise keyed off the episode seed. Shared by run_episode and
// the standalone certification tool.
Eigen::VectorXd make_label_scene(const PipelineConfig& cfg,
                                 const PerceptionBundle& pb, int label,
                                 std::uint64_t episode_seed);

// Seed handed to the certification layer for a given episode.
std::uint64_t certification_seed(std::uint64_t episode_seed);

// One perception -> certification -> design -> simulation episode.
// `attack` empty means benign. beta: pass the (possibly estimated)
// half-width floor for the regression modes.
EpisodeResult run_episode(const PipelineConfig& cfg,
                          const PerceptionBundle& pb, Mode mode,
                          const std::optional<AttackConfig>& attack,
                          int true_label, double beta,
                          std::uint64_t episode_seed, DesignCache* cache,
                          std::vector<TraceRow>* trace = nullptr);

}  // namespace certctrl
