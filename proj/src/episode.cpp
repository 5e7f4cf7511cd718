#include "certctrl/episode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "certctrl/adaptive.hpp"
#include "certctrl/nominal.hpp"
#include "certctrl/rng.hpp"
#include "certctrl/uncertainty.hpp"

namespace certctrl {
namespace {

// Stream ids keyed off the episode seed. Certification itself consumes
// streams 0-2 of its own config seed, so these only need to be distinct
// from one another.
constexpr std::uint64_t kSceneStream = 10;
constexpr std::uint64_t kTrueCStream = 11;
constexpr std::uint64_t kAttackStream = 12;
constexpr std::uint64_t kCertStream = 13;
constexpr std::uint64_t kBetaTruthStream = 20;
constexpr std::uint64_t kBetaSceneStream = 21;
constexpr std::uint64_t kBetaCertStream = 22;

// Knee width of the regressor's range clamp, N/rad.
constexpr double kSquashMargin = 5000.0;

// Regression episodes draw the true stiffness inside the affine part of
// the read-out so the encode map is exactly invertible.
constexpr double kRegTruthLo = 35000.0;
constexpr double kRegTruthHi = 95000.0;

Eigen::VectorXd scene_axis(int dim) {
  return Eigen::VectorXd::Ones(dim) / std::sqrt(static_cast<double>(dim));
}

}  // namespace

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::kClassification:
      return "classification";
    case Mode::kRegression:
      return "regression";
    case Mode::kNonrobustCls:
      return "nonrobust_cls";
    case Mode::kNonrobustReg:
      return "nonrobust_reg";
  }
  return "unknown";
}

void PipelineConfig::validate() const {
  vehicle.validate();
  table.validate();
  smoothing.validate();
  design.validate();
  road.validate();
  if (scene_dim < 1) throw std::invalid_argument("pipeline: scene_dim < 1");
  if (!(scene_spacing > 0.0))
    throw std::invalid_argument("pipeline: scene_spacing must be > 0");
  if (!(cluster_std >= 0.0))
    throw std::invalid_argument("pipeline: cluster_std must be >= 0");
  if (!(sharpness > 0.0))
    throw std::invalid_argument("pipeline: sharpness must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("pipeline: dt must be > 0");
  if (!(lane_half_width > 0.0))
    throw std::invalid_argument("pipeline: lane_half_width must be > 0");
  if (!(gamma > 0.0) || gamma * dt > 50.0)
    throw std::invalid_argument("pipeline: need gamma > 0, gamma*dt <= 50");
  if (!(q_scale > 0.0))
    throw std::invalid_argument("pipeline: q_scale must be > 0");
  if (!(reg_epsilon >= 0.0))
    throw std::invalid_argument("pipeline: reg_epsilon must be >= 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("pipeline: beta must be >= 0");
  if (beta_validation < 20)
    throw std::invalid_argument("pipeline: beta_validation must be >= 20");
  // The projection sets assume no curve on the road is tighter than the
  // design's r_lo.
  for (const auto& seg : road.segments) {
    if (seg.radius < design.r_lo)
      throw std::invalid_argument("pipeline: road radius below design r_lo");
  }
}

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig cfg;
  cfg.road.segments = {
      {3.0, 0.0, kStraightRadius},
      {9.0, 0.0, 220.0},
      {3.0, 0.0, kStraightRadius},
      {10.0, 0.0, 160.0},
      {5.0, 0.0, 280.0},
      {10.0, 0.0, 250.0},
  };
  return cfg;
}

PerceptionBundle PerceptionBundle::build(const PipelineConfig& cfg) {
  cfg.table.validate();
  const int num_labels = cfg.table.policy.num_labels();
  if (num_labels < 2)
    throw std::invalid_argument("perception bundle: need >= 2 labels");

  std::vector<double> row_values;
  row_values.reserve(num_labels);
  for (const auto& row : cfg.table.rows) row_values.push_back(row.nominal);

  // Affine read-out pinned to the endpoint labels: position 0 maps to
  // the first row's nominal stiffness, the last position to the last.
  const double span = cfg.scene_spacing * (num_labels - 1);
  const double slope = (row_values.back() - row_values.front()) / span;
  if (slope == 0.0)
    throw std::invalid_argument("perception bundle: degenerate read-out");

  return PerceptionBundle{
      SyntheticClassifier(
          collinear_centroids(num_labels, cfg.scene_dim, cfg.scene_spacing),
          cfg.sharpness),
      SyntheticRegressor(slope * scene_axis(cfg.scene_dim), row_values.front(),
                         kStiffnessFloor, kStiffnessCeil, kSquashMargin),
      std::move(row_values)};
}

double instability_metric(double sup_inf_norm, double lane_half_width) {
  if (!(lane_half_width > 0.0))
    throw std::invalid_argument("instability metric: lane width must be > 0");
  if (!std::isfinite(sup_inf_norm)) return 200.0;
  return std::min(200.0, sup_inf_norm / lane_half_width);
}

SimOutcome simulate_closed_loop(const VehicleParams& vp,
                                const RoadProfile& road, double true_c,
                                double v, double k_filter,
                                const NominalModel& nm,
                                const UncertaintyBounds& ub,
                                const Eigen::Matrix4d& p_lyap, double gamma,
                                double dt, const ErrorState& s0,
                                std::vector<TraceRow>* trace) {
  road.validate();
  if (!(v > 0.0)) throw std::invalid_argument("simulate: v must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("simulate: dt must be > 0");
  if (!(k_filter > 0.0))
    throw std::invalid_argument("simulate: filter gain must be > 0");

  const long steps = std::lround(road.total_time() / dt);
  const long tail_start = std::max<long>(0, steps - std::lround(1.0 / dt));

  AdaptiveState st;
  st.s_hat = s0.vec();
  ErrorState s = s0;

  SimOutcome out;
  out.sup_inf_norm = s0.inf_norm();
  double tail_sum = 0.0;
  long tail_count = 0;

  for (long i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const Eigen::Vector4d s_meas = s.vec();

    adaptation_step(st, nm, ub, p_lyap, s_meas, gamma, dt);
    predictor_step(st, nm, s_meas, dt);
    const double u_ad_applied = st.u_ad;
    const double steer = control_law(st, nm, s_meas, k_filter, 0.0, dt);

    if (trace != nullptr) {
      trace->push_back(
          {t, s, steer, u_ad_applied, st.w_hat, st.theta_hat, st.sigma_hat});
    }

    const double c_step = road.stiffness_at(t, true_c);
    const DynamicsMatrices md = build_matrices(vp, c_step, c_step, v);
    const double yaw_rate_des = desired_yaw_rate(v, road.radius_at(t));
    s = step(s, steer, md, yaw_rate_des, dt);

    const double norm = s.inf_norm();
    if (!std::isfinite(norm) || norm > kBlowUpBound) {
      out.sup_inf_norm =
          std::isfinite(norm) ? std::max(out.sup_inf_norm, norm) : kBlowUpBound;
      out.diverged = true;
      break;
    }
    out.sup_inf_norm = std::max(out.sup_inf_norm, norm);
    if (i >= tail_start) {
      tail_sum += norm;
      ++tail_count;
    }
  }
  out.final_second_mean =
      tail_count > 0 ? tail_sum / static_cast<double>(tail_count)
                     : out.sup_inf_norm;
  return out;
}

StiffnessInterval DesignCache::quantize(const StiffnessInterval& iv) const {
  constexpr double kGrid = 500.0;  // N/rad
  const double lo = std::floor(iv.lo / kGrid) * kGrid;
  const double hi = std::ceil(iv.hi / kGrid) * kGrid;
  return StiffnessInterval::centered(lo, hi);
}

DesignResult DesignCache::lookup(const VehicleParams& p,
                                 const StiffnessInterval& iv,
                                 const DesignOptions& opt) {
  // Keyed on the interval only: callers keep vehicle and options fixed
  // for the lifetime of one cache.
  const StiffnessInterval q = quantize(iv);
  const std::pair<long, long> key{std::lround(q.lo), std::lround(q.hi)};
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  const DesignResult dr = design_parameters(p, q, opt);
  std::lock_guard<std::mutex> lock(mu_);
  return cache_.emplace(key, dr).first->second;
}

double estimate_beta(const PipelineConfig& cfg, const PerceptionBundle& pb,
                     double noise_std) {
  const Eigen::VectorXd axis = scene_axis(cfg.scene_dim);
  const double slope = pb.regressor.w().dot(axis);
  SmoothingConfig sc = cfg.smoothing;
  sc.noise_std = noise_std;
  const Regressor fn = [&pb](const Eigen::VectorXd& x) {
    return pb.regressor(x);
  };

  std::vector<double> errs;
  errs.reserve(cfg.beta_validation);
  for (int j = 0; j < cfg.beta_validation; ++j) {
    SplitMix64 g = sample_rng(cfg.seed, kBetaTruthStream, j);
    const double truth =
        kRegTruthLo + (kRegTruthHi - kRegTruthLo) * g.uniform01();
    const double u = (truth - pb.regressor.bias()) / slope;
    const Eigen::VectorXd scene =
        u * axis +
        cfg.cluster_std *
            gaussian_vector(cfg.seed, kBetaSceneStream, j, cfg.scene_dim);
    sc.seed = mix_key(cfg.seed, kBetaCertStream, j);
    const CertifiedInterval ci =
        certified_interval(fn, scene, sc, /*eps=*/0.0, /*beta=*/0.0);
    errs.push_back(std::fabs(ci.h_star - truth));
  }
  std::sort(errs.begin(), errs.end());
  const int n = static_cast<int>(errs.size());
  const int idx =
      std::min(n - 1, static_cast<int>(std::ceil(0.95 * n)) - 1);
  return errs[std::max(0, idx)];
}

Eigen::VectorXd make_label_scene(const PipelineConfig& cfg,
                                 const PerceptionBundle& pb, int label,
                                 std::uint64_t episode_seed) {
  if (label < 0 || label >= pb.classifier.num_labels())
    throw std::invalid_argument("scene: label out of range");
  return pb.classifier.centroids()[label] +
         cfg.cluster_std *
             gaussian_vector(episode_seed, kSceneStream, 0, cfg.scene_dim);
}

std::uint64_t certification_seed(std::uint64_t episode_seed) {
  return mix_key(episode_seed, kCertStream, 0);
}

EpisodeResult run_episode(const PipelineConfig& cfg,
                          const PerceptionBundle& pb, Mode mode,
                          const std::optional<AttackConfig>& attack,
                          int true_label, double beta,
                          std::uint64_t episode_seed, DesignCache* cache,
                          std::vector<TraceRow>* trace) {
  const int num_labels = pb.classifier.num_labels();
  if (true_label < 0 || true_label >= num_labels)
    throw std::invalid_argument("episode: true_label out of range");

  EpisodeResult r;
  r.mode = mode;
  r.true_label = true_label;
  r.beta_used = beta;

  const bool reg_mode =
      mode == Mode::kRegression || mode == Mode::kNonrobustReg;
  const Eigen::VectorXd axis = scene_axis(cfg.scene_dim);

  Eigen::VectorXd scene;
  if (!reg_mode) {
    r.true_c = pb.row_values[true_label];
    scene = make_label_scene(cfg, pb, true_label, episode_seed);
  } else {
    SplitMix64 g = sample_rng(episode_seed, kTrueCStream, 0);
    r.true_c = kRegTruthLo + (kRegTruthHi - kRegTruthLo) * g.uniform01();
    const double slope = pb.regressor.w().dot(axis);
    const double u = (r.true_c - pb.regressor.bias()) / slope;
    scene = u * axis +
            cfg.cluster_std *
                gaussian_vector(episode_seed, kSceneStream, 0, cfg.scene_dim);
    r.true_label = pb.classifier(scene);  // bookkeeping only
  }

  if (attack.has_value()) {
    AttackConfig ac = *attack;
    ac.seed = mix_key(episode_seed, kAttackStream, 0);
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
    if (reg_mode) {
      value = [&pb](const Eigen::VectorXd& x) { return pb.regressor(x); };
      gradient = [&pb](const Eigen::VectorXd& x) { return pb.regressor.grad(x); };
    } else {
      value = [&pb](const Eigen::VectorXd& x) {
        return pb.classifier.expected_value(x, pb.row_values);
      };
      gradient = [&pb](const Eigen::VectorXd& x) {
        return pb.classifier.expected_value_grad(x, pb.row_values);
      };
    }
    const AttackResult ar = pgd_attack(value, gradient, scene, ac);
    scene += ar.delta;
    r.attack_norm = ar.delta.norm();
  }

  SmoothingConfig sc = cfg.smoothing;
  sc.seed = certification_seed(episode_seed);

  double lo = kStiffnessFloor;
  double hi = kStiffnessCeil;
  switch (mode) {
    case Mode::kClassification: {
      const CertificateOutcome cert =
          certify_safe_set(pb.classifier.as_fn(), scene, cfg.table.policy, sc);
      r.predicted_label = cert.predicted_label;
      r.abstained = cert.abstain;
      r.certified_radius = cert.radius;
      if (!cert.abstain) {
        const StiffnessInterval h = safe_set_hull(cfg.table, cert.safe_set);
        lo = h.lo;
        hi = h.hi;
      }
      break;
    }
    case Mode::kNonrobustCls: {
      r.predicted_label = pb.classifier(scene);
      r.abstained = false;
      const StiffnessInterval row =
          label_to_stiffness(r.predicted_label, cfg.table);
      lo = row.lo;
      hi = row.hi;
      break;
    }
    case Mode::kRegression: {
      const double eps_cert =
          attack.has_value() ? attack->epsilon : cfg.reg_epsilon;
      const Regressor fn = [&pb](const Eigen::VectorXd& x) {
        return pb.regressor(x);
      };
      try {
        const CertifiedInterval ci =
            certified_interval(fn, scene, sc, eps_cert, beta);
        r.reg_prediction = ci.h_star;
        lo = std::max(ci.lower, kStiffnessFloor);
        hi = std::min(ci.upper, kStiffnessCeil);
      } catch (const std::runtime_error&) {
        // Sample budget cannot pin the shifted percentiles at this
        // epsilon: fall back to the full physical range.
        r.abstained = true;
      }
      break;
    }
    case Mode::kNonrobustReg: {
      const double y = pb.regressor(scene);
      r.reg_prediction = y;
      lo = std::max(y - beta, kStiffnessFloor);
      hi = std::min(y + beta, kStiffnessCeil);
      break;
    }
  }

  DesignCache local_cache;
  DesignCache* dc = cache != nullptr ? cache : &local_cache;
  const StiffnessInterval used =
      dc->quantize(StiffnessInterval::centered(lo, hi));
  r.interval_lo = used.lo;
  r.interval_hi = used.hi;
  r.covered = used.lo <= r.true_c && r.true_c <= used.hi;

  const DesignResult dr = dc->lookup(cfg.vehicle, used, cfg.design);
  r.design_feasible = dr.feasible;
  r.v_commanded = dr.v_star;
  r.k_filter = dr.k_star;
  if (!dr.feasible || dr.v_star <= 0.0) return r;  // vehicle stops

  const NominalModel nm =
      build_nominal(cfg.vehicle, used.nominal, dr.v_star, cfg.design.poles);
  const UncertaintyBounds ub =
      uncertainty_bounds(cfg.vehicle, used, dr.v_star, cfg.design.r_lo,
                         cfg.design.rdot_bound, nm.k_m);
  const Eigen::Matrix4d p_lyap =
      lyapunov_solve(nm.a_m, cfg.q_scale * Eigen::Matrix4d::Identity());

  const SimOutcome so =
      simulate_closed_loop(cfg.vehicle, cfg.road, r.true_c, dr.v_star,
                           dr.k_star, nm, ub, p_lyap, cfg.gamma, cfg.dt,
                           ErrorState{}, trace);
  r.sup_err = so.sup_inf_norm;
  r.diverged = so.diverged;
  r.final_second_mean = so.final_second_mean;
  r.instability = instability_metric(so.sup_inf_norm, cfg.lane_half_width);
  return r;
}

}  // namespace certctrl
