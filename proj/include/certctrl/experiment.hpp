#pragma once

#include <map>
#include <string>
#include <vector>

#include "certctrl/episode.hpp"

namespace certctrl {

enum class GridAttack { kNone, kStability, kEfficiency };

const char* grid_attack_name(GridAttack a);

// Full-factorial sweep: mode x noise level x attack, `trials` episodes
// per cell. Episode seeds are derived from (config seed, cell, trial),
// so results are identical for any worker count.
struct GridSpec {
  std::vector<Mode> modes = {Mode::kClassification, Mode::kRegression,
                             Mode::kNonrobustCls, Mode::kNonrobustReg};
  std::vector<double> noise_stds = {0.25, 0.5, 1.0};
  std::vector<GridAttack> attacks = {GridAttack::kStability,
                                     GridAttack::kEfficiency};
  int trials = 20;
  double attack_epsilon = 12.0;
  int attack_steps = 60;
  int workers = 1;
  // Evaluation population: share of episodes per table row (same order
  // as the stiffness table). The default emphasizes the low-friction
  // regime that a stiffness-inflating attack endangers; grippy rows stay
  // present so efficiency attacks have speed to destroy.
  std::vector<double> label_weights = {0.10, 0.15, 0.15, 0.60};

  void validate() const;
};

// Deterministic apportionment of `trials` episodes to labels: at each
// slot the label furthest behind its target share (weight * slots so
// far) is emitted. Every prefix of the sequence is as balanced as the
// weights allow, and the full sequence hits the largest-remainder
// counts exactly.
std::vector<int> label_sequence(int trials, const std::vector<double>& weights);

struct EpisodeRecord {
  int cell_index = 0;
  int trial = 0;
  Mode mode = Mode::kClassification;
  double noise_std = 0.0;
  GridAttack attack = GridAttack::kNone;
  EpisodeResult result;
  std::string error;  // nonempty: the episode threw and result is void
};

struct CellSummary {
  Mode mode = Mode::kClassification;
  double noise_std = 0.0;
  GridAttack attack = GridAttack::kNone;
  int trials = 0;
  int failures = 0;
  double mean_instability = 0.0;
  double max_instability = 0.0;
  double mean_velocity = 0.0;
  double coverage_rate = 0.0;
  double abstain_rate = 0.0;
  double mean_radius = 0.0;
  double saturated_fraction = 0.0;  // instability pinned at the cap
  double stopped_fraction = 0.0;    // design infeasible, vehicle held
};

struct ExperimentResults {
  std::vector<EpisodeRecord> episodes;  // slot-ordered: cell * trials + trial
  std::vector<CellSummary> cells;
  std::map<double, double> betas;  // noise level -> estimated beta
  double wall_seconds = 0.0;
};

ExperimentResults run_experiment_grid(const PipelineConfig& base,
                                      const GridSpec& spec);

}  // namespace certctrl
