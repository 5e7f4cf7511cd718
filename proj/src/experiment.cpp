#include "certctrl/experiment.hpp"

#include <atomic>
#include <chrono>
#include <stdexcept>
#include <thread>

#include "certctrl/rng.hpp"

namespace certctrl {
namespace {

struct Cell {
  Mode mode;
  double noise_std;
  GridAttack attack;
};

constexpr std::uint64_t kCellSeedBase = 1000;

}  // namespace

const char* grid_attack_name(GridAttack a) {
  switch (a) {
    case GridAttack::kNone:
      return "none";
    case GridAttack::kStability:
      return "stability";
    case GridAttack::kEfficiency:
      return "efficiency";
  }
  return "unknown";
}

void GridSpec::validate() const {
  if (modes.empty() || noise_stds.empty() || attacks.empty())
    throw std::invalid_argument("grid: empty axis");
  for (double s : noise_stds)
    if (!(s > 0.0)) throw std::invalid_argument("grid: noise_std must be > 0");
  if (trials < 1) throw std::invalid_argument("grid: trials must be >= 1");
  if (!(attack_epsilon >= 0.0))
    throw std::invalid_argument("grid: attack_epsilon must be >= 0");
  if (attack_steps < 1)
    throw std::invalid_argument("grid: attack_steps must be >= 1");
  if (workers < 1) throw std::invalid_argument("grid: workers must be >= 1");
  if (label_weights.empty())
    throw std::invalid_argument("grid: label_weights must be nonempty");
  double sum = 0.0;
  for (double w : label_weights) {
    if (!(w >= 0.0))
      throw std::invalid_argument("grid: label weights must be >= 0");
    sum += w;
  }
  if (!(sum > 0.0))
    throw std::invalid_argument("grid: label weights must not all be zero");
}

std::vector<int> label_sequence(int trials,
                                const std::vector<double>& weights) {
  if (trials < 0) throw std::invalid_argument("label_sequence: trials < 0");
  if (weights.empty())
    throw std::invalid_argument("label_sequence: empty weights");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0))
      throw std::invalid_argument("label_sequence: negative weight");
    sum += w;
  }
  if (!(sum > 0.0))
    throw std::invalid_argument("label_sequence: zero weight vector");

  const int n = static_cast<int>(weights.size());
  std::vector<int> emitted(n, 0);
  std::vector<int> seq;
  seq.reserve(trials);
  for (int t = 1; t <= trials; ++t) {
    int pick = -1;
    double best = -1.0;
    for (int l = 0; l < n; ++l) {
      const double deficit = weights[l] / sum * t - emitted[l];
      if (deficit > best + 1e-12) {
        best = deficit;
        pick = l;
      }
    }
    seq.push_back(pick);
    ++emitted[pick];
  }
  return seq;
}

ExperimentResults run_experiment_grid(const PipelineConfig& base,
                                      const GridSpec& spec) {
  base.validate();
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const PerceptionBundle bundle = PerceptionBundle::build(base);
  const int num_labels = bundle.classifier.num_labels();
  if (static_cast<int>(spec.label_weights.size()) != num_labels)
    throw std::invalid_argument(
        "grid: label_weights size must match the stiffness table");
  const std::vector<int> labels =
      label_sequence(spec.trials, spec.label_weights);

  ExperimentResults out;

  // Regression interval floor per noise level, estimated on a held-out
  // split unless pinned by the config.
  bool any_reg = false;
  for (Mode m : spec.modes)
    any_reg |= (m == Mode::kRegression || m == Mode::kNonrobustReg);
  for (double noise : spec.noise_stds) {
    out.betas[noise] = !any_reg   ? 0.0
                       : base.beta > 0.0
                           ? base.beta
                           : estimate_beta(base, bundle, noise);
  }

  std::vector<Cell> cells;
  for (Mode m : spec.modes)
    for (double noise : spec.noise_stds)
      for (GridAttack a : spec.attacks) cells.push_back({m, noise, a});

  const int total = static_cast<int>(cells.size()) * spec.trials;
  out.episodes.resize(total);

  DesignCache cache;
  std::atomic<int> next{0};

  auto work = [&]() {
    for (;;) {
      const int slot = next.fetch_add(1);
      if (slot >= total) return;
      const int cell_index = slot / spec.trials;
      const int trial = slot % spec.trials;
      const Cell& cell = cells[cell_index];

      EpisodeRecord& rec = out.episodes[slot];
      rec.cell_index = cell_index;
      rec.trial = trial;
      rec.mode = cell.mode;
      rec.noise_std = cell.noise_std;
      rec.attack = cell.attack;

      PipelineConfig cfg = base;
      cfg.smoothing.noise_std = cell.noise_std;

      std::optional<AttackConfig> attack;
      if (cell.attack != GridAttack::kNone) {
        AttackConfig ac;
        ac.objective = cell.attack == GridAttack::kStability
                           ? AttackConfig::Objective::kStability
                           : AttackConfig::Objective::kEfficiency;
        ac.epsilon = spec.attack_epsilon;
        ac.steps = spec.attack_steps;
        attack = ac;
      }

      const std::uint64_t episode_seed =
          mix_key(base.seed, kCellSeedBase + cell_index, trial);
      try {
        rec.result = run_episode(cfg, bundle, cell.mode, attack,
                                 labels[trial], out.betas[cell.noise_std],
                                 episode_seed, &cache);
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
    }
  };

  if (spec.workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(spec.workers);
    for (int w = 0; w < spec.workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  out.cells.reserve(cells.size());
  for (int ci = 0; ci < static_cast<int>(cells.size()); ++ci) {
    CellSummary cs;
    cs.mode = cells[ci].mode;
    cs.noise_std = cells[ci].noise_std;
    cs.attack = cells[ci].attack;
    cs.trials = spec.trials;
    int ok = 0;
    for (int t = 0; t < spec.trials; ++t) {
      const EpisodeRecord& rec = out.episodes[ci * spec.trials + t];
      if (!rec.error.empty()) {
        ++cs.failures;
        continue;
      }
      ++ok;
      const EpisodeResult& r = rec.result;
      cs.mean_instability += r.instability;
      cs.max_instability = std::max(cs.max_instability, r.instability);
      cs.mean_velocity += r.v_commanded;
      cs.coverage_rate += r.covered ? 1.0 : 0.0;
      cs.abstain_rate += r.abstained ? 1.0 : 0.0;
      cs.mean_radius += r.certified_radius;
      cs.saturated_fraction += r.instability >= 200.0 ? 1.0 : 0.0;
      cs.stopped_fraction += r.v_commanded <= 0.0 ? 1.0 : 0.0;
    }
    if (ok > 0) {
      const double inv = 1.0 / ok;
      cs.mean_instability *= inv;
      cs.mean_velocity *= inv;
      cs.coverage_rate *= inv;
      cs.abstain_rate *= inv;
      cs.mean_radius *= inv;
      cs.saturated_fraction *= inv;
      cs.stopped_fraction *= inv;
    }
    out.cells.push_back(cs);
  }

  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

}  // namespace certctrl
