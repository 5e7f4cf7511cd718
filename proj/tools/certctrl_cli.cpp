// Command-line front end: certify a single scene, run one closed-loop
// episode, or sweep the full experiment grid. Exit codes: 0 success,
// 1 usage/config error, 2 certification abstained, 3 runtime failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "certctrl/artifacts.hpp"
#include "certctrl/config_io.hpp"
#include "certctrl/rng.hpp"

namespace {

using namespace certctrl;

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) s += ' ';
    s += argv[i];
  }
  return s;
}

std::vector<std::pair<std::string, std::string>> parse_overrides(
    const std::vector<std::string>& sets) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& kv : sets) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got: " + kv);
    out.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return out;
}

void write_json(const std::string& dir, const std::string& name,
                const nlohmann::json& j) {
  write_file_atomic(dir + "/" + name, j.dump(2) + "\n");
}

int run_certify(const ToolConfig& cfg, int label, bool attacked,
                AttackConfig::Objective objective, double epsilon,
                double wall_start_ignored, const std::string& command) {
  (void)wall_start_ignored;
  const auto t0 = std::chrono::steady_clock::now();
  const PipelineConfig& p = cfg.pipeline;
  const PerceptionBundle pb = PerceptionBundle::build(p);
  if (label < 0 || label >= pb.classifier.num_labels()) {
    std::cerr << "label out of range\n";
    return 1;
  }

  Eigen::VectorXd scene = make_label_scene(p, pb, label, p.seed);
  if (attacked) {
    AttackConfig ac;
    ac.objective = objective;
    ac.epsilon = epsilon;
    ac.seed = mix_key(p.seed, 12, 0);
    const AttackResult ar = pgd_attack(
        [&pb](const Eigen::VectorXd& x) {
          return pb.classifier.expected_value(x, pb.row_values);
        },
        [&pb](const Eigen::VectorXd& x) {
          return pb.classifier.expected_value_grad(x, pb.row_values);
        },
        scene, ac);
    scene += ar.delta;
  }

  SmoothingConfig sc = p.smoothing;
  sc.seed = certification_seed(p.seed);
  const CertificateOutcome cert =
      certify_safe_set(pb.classifier.as_fn(), scene, p.table.policy, sc);

  std::filesystem::create_directories(cfg.out_dir);
  write_json(cfg.out_dir, "certificate.json",
             certificate_json(cert, p.table, sc));
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  write_json(cfg.out_dir, "manifest.json",
             manifest_json("certify", command, p.seed, wall));

  if (cert.abstain) {
    std::cout << "ABSTAIN (p_safe_lower=" << cert.p_safe_lower << ")\n";
    return 2;
  }
  std::cout << "label " << p.table.policy.labels[cert.predicted_label]
            << ", radius " << cert.radius << ", p_safe_lower "
            << cert.p_safe_lower << "\n";
  return 0;
}

int run_simulate(const ToolConfig& cfg, const std::string& mode_str, int label,
                 const std::string& attack_str, double epsilon, bool trace_out,
                 const std::string& command) {
  const auto t0 = std::chrono::steady_clock::now();
  const PipelineConfig& p = cfg.pipeline;

  Mode mode;
  if (mode_str == "classification") mode = Mode::kClassification;
  else if (mode_str == "regression") mode = Mode::kRegression;
  else if (mode_str == "nonrobust_cls") mode = Mode::kNonrobustCls;
  else if (mode_str == "nonrobust_reg") mode = Mode::kNonrobustReg;
  else {
    std::cerr << "unknown mode: " << mode_str << "\n";
    return 1;
  }

  std::optional<AttackConfig> attack;
  if (attack_str == "stability" || attack_str == "efficiency") {
    AttackConfig ac;
    ac.objective = attack_str == "stability"
                       ? AttackConfig::Objective::kStability
                       : AttackConfig::Objective::kEfficiency;
    ac.epsilon = epsilon;
    attack = ac;
  } else if (attack_str != "none") {
    std::cerr << "unknown attack: " << attack_str << "\n";
    return 1;
  }

  const PerceptionBundle pb = PerceptionBundle::build(p);
  double beta = p.beta;
  if (beta <= 0.0 &&
      (mode == Mode::kRegression || mode == Mode::kNonrobustReg)) {
    beta = estimate_beta(p, pb, p.smoothing.noise_std);
  }

  std::vector<TraceRow> trace;
  const EpisodeResult r =
      run_episode(p, pb, mode, attack, label, beta, p.seed, nullptr,
                  trace_out ? &trace : nullptr);

  std::filesystem::create_directories(cfg.out_dir);
  write_json(cfg.out_dir, "episode.json", episode_json(r));
  if (trace_out)
    write_file_atomic(cfg.out_dir + "/trace.csv", trace_csv(trace));
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  write_json(cfg.out_dir, "manifest.json",
             manifest_json("simulate", command, p.seed, wall));

  std::cout << mode_name(r.mode) << ": interval [" << r.interval_lo << ", "
            << r.interval_hi << "], v " << r.v_commanded << " m/s, instability "
            << r.instability << (r.diverged ? " (diverged)" : "") << "\n";
  return r.abstained ? 2 : 0;
}

int run_experiment(const ToolConfig& cfg, const std::string& command) {
  const ExperimentResults res = run_experiment_grid(cfg.pipeline, cfg.grid);

  std::filesystem::create_directories(cfg.out_dir);
  write_file_atomic(cfg.out_dir + "/episodes.csv", episodes_csv(res));
  write_json(cfg.out_dir, "summary.json", summary_json(res, cfg.grid));
  write_json(cfg.out_dir, "manifest.json",
             manifest_json("experiment", command, cfg.pipeline.seed,
                           res.wall_seconds));

  std::printf("%-15s %-6s %-11s %9s %9s %9s %9s\n", "mode", "noise", "attack",
              "instab", "vel", "coverage", "abstain");
  for (const CellSummary& c : res.cells) {
    std::printf("%-15s %-6.3g %-11s %9.3f %9.3f %9.3f %9.3f\n",
                mode_name(c.mode), c.noise_std, grid_attack_name(c.attack),
                c.mean_instability, c.mean_velocity, c.coverage_rate,
                c.abstain_rate);
  }
  std::printf("%zu episodes in %.1f s -> %s\n", res.episodes.size(),
              res.wall_seconds, cfg.out_dir.c_str());

  int failures = 0;
  for (const EpisodeRecord& rec : res.episodes)
    if (!rec.error.empty()) ++failures;
  if (failures > 0) {
    std::cerr << failures << " episodes failed; see episodes.csv\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Smoothing certificates feeding an adaptive lane-keeping loop"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double noise_std = 0.0;

  app.add_option("--config", config_path, "INI config file")
      ->check(CLI::ExistingFile);
  app.add_option("--set", sets, "key=value override (repeatable)");
  app.add_option("--out-dir", out_dir, "artifact directory");
  app.add_option("--seed", seed, "master seed")
      ->each([&](const std::string&) { seed_given = true; });
  app.add_option("--noise-std", noise_std, "smoothing noise level");

  auto* certify = app.add_subcommand("certify", "certify one scene");
  int label = 0;
  std::string attack_str = "none";
  double epsilon = 12.0;
  certify->add_option("--label", label, "true label index");
  certify->add_option("--attack", attack_str,
                      "none | stability | efficiency");
  certify->add_option("--epsilon", epsilon, "attack L2 budget");

  auto* simulate = app.add_subcommand("simulate", "run one episode");
  std::string mode_str = "classification";
  bool trace_flag = false;
  simulate->add_option("--mode", mode_str,
                       "classification | regression | nonrobust_cls | "
                       "nonrobust_reg");
  simulate->add_option("--label", label, "true label index");
  simulate->add_option("--attack", attack_str, "none | stability | efficiency");
  simulate->add_option("--epsilon", epsilon, "attack L2 budget");
  simulate->add_flag("--trace", trace_flag, "write trace.csv");

  auto* experiment = app.add_subcommand("experiment", "run the sweep grid");
  int workers = 0;
  int trials = 0;
  experiment->add_option("--workers", workers, "thread count");
  experiment->add_option("--trials", trials, "episodes per cell");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // --help is a success; bad flags are usage
  }

  try {
    auto overrides = parse_overrides(sets);
    if (seed_given) overrides.emplace_back("pipeline.seed", std::to_string(seed));
    if (noise_std > 0.0)
      overrides.emplace_back("smoothing.noise_std", std::to_string(noise_std));
    if (!out_dir.empty()) overrides.emplace_back("out_dir", out_dir);
    if (workers > 0)
      overrides.emplace_back("grid.workers", std::to_string(workers));
    if (trials > 0) overrides.emplace_back("grid.trials", std::to_string(trials));

    const ToolConfig cfg = load_tool_config(config_path, overrides);
    const std::string command = join_args(argc, argv);

    if (certify->parsed()) {
      const bool attacked = attack_str != "none";
      const auto objective = attack_str == "efficiency"
                                 ? AttackConfig::Objective::kEfficiency
                                 : AttackConfig::Objective::kStability;
      return run_certify(cfg, label, attacked, objective, epsilon, 0.0,
                         command);
    }
    if (simulate->parsed())
      return run_simulate(cfg, mode_str, label, attack_str, epsilon,
                          trace_flag, command);
    return run_experiment(cfg, command);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
