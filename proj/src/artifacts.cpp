#include "certctrl/artifacts.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace certctrl {
namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("artifacts: cannot open " + tmp);
    out << content;
    if (!out) throw std::runtime_error("artifacts: write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("artifacts: rename failed: " + path);
}

std::string episodes_csv(const ExperimentResults& res) {
  std::ostringstream out;
  out << "slot,cell,trial,mode,noise_std,attack,error,true_label,true_c,"
         "predicted_label,reg_prediction,abstained,certified_radius,"
         "attack_norm,interval_lo,interval_hi,covered,design_feasible,"
         "v_commanded,k_filter,instability,diverged,sup_err,"
         "final_second_mean,beta_used\n";
  for (size_t i = 0; i < res.episodes.size(); ++i) {
    const EpisodeRecord& rec = res.episodes[i];
    const EpisodeResult& r = rec.result;
    std::string error = rec.error;
    for (char& c : error)
      if (c == ',' || c == '\n') c = ' ';
    out << i << ',' << rec.cell_index << ',' << rec.trial << ','
        << mode_name(rec.mode) << ',' << num(rec.noise_std) << ','
        << grid_attack_name(rec.attack) << ',' << error << ',' << r.true_label
        << ',' << num(r.true_c) << ',' << r.predicted_label << ','
        << num(r.reg_prediction) << ',' << (r.abstained ? 1 : 0) << ','
        << num(r.certified_radius) << ',' << num(r.attack_norm) << ','
        << num(r.interval_lo) << ',' << num(r.interval_hi) << ','
        << (r.covered ? 1 : 0) << ',' << (r.design_feasible ? 1 : 0) << ','
        << num(r.v_commanded) << ',' << num(r.k_filter) << ','
        << num(r.instability) << ',' << (r.diverged ? 1 : 0) << ','
        << num(r.sup_err) << ',' << num(r.final_second_mean) << ','
        << num(r.beta_used) << '\n';
  }
  return out.str();
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::ostringstream out;
  out << "t,s1,s1_dot,s2,s2_dot,steer,u_ad,w_hat,theta1,theta2,theta3,"
         "theta4,sigma_hat\n";
  for (const TraceRow& row : trace) {
    out << num(row.t) << ',' << num(row.s.s1) << ',' << num(row.s.s1_dot)
        << ',' << num(row.s.s2) << ',' << num(row.s.s2_dot) << ','
        << num(row.steer) << ',' << num(row.u_ad) << ',' << num(row.w_hat);
    for (int i = 0; i < 4; ++i) out << ',' << num(row.theta_hat[i]);
    out << ',' << num(row.sigma_hat) << '\n';
  }
  return out.str();
}

nlohmann::json summary_json(const ExperimentResults& res,
                            const GridSpec& spec) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["trials_per_cell"] = spec.trials;
  j["attack_epsilon"] = spec.attack_epsilon;

  nlohmann::json betas = nlohmann::json::object();
  for (const auto& [noise, beta] : res.betas) betas[num(noise)] = beta;
  j["betas"] = betas;

  nlohmann::json cells = nlohmann::json::array();
  for (const CellSummary& c : res.cells) {
    cells.push_back({{"mode", mode_name(c.mode)},
                     {"noise_std", c.noise_std},
                     {"attack", grid_attack_name(c.attack)},
                     {"trials", c.trials},
                     {"failures", c.failures},
                     {"mean_instability", c.mean_instability},
                     {"max_instability", c.max_instability},
                     {"mean_velocity", c.mean_velocity},
                     {"coverage_rate", c.coverage_rate},
                     {"abstain_rate", c.abstain_rate},
                     {"mean_radius", c.mean_radius},
                     {"saturated_fraction", c.saturated_fraction},
                     {"stopped_fraction", c.stopped_fraction}});
  }
  j["cells"] = cells;
  return j;
}

nlohmann::json certificate_json(const CertificateOutcome& cert,
                                const StiffnessTable& table,
                                const SmoothingConfig& cfg) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["noise_std"] = cfg.noise_std;
  j["n0"] = cfg.n0;
  j["n"] = cfg.n;
  j["alpha"] = cfg.alpha;
  j["seed"] = cfg.seed;
  j["predicted_label"] = cert.predicted_label;
  j["predicted_name"] = cert.predicted_label >= 0
                            ? table.policy.labels[cert.predicted_label]
                            : "";
  j["abstain"] = cert.abstain;
  j["radius"] = cert.radius;
  j["p_safe_lower"] = cert.p_safe_lower;
  j["p_unsafe_upper"] = cert.p_unsafe_upper;

  nlohmann::json safe = nlohmann::json::array();
  for (int l : cert.safe_set) safe.push_back(table.policy.labels[l]);
  j["safe_set"] = safe;
  j["counts"] = cert.counts;

  if (!cert.abstain) {
    const StiffnessInterval h = safe_set_hull(table, cert.safe_set);
    j["stiffness_interval"] = {h.lo, h.hi};
  } else {
    j["stiffness_interval"] = {kStiffnessFloor, kStiffnessCeil};
  }
  return j;
}

nlohmann::json episode_json(const EpisodeResult& r) {
  return {{"schema_version", kSchemaVersion},
          {"mode", mode_name(r.mode)},
          {"true_label", r.true_label},
          {"true_c", r.true_c},
          {"predicted_label", r.predicted_label},
          {"reg_prediction", r.reg_prediction},
          {"abstained", r.abstained},
          {"certified_radius", r.certified_radius},
          {"attack_norm", r.attack_norm},
          {"interval", {r.interval_lo, r.interval_hi}},
          {"covered", r.covered},
          {"design_feasible", r.design_feasible},
          {"v_commanded", r.v_commanded},
          {"k_filter", r.k_filter},
          {"instability", r.instability},
          {"diverged", r.diverged},
          {"sup_err", r.sup_err},
          {"final_second_mean", r.final_second_mean},
          {"beta_used", r.beta_used}};
}

nlohmann::json manifest_json(const std::string& tool,
                             const std::string& command, std::uint64_t seed,
                             double wall_seconds) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = tool;
  j["command"] = command;
  j["seed"] = seed;
  j["wall_seconds"] = wall_seconds;

  char stamp[32];
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  j["created_utc"] = stamp;
  return j;
}

}  // namespace certctrl
