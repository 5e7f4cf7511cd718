#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "certctrl/experiment.hpp"
#include "certctrl/smoothing.hpp"

namespace certctrl {

// Bumped whenever a serialized layout changes shape.
constexpr int kSchemaVersion = 1;

// Writes via a sibling temp file plus rename, so readers never observe
// a partial artifact.
void write_file_atomic(const std::string& path, const std::string& content);

// One row per episode, slot-ordered. Pure function of the results, so
// reruns with the same seed produce byte-identical files.
std::string episodes_csv(const ExperimentResults& res);

// Closed-loop trace of one episode.
std::string trace_csv(const std::vector<TraceRow>& trace);

// Per-cell aggregates plus the estimated regression floors.
nlohmann::json summary_json(const ExperimentResults& res,
                            const GridSpec& spec);

// Single-scene certification record.
nlohmann::json certificate_json(const CertificateOutcome& cert,
                                const StiffnessTable& table,
                                const SmoothingConfig& cfg);

// One pipeline episode, fully expanded.
nlohmann::json episode_json(const EpisodeResult& r);

// Run provenance; the only artifact carrying wall-clock information.
nlohmann::json manifest_json(const std::string& tool,
                             const std::string& command, std::uint64_t seed,
                             double wall_seconds);

}  // namespace certctrl
