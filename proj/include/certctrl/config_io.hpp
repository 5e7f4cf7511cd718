#pragma once

#include <istream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "certctrl/experiment.hpp"

namespace certctrl {

// Everything the command-line tools need to run: the episode pipeline,
// the sweep definition, and where artifacts land.
struct ToolConfig {
  PipelineConfig pipeline = PipelineConfig::defaults();
  GridSpec grid;
  std::string out_dir = "out";
};

// INI-style parse: "key = value" lines, '#' or ';' comments, optional
// [section] headers prepended to keys as "section.". Later duplicates
// win. Throws on malformed lines.
std::map<std::string, std::string> parse_ini(std::istream& in);

// parse_ini over a file; throws std::runtime_error when unreadable.
std::map<std::string, std::string> read_config_file(const std::string& path);

// All recognized setting keys, e.g. "design.lambda_gp".
const std::vector<std::string>& known_keys();

// Applies one setting; returns false for unknown keys. Throws
// std::invalid_argument on unparseable values.
bool set_key(ToolConfig& cfg, const std::string& key,
             const std::string& value);

// Applies a whole map, throwing on the first unknown key.
void apply_settings(ToolConfig& cfg, const std::map<std::string, std::string>& kv);

// Overlays CERTCTRL_<KEY> environment variables (dots become
// underscores, letters uppercased: design.lambda_gp ->
// CERTCTRL_DESIGN_LAMBDA_GP).
void apply_env(ToolConfig& cfg);

// defaults <- file <- environment <- explicit overrides, validated.
ToolConfig load_tool_config(
    const std::string& file_path,
    const std::vector<std::pair<std::string, std::string>>& overrides);

}  // namespace certctrl
