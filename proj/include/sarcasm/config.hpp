#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sarcasm/eval.hpp"

namespace sarcasm {

inline constexpr std::string_view kToolVersion = "0.3.0";

/// Parses the experiment config format: `key = value` lines grouped under
/// `[section]` headers, `#` comments, values that are quoted strings,
/// integers, reals, booleans or arrays of quoted strings. Relative paths are
/// resolved against `base_dir`. Unknown sections or keys and ill-typed
/// values throw Error(Config) naming the line.
ExperimentConfig parse_experiment_config(std::string_view text,
                                         const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Writes a config in the same format; parse(render(c)) reproduces c.
std::string render_experiment_config(const ExperimentConfig& cfg);

struct RunOptions {
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  std::optional<AblationAxis> ablate;
  unsigned jobs = 1;
};

struct RunOutcome {
  std::vector<ExperimentReport> reports;
  std::filesystem::path json_path;
  std::filesystem::path csv_path;
  std::filesystem::path manifest_path;
};

/// Runs one experiment (or an ablation) and writes report.json, report.csv,
/// config.resolved.toml and manifest.json into `out_dir`. A single run
/// propagates its stage error; ablation rows fail independently.
RunOutcome run_to_directory(const ExperimentConfig& cfg, const RunOptions& options);

}  // namespace sarcasm
