#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "epiwave/model.hpp"

namespace epiwave {

/// Flat key=value run configuration. All ModelParams keys are required;
/// everything else defaults to the reference experiment. Unknown keys are
/// errors (ConfigError), as are unreadable values.
struct RunConfig {
  ModelParams params;
  double grid_length = 500.0;
  std::size_t grid_n = 1001;
  double t_end = 50.0;
  std::optional<double> dt;  ///< empty = "auto"
  double snapshot_every = 0.5;
  double split_at = 200.0;
  std::string out_dir = "out";

  /// Key/value echo in the file format, full-precision values.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace epiwave
