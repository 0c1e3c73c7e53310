#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sigsde/estimator.hpp"

namespace sigsde {

/// Invalid configuration. `path()` names the offending field, e.g. "model.m".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  [[nodiscard]] const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct RunConfig {
  ExperimentConfig experiment;
  std::size_t full_trials = 100;
  std::string out_dir;
};

/// Reads and validates a JSON run configuration. Missing optional fields get
/// dt = 0.001, r = 3, q = 3, N = 2000.
RunConfig parse_config(const std::string& file);
RunConfig parse_config_text(std::string_view text);

/// JSON text of bundled experiment k (1, 2 or 3).
std::string_view bundled_config(int k);
RunConfig bundled_experiment(int k);

}  // namespace sigsde
