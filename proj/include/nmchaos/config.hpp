#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nmchaos/error.hpp"
#include "nmchaos/experiments.hpp"
#include "nmchaos/lyapunov.hpp"
#include "nmchaos/params.hpp"
#include "nmchaos/toml_lite.hpp"
#include "nmchaos/trajectory.hpp"

namespace nmchaos {

/// A key that is not part of the config schema (strict mode only).
class UnknownKey : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct LyapunovConfig {
  LeMethod method = LeMethod::wolf;
  EmbeddingConfig embedding;
  double delta0 = 1e-8;
  double renorm_dt = 0.5;

  bool operator==(const LyapunovConfig&) const = default;
};

struct SweepConfig {
  Figure figure = Figure::custom;
  std::vector<SweepAxis> axes;
  std::vector<std::string> observables = {"q1"};
  std::vector<std::string> max_group;
  std::optional<std::pair<double, double>> window;
  double record_dt = 1.0;
  std::size_t threads = 1;

  bool operator==(const SweepConfig&) const = default;
};

struct RunConfig {
  SystemParams system;
  EnvParams environment;
  ObservableState initial{1.1, 1.1, 0.0, 0.0, 2.0};
  IntegrationSettings integration;
  ModelToggles model;
  LyapunovConfig lyapunov;
  SweepConfig sweep;

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

struct ConfigOptions {
  /// Ignore unknown keys and tables instead of rejecting them.
  bool lenient = false;
  /// Preset applied underneath the file; also replaces sweep.figure. A
  /// sweep.figure key in the file is only a label and loads no preset.
  std::optional<Figure> figure;
};

/// Builds a validated config from TOML text. When options.figure names a
/// preset, the file's keys are layered on top of it. Naming an axis replaces the
/// preset axis; values or range keys alone keep the preset's axis name.
RunConfig parse_config_text(std::string_view text, const ConfigOptions& options = {});
RunConfig parse_config(const std::string& path, const ConfigOptions& options = {});

/// TOML text that parses back to an equal config.
std::string emit_config(const RunConfig& config);

SweepSpec to_sweep_spec(const RunConfig& config);
BenettinSettings to_benettin_settings(const RunConfig& config);
FullState initial_state(const RunConfig& config);

}  // namespace nmchaos
