#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "nmchaos/params.hpp"

namespace nmchaos {

struct IntegrationSettings {
  double t_max = 200.0;
  double dt_out = 0.01;
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;

  void validate() const;
  bool operator==(const IntegrationSettings&) const = default;
};

/// Uniformly sampled solution of the coupled TDC + mean-value system.
class Trajectory {
 public:
  Trajectory(SystemParams sys, EnvParams env, IntegrationSettings settings, ModelToggles toggles,
             std::vector<FullState> samples);

  const std::vector<FullState>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  const FullState& operator[](std::size_t i) const { return samples_[i]; }
  const FullState& front() const { return samples_.front(); }
  const FullState& back() const { return samples_.back(); }

  const SystemParams& system() const { return sys_; }
  const EnvParams& environment() const { return env_; }
  const IntegrationSettings& settings() const { return settings_; }
  const ModelToggles& toggles() const { return toggles_; }

  std::vector<double> times() const;
  /// Extracts one CSV column (t, q1, ..., n, ReF1, ImF1, ..., ImF5) as a series.
  std::vector<double> column(std::string_view name) const;

 private:
  SystemParams sys_;
  EnvParams env_;
  IntegrationSettings settings_;
  ModelToggles toggles_;
  std::vector<FullState> samples_;
};

/// Column names of the trajectory CSV, in order.
const std::vector<std::string>& trajectory_columns();
bool is_trajectory_column(std::string_view name);
double column_value(const FullState& s, std::string_view name);

/// Solves the coupled system on [0, t_max], sampled every dt_out.
/// Throws StepSizeUnderflow or NonFiniteState on integration failure.
Trajectory integrate(const SystemParams& sys, const EnvParams& env, const FullState& init,
                     const IntegrationSettings& settings, const ModelToggles& toggles = {});

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Table read back from a trajectory CSV: column names plus rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(std::string_view name) const;
};

CsvTable read_csv_table(std::istream& is);

}  // namespace nmchaos
