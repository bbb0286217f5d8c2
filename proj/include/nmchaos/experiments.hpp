#pragma once

#include <atomic>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nmchaos/lyapunov.hpp"
#include "nmchaos/params.hpp"
#include "nmchaos/trajectory.hpp"

namespace nmchaos {

enum class Figure { fig2, fig3, fig4, fig5, fig6, custom };

std::string_view to_string(Figure f);
Figure parse_figure(std::string_view s);

enum class LeMethod { wolf, benettin };

std::string_view to_string(LeMethod m);
LeMethod parse_le_method(std::string_view s);

struct SweepAxis {
  /// A parameter accepted by apply_parameter.
  std::string name;
  std::vector<double> values;

  bool operator==(const SweepAxis&) const = default;
};

/// A grid of simulations plus the LE reduction applied to each cell.
struct SweepSpec {
  Figure figure = Figure::custom;
  SystemParams sys;
  EnvParams env;
  ObservableState init;
  IntegrationSettings integration;
  ModelToggles toggles;
  LeMethod method = LeMethod::wolf;
  EmbeddingConfig embedding;
  BenettinSettings benettin;
  /// One or two axes; cells are the Cartesian product, axis 1 outermost.
  std::vector<SweepAxis> axes;
  /// Trajectory columns fed to the Wolf estimator.
  std::vector<std::string> observables = {"q1"};
  /// Observables reduced to one extra "max" record per cell (window value).
  std::vector<std::string> max_group;
  /// Averaging window; defaults to the late window [t_max/2, t_max].
  std::optional<std::pair<double, double>> window;
  /// Spacing of time-resolved records; 0 emits window records only.
  double record_dt = 1.0;
  std::size_t threads = 1;

  std::pair<double, double> effective_window() const;
  std::size_t cell_count() const;
  void validate() const;
};

struct GridRecord {
  std::vector<double> axis_values;
  /// Either a time (formatted number) or a window label "lo:hi".
  std::string t_or_window;
  std::string observable;
  double lambda = 0.0;
  bool failed = false;
  std::string error;
};

struct Provenance {
  std::string config_echo;
  std::string code_version;
  double wall_time_s = 0.0;
};

struct GridResult {
  std::vector<std::string> axis_names;
  std::vector<GridRecord> records;
  Provenance provenance;

  /// Window-averaged LE of one cell and observable; nullopt when the record
  /// is missing or flagged as failed.
  std::optional<double> window_lambda(std::span<const double> axis_values,
                                      std::string_view observable) const;
  /// Record for a cell's window value, failed or not.
  const GridRecord* window_record(std::span<const double> axis_values,
                                  std::string_view observable) const;
};

/// Sets a named model parameter: omega1, omega2, omega_c, g1, g2, kappa1,
/// kappa2, kappa (both), big_gamma, gamma, tau (gamma = 1/tau), big_omega,
/// q1, q2, p1, p2, n, q (both), p (both).
void apply_parameter(std::string_view name, double value, SystemParams& sys, EnvParams& env,
                     ObservableState& init);
bool is_sweep_parameter(std::string_view name);

/// Runs every cell on a pool of spec.threads workers. One failing cell or
/// observable never aborts the sweep; records are ordered by grid index.
/// Once *cancel becomes true, cells not yet started are recorded as failed
/// with the error "cancelled".
GridResult run_sweep(const SweepSpec& spec, const std::atomic<bool>* cancel = nullptr);

std::vector<double> log_spaced(double lo, double hi, std::size_t count);
std::vector<double> linear_spaced(double lo, double hi, std::size_t count);

SweepSpec fig2_spec(std::vector<double> tau_values, double t_max = 200.0);
SweepSpec fig3_spec(std::vector<double> tau_values = {0.5, 1.0, 10.0}, double t_max = 200.0);
SweepSpec fig4_spec(std::vector<double> omega_values, double t_max = 200.0);
SweepSpec fig5_spec(std::vector<double> kappa1_values, std::vector<double> kappa2_values);
SweepSpec fig6_spec(std::vector<double> tau_values, double t_max = 200.0);

GridResult run_fig2(std::vector<double> tau_values, double t_max = 200.0);
GridResult run_fig3(std::vector<double> tau_values = {0.5, 1.0, 10.0});
GridResult run_fig4(std::vector<double> omega_values);
GridResult run_fig5(std::vector<double> kappa1_values, std::vector<double> kappa2_values);
GridResult run_fig6(std::vector<double> tau_values);

/// Long-format sweep CSV.
void write_sweep_csv(std::ostream& os, const GridResult& result);

/// Human-readable key = value echo of a spec.
std::string describe(const SweepSpec& spec);

std::string window_label(double lo, double hi);

}  // namespace nmchaos
