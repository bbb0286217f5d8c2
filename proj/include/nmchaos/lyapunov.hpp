#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "nmchaos/ode.hpp"

namespace nmchaos {

/// Wolf phase-reconstruction settings. Unset delay/theiler are resolved from
/// the series: delay by auto_delay, theiler as 2*delay.
struct EmbeddingConfig {
  std::size_t dim = 4;
  std::optional<std::size_t> delay;
  std::optional<std::size_t> theiler;
  double epsilon_frac = 0.1;
  std::size_t evolve_steps = 5;

  void validate() const;
  bool operator==(const EmbeddingConfig&) const = default;
};

struct ReplacementEvent {
  double t = 0.0;
  double log_stretch = 0.0;
  /// True when no candidate satisfied both the radius and the Theiler
  /// constraints and the nearest admissible point was taken instead.
  bool angle_violation = false;
  /// True when the neighbor was replaced because its future left the data,
  /// not because the separation exceeded epsilon.
  bool forced = false;
};

/// Time-resolved maximum-LE estimate. running[k] is the accumulated
/// log-stretch up to times[k] divided by times[k] - t0.
struct LyapunovSeries {
  double t0 = 0.0;
  std::vector<double> times;
  std::vector<double> running;
  std::vector<std::size_t> events_so_far;
  std::vector<ReplacementEvent> events;
  /// Resolved embedding parameters (Wolf only).
  std::size_t delay = 0;
  std::size_t theiler = 0;
  double epsilon = 0.0;

  bool empty() const { return times.empty(); }
  double final_value() const { return running.back(); }
  /// Previous-value hold of the running estimate; NaN before the first sample.
  double at(double t) const;
};

/// Sum of log(A'/A) over tracking segments. A segment starts at a
/// (re)placement with separation A and closes when the separation exceeds
/// the threshold; the open segment contributes its current log ratio.
class StretchAccumulator {
 public:
  explicit StretchAccumulator(double threshold) : threshold_(threshold) {}

  void start(double separation) { reference_ = separation; }
  /// Records the evolved separation; returns true when it exceeds the
  /// threshold, in which case the segment is closed and the caller must
  /// call start() with the replacement separation.
  bool observe(double separation);
  /// Closes the open segment without a threshold crossing.
  void close();

  double closed_sum() const { return closed_; }
  double total() const { return closed_ + open_; }
  double last_closed_stretch() const { return last_; }

 private:
  double threshold_;
  double reference_ = 0.0;
  double closed_ = 0.0;
  double open_ = 0.0;
  double last_ = 0.0;
};

/// Maximum LE of a scalar series by Wolf's method on a delay embedding of the
/// z-scored series. Samples are sample_dt apart and t0 is the first sample.
LyapunovSeries wolf_max_le(std::span<const double> series, double sample_dt,
                           const EmbeddingConfig& cfg = {});

struct BenettinSettings {
  double delta0 = 1e-8;
  double renorm_dt = 0.5;
  double horizon = 500.0;
  OdeOptions ode;

  void validate() const;
};

/// Two-trajectory estimator on an ODE flow. The offset starts along
/// (1, ..., 1)/sqrt(n) with norm delta0 and is rescaled to delta0 every
/// renorm_dt.
LyapunovSeries benettin_max_le(const OdeRhs& rhs, std::span<const double> init,
                               const BenettinSettings& settings, double t_start = 0.0);

/// Mean of the running estimate over samples with t in [t_lo, t_hi].
double windowed_mean_le(const LyapunovSeries& series, double t_lo, double t_hi);

/// LE CSV: t,lambda_running,events_so_far.
void write_le_csv(std::ostream& os, const LyapunovSeries& series);

}  // namespace nmchaos
