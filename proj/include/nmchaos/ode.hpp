#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace nmchaos {

/// dy/dt = f(t, y), written into dydt.
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Receives the dense-output state at each requested time.
using OdeObserver = std::function<void(std::size_t index, double t, std::span<const double> y)>;

struct OdeOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  double initial_step = 1e-4;
  double min_step = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double safety = 0.9;
  std::size_t max_steps = 50'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
  double last_step = 0.0;
  /// Step the controller would try next; unaffected by clipping at t_end.
  double next_step = 0.0;
};

/// Adaptive Dormand-Prince 5(4) integrator with the standard 4th-order
/// continuous extension. One instance may be reused for many solves.
class DormandPrince {
 public:
  DormandPrince(OdeRhs rhs, std::size_t dim, OdeOptions opts = {});

  /// Integrates from t0 to t_end and reports y at every time in
  /// query_times (sorted ascending, within [t0, t_end]). A query equal to
  /// t0 receives y0 unchanged. Returns the state at t_end.
  std::vector<double> solve(double t0, std::span<const double> y0, double t_end,
                            std::span<const double> query_times, const OdeObserver& observer);

  /// Integrates from t0 to t_end with no dense queries.
  std::vector<double> advance(double t0, std::span<const double> y0, double t_end);

  const OdeStats& stats() const { return stats_; }
  const OdeOptions& options() const { return opts_; }
  void set_initial_step(double h) { opts_.initial_step = h; }

 private:
  OdeRhs rhs_;
  std::size_t dim_;
  OdeOptions opts_;
  OdeStats stats_;
  std::vector<double> k_[7];
  std::vector<double> ytmp_, ynew_, err_;
  std::vector<double> dense_[5];
};

}  // namespace nmchaos
