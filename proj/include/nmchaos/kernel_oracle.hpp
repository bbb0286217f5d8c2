#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "nmchaos/params.hpp"
#include "nmchaos/trajectory.hpp"

namespace nmchaos {

/// F_i(t) reconstructed by trapezoidal quadrature of alpha(t,s) f_i(t,s).
struct TdcQuadrature {
  double t = 0.0;
  TdcState F;
};

/// Two-time kernel coefficients f_i(t, s) of the noise-free O-operator
/// expansion, held on a uniform source grid s_k = k*ds and advanced in t by
/// the method of lines. Row k is injected at t = s_k with the boundary
/// values (kappa1, kappa2, 0, 0, 0).
class KernelField {
 public:
  KernelField(SystemParams sys, EnvParams env, double ds);

  /// Advances every live row by one RK4 step of size ds, then injects the row
  /// for the new frontier.
  void advance();

  double frontier() const { return frontier_; }
  double step() const { return ds_; }
  std::size_t rows() const { return rows_.size(); }
  double source_time(std::size_t k) const { return static_cast<double>(k) * ds_; }
  /// f_i(frontier, s_k) for row k.
  const std::array<Complex, 5>& row(std::size_t k) const { return rows_[k]; }
  /// Current quadrature F(frontier).
  TdcQuadrature tdc() const;

  static std::array<Complex, 5> boundary_row(const SystemParams& sys);

 private:
  using Row = std::array<Complex, 5>;

  // F(t_frontier + extra) from trapezoid over stored rows plus the partial
  // panel [frontier, frontier + extra] closed by the boundary row.
  TdcState quadrature(const std::vector<Row>& rows, double extra) const;
  void row_derivatives(const std::vector<Row>& rows, const TdcState& F, std::vector<Row>& out) const;

  SystemParams sys_;
  EnvParams env_;
  double ds_;
  double frontier_ = 0.0;
  std::size_t steps_ = 0;
  std::vector<Row> rows_;
};

struct KernelOracleResult {
  std::vector<TdcQuadrature> samples;
  /// Richardson estimate of the quadrature error at the requested grid size
  /// (sup norm over samples and components).
  double error_estimate = 0.0;
};

/// Evolves the kernel field to t_max on n_s uniform steps and returns F on
/// the grid times. A companion run at n_s/2 provides the Richardson
/// estimate; GridTooCoarse is thrown when that estimate exceeds
/// 10*rel_tol*max(1, sup|F|).
KernelOracleResult evolve_kernel_field(const SystemParams& sys, const EnvParams& env, double t_max,
                                       std::size_t n_s, double rel_tol);

/// Oracle samples only, without the Richardson companion run.
std::vector<TdcQuadrature> evolve_kernel_samples(const SystemParams& sys, const EnvParams& env,
                                                 double t_max, std::size_t n_s);

/// Sup-norm |F_oracle - F_traj| per component. Every oracle time must match a
/// trajectory sample within 1e-9, otherwise GridMismatch.
std::array<double, 5> compare_tdc(const std::vector<TdcQuadrature>& oracle, const Trajectory& traj);

/// Same comparison between two oracle runs; the coarse times must appear in
/// the fine run.
std::array<double, 5> compare_tdc(const std::vector<TdcQuadrature>& coarse,
                                  const std::vector<TdcQuadrature>& fine);

void write_oracle_csv(std::ostream& os, const std::vector<TdcQuadrature>& oracle,
                      const Trajectory& traj);

}  // namespace nmchaos
