#include "nmchaos/kernel_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "nmchaos/csv_io.hpp"
#include "nmchaos/error.hpp"
#include "nmchaos/kernel.hpp"

namespace nmchaos {

KernelField::KernelField(SystemParams sys, EnvParams env, double ds)
    : sys_(sys), env_(env), ds_(ds) {
  if (!(ds > 0)) throw ValidationError("kernel field step must be > 0");
  rows_.push_back(boundary_row(sys_));
}

std::array<Complex, 5> KernelField::boundary_row(const SystemParams& sys) {
  return {Complex(sys.kappa1), Complex(sys.kappa2), Complex(), Complex(), Complex()};
}

TdcState KernelField::quadrature(const std::vector<Row>& rows, double extra) const {
  const double tau = frontier_ + extra;
  const std::size_t n = rows.size() - 1;
  TdcState F;
  for (std::size_t k = 0; k <= n && n > 0; ++k) {
    const double w = (k == 0 || k == n) ? 0.5 * ds_ : ds_;
    const Complex a = w * ou_correlation(env_, tau - source_time(k));
    for (std::size_t i = 0; i < 5; ++i) F[i] += a * rows[k][i];
  }
  if (extra > 0) {
    // Partial panel [frontier, tau], closed by the boundary row injected at tau.
    const Complex a_old = 0.5 * extra * ou_correlation(env_, tau - source_time(n));
    const Complex a_new = 0.5 * extra * ou_correlation(env_, 0.0);
    const Row b = boundary_row(sys_);
    for (std::size_t i = 0; i < 5; ++i) F[i] += a_old * rows[n][i] + a_new * b[i];
  }
  return F;
}

void KernelField::row_derivatives(const std::vector<Row>& rows, const TdcState& F,
                                  std::vector<Row>& out) const {
  const Complex i(0.0, 1.0);
  const double w1 = sys_.omega1, w2 = sys_.omega2;
  const Complex ik1 = i * sys_.kappa1, ik2 = i * sys_.kappa2;
  out.resize(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Row& f = rows[k];
    Row& d = out[k];
    d[0] = 2.0 * w1 * f[2] - 2.0 * ik1 * F[0] * f[2] - ik1 * F[1] * f[3] + ik1 * F[2] * f[0] +
           ik1 * F[3] * f[1] - ik2 * F[0] * f[3];
    // Mirror image of the f1 row under the 1<->2 exchange.
    d[1] = 2.0 * w2 * f[3] - ik1 * F[1] * f[2] - ik2 * F[0] * f[2] - 2.0 * ik2 * F[1] * f[3] +
           ik2 * F[2] * f[0] + ik2 * F[3] * f[1];
    d[2] = -2.0 * w1 * f[0] - ik1 * F[2] * f[2] - ik2 * F[2] * f[3];
    d[3] = -2.0 * w2 * f[1] - ik1 * F[3] * f[2] - ik2 * F[3] * f[3];
    d[4] = sys_.g1 * f[2] + sys_.g2 * f[3] - ik1 * F[4] * f[2] - ik2 * F[4] * f[3];
  }
}

void KernelField::advance() {
  const double h = ds_;
  const std::size_t n = rows_.size();
  std::vector<Row> k1, k2, k3, k4, stage(n);

  auto shifted = [&](const std::vector<Row>& k, double scale) {
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t i = 0; i < 5; ++i) stage[r][i] = rows_[r][i] + scale * k[r][i];
  };

  row_derivatives(rows_, quadrature(rows_, 0.0), k1);
  shifted(k1, 0.5 * h);
  row_derivatives(stage, quadrature(stage, 0.5 * h), k2);
  shifted(k2, 0.5 * h);
  row_derivatives(stage, quadrature(stage, 0.5 * h), k3);
  shifted(k3, h);
  row_derivatives(stage, quadrature(stage, h), k4);

  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < 5; ++i)
      rows_[r][i] += h / 6.0 * (k1[r][i] + 2.0 * k2[r][i] + 2.0 * k3[r][i] + k4[r][i]);

  ++steps_;
  frontier_ = static_cast<double>(steps_) * ds_;
  rows_.push_back(boundary_row(sys_));
  for (const auto& row : rows_)
    for (const auto& z : row)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw NonFiniteState(frontier_);
}

TdcQuadrature KernelField::tdc() const { return {frontier_, quadrature(rows_, 0.0)}; }

std::vector<TdcQuadrature> evolve_kernel_samples(const SystemParams& sys, const EnvParams& env,
                                                 double t_max, std::size_t n_s) {
  sys.validate();
  env.validate();
  if (!(t_max > 0)) throw ValidationError("oracle t_max must be > 0");
  if (n_s < 1) throw ValidationError("oracle grid size must be >= 1");
  KernelField field(sys, env, t_max / static_cast<double>(n_s));
  std::vector<TdcQuadrature> out;
  out.reserve(n_s + 1);
  out.push_back(field.tdc());
  for (std::size_t k = 0; k < n_s; ++k) {
    field.advance();
    out.push_back(field.tdc());
  }
  return out;
}

KernelOracleResult evolve_kernel_field(const SystemParams& sys, const EnvParams& env, double t_max,
                                       std::size_t n_s, double rel_tol) {
  if (n_s < 64) throw ValidationError("oracle grid size n_s must be >= 64");
  if (n_s % 2 != 0) throw ValidationError("oracle grid size n_s must be even");
  if (!(rel_tol > 0)) throw ValidationError("oracle rel_tol must be > 0");

  KernelOracleResult result;
  result.samples = evolve_kernel_samples(sys, env, t_max, n_s);
  const auto coarse = evolve_kernel_samples(sys, env, t_max, n_s / 2);
  const auto diff = compare_tdc(coarse, result.samples);
  // Second-order quadrature: the fine-grid error is a third of the difference.
  result.error_estimate = *std::max_element(diff.begin(), diff.end()) / 3.0;

  double scale = 1.0;
  for (const auto& s : result.samples)
    for (const auto& z : s.F.f) scale = std::max(scale, std::abs(z));
  if (result.error_estimate > 10.0 * rel_tol * scale)
    throw GridTooCoarse("kernel oracle Richardson error " + std::to_string(result.error_estimate) +
                        " exceeds 10*rel_tol; increase n_s");
  return result;
}

namespace {

std::array<double, 5> sup_diff(const TdcState& a, const TdcState& b, std::array<double, 5> acc) {
  for (std::size_t i = 0; i < 5; ++i) acc[i] = std::max(acc[i], std::abs(a[i] - b[i]));
  return acc;
}

}  // namespace

std::array<double, 5> compare_tdc(const std::vector<TdcQuadrature>& oracle, const Trajectory& traj) {
  std::array<double, 5> err{};
  if (traj.size() == 0) throw GridMismatch("trajectory is empty");
  const double dt = traj.settings().dt_out;
  for (const auto& s : oracle) {
    const auto k = static_cast<long long>(std::llround(s.t / dt));
    if (k < 0 || static_cast<std::size_t>(k) >= traj.size() ||
        std::abs(traj[static_cast<std::size_t>(k)].t - s.t) > 1e-9)
      throw GridMismatch("oracle time " + std::to_string(s.t) + " has no trajectory sample");
    err = sup_diff(s.F, traj[static_cast<std::size_t>(k)].tdc, err);
  }
  return err;
}

std::array<double, 5> compare_tdc(const std::vector<TdcQuadrature>& coarse,
                                  const std::vector<TdcQuadrature>& fine) {
  std::array<double, 5> err{};
  if (fine.size() < 2) throw GridMismatch("fine oracle run has fewer than two samples");
  const double dt = fine[1].t - fine[0].t;
  for (const auto& s : coarse) {
    const auto k = static_cast<long long>(std::llround(s.t / dt));
    if (k < 0 || static_cast<std::size_t>(k) >= fine.size() ||
        std::abs(fine[static_cast<std::size_t>(k)].t - s.t) > 1e-9)
      throw GridMismatch("coarse oracle time " + std::to_string(s.t) + " missing from fine run");
    err = sup_diff(s.F, fine[static_cast<std::size_t>(k)].F, err);
  }
  return err;
}

void write_oracle_csv(std::ostream& os, const std::vector<TdcQuadrature>& oracle,
                      const Trajectory& traj) {
  compare_tdc(oracle, traj);  // alignment check
  os << "t";
  for (int i = 1; i <= 5; ++i) os << ",ReF" << i << "_oracle,ImF" << i << "_oracle";
  for (int i = 1; i <= 5; ++i) os << ",err" << i;
  os << '\n';
  const double dt = traj.settings().dt_out;
  for (const auto& s : oracle) {
    const auto& ref = traj[static_cast<std::size_t>(std::llround(s.t / dt))].tdc;
    os << format_double(s.t);
    for (const auto& z : s.F.f) os << ',' << format_double(z.real()) << ',' << format_double(z.imag());
    for (std::size_t i = 0; i < 5; ++i) os << ',' << format_double(std::abs(s.F[i] - ref[i]));
    os << '\n';
  }
}

}  // namespace nmchaos
