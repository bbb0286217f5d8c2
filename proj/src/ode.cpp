#include "nmchaos/ode.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "nmchaos/error.hpp"

namespace nmchaos {

namespace {

// Dormand-Prince 5(4) tableau and the coefficients of its continuous extension.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

StepSizeUnderflow::StepSizeUnderflow(double t, double h)
    : NumericalError("step size underflow (h=" + std::to_string(h) + ") at t=" + std::to_string(t)),
      t_(t) {}

NonFiniteState::NonFiniteState(double t)
    : NumericalError("non-finite state at t=" + std::to_string(t)), t_(t) {}

DormandPrince::DormandPrince(OdeRhs rhs, std::size_t dim, OdeOptions opts)
    : rhs_(std::move(rhs)), dim_(dim), opts_(opts) {
  for (auto& k : k_) k.assign(dim_, 0.0);
  for (auto& r : dense_) r.assign(dim_, 0.0);
  ytmp_.assign(dim_, 0.0);
  ynew_.assign(dim_, 0.0);
  err_.assign(dim_, 0.0);
}

std::vector<double> DormandPrince::advance(double t0, std::span<const double> y0, double t_end) {
  return solve(t0, y0, t_end, {}, {});
}

std::vector<double> DormandPrince::solve(double t0, std::span<const double> y0, double t_end,
                                         std::span<const double> query_times,
                                         const OdeObserver& observer) {
  std::vector<double> y(y0.begin(), y0.end());
  if (!all_finite(y)) throw NonFiniteState(t0);

  std::size_t q = 0;
  while (q < query_times.size() && query_times[q] <= t0) {
    if (observer) observer(q, query_times[q], y);
    ++q;
  }
  if (t_end <= t0) return y;

  auto eval = [&](double t, std::span<const double> yy, std::vector<double>& out) {
    rhs_(t, yy, out);
    ++stats_.rhs_evals;
  };

  double t = t0;
  double h = std::min({opts_.initial_step, opts_.max_step, t_end - t0});
  eval(t, y, k_[0]);
  if (!all_finite(k_[0])) throw NonFiniteState(t);

  std::size_t steps = 0;
  bool last_trial_nonfinite = false;
  while (t < t_end) {
    if (++steps > opts_.max_steps) throw StepSizeUnderflow(t, h);
    bool final_step = false;
    const double h_full = h;
    if (t + h >= t_end) {
      h = t_end - t;
      final_step = true;
    }
    if (h < opts_.min_step && !final_step) {
      if (last_trial_nonfinite) throw NonFiniteState(t);
      throw StepSizeUnderflow(t, h);
    }

    for (std::size_t i = 0; i < dim_; ++i) ytmp_[i] = y[i] + h * a21 * k_[0][i];
    eval(t + c2 * h, ytmp_, k_[1]);
    for (std::size_t i = 0; i < dim_; ++i) ytmp_[i] = y[i] + h * (a31 * k_[0][i] + a32 * k_[1][i]);
    eval(t + c3 * h, ytmp_, k_[2]);
    for (std::size_t i = 0; i < dim_; ++i)
      ytmp_[i] = y[i] + h * (a41 * k_[0][i] + a42 * k_[1][i] + a43 * k_[2][i]);
    eval(t + c4 * h, ytmp_, k_[3]);
    for (std::size_t i = 0; i < dim_; ++i)
      ytmp_[i] = y[i] + h * (a51 * k_[0][i] + a52 * k_[1][i] + a53 * k_[2][i] + a54 * k_[3][i]);
    eval(t + c5 * h, ytmp_, k_[4]);
    for (std::size_t i = 0; i < dim_; ++i)
      ytmp_[i] = y[i] + h * (a61 * k_[0][i] + a62 * k_[1][i] + a63 * k_[2][i] + a64 * k_[3][i] +
                             a65 * k_[4][i]);
    const double t_new = final_step ? t_end : t + h;
    eval(t_new, ytmp_, k_[5]);
    for (std::size_t i = 0; i < dim_; ++i)
      ynew_[i] = y[i] + h * (a71 * k_[0][i] + a73 * k_[2][i] + a74 * k_[3][i] + a75 * k_[4][i] +
                             a76 * k_[5][i]);
    eval(t_new, ynew_, k_[6]);

    double err = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      const double e = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] + e5 * k_[4][i] +
                            e6 * k_[5][i] + e7 * k_[6][i]);
      const double sk = opts_.abs_tol + opts_.rel_tol * std::max(std::abs(y[i]), std::abs(ynew_[i]));
      err = std::max(err, std::abs(e) / sk);
    }

    if (!std::isfinite(err) || !all_finite(ynew_) || !all_finite(k_[6])) {
      last_trial_nonfinite = true;
      ++stats_.rejected;
      h *= 0.2;
      if (h < opts_.min_step) throw NonFiniteState(t);
      continue;
    }
    last_trial_nonfinite = false;

    if (err > 1.0) {
      ++stats_.rejected;
      h *= std::max(0.2, opts_.safety * std::pow(err, -0.2));
      continue;
    }

    ++stats_.accepted;
    stats_.last_step = h;

    if (q < query_times.size() && query_times[q] <= t_new) {
      for (std::size_t i = 0; i < dim_; ++i) {
        const double ydiff = ynew_[i] - y[i];
        const double bspl = h * k_[0][i] - ydiff;
        dense_[0][i] = y[i];
        dense_[1][i] = ydiff;
        dense_[2][i] = bspl;
        dense_[3][i] = ydiff - h * k_[6][i] - bspl;
        dense_[4][i] = h * (d1 * k_[0][i] + d3 * k_[2][i] + d4 * k_[3][i] + d5 * k_[4][i] +
                            d6 * k_[5][i] + d7 * k_[6][i]);
      }
      while (q < query_times.size() && query_times[q] <= t_new) {
        const double tq = query_times[q];
        if (tq == t_new) {
          if (observer) observer(q, tq, ynew_);
        } else {
          const double theta = (tq - t) / h;
          const double theta1 = 1.0 - theta;
          for (std::size_t i = 0; i < dim_; ++i)
            ytmp_[i] = dense_[0][i] +
                       theta * (dense_[1][i] +
                                theta1 * (dense_[2][i] +
                                          theta * (dense_[3][i] + theta1 * dense_[4][i])));
          if (observer) observer(q, tq, ytmp_);
        }
        ++q;
      }
    }

    std::swap(y, ynew_);
    std::swap(k_[0], k_[6]);
    t = t_new;

    const double fac = err == 0.0 ? 5.0 : std::clamp(opts_.safety * std::pow(err, -0.2), 0.2, 5.0);
    stats_.next_step = final_step ? std::max(h_full, h * fac) : h * fac;
    h = std::min(h * fac, opts_.max_step);
  }
  return y;
}

}  // namespace nmchaos
