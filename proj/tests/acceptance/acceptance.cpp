// Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any fail.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "nmchaos/csv_io.hpp"
#include "nmchaos/experiments.hpp"
#include "nmchaos/kernel_oracle.hpp"
#include "nmchaos/lyapunov.hpp"
#include "nmchaos/model.hpp"
#include "nmchaos/trajectory.hpp"

using namespace nmchaos;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string g(double v) { return fmt("%.4g", v); }

fs::path g_csv_dir;
double g_photon_drift = 0.0;
std::size_t g_photon_runs = 0;

void track_photons(const Trajectory& tr) {
  const double n0 = tr.front().obs.n;
  for (const auto& s : tr.samples()) g_photon_drift = std::max(g_photon_drift, std::abs(s.obs.n - n0));
  ++g_photon_runs;
}

// Re-integrates every cell of a spec for the photon-number check.
void track_cells(const SweepSpec& spec) {
  const auto& a0 = spec.axes[0].values;
  const std::size_t n1 = spec.axes.size() > 1 ? spec.axes[1].values.size() : 1;
  for (std::size_t i = 0; i < a0.size(); ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      SystemParams sys = spec.sys;
      EnvParams env = spec.env;
      ObservableState init = spec.init;
      apply_parameter(spec.axes[0].name, a0[i], sys, env, init);
      if (spec.axes.size() > 1) apply_parameter(spec.axes[1].name, spec.axes[1].values[j], sys, env, init);
      FullState s;
      s.obs = init;
      track_photons(integrate(sys, env, s, spec.integration, spec.toggles));
    }
  }
}

GridResult sweep(const SweepSpec& spec, const std::string& csv_name) {
  GridResult r = run_sweep(spec);
  track_cells(spec);
  if (!g_csv_dir.empty())
    write_file_atomically(g_csv_dir / csv_name, [&](std::ostream& os) { write_sweep_csv(os, r); });
  return r;
}

double window_value(const GridResult& r, std::vector<double> cell, const std::string& obs) {
  const auto v = r.window_lambda(cell, obs);
  return v ? *v : std::nan("");
}

std::string sign_of(double v) { return std::isnan(v) ? "nan" : (v > 0 ? "+" : "-"); }

Outcome markovian_constancy() {
  const SystemParams p;
  const EnvParams e{1.0, 50.0, 0.0};
  IntegrationSettings st;
  st.t_max = 50;
  FullState init;
  init.obs = {1.1, 1.1, 0.0, 0.0, 2.0};
  const Trajectory tr = integrate(p, e, init, st);
  track_photons(tr);
  double rate = 0, dev = 0;
  for (const auto& s : tr.samples()) {
    if (s.t < 5) continue;
    const TdcState d = tdc_rhs(s.tdc, p, e);
    for (const auto& z : d.f) rate = std::max(rate, std::abs(z));
    dev = std::max(dev, std::abs(s.tdc[0] - p.kappa1 / 2) / (p.kappa1 / 2));
  }
  return {rate <= 1e-2 && dev <= 0.02,
          "max|dF/dt| = " + g(rate) + " (<= 1e-2), max|F1 - k1/2|/(k1/2) = " + g(dev) + " (<= 0.02)"};
}

Outcome oracle_equivalence() {
  const SystemParams p;
  const EnvParams e{1.0, 1.0, 0.0};
  auto err = [&](std::size_t ns) {
    IntegrationSettings st;
    st.t_max = 5;
    st.dt_out = 5.0 / static_cast<double>(ns);
    st.rel_tol = 1e-11;
    st.abs_tol = 1e-13;
    FullState init;
    init.obs = {1.1, 1.1, 0.0, 0.0, 2.0};
    const Trajectory tr = integrate(p, e, init, st);
    track_photons(tr);
    const auto c = compare_tdc(evolve_kernel_samples(p, e, 5.0, ns), tr);
    return *std::max_element(c.begin(), c.end());
  };
  const double e512 = err(512), e1024 = err(1024);
  const double ratio = e512 / e1024;
  return {e512 <= 1e-4 && ratio >= 3.5 && ratio <= 4.5,
          "sup error at n_s=512 = " + g(e512) + " (<= 1e-4), ratio 512/1024 = " + g(ratio) + " (4 +- 0.5)"};
}

Outcome fig23_signs() {
  SweepSpec s = fig3_spec({0.5, 10.0});
  const GridResult r = sweep(s, "fig3.csv");
  // Fig. 2 curve family on the same grid for plotting.
  if (!g_csv_dir.empty()) sweep(fig2_spec({0.5, 1.0, 10.0}), "fig2.csv");
  const double q_long = window_value(r, {10.0}, "q1");
  const double q_short = window_value(r, {0.5}, "q1");
  const double f_long = window_value(r, {10.0}, "max");
  const double f_short = window_value(r, {0.5}, "max");
  const bool q_ok = q_long > 0.01 && q_short < -0.01;
  const bool f_ok = sign_of(f_long) == sign_of(q_long) && sign_of(f_short) == sign_of(q_short);
  return {q_ok && f_ok, "lambda_q1(tau=10) = " + g(q_long) + " (> 0.01), lambda_q1(tau=0.5) = " + g(q_short) +
                            " (< -0.01), max_i lambda_F(tau=10) = " + g(f_long) +
                            ", max_i lambda_F(tau=0.5) = " + g(f_short) + " (signs must match q1)"};
}

Outcome fig4_resonance() {
  const std::vector<double> omegas{0, 1, 2, 3, 4};
  const GridResult r = sweep(fig4_spec(omegas), "fig4.csv");
  bool ok = true;
  std::string detail;
  for (double w : omegas) {
    const double v = window_value(r, {w}, "p1");
    ok = ok && (w == 2.0 ? v > 0 : v < 0);
    detail += "W=" + g(w) + ": " + g(v) + "  ";
  }
  return {ok, detail + "(positive only at W=2)"};
}

Outcome fig5_corners() {
  SweepSpec s = fig5_spec({0.1, 2.0}, {0.1, 2.0});
  const GridResult r = sweep(s, "fig5_corners.csv");
  const double hi = window_value(r, {2.0, 2.0}, "p1");
  const double lo = window_value(r, {0.1, 0.1}, "p1");
  return {hi > 0 && lo < 0, "mean lambda(2,2) = " + g(hi) + " (> 0), mean lambda(0.1,0.1) = " + g(lo) + " (< 0)"};
}

Outcome fig6_no_coupling() {
  std::vector<double> taus{0.1};
  for (double t : log_spaced(0.1, 20.0, 40))
    if (t >= 5.0 && t <= 20.0) taus.push_back(t);
  SweepSpec s = fig6_spec(taus);
  s.observables = {"p1"};
  s.max_group.clear();
  const GridResult r = sweep(s, "fig6.csv");
  double best = -INFINITY, best_tau = 0;
  for (std::size_t k = 1; k < taus.size(); ++k) {
    const double v = window_value(r, {taus[k]}, "p1");
    if (v > best) {
      best = v;
      best_tau = taus[k];
    }
  }
  const double small = window_value(r, {0.1}, "p1");
  return {best > 0 && small < 0, "max over " + std::to_string(taus.size() - 1) + " tau in [5,20]: lambda = " +
                                     g(best) + " at tau=" + g(best_tau) + " (> 0), lambda(tau=0.1) = " + g(small) +
                                     " (< 0)"};
}

void lorenz(std::span<const double> y, std::span<double> d) {
  d[0] = 10.0 * (y[1] - y[0]);
  d[1] = y[0] * (28.0 - y[2]) - y[1];
  d[2] = y[0] * y[1] - 8.0 / 3.0 * y[2];
}

Outcome estimator_calibration() {
  const auto rhs = [](double, std::span<const double> y, std::span<double> d) { lorenz(y, d); };
  // Transient discarded before sampling.
  DormandPrince solver(rhs, 3, {});
  const std::vector<double> y_start = solver.advance(0.0, std::vector<double>{1.0, 1.0, 1.0}, 50.0);
  const std::size_t n = 100'000;
  const double dt = 0.01;
  std::vector<double> q(n), x(n);
  for (std::size_t k = 0; k < n; ++k) q[k] = 50.0 + dt * static_cast<double>(k);
  solver.solve(50.0, y_start, q.back(), q, [&](std::size_t i, double, std::span<const double> y) { x[i] = y[0]; });

  EmbeddingConfig cfg;
  cfg.delay = 10;
  const double wolf = wolf_max_le(x, dt, cfg).final_value();

  BenettinSettings b;
  b.horizon = 500;
  b.renorm_dt = 0.5;
  const double ben = benettin_max_le(rhs, y_start, b).final_value();

  BenettinSettings lb;
  lb.horizon = 100;
  const double lin = benettin_max_le(
                         [](double, std::span<const double> y, std::span<double> d) { d[0] = -0.3 * y[0]; },
                         std::vector<double>{1.0}, lb)
                         .final_value();
  const bool ok = std::abs(wolf - ben) <= 0.1 && wolf >= 0.8 && wolf <= 1.0 && ben >= 0.8 && ben <= 1.0 &&
                  std::abs(lin + 0.3) <= 0.003;
  return {ok, "Lorenz wolf = " + g(wolf) + ", benettin = " + g(ben) + " (both in [0.8,1.0], |diff| = " +
                  g(std::abs(wolf - ben)) + " <= 0.1), linear -0.3 -> " + fmt("%.6f", lin) + " (+-1%)"};
}

Outcome structural_invariants() {
  IntegrationSettings st;
  st.t_max = 200;
  const SystemParams p;
  const EnvParams e{1.0, 0.1, 0.0};

  // Superposition in the mean values.
  FullState v0, w0, mix;
  v0.obs = {1.1, 1.1, 0.0, 0.0, 2.0};
  w0.obs = {-0.3, 0.8, 1.2, -0.5, 1.0};
  const double a = 0.6, b = -1.7;
  const auto av = v0.obs.as_array(), aw = w0.obs.as_array();
  std::array<double, 5> am{};
  for (std::size_t j = 0; j < 5; ++j) am[j] = a * av[j] + b * aw[j];
  mix.obs = ObservableState::from_array(am);
  const Trajectory tv = integrate(p, e, v0, st), tw = integrate(p, e, w0, st), tm = integrate(p, e, mix, st);
  for (const auto* t : {&tv, &tw, &tm}) track_photons(*t);
  double sup_err = 0;
  for (std::size_t k = 0; k < tm.size(); ++k) {
    const auto x = tv[k].obs.as_array(), y = tw[k].obs.as_array(), z = tm[k].obs.as_array();
    double scale = 0, diff = 0;
    for (std::size_t j = 0; j < 5; ++j) {
      scale = std::max({scale, std::abs(a * x[j]), std::abs(b * y[j]), std::abs(z[j])});
      diff = std::max(diff, std::abs(z[j] - (a * x[j] + b * y[j])));
    }
    sup_err = std::max(sup_err, diff / scale);
  }

  // Mirror exchange.
  double mirror = 0;
  auto rel = [](double x, double y) { return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-12}); };
  auto crel = [](Complex x, Complex y) { return std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-12}); };
  for (const auto& s : tv.samples())
    mirror = std::max({mirror, crel(s.tdc[0], s.tdc[1]), crel(s.tdc[2], s.tdc[3]), rel(s.obs.q1, s.obs.q2),
                       rel(s.obs.p1, s.obs.p2)});

  // Wolf invariance under exactly representable rescaling and shifts.
  std::vector<double> q1 = tv.column("q1");
  for (double& v : q1) v = std::ldexp(std::round(std::ldexp(v, 30)), -30);
  const LyapunovSeries ref = wolf_max_le(q1, st.dt_out);
  bool exact = true;
  for (double c : {0.125, 2.0, 64.0}) {
    std::vector<double> y(q1);
    for (double& v : y) v *= c;
    const auto s = wolf_max_le(y, st.dt_out);
    exact = exact && s.running == ref.running && s.times == ref.times;
  }
  for (double c : {1.0, -4.0, 0.5}) {
    std::vector<double> y(q1);
    for (double& v : y) v += c;
    const auto s = wolf_max_le(y, st.dt_out);
    exact = exact && s.running == ref.running && s.times == ref.times;
  }

  const bool photons = g_photon_drift <= 1e-10;
  return {photons && sup_err <= 1e-6 && mirror <= 1e-6 && exact,
          "photon drift = " + g(g_photon_drift) + " over " + std::to_string(g_photon_runs) +
              " runs (<= 1e-10), superposition = " + g(sup_err) + " (<= 1e-6), mirror = " + g(mirror) +
              " (<= 1e-6), wolf scale/shift exact = " + (exact ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nmchaos acceptance suite"};
  std::string csv_dir;
  std::vector<std::string> only;
  app.add_option("--csv-dir", csv_dir, "Directory for the figure CSVs");
  app.add_option("--only", only, "Run only the named criteria");
  CLI11_PARSE(app, argc, argv);
  if (!csv_dir.empty()) {
    g_csv_dir = csv_dir;
    fs::create_directories(g_csv_dir);
  }

  // Structural invariants run last so the photon check covers every run.
  const std::vector<Criterion> criteria{
      {"markovian_constancy", 10, markovian_constancy},
      {"oracle_equivalence", 60, oracle_equivalence},
      {"fig2_fig3_sign_structure", 120, fig23_signs},
      {"fig4_resonance", 180, fig4_resonance},
      {"fig5_corner_contrast", 60, fig5_corners},
      {"fig6_no_coupling_chaos", 120, fig6_no_coupling},
      {"estimator_calibration", 60, estimator_calibration},
      {"structural_invariants", 60, structural_invariants},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("%s %-26s %s; runtime %.1f s (<= %.0f s)\n", pass ? "PASS" : "FAIL", c.name.c_str(),
                o.detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
