#include "nmchaos/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <thread>

#include "nmchaos/csv_io.hpp"
#include "nmchaos/error.hpp"
#include "nmchaos/model.hpp"

#ifndef NMCHAOS_VERSION
#define NMCHAOS_VERSION "unknown"
#endif

namespace nmchaos {

std::string_view to_string(Figure f) {
  switch (f) {
    case Figure::fig2: return "fig2";
    case Figure::fig3: return "fig3";
    case Figure::fig4: return "fig4";
    case Figure::fig5: return "fig5";
    case Figure::fig6: return "fig6";
    case Figure::custom: return "custom";
  }
  return "custom";
}

Figure parse_figure(std::string_view s) {
  for (Figure f : {Figure::fig2, Figure::fig3, Figure::fig4, Figure::fig5, Figure::fig6, Figure::custom})
    if (to_string(f) == s) return f;
  throw ValidationError("unknown figure '" + std::string(s) + "' (expected fig2..fig6 or custom)");
}

std::string_view to_string(LeMethod m) { return m == LeMethod::wolf ? "wolf" : "benettin"; }

LeMethod parse_le_method(std::string_view s) {
  if (s == "wolf") return LeMethod::wolf;
  if (s == "benettin") return LeMethod::benettin;
  throw ValidationError("lyapunov.method must be \"wolf\" or \"benettin\"");
}

std::pair<double, double> SweepSpec::effective_window() const {
  if (window) return *window;
  return {0.5 * integration.t_max, integration.t_max};
}

std::size_t SweepSpec::cell_count() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return axes.empty() ? 0 : n;
}

void SweepSpec::validate() const {
  sys.validate();
  env.validate();
  toggles.validate();
  integration.validate();
  if (method == LeMethod::wolf) embedding.validate();
  else benettin.validate();
  if (axes.empty() || axes.size() > 2) throw ValidationError("sweep needs one or two axes");
  for (const auto& a : axes) {
    if (!is_sweep_parameter(a.name))
      throw ValidationError("sweep axis '" + a.name + "' is not a model parameter");
    if (a.values.empty()) throw ValidationError("sweep axis '" + a.name + "' has no values");
    for (double v : a.values)
      if (!std::isfinite(v)) throw ValidationError("sweep axis '" + a.name + "' has non-finite values");
    if (a.name == "tau")
      for (double v : a.values)
        if (!(v > 0 && v <= 100)) throw ValidationError("sweep tau values must lie in (0, 100]");
  }
  if (method == LeMethod::wolf) {
    if (observables.empty()) throw ValidationError("sweep needs at least one observable");
    for (const auto& o : observables)
      if (!is_trajectory_column(o) || o == "t")
        throw ValidationError("sweep observable '" + o + "' is not a trajectory column");
    for (const auto& o : max_group)
      if (std::find(observables.begin(), observables.end(), o) == observables.end())
        throw ValidationError("max_group entry '" + o + "' is not among the observables");
  }
  const auto [lo, hi] = effective_window();
  if (!(lo < hi)) throw ValidationError("sweep window requires lo < hi");
  if (!(record_dt >= 0)) throw ValidationError("sweep.record_dt must be >= 0");
  if (threads < 1) throw ValidationError("sweep.threads must be >= 1");
}

bool is_sweep_parameter(std::string_view name) {
  static constexpr std::string_view names[] = {
      "omega1",    "omega2", "omega_c", "g1", "g2", "kappa1", "kappa2", "kappa", "big_gamma",
      "gamma",     "tau",    "big_omega", "q1", "q2", "p1",   "p2",     "n",     "q",
      "p"};
  return std::find(std::begin(names), std::end(names), name) != std::end(names);
}

void apply_parameter(std::string_view name, double value, SystemParams& sys, EnvParams& env,
                     ObservableState& init) {
  if (name == "omega1") sys.omega1 = value;
  else if (name == "omega2") sys.omega2 = value;
  else if (name == "omega_c") sys.omega_c = value;
  else if (name == "g1") sys.g1 = value;
  else if (name == "g2") sys.g2 = value;
  else if (name == "kappa1") sys.kappa1 = value;
  else if (name == "kappa2") sys.kappa2 = value;
  else if (name == "kappa") sys.kappa1 = sys.kappa2 = value;
  else if (name == "big_gamma") env.big_gamma = value;
  else if (name == "gamma") env.gamma = value;
  else if (name == "tau") env.gamma = 1.0 / value;
  else if (name == "big_omega") env.big_omega = value;
  else if (name == "q1") init.q1 = value;
  else if (name == "q2") init.q2 = value;
  else if (name == "p1") init.p1 = value;
  else if (name == "p2") init.p2 = value;
  else if (name == "n") init.n = value;
  else if (name == "q") init.q1 = init.q2 = value;
  else if (name == "p") init.p1 = init.p2 = value;
  else throw ValidationError("unknown model parameter '" + std::string(name) + "'");
}

std::string window_label(double lo, double hi) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g:%g", lo, hi);
  return buf;
}

namespace {

constexpr std::string_view kMaxLabel = "max";
constexpr std::string_view kFlowLabel = "flow";

std::vector<double> cell_axis_values(const SweepSpec& spec, std::size_t cell) {
  std::vector<double> v(spec.axes.size());
  std::size_t rem = cell;
  for (std::size_t a = spec.axes.size(); a-- > 0;) {
    const auto& vals = spec.axes[a].values;
    v[a] = vals[rem % vals.size()];
    rem /= vals.size();
  }
  return v;
}

void emit_series(const SweepSpec& spec, const std::vector<double>& axis_values,
                 const std::string& observable, const LyapunovSeries& le,
                 std::vector<GridRecord>& out) {
  if (spec.record_dt > 0) {
    const auto count = static_cast<std::size_t>(
        std::floor(spec.integration.t_max / spec.record_dt + 1e-9));
    for (std::size_t k = 1; k <= count; ++k) {
      const double t = static_cast<double>(k) * spec.record_dt;
      const double v = le.at(t);
      if (std::isnan(v)) continue;
      out.push_back({axis_values, format_double(t), observable, v, false, {}});
    }
  }
}

std::vector<GridRecord> run_cell(const SweepSpec& spec, std::size_t cell) {
  const auto axis_values = cell_axis_values(spec, cell);
  const auto [lo, hi] = spec.effective_window();
  const std::string wlabel = window_label(lo, hi);
  std::vector<GridRecord> out;

  auto fail_all = [&](const std::string& what) {
    out.clear();
    const std::vector<std::string> labels =
        spec.method == LeMethod::benettin ? std::vector<std::string>{std::string(kFlowLabel)}
                                          : spec.observables;
    for (const auto& o : labels) out.push_back({axis_values, wlabel, o, std::nan(""), true, what});
    if (spec.method == LeMethod::wolf && !spec.max_group.empty())
      out.push_back({axis_values, wlabel, std::string(kMaxLabel), std::nan(""), true, what});
  };

  SystemParams sys = spec.sys;
  EnvParams env = spec.env;
  ObservableState init = spec.init;
  try {
    for (std::size_t a = 0; a < spec.axes.size(); ++a)
      apply_parameter(spec.axes[a].name, axis_values[a], sys, env, init);

    if (spec.method == LeMethod::benettin) {
      sys.validate();
      env.validate();
      FullState start;
      start.obs = init;
      const FlatState y0 = pack(start);
      BenettinSettings b = spec.benettin;
      b.horizon = spec.integration.t_max;
      b.ode.rel_tol = spec.integration.rel_tol;
      b.ode.abs_tol = spec.integration.abs_tol;
      const auto le = benettin_max_le(
          [&](double, std::span<const double> y, std::span<double> dy) {
            coupled_rhs(y, dy, sys, env, spec.toggles);
          },
          y0, b);
      const std::string label(kFlowLabel);
      emit_series(spec, axis_values, label, le, out);
      out.push_back({axis_values, wlabel, label, windowed_mean_le(le, lo, hi), false, {}});
      return out;
    }

    FullState start;
    start.obs = init;
    const Trajectory traj = integrate(sys, env, start, spec.integration, spec.toggles);
    std::optional<double> group_max;
    std::string group_error;
    for (const auto& obs : spec.observables) {
      const bool grouped =
          std::find(spec.max_group.begin(), spec.max_group.end(), obs) != spec.max_group.end();
      try {
        const auto series = traj.column(obs);
        const auto le = wolf_max_le(series, spec.integration.dt_out, spec.embedding);
        emit_series(spec, axis_values, obs, le, out);
        const double w = windowed_mean_le(le, lo, hi);
        out.push_back({axis_values, wlabel, obs, w, false, {}});
        if (grouped) group_max = group_max ? std::max(*group_max, w) : w;
      } catch (const Error& e) {
        out.push_back({axis_values, wlabel, obs, std::nan(""), true, e.what()});
        if (grouped && group_error.empty()) group_error = obs + ": " + e.what();
      }
    }
    if (!spec.max_group.empty()) {
      if (group_max) out.push_back({axis_values, wlabel, std::string(kMaxLabel), *group_max, false, {}});
      else out.push_back({axis_values, wlabel, std::string(kMaxLabel), std::nan(""), true, group_error});
    }
  } catch (const Error& e) {
    fail_all(e.what());
  }
  return out;
}

}  // namespace

GridResult run_sweep(const SweepSpec& spec, const std::atomic<bool>* cancel) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t cells = spec.cell_count();
  std::vector<std::vector<GridRecord>> per_cell(cells);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next.fetch_add(1); c < cells; c = next.fetch_add(1)) {
      if (cancel && cancel->load()) {
        per_cell[c] = {{cell_axis_values(spec, c), "cancelled", "cell", std::nan(""), true, "cancelled"}};
        continue;
      }
      try {
        per_cell[c] = run_cell(spec, c);
      } catch (const std::exception& e) {
        per_cell[c] = {{cell_axis_values(spec, c), "error", "cell", std::nan(""), true, e.what()}};
      }
    }
  };
  const std::size_t workers = std::min(spec.threads, cells);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  GridResult result;
  for (const auto& a : spec.axes) result.axis_names.push_back(a.name);
  for (auto& recs : per_cell)
    for (auto& r : recs) result.records.push_back(std::move(r));
  result.provenance.config_echo = describe(spec);
  result.provenance.code_version = NMCHAOS_VERSION;
  result.provenance.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

const GridRecord* GridResult::window_record(std::span<const double> axis_values,
                                            std::string_view observable) const {
  for (const auto& r : records) {
    if (r.observable != observable || r.t_or_window.find(':') == std::string::npos) continue;
    if (std::equal(r.axis_values.begin(), r.axis_values.end(), axis_values.begin(),
                   axis_values.end()))
      return &r;
  }
  return nullptr;
}

std::optional<double> GridResult::window_lambda(std::span<const double> axis_values,
                                                std::string_view observable) const {
  const GridRecord* r = window_record(axis_values, observable);
  if (!r || r->failed) return std::nullopt;
  return r->lambda;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (count == 0 || !(lo > 0) || !(hi >= lo)) throw ValidationError("invalid log-spaced range");
  if (count == 1) return {lo};
  std::vector<double> v(count);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t k = 0; k < count; ++k)
    v[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

std::vector<double> linear_spaced(double lo, double hi, std::size_t count) {
  if (count == 0 || !(hi >= lo)) throw ValidationError("invalid linear range");
  if (count == 1) return {lo};
  std::vector<double> v(count);
  for (std::size_t k = 0; k < count; ++k)
    v[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
  v.back() = hi;
  return v;
}

namespace {

// Fig. 2 caption values; every preset starts from these.
SweepSpec fig2_base(double t_max) {
  SweepSpec s;
  s.sys = SystemParams{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  s.env = EnvParams{1.0, 1.0, 0.0};
  s.init = ObservableState{1.1, 1.1, 0.0, 0.0, 2.0};
  s.integration.t_max = t_max;
  return s;
}

std::vector<std::string> tdc_columns() { return {"ReF1", "ReF2", "ReF3", "ReF4", "ReF5"}; }

}  // namespace

SweepSpec fig2_spec(std::vector<double> tau_values, double t_max) {
  SweepSpec s = fig2_base(t_max);
  s.figure = Figure::fig2;
  s.axes = {{"tau", std::move(tau_values)}};
  s.observables = {"q1"};
  return s;
}

SweepSpec fig3_spec(std::vector<double> tau_values, double t_max) {
  SweepSpec s = fig2_base(t_max);
  s.figure = Figure::fig3;
  s.axes = {{"tau", std::move(tau_values)}};
  s.observables = {"q1"};
  for (auto& c : tdc_columns()) s.observables.push_back(c);
  s.max_group = tdc_columns();
  return s;
}

SweepSpec fig4_spec(std::vector<double> omega_values, double t_max) {
  SweepSpec s = fig2_base(t_max);
  s.figure = Figure::fig4;
  s.env.gamma = 1.0;
  s.axes = {{"big_omega", std::move(omega_values)}};
  s.observables = {"p1"};
  return s;
}

SweepSpec fig5_spec(std::vector<double> kappa1_values, std::vector<double> kappa2_values) {
  SweepSpec s = fig2_base(20.0);
  s.figure = Figure::fig5;
  s.env.gamma = 0.5;
  s.init = ObservableState{1.0, 1.0, 2.0, 2.0, 1.0};
  s.axes = {{"kappa1", std::move(kappa1_values)}, {"kappa2", std::move(kappa2_values)}};
  s.observables = {"p1"};
  s.window = std::pair{5.0, 20.0};
  return s;
}

SweepSpec fig6_spec(std::vector<double> tau_values, double t_max) {
  SweepSpec s = fig2_base(t_max);
  s.figure = Figure::fig6;
  s.sys.g1 = s.sys.g2 = 0.0;
  s.sys.kappa1 = s.sys.kappa2 = 2.02;
  s.init = ObservableState{0.0, 0.0, 1.1, 1.1, 2.0};
  s.axes = {{"tau", std::move(tau_values)}};
  s.observables = {"p1"};
  for (auto& c : tdc_columns()) s.observables.push_back(c);
  s.max_group = tdc_columns();
  return s;
}

GridResult run_fig2(std::vector<double> tau_values, double t_max) {
  return run_sweep(fig2_spec(std::move(tau_values), t_max));
}
GridResult run_fig3(std::vector<double> tau_values) { return run_sweep(fig3_spec(std::move(tau_values))); }
GridResult run_fig4(std::vector<double> omega_values) {
  return run_sweep(fig4_spec(std::move(omega_values)));
}
GridResult run_fig5(std::vector<double> kappa1_values, std::vector<double> kappa2_values) {
  return run_sweep(fig5_spec(std::move(kappa1_values), std::move(kappa2_values)));
}
GridResult run_fig6(std::vector<double> tau_values) { return run_sweep(fig6_spec(std::move(tau_values))); }

namespace {

std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  return s;
}

}  // namespace

void write_sweep_csv(std::ostream& os, const GridResult& result) {
  for (std::size_t a = 0; a < result.axis_names.size(); ++a)
    os << "axis" << a + 1 << "_name,axis" << a + 1 << "_value,";
  os << "t_or_window,observable,lambda,failed,error\n";
  for (const auto& r : result.records) {
    for (std::size_t a = 0; a < result.axis_names.size(); ++a)
      os << result.axis_names[a] << ',' << format_double(r.axis_values[a]) << ',';
    os << r.t_or_window << ',' << r.observable << ',' << format_double(r.lambda) << ','
       << (r.failed ? 1 : 0) << ',' << csv_safe(r.error) << '\n';
  }
}

std::string describe(const SweepSpec& s) {
  std::ostringstream os;
  auto num = [](double v) { return format_double(v); };
  os << "figure = " << to_string(s.figure) << '\n'
     << "system = omega1 " << num(s.sys.omega1) << ", omega2 " << num(s.sys.omega2) << ", omega_c "
     << num(s.sys.omega_c) << ", g1 " << num(s.sys.g1) << ", g2 " << num(s.sys.g2) << ", kappa1 "
     << num(s.sys.kappa1) << ", kappa2 " << num(s.sys.kappa2) << '\n'
     << "environment = big_gamma " << num(s.env.big_gamma) << ", gamma " << num(s.env.gamma)
     << ", big_omega " << num(s.env.big_omega) << '\n'
     << "initial = q1 " << num(s.init.q1) << ", q2 " << num(s.init.q2) << ", p1 " << num(s.init.p1)
     << ", p2 " << num(s.init.p2) << ", n " << num(s.init.n) << '\n'
     << "integration = t_max " << num(s.integration.t_max) << ", dt_out "
     << num(s.integration.dt_out) << ", rel_tol " << num(s.integration.rel_tol) << ", abs_tol "
     << num(s.integration.abs_tol) << '\n'
     << "model = damping_factor " << s.toggles.damping_factor << ", harmonic_placement "
     << to_string(s.toggles.harmonic_placement) << '\n'
     << "method = " << to_string(s.method) << '\n'
     << "embedding = dim " << s.embedding.dim << ", delay "
     << (s.embedding.delay ? std::to_string(*s.embedding.delay) : "auto") << ", theiler "
     << (s.embedding.theiler ? std::to_string(*s.embedding.theiler) : "auto") << ", epsilon_frac "
     << num(s.embedding.epsilon_frac) << ", evolve_steps " << s.embedding.evolve_steps << '\n'
     << "benettin = delta0 " << num(s.benettin.delta0) << ", renorm_dt "
     << num(s.benettin.renorm_dt) << '\n';
  for (std::size_t a = 0; a < s.axes.size(); ++a) {
    os << "axis" << a + 1 << " = " << s.axes[a].name << ":";
    for (double v : s.axes[a].values) os << ' ' << num(v);
    os << '\n';
  }
  const auto [lo, hi] = s.effective_window();
  os << "window = " << window_label(lo, hi) << '\n' << "record_dt = " << num(s.record_dt) << '\n';
  return os.str();
}

}  // namespace nmchaos
