#include "nmchaos/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>

#include "nmchaos/config.hpp"
#include "nmchaos/csv_io.hpp"
#include "nmchaos/error.hpp"
#include "nmchaos/experiments.hpp"
#include "nmchaos/kernel_oracle.hpp"
#include "nmchaos/lyapunov.hpp"
#include "nmchaos/model.hpp"
#include "nmchaos/trajectory.hpp"

#ifndef NMCHAOS_VERSION
#define NMCHAOS_VERSION "unknown"
#endif

namespace nmchaos {

std::atomic<bool>& cli_cancel_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

namespace {

struct Common {
  bool lenient = false;
  bool seedless = false;
};

using Clock = std::chrono::steady_clock;

RunConfig load_config(const std::string& path, const Common& common,
                      std::optional<Figure> figure = std::nullopt) {
  ConfigOptions opts;
  opts.lenient = common.lenient;
  opts.figure = figure;
  if (path.empty()) return parse_config_text("", opts);
  return parse_config(path, opts);
}

void write_sidecars(const std::string& out, const std::string& command,
                    const std::vector<std::string>& args, const std::string& config_text,
                    Clock::time_point start, const nlohmann::json& extra = nlohmann::json::object()) {
  write_file_atomically(out + ".config.toml", [&](std::ostream& os) { os << config_text; });
  nlohmann::json j;
  j["command"] = command;
  j["argv"] = args;
  j["code_version"] = NMCHAOS_VERSION;
  j["wall_time_s"] = std::chrono::duration<double>(Clock::now() - start).count();
  j["randomness"] = "none";
  for (const auto& [k, v] : extra.items()) j[k] = v;
  write_file_atomically(out + ".provenance.json", [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

std::size_t env_threads() {
  const char* v = std::getenv("NMCHAOS_THREADS");
  if (!v || !*v) return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) throw ValidationError("NMCHAOS_THREADS must be a positive integer");
  return static_cast<std::size_t>(n);
}

double uniform_spacing(const std::vector<double>& t) {
  if (t.size() < 2) throw SeriesTooShort("input has fewer than two rows");
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (!(dt > 0)) throw ValidationError("input times must be increasing");
  for (std::size_t k = 1; k < t.size(); ++k)
    if (std::abs((t[k] - t[k - 1]) - dt) > 1e-6 * dt)
      throw ValidationError("input times are not uniformly spaced (row " + std::to_string(k + 1) + ")");
  return dt;
}

FullState state_from_row(const CsvTable& table, std::size_t row) {
  FullState s;
  auto get = [&](const std::string& name) {
    for (std::size_t c = 0; c < table.header.size(); ++c)
      if (table.header[c] == name) return table.rows[row][c];
    throw ValidationError("input has no column '" + name + "' needed to restart the flow");
  };
  s.t = get("t");
  s.obs = ObservableState{get("q1"), get("q2"), get("p1"), get("p2"), get("n")};
  for (std::size_t i = 0; i < 5; ++i) {
    const std::string k = std::to_string(i + 1);
    s.tdc[i] = Complex(get("ReF" + k), get("ImF" + k));
  }
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-Markovian optomechanical chaos toolkit", "nmchaos"};
  app.set_version_flag("--version", std::string(NMCHAOS_VERSION));
  app.require_subcommand(1);
  Common common;
  app.add_flag("--lenient", common.lenient, "Ignore unknown config keys");
  app.add_flag("--seedless", common.seedless, "Assert that the run uses no randomness");

  std::string config_path, out_path;

  auto* simulate = app.add_subcommand("simulate", "Integrate the coupled TDC and mean-value system");
  simulate->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_path, "Trajectory CSV")->required();

  std::string input_path, column = "q1", method_name = "wolf";
  auto* le = app.add_subcommand("le", "Maximum Lyapunov exponent of a trajectory CSV");
  le->add_option("--input", input_path, "Trajectory CSV")->required()->check(CLI::ExistingFile);
  le->add_option("--column", column, "Series column (Wolf)")->required();
  le->add_option("--method", method_name, "wolf or benettin")
      ->required()
      ->check(CLI::IsMember({"wolf", "benettin"}));
  le->add_option("--config", config_path, "Config file for estimator and flow settings")
      ->check(CLI::ExistingFile);
  le->add_option("--out", out_path, "LE CSV")->required();

  std::string figure_name;
  auto* sweep = app.add_subcommand("sweep", "Run a figure preset or custom parameter sweep");
  sweep->add_option("--figure", figure_name, "fig2..fig6 or custom")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig5", "fig6", "custom"}));
  sweep->add_option("--config", config_path, "Overrides layered on the preset")->check(CLI::ExistingFile);
  sweep->add_option("--out", out_path, "Sweep CSV")->required();

  double tmax = 5.0, oracle_tol = 1e-5;
  std::size_t ns = 512;
  auto* oracle = app.add_subcommand("oracle", "Compare the closed TDC equations with the kernel field");
  oracle->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  oracle->add_option("--tmax", tmax, "End time")->required()->check(CLI::PositiveNumber);
  oracle->add_option("--ns", ns, "Source-grid steps (even, >= 64)")->required();
  oracle->add_option("--rel-tol", oracle_tol, "Bound on the Richardson error estimate");
  oracle->add_option("--out", out_path, "Oracle CSV")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (common.seedless) err << "nmchaos: seedless run (the program has no random number source)\n";
  const auto start = Clock::now();

  try {
    if (*simulate) {
      const RunConfig cfg = load_config(config_path, common);
      const Trajectory traj =
          integrate(cfg.system, cfg.environment, initial_state(cfg), cfg.integration, cfg.model);
      write_file_atomically(out_path, [&](std::ostream& os) { write_trajectory_csv(os, traj); });
      write_sidecars(out_path, "simulate", args, emit_config(cfg), start);
      err << "wrote " << traj.size() << " samples to " << out_path << '\n';
      return kExitOk;
    }

    if (*le) {
      const RunConfig cfg = load_config(config_path, common);
      std::ifstream in(input_path);
      if (!in) throw ValidationError("cannot open input '" + input_path + "'");
      const CsvTable table = read_csv_table(in);
      const auto times = table.column("t");
      LyapunovSeries series;
      if (method_name == "wolf") {
        const auto values = table.column(column);
        series = wolf_max_le(values, uniform_spacing(times), cfg.lyapunov.embedding);
        const double t0 = times.front();
        if (t0 != 0.0) {
          series.t0 += t0;
          for (auto& t : series.times) t += t0;
          for (auto& e : series.events) e.t += t0;
        }
      } else {
        if (table.rows.empty()) throw SeriesTooShort("input has no rows");
        const FullState init = state_from_row(table, 0);
        BenettinSettings b = to_benettin_settings(cfg);
        b.horizon = times.back() - times.front();
        const FlatState y0 = pack(init);
        series = benettin_max_le(
            [&](double, std::span<const double> y, std::span<double> dy) {
              coupled_rhs(y, dy, cfg.system, cfg.environment, cfg.model);
            },
            y0, b, init.t);
      }
      write_file_atomically(out_path, [&](std::ostream& os) { write_le_csv(os, series); });
      write_sidecars(out_path, "le", args, emit_config(cfg), start,
                     {{"input", input_path}, {"column", column}, {"method", method_name}});
      err << "final lambda " << format_double(series.empty() ? std::nan("") : series.final_value())
          << '\n';
      return kExitOk;
    }

    if (*sweep) {
      const Figure figure = parse_figure(figure_name);
      RunConfig cfg = load_config(config_path, common, figure);
      if (const std::size_t n = env_threads()) cfg.sweep.threads = n;
      const SweepSpec spec = to_sweep_spec(cfg);
      const GridResult result = run_sweep(spec, &cli_cancel_flag());
      write_file_atomically(out_path, [&](std::ostream& os) { write_sweep_csv(os, result); });
      std::size_t failed = 0;
      for (const auto& r : result.records) failed += r.failed ? 1 : 0;
      write_sidecars(out_path, "sweep", args, emit_config(cfg), start,
                     {{"figure", figure_name},
                      {"cells", spec.cell_count()},
                      {"records", result.records.size()},
                      {"failed_records", failed},
                      {"spec", result.provenance.config_echo}});
      err << "wrote " << result.records.size() << " records (" << failed << " failed) to "
          << out_path << '\n';
      return cli_cancel_flag().load() ? kExitInterrupted : kExitOk;
    }

    if (*oracle) {
      RunConfig cfg = load_config(config_path, common);
      const KernelOracleResult res =
          evolve_kernel_field(cfg.system, cfg.environment, tmax, ns, oracle_tol);
      IntegrationSettings settings = cfg.integration;
      settings.t_max = tmax;
      settings.dt_out = tmax / static_cast<double>(ns);
      FullState init = initial_state(cfg);
      const Trajectory traj = integrate(cfg.system, cfg.environment, init, settings, cfg.model);
      write_file_atomically(out_path,
                            [&](std::ostream& os) { write_oracle_csv(os, res.samples, traj); });
      const auto errs = compare_tdc(res.samples, traj);
      nlohmann::json e = nlohmann::json::array();
      for (double v : errs) e.push_back(v);
      write_sidecars(out_path, "oracle", args, emit_config(cfg), start,
                     {{"tmax", tmax}, {"ns", ns}, {"richardson_estimate", res.error_estimate},
                      {"sup_error", e}});
      err << "sup error";
      for (double v : errs) err << ' ' << format_double(v);
      err << '\n';
      return kExitOk;
    }
  } catch (const NumericalError& e) {
    err << "nmchaos: numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    err << "nmchaos: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "nmchaos: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace nmchaos
