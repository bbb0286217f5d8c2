#include "nmchaos/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include "nmchaos/csv_io.hpp"
#include "nmchaos/error.hpp"
#include "nmchaos/model.hpp"
#include "nmchaos/ode.hpp"

namespace nmchaos {

void IntegrationSettings::validate() const {
  if (!(t_max > 0) || !std::isfinite(t_max)) throw ValidationError("integration.t_max must be > 0");
  if (!(dt_out > 0) || !std::isfinite(dt_out))
    throw ValidationError("integration.dt_out must be > 0");
  if (!(rel_tol > 0 && rel_tol <= 1e-3))
    throw ValidationError("integration.rel_tol must be in (0, 1e-3]");
  if (!(abs_tol > 0 && abs_tol <= 1e-3))
    throw ValidationError("integration.abs_tol must be in (0, 1e-3]");
}

Trajectory::Trajectory(SystemParams sys, EnvParams env, IntegrationSettings settings,
                       ModelToggles toggles, std::vector<FullState> samples)
    : sys_(sys), env_(env), settings_(settings), toggles_(toggles), samples_(std::move(samples)) {}

std::vector<double> Trajectory::times() const {
  std::vector<double> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.t);
  return out;
}

std::vector<double> Trajectory::column(std::string_view name) const {
  if (!is_trajectory_column(name))
    throw ValidationError("unknown trajectory column '" + std::string(name) + "'");
  std::vector<double> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(column_value(s, name));
  return out;
}

const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> cols = {
      "t",    "q1",   "q2",   "p1",   "p2",   "n",    "ReF1", "ImF1",
      "ReF2", "ImF2", "ReF3", "ImF3", "ReF4", "ImF4", "ReF5", "ImF5"};
  return cols;
}

bool is_trajectory_column(std::string_view name) {
  const auto& cols = trajectory_columns();
  return std::find(cols.begin(), cols.end(), name) != cols.end();
}

double column_value(const FullState& s, std::string_view name) {
  if (name == "t") return s.t;
  if (name == "q1") return s.obs.q1;
  if (name == "q2") return s.obs.q2;
  if (name == "p1") return s.obs.p1;
  if (name == "p2") return s.obs.p2;
  if (name == "n") return s.obs.n;
  if (name.size() == 4 && name[2] == 'F' && name[3] >= '1' && name[3] <= '5') {
    const auto& z = s.tdc[static_cast<std::size_t>(name[3] - '1')];
    if (name.substr(0, 2) == "Re") return z.real();
    if (name.substr(0, 2) == "Im") return z.imag();
  }
  throw ValidationError("unknown trajectory column '" + std::string(name) + "'");
}

Trajectory integrate(const SystemParams& sys, const EnvParams& env, const FullState& init,
                     const IntegrationSettings& settings, const ModelToggles& toggles) {
  sys.validate();
  env.validate();
  toggles.validate();
  settings.validate();
  if (!init.tdc.all_finite() || !init.obs.all_finite())
    throw ValidationError("initial state must be finite");

  const auto n_out = static_cast<std::size_t>(std::llround(settings.t_max / settings.dt_out));
  std::vector<double> grid(n_out + 1);
  for (std::size_t k = 0; k <= n_out; ++k) grid[k] = static_cast<double>(k) * settings.dt_out;
  const double t_end = grid.back();

  OdeOptions opts;
  opts.rel_tol = settings.rel_tol;
  opts.abs_tol = settings.abs_tol;
  DormandPrince solver(
      [&](double, std::span<const double> y, std::span<double> dy) {
        coupled_rhs(y, dy, sys, env, toggles);
      },
      kStateDim, opts);

  FullState start = init;
  start.t = 0.0;
  const FlatState y0 = pack(start);

  std::vector<FullState> samples(grid.size());
  solver.solve(0.0, y0, t_end, grid, [&](std::size_t k, double t, std::span<const double> y) {
    if (k == 0) {
      samples[0] = start;
      return;
    }
    FlatState flat{};
    std::copy(y.begin(), y.end(), flat.begin());
    samples[k] = unpack(flat, t);
  });
  return Trajectory(sys, env, settings, toggles, std::move(samples));
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const auto& cols = trajectory_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << '\n';
  for (const auto& s : traj.samples()) {
    os << format_double(s.t) << ',' << format_double(s.obs.q1) << ',' << format_double(s.obs.q2)
       << ',' << format_double(s.obs.p1) << ',' << format_double(s.obs.p2) << ','
       << format_double(s.obs.n);
    for (const auto& z : s.tdc.f) os << ',' << format_double(z.real()) << ',' << format_double(z.imag());
    os << '\n';
  }
}

std::vector<double> CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ValidationError("CSV has no column '" + std::string(name) + "'");
  const auto idx = static_cast<std::size_t>(it - header.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[idx]);
  return out;
}

CsvTable read_csv_table(std::istream& is) {
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("CSV input is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ValidationError("CSV line " + std::to_string(lineno) + ": not a number: '" + cell + "'");
      }
    }
    if (row.size() != table.header.size())
      throw ValidationError("CSV line " + std::to_string(lineno) + ": expected " +
                            std::to_string(table.header.size()) + " fields");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace nmchaos
