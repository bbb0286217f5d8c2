#include "nmchaos/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "nmchaos/csv_io.hpp"
#include "nmchaos/embedding.hpp"
#include "nmchaos/error.hpp"

namespace nmchaos {

void EmbeddingConfig::validate() const {
  if (dim < 2) throw ValidationError("lyapunov.embed_dim must be >= 2");
  if (delay && *delay < 1) throw ValidationError("lyapunov.delay must be >= 1 (0 selects auto)");
  if (!(epsilon_frac > 0 && epsilon_frac < 1))
    throw ValidationError("lyapunov.epsilon_frac must be in (0, 1)");
  if (evolve_steps < 1) throw ValidationError("lyapunov.evolve_steps must be >= 1");
}

double LyapunovSeries::at(double t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return std::nan("");
  return running[static_cast<std::size_t>(it - times.begin()) - 1];
}

bool StretchAccumulator::observe(double separation) {
  open_ = std::log(separation / reference_);
  if (separation > threshold_) {
    last_ = open_;
    closed_ += open_;
    open_ = 0.0;
    return true;
  }
  return false;
}

void StretchAccumulator::close() {
  last_ = open_;
  closed_ += open_;
  open_ = 0.0;
}

namespace {

// z-score relative to the first sample so that shifted copies of an exactly
// representable series produce identical normalized values.
std::vector<double> normalize(std::span<const double> series) {
  const double ref = series.front();
  std::vector<double> x(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) x[i] = series[i] - ref;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double var = 0.0;
  for (double& v : x) {
    v -= mean;
    var += v * v;
  }
  const double sd = std::sqrt(var / static_cast<double>(x.size()));
  if (!(sd > 0)) throw DegenerateCloud("series has zero variance");
  for (double& v : x) v /= sd;
  return x;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    ab += a[d] * b[d];
    aa += a[d] * a[d];
    bb += b[d] * b[d];
  }
  return ab / std::sqrt(aa * bb);
}

}  // namespace

LyapunovSeries wolf_max_le(std::span<const double> series, double sample_dt,
                           const EmbeddingConfig& cfg) {
  cfg.validate();
  if (!(sample_dt > 0)) throw ValidationError("sample_dt must be > 0");
  if (series.empty()) throw SeriesTooShort("empty series");
  for (double v : series)
    if (!std::isfinite(v)) throw ValidationError("series contains non-finite values");

  const std::vector<double> x = normalize(series);
  const std::size_t delay = cfg.delay.value_or(auto_delay(x));
  const std::size_t theiler = cfg.theiler.value_or(2 * delay);
  const PointCloud cloud = delay_embed(x, cfg.dim, delay);
  const std::size_t n = cloud.size();
  const std::size_t step = cfg.evolve_steps;
  if (n <= step + 1) throw SeriesTooShort("embedded cloud shorter than one evolution step");
  if (cloud.distinct_points() < 2 * cfg.dim)
    throw DegenerateCloud("embedded cloud has fewer than 2*dim distinct points");

  LyapunovSeries out;
  out.delay = delay;
  out.theiler = theiler;
  out.epsilon = cfg.epsilon_frac * cloud.extent();
  out.t0 = 0.0;

  const NeighborIndex index(cloud, out.epsilon);
  const NeighborFilter filter{theiler, n - step};
  const std::size_t dim = cloud.dim();

  std::size_t fid = 0;
  const auto first = index.nearest(fid, filter);
  if (!first) throw NoNeighborFound("no admissible neighbor for the initial point");
  std::size_t nb = *first;

  StretchAccumulator acc(out.epsilon);
  acc.start(cloud.distance(fid, nb));
  std::vector<double> old_dir(dim), cand_dir(dim);

  // Picks the candidate within epsilon whose direction is closest to the old
  // separation vector, falling back to the nearest admissible point.
  auto replace = [&](double t, double log_stretch, bool forced) {
    ReplacementEvent ev{t, log_stretch, false, forced};
    const auto pf = cloud.point(fid);
    const auto pn = cloud.point(nb);
    for (std::size_t d = 0; d < dim; ++d) old_dir[d] = pn[d] - pf[d];

    std::optional<std::size_t> best;
    double best_cos = -2.0, best_dist = 0.0;
    for (std::size_t k : index.within(fid, out.epsilon, filter)) {
      const auto pk = cloud.point(k);
      for (std::size_t d = 0; d < dim; ++d) cand_dir[d] = pk[d] - pf[d];
      const double c = cosine(cand_dir, old_dir);
      const double dist = cloud.distance(fid, k);
      if (!best || c > best_cos || (c == best_cos && dist < best_dist)) {
        best = k;
        best_cos = c;
        best_dist = dist;
      }
    }
    if (!best) {
      best = index.nearest(fid, filter);
      ev.angle_violation = true;
      if (!best) throw NoNeighborFound("no admissible replacement at t=" + std::to_string(t));
    }
    nb = *best;
    acc.start(cloud.distance(fid, nb));
    out.events.push_back(ev);
  };

  while (fid + step < n) {
    if (nb + step >= n) {
      // The neighbor's future runs off the end of the cloud: replace it now.
      acc.close();
      replace(static_cast<double>(fid) * sample_dt, acc.last_closed_stretch(), true);
      if (!out.events_so_far.empty()) out.events_so_far.back() = out.events.size();
    }
    fid += step;
    nb += step;
    const double sep = cloud.distance(fid, nb);
    const double t = static_cast<double>(fid) * sample_dt;

    if (sep == 0.0) {
      // Coincident pair: no stretch is measurable; restart from a fresh neighbor.
      const auto k = index.nearest(fid, filter);
      if (!k) break;
      nb = *k;
      acc.start(cloud.distance(fid, nb));
      continue;
    }

    const bool exceeded = acc.observe(sep);
    out.times.push_back(t);
    out.running.push_back(acc.total() / (t - out.t0));
    if (exceeded) replace(t, acc.last_closed_stretch(), false);
    out.events_so_far.push_back(out.events.size());
  }
  return out;
}

void BenettinSettings::validate() const {
  if (!(delta0 >= 1e-10 && delta0 <= 1e-4))
    throw ValidationError("lyapunov.delta0 must be in [1e-10, 1e-4]");
  if (!(renorm_dt > 0)) throw ValidationError("lyapunov.renorm_dt must be > 0");
  if (!(horizon >= renorm_dt)) throw ValidationError("Benettin horizon must be >= renorm_dt");
}

LyapunovSeries benettin_max_le(const OdeRhs& rhs, std::span<const double> init,
                               const BenettinSettings& settings, double t_start) {
  settings.validate();
  const std::size_t n = init.size();
  if (n == 0) throw ValidationError("Benettin initial state is empty");

  DormandPrince solver(
      [&](double t, std::span<const double> y, std::span<double> dy) {
        rhs(t, y.first(n), dy.first(n));
        rhs(t, y.subspan(n), dy.subspan(n));
      },
      2 * n, settings.ode);

  std::vector<double> y(2 * n);
  const double component = settings.delta0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = init[i];
    y[n + i] = init[i] + component;
  }

  LyapunovSeries out;
  out.t0 = t_start;
  const auto segments = static_cast<std::size_t>(std::llround(settings.horizon / settings.renorm_dt));
  double t = t_start;
  double sum = 0.0;
  for (std::size_t k = 1; k <= segments; ++k) {
    const double t_next = t_start + static_cast<double>(k) * settings.renorm_dt;
    y = solver.advance(t, y, t_next);
    solver.set_initial_step(solver.stats().next_step);
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) d2 += (y[n + i] - y[i]) * (y[n + i] - y[i]);
    const double d = std::sqrt(d2);
    if (!(d > 0) || !std::isfinite(d)) throw NonFiniteState(t_next);
    sum += std::log(d / settings.delta0);
    const double scale = settings.delta0 / d;
    for (std::size_t i = 0; i < n; ++i) y[n + i] = y[i] + (y[n + i] - y[i]) * scale;
    t = t_next;
    out.times.push_back(t);
    out.running.push_back(sum / (t - t_start));
    out.events.push_back({t, std::log(d / settings.delta0), false});
    out.events_so_far.push_back(k);
  }
  return out;
}

double windowed_mean_le(const LyapunovSeries& series, double t_lo, double t_hi) {
  if (!(t_lo < t_hi)) throw ValidationError("window requires t_lo < t_hi");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    if (series.times[k] >= t_lo && series.times[k] <= t_hi) {
      sum += series.running[k];
      ++count;
    }
  }
  if (count == 0)
    throw EmptyWindow("no running LE samples in [" + format_double(t_lo) + ", " +
                      format_double(t_hi) + "]");
  return sum / static_cast<double>(count);
}

void write_le_csv(std::ostream& os, const LyapunovSeries& series) {
  os << "t,lambda_running,events_so_far\n";
  for (std::size_t k = 0; k < series.times.size(); ++k)
    os << format_double(series.times[k]) << ',' << format_double(series.running[k]) << ','
       << series.events_so_far[k] << '\n';
}

}  // namespace nmchaos
