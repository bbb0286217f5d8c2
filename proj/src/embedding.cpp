#include "nmchaos/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "nmchaos/error.hpp"

namespace nmchaos {

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords)
    : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0 || coords_.size() % dim_ != 0)
    throw ValidationError("point cloud coordinates do not match its dimension");
}

double PointCloud::distance(std::size_t a, std::size_t b) const {
  const double* pa = coords_.data() + a * dim_;
  const double* pb = coords_.data() + b * dim_;
  double s = 0.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    const double diff = pa[d] - pb[d];
    s += diff * diff;
  }
  return std::sqrt(s);
}

double PointCloud::extent() const {
  double s = 0.0;
  for (std::size_t d = 0; d < dim_; ++d) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t j = 0; j < size(); ++j) {
      lo = std::min(lo, coords_[j * dim_ + d]);
      hi = std::max(hi, coords_[j * dim_ + d]);
    }
    s += (hi - lo) * (hi - lo);
  }
  return std::sqrt(s);
}

std::size_t PointCloud::distinct_points() const {
  std::vector<std::size_t> idx(size());
  std::iota(idx.begin(), idx.end(), 0);
  auto less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(coords_.begin() + a * dim_, coords_.begin() + (a + 1) * dim_,
                                        coords_.begin() + b * dim_, coords_.begin() + (b + 1) * dim_);
  };
  std::sort(idx.begin(), idx.end(), less);
  std::size_t distinct = idx.empty() ? 0 : 1;
  for (std::size_t k = 1; k < idx.size(); ++k)
    if (less(idx[k - 1], idx[k])) ++distinct;
  return distinct;
}

PointCloud delay_embed(std::span<const double> series, std::size_t m, std::size_t delay) {
  if (m < 2) throw ValidationError("embedding dimension must be >= 2");
  if (delay < 1) throw ValidationError("embedding delay must be >= 1");
  const std::size_t span = (m - 1) * delay;
  if (series.size() <= span + 1)
    throw SeriesTooShort("series of length " + std::to_string(series.size()) +
                         " is too short for dim " + std::to_string(m) + " and delay " +
                         std::to_string(delay));
  const std::size_t n = series.size() - span;
  std::vector<double> coords(n * m);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < m; ++k) coords[j * m + k] = series[j + k * delay];
  return PointCloud(m, std::move(coords));
}

std::size_t auto_delay(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 4) return 1;
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = series[i] - mean;
  double c0 = 0.0;
  for (double v : x) c0 += v * v;
  if (c0 == 0.0) return 1;

  const std::size_t max_lag = n / 3;
  std::vector<double> acf(max_lag + 1, 0.0);
  acf[0] = 1.0;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += x[i] * x[i + lag];
    acf[lag] = s / c0;
    if (acf[lag] <= 0.0) return lag;
  }
  // No zero crossing: a quarter of the period given by the first
  // autocorrelation peak that follows a trough.
  std::size_t trough = 0;
  for (std::size_t lag = 1; lag + 1 <= max_lag; ++lag) {
    if (!trough && acf[lag] < acf[lag - 1] && acf[lag] <= acf[lag + 1]) trough = lag;
    if (trough && lag > trough && acf[lag] > acf[lag - 1] && acf[lag] >= acf[lag + 1])
      return std::max<std::size_t>(1, lag / 4);
  }
  return 1;
}

NeighborIndex::NeighborIndex(const PointCloud& cloud, double cell)
    : cloud_(cloud), cell_(cell), use_grid_(cloud.size() > kGridThreshold && cell > 0) {
  if (!use_grid_) return;
  grid_dims_ = std::min<std::size_t>(cloud.dim(), 3);
  lo_.assign(grid_dims_, std::numeric_limits<double>::infinity());
  std::vector<double> hi(grid_dims_, -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    const auto p = cloud.point(j);
    for (std::size_t d = 0; d < grid_dims_; ++d) {
      lo_[d] = std::min(lo_[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  }
  cells_.resize(grid_dims_);
  std::size_t total = 1;
  for (std::size_t d = 0; d < grid_dims_; ++d) {
    cells_[d] = static_cast<long>(std::floor((hi[d] - lo_[d]) / cell_)) + 1;
    total *= static_cast<std::size_t>(cells_[d]);
  }
  buckets_.resize(total);
  for (std::size_t j = 0; j < cloud.size(); ++j)
    buckets_[bucket_index(cell_coord(cloud.point(j)))].push_back(j);
}

std::vector<long> NeighborIndex::cell_coord(std::span<const double> p) const {
  std::vector<long> c(grid_dims_);
  for (std::size_t d = 0; d < grid_dims_; ++d)
    c[d] = std::clamp(static_cast<long>(std::floor((p[d] - lo_[d]) / cell_)), 0L, cells_[d] - 1);
  return c;
}

std::size_t NeighborIndex::bucket_index(const std::vector<long>& c) const {
  std::size_t idx = 0;
  for (std::size_t d = 0; d < grid_dims_; ++d)
    idx = idx * static_cast<std::size_t>(cells_[d]) + static_cast<std::size_t>(c[d]);
  return idx;
}

template <class Visit>
void NeighborIndex::visit_ring(const std::vector<long>& base, long ring, Visit&& visit) const {
  std::vector<long> off(grid_dims_, -ring);
  std::vector<long> c(grid_dims_);
  while (true) {
    long cheb = 0;
    bool inside = true;
    for (std::size_t d = 0; d < grid_dims_; ++d) {
      cheb = std::max(cheb, std::abs(off[d]));
      c[d] = base[d] + off[d];
      if (c[d] < 0 || c[d] >= cells_[d]) inside = false;
    }
    if (inside && cheb == ring)
      for (std::size_t k : buckets_[bucket_index(c)]) visit(k);
    std::size_t d = 0;
    while (d < grid_dims_ && ++off[d] > ring) off[d++] = -ring;
    if (d == grid_dims_) break;
  }
}

std::optional<std::size_t> NeighborIndex::nearest(std::size_t center,
                                                  const NeighborFilter& filter) const {
  std::optional<std::size_t> best;
  double best_d = std::numeric_limits<double>::infinity();
  auto consider = [&](std::size_t k) {
    if (!filter.admits(center, k)) return;
    const double d = cloud_.distance(center, k);
    if (d > 0.0 && (d < best_d || (d == best_d && best && k < *best))) {
      best_d = d;
      best = k;
    }
  };
  if (!use_grid_) {
    for (std::size_t k = 0; k < cloud_.size(); ++k) consider(k);
    return best;
  }
  const auto base = cell_coord(cloud_.point(center));
  long max_ring = 0;
  for (std::size_t d = 0; d < grid_dims_; ++d) max_ring = std::max(max_ring, cells_[d]);
  for (long ring = 0; ring <= max_ring; ++ring) {
    visit_ring(base, ring, consider);
    if (best && best_d <= static_cast<double>(ring) * cell_) break;
  }
  return best;
}

std::vector<std::size_t> NeighborIndex::within(std::size_t center, double radius,
                                               const NeighborFilter& filter) const {
  std::vector<std::size_t> out;
  auto consider = [&](std::size_t k) {
    if (!filter.admits(center, k)) return;
    const double d = cloud_.distance(center, k);
    if (d > 0.0 && d < radius) out.push_back(k);
  };
  if (!use_grid_) {
    for (std::size_t k = 0; k < cloud_.size(); ++k) consider(k);
    return out;
  }
  const auto base = cell_coord(cloud_.point(center));
  const auto rings = static_cast<long>(std::ceil(radius / cell_));
  for (long ring = 0; ring <= rings; ++ring) visit_ring(base, ring, consider);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace nmchaos
