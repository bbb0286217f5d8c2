#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace nmchaos {

/// Row-major cloud of m-dimensional delay vectors.
class PointCloud {
 public:
  PointCloud(std::size_t dim, std::vector<double> coords);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return coords_.size() / dim_; }
  std::span<const double> point(std::size_t j) const { return {coords_.data() + j * dim_, dim_}; }
  const std::vector<double>& coords() const { return coords_; }

  double distance(std::size_t a, std::size_t b) const;
  /// Diagonal of the axis-aligned bounding box.
  double extent() const;
  std::size_t distinct_points() const;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
};

/// Point j is (x_j, x_{j+delay}, ..., x_{j+(m-1)delay}).
PointCloud delay_embed(std::span<const double> series, std::size_t m, std::size_t delay);

/// First zero crossing of the sample autocorrelation. Falls back to a quarter
/// of the dominant period (periodogram peak) when the autocorrelation never
/// crosses zero. Always >= 1.
std::size_t auto_delay(std::span<const double> series);

/// Candidate k is admissible for center c when |k - c| > theiler and k < limit.
struct NeighborFilter {
  std::size_t theiler = 0;
  std::size_t limit = 0;

  bool admits(std::size_t center, std::size_t k) const {
    const std::size_t gap = k > center ? k - center : center - k;
    return gap > theiler && k < limit;
  }
};

/// Exact neighbor queries on a point cloud: brute force for small clouds,
/// uniform grid buckets over the leading coordinates above kGridThreshold.
/// Points at distance zero from the center are never returned.
class NeighborIndex {
 public:
  static constexpr std::size_t kGridThreshold = 20'000;

  NeighborIndex(const PointCloud& cloud, double cell);

  std::optional<std::size_t> nearest(std::size_t center, const NeighborFilter& filter) const;
  /// Admissible points with 0 < distance < radius, in ascending index order.
  std::vector<std::size_t> within(std::size_t center, double radius,
                                  const NeighborFilter& filter) const;

  bool uses_grid() const { return use_grid_; }

 private:
  std::vector<long> cell_coord(std::span<const double> p) const;
  std::size_t bucket_index(const std::vector<long>& c) const;
  template <class Visit>
  void visit_ring(const std::vector<long>& base, long ring, Visit&& visit) const;

  const PointCloud& cloud_;
  double cell_;
  bool use_grid_;
  std::size_t grid_dims_ = 0;
  std::vector<double> lo_;
  std::vector<long> cells_;
  std::vector<std::vector<std::size_t>> buckets_;
};

}  // namespace nmchaos
