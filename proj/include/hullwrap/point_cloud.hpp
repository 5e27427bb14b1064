#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hullwrap/error.hpp"
#include "hullwrap/geom_core.hpp"

namespace hullwrap {

using PointId = std::uint32_t;

/// Points closer than this fraction of the bounding-box diagonal are merged.
inline constexpr double kDuplicateRatio = 1e-9;

inline Aabb bounding_box(std::span<const Point3> points) {
  Aabb box;
  for (const Point3& p : points) box.expand(p);
  return box;
}

/// Immutable, indexed point set. Construction rejects non-finite coordinates
/// and merges near-duplicates, keeping the first occurrence; surviving points
/// keep their relative input order.
class PointCloud {
 public:
  PointCloud() = default;

  static PointCloud from_points(std::vector<Point3> points, std::size_t* merged = nullptr) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!is_finite(points[i])) {
        throw Error(ErrorKind::InconsistentInput, "point " + std::to_string(i) + " has a non-finite coordinate");
      }
    }
    PointCloud cloud;
    const std::size_t before = points.size();
    cloud.points_ = deduplicate(std::move(points));
    cloud.box_ = bounding_box(cloud.points_);
    if (merged != nullptr) *merged = before - cloud.points_.size();
    return cloud;
  }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point3& operator[](PointId i) const { return points_[i]; }
  std::span<const Point3> points() const { return points_; }
  const Aabb& bounds() const { return box_; }
  double diagonal() const { return points_.empty() ? 0.0 : box_.diagonal(); }

 private:
  static std::vector<Point3> deduplicate(std::vector<Point3> points) {
    if (points.size() < 2) return points;
    const Aabb box = bounding_box(points);
    const double tol = kDuplicateRatio * box.diagonal();
    std::vector<Point3> kept;
    kept.reserve(points.size());
    if (!(tol > 0.0)) {
      kept.push_back(points.front());
      return kept;
    }
    // Hash grid with cell size tol; a duplicate lies in a neighbouring cell.
    struct CellHash {
      std::size_t operator()(const std::array<std::int64_t, 3>& c) const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::int64_t v : c) h = (h ^ static_cast<std::uint64_t>(v)) * 1099511628211ull;
        return static_cast<std::size_t>(h);
      }
    };
    std::unordered_map<std::array<std::int64_t, 3>, std::vector<std::uint32_t>, CellHash> grid;
    const auto cell = [&](const Point3& p) {
      return std::array<std::int64_t, 3>{static_cast<std::int64_t>(std::floor((p.x - box.lo.x) / tol)),
                                         static_cast<std::int64_t>(std::floor((p.y - box.lo.y) / tol)),
                                         static_cast<std::int64_t>(std::floor((p.z - box.lo.z) / tol))};
    };
    const double tol2 = tol * tol;
    for (const Point3& p : points) {
      const auto c = cell(p);
      bool duplicate = false;
      for (std::int64_t dx = -1; dx <= 1 && !duplicate; ++dx) {
        for (std::int64_t dy = -1; dy <= 1 && !duplicate; ++dy) {
          for (std::int64_t dz = -1; dz <= 1 && !duplicate; ++dz) {
            const auto it = grid.find({c[0] + dx, c[1] + dy, c[2] + dz});
            if (it == grid.end()) continue;
            for (std::uint32_t k : it->second) {
              if (squared_norm(kept[k] - p) <= tol2) {
                duplicate = true;
                break;
              }
            }
          }
        }
      }
      if (duplicate) continue;
      grid[c].push_back(static_cast<std::uint32_t>(kept.size()));
      kept.push_back(p);
    }
    return kept;
  }

  std::vector<Point3> points_;
  Aabb box_;
};

}  // namespace hullwrap
