#pragma once

// Shared clouds and brute-force oracles for the test suites. The oracles use
// their own arithmetic (float with a wide filter, GMP behind it) and never
// call the library's predicates.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "hullwrap/point_cloud.hpp"
#include "hullwrap/surface_mesh.hpp"
#include "support/exact_oracle.hpp"

namespace fixtures {

namespace hw = hullwrap;

inline hw::PointCloud cloud_of(std::vector<hw::Point3> pts) { return hw::PointCloud::from_points(std::move(pts)); }

inline hw::PointCloud tetra_cloud() { return cloud_of({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}); }

inline std::vector<hw::Facet> tetra_facets() { return {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}}; }

/// Unit cube corners 0..7 followed by the centroid (id 8).
inline hw::PointCloud cube_centroid_cloud() {
  std::vector<hw::Point3> pts;
  for (int i = 0; i < 8; ++i) pts.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
  pts.push_back({0.5, 0.5, 0.5});
  return cloud_of(std::move(pts));
}

/// Orientation sign with a loose float filter and a rational fallback.
inline int orient(const hw::Point3& p, const hw::Point3& q, const hw::Point3& r, const hw::Point3& s) {
  const double ux = q.x - p.x, uy = q.y - p.y, uz = q.z - p.z;
  const double vx = r.x - p.x, vy = r.y - p.y, vz = r.z - p.z;
  const double wx = s.x - p.x, wy = s.y - p.y, wz = s.z - p.z;
  const double det = ux * (vy * wz - vz * wy) + uy * (vz * wx - vx * wz) + uz * (vx * wy - vy * wx);
  const double mag = std::abs(ux) * (std::abs(vy * wz) + std::abs(vz * wy)) +
                     std::abs(uy) * (std::abs(vz * wx) + std::abs(vx * wz)) +
                     std::abs(uz) * (std::abs(vx * wy) + std::abs(vy * wx));
  if (std::abs(det) > 1e-10 * mag) return det > 0 ? 1 : -1;
  return oracle::orient(p, q, r, s);
}

inline double det6(const hw::Point3& o, const hw::Point3& a, const hw::Point3& b, const hw::Point3& c) {
  const hw::Point3 u = a - o, v = b - o, w = c - o;
  return (u.x * (v.y * w.z - v.z * w.y) + u.y * (v.z * w.x - v.x * w.z) + u.z * (v.x * w.y - v.y * w.x)) / 6.0;
}

inline double mesh_volume(const std::vector<hw::Facet>& facets, std::span<const hw::Point3> pts,
                          hw::Point3 origin = {0, 0, 0}) {
  double v = 0.0;
  for (const auto& f : facets) v += det6(origin, pts[f[0]], pts[f[1]], pts[f[2]]);
  return v;
}

inline double tri_area(const hw::Point3& a, const hw::Point3& b, const hw::Point3& c) {
  const hw::Point3 u = b - a, v = c - a;
  const double x = u.y * v.z - u.z * v.y, y = u.z * v.x - u.x * v.z, z = u.x * v.y - u.y * v.x;
  return 0.5 * std::sqrt(x * x + y * y + z * z);
}

inline double mesh_area(const std::vector<hw::Facet>& facets, std::span<const hw::Point3> pts) {
  double s = 0.0;
  for (const auto& f : facets) s += tri_area(pts[f[0]], pts[f[1]], pts[f[2]]);
  return s;
}

/// Whether `p` is outside the closed 2D hull of `others` (all in one plane
/// whose projection drops `drop`).
inline bool extreme_in_plane(const oracle::QPoint& p, const std::vector<oracle::QPoint>& others, int drop) {
  const std::size_t n = others.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (oracle::orient2(others[i], others[j], p, drop) == 0 && oracle::in_box(others[i], others[j], p)) return false;
      for (std::size_t k = j + 1; k < n; ++k) {
        if (oracle::orient2(others[i], others[j], others[k], drop) == 0) continue;  // segments cover it
        if (oracle::point_in_tri_2d(p, {others[i], others[j], others[k]}, drop)) return false;
      }
    }
  }
  return true;
}

/// Strictly extreme points by exhaustive enumeration of supporting planes:
/// a point is a vertex iff it lies on a supporting plane and is a corner of
/// the planar hull of the cloud points in that plane.
inline std::vector<hw::PointId> hull_vertex_oracle(std::span<const hw::Point3> pts) {
  const std::size_t n = pts.size();
  std::set<hw::PointId> vertices;
  std::set<std::vector<hw::PointId>> seen;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t c = b + 1; c < n; ++c) {
        int side = 0;
        bool support = true;
        std::vector<hw::PointId> plane{hw::PointId(a), hw::PointId(b), hw::PointId(c)};
        for (std::size_t q = 0; q < n && support; ++q) {
          if (q == a || q == b || q == c) continue;
          const int o = orient(pts[a], pts[b], pts[c], pts[q]);
          if (o == 0) {
            plane.push_back(hw::PointId(q));
          } else if (side == 0) {
            side = o;
          } else if (o != side) {
            support = false;
          }
        }
        if (!support) continue;
        const oracle::QTriangle t{oracle::to_q(pts[a]), oracle::to_q(pts[b]), oracle::to_q(pts[c])};
        int drop = -1;
        for (int d = 0; d < 3; ++d) {
          if (oracle::orient2(t[0], t[1], t[2], d) != 0) drop = d;
        }
        if (drop < 0) continue;  // collinear triple
        std::sort(plane.begin(), plane.end());
        if (!seen.insert(plane).second) continue;
        for (hw::PointId p : plane) {
          if (vertices.count(p)) continue;
          std::vector<oracle::QPoint> others;
          for (hw::PointId q : plane) {
            if (q != p) others.push_back(oracle::to_q(pts[q]));
          }
          if (extreme_in_plane(oracle::to_q(pts[p]), others, drop)) vertices.insert(p);
        }
      }
    }
  }
  return {vertices.begin(), vertices.end()};
}

inline double seg_dist(const hw::Point3& p, const hw::Point3& a, const hw::Point3& b) {
  const hw::Point3 ab = b - a;
  double t = ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y + (p.z - a.z) * ab.z) / (ab.x * ab.x + ab.y * ab.y + ab.z * ab.z);
  t = std::clamp(t, 0.0, 1.0);
  const hw::Point3 x{a.x + t * ab.x, a.y + t * ab.y, a.z + t * ab.z};
  return std::sqrt((p.x - x.x) * (p.x - x.x) + (p.y - x.y) * (p.y - x.y) + (p.z - x.z) * (p.z - x.z));
}

/// Point-triangle distance as the minimum of the plane foot (when inside)
/// and the three edge distances.
inline double tri_dist(const hw::Point3& p, const hw::Point3& a, const hw::Point3& b, const hw::Point3& c) {
  const hw::Point3 u = b - a, v = c - a;
  const hw::Point3 n{u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x};
  const double nn = n.x * n.x + n.y * n.y + n.z * n.z;
  const double h = ((p.x - a.x) * n.x + (p.y - a.y) * n.y + (p.z - a.z) * n.z) / nn;
  const hw::Point3 f{p.x - h * n.x, p.y - h * n.y, p.z - h * n.z};
  const auto side = [&](const hw::Point3& s, const hw::Point3& e) {
    const hw::Point3 d = e - s, w = f - s;
    const hw::Point3 x{d.y * w.z - d.z * w.y, d.z * w.x - d.x * w.z, d.x * w.y - d.y * w.x};
    return x.x * n.x + x.y * n.y + x.z * n.z;
  };
  if (side(a, b) >= 0 && side(b, c) >= 0 && side(c, a) >= 0) return std::abs(h) * std::sqrt(nn);
  return std::min({seg_dist(p, a, b), seg_dist(p, b, c), seg_dist(p, c, a)});
}

inline double centroid_dist(const hw::Point3& p, const hw::Point3& a, const hw::Point3& b, const hw::Point3& c) {
  const double x = (a.x + b.x + c.x) / 3 - p.x, y = (a.y + b.y + c.y) / 3 - p.y, z = (a.z + b.z + c.z) / 3 - p.z;
  return std::sqrt(x * x + y * y + z * z);
}

/// All facet pairs in forbidden contact, by rational arithmetic. Pairs whose
/// closed bounding boxes are disjoint are skipped (box tests are exact).
inline std::vector<std::array<hw::FacetId, 2>> intersection_witnesses(const std::vector<hw::Facet>& facets,
                                                                      std::span<const hw::Point3> pts) {
  std::vector<std::array<hw::FacetId, 2>> out;
  const auto lo = [&](const hw::Facet& f, int k) {
    return std::min({pts[f[0]][k], pts[f[1]][k], pts[f[2]][k]});
  };
  const auto hi = [&](const hw::Facet& f, int k) {
    return std::max({pts[f[0]][k], pts[f[1]][k], pts[f[2]][k]});
  };
  for (hw::FacetId i = 0; i < facets.size(); ++i) {
    for (hw::FacetId j = i + 1; j < facets.size(); ++j) {
      const auto& f = facets[i];
      const auto& g = facets[j];
      bool apart = false;
      for (int k = 0; k < 3; ++k) apart = apart || hi(f, k) < lo(g, k) || hi(g, k) < lo(f, k);
      if (apart) continue;
      if (oracle::forbidden_contact(oracle::to_q(hw::triangle_of(f, pts)), oracle::to_q(hw::triangle_of(g, pts)),
                                    hw::SharedTopology::of(f, g))) {
        out.push_back({i, j});
      }
    }
  }
  return out;
}

inline std::vector<std::array<hw::FacetId, 2>> intersection_witnesses(const hw::SurfaceMesh& mesh,
                                                                      const hw::PointCloud& cloud) {
  return intersection_witnesses(mesh.facets(), cloud.points());
}

}  // namespace fixtures
