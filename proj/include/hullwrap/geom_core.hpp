#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "hullwrap/detail/expansion.hpp"
#include "hullwrap/error.hpp"

namespace hullwrap {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }

  friend Point3 operator+(const Point3& a, const Point3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Point3 operator-(const Point3& a, const Point3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Point3 operator*(const Point3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend Point3 operator*(double s, const Point3& a) { return a * s; }
  friend bool operator==(const Point3&, const Point3&) = default;
};

inline double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Point3 cross(const Point3& a, const Point3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double squared_norm(const Point3& a) { return dot(a, a); }
inline double norm(const Point3& a) { return std::sqrt(squared_norm(a)); }
inline double distance(const Point3& a, const Point3& b) { return norm(a - b); }

inline bool is_finite(const Point3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

/// Ordered triangle; the winding carries the facet orientation.
struct Triangle {
  Point3 a;
  Point3 b;
  Point3 c;

  const Point3& operator[](int i) const { return i == 0 ? a : (i == 1 ? b : c); }
};

struct Aabb {
  Point3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
  Point3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};

  static Aabb of(const Triangle& t) {
    Aabb box;
    box.expand(t.a);
    box.expand(t.b);
    box.expand(t.c);
    return box;
  }

  static Aabb merge(const Aabb& u, const Aabb& v) {
    Aabb box = u;
    box.expand(v.lo);
    box.expand(v.hi);
    return box;
  }

  void expand(const Point3& p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }

  bool overlaps(const Aabb& o) const {
    return lo.x <= o.hi.x && o.lo.x <= hi.x && lo.y <= o.hi.y && o.lo.y <= hi.y && lo.z <= o.hi.z &&
           o.lo.z <= hi.z;
  }

  bool contains(const Point3& p) const {
    return lo.x <= p.x && p.x <= hi.x && lo.y <= p.y && p.y <= hi.y && lo.z <= p.z && p.z <= hi.z;
  }

  double surface_area() const {
    const Point3 d = hi - lo;
    return 2.0 * (d.x * d.y + d.y * d.z + d.z * d.x);
  }

  double squared_distance(const Point3& p) const {
    const auto axis = [](double v, double l, double h) {
      const double d = v < l ? l - v : (v > h ? v - h : 0.0);
      return d * d;
    };
    return axis(p.x, lo.x, hi.x) + axis(p.y, lo.y, hi.y) + axis(p.z, lo.z, hi.z);
  }

  double diagonal() const { return norm(hi - lo); }
};

// ---------------------------------------------------------------------------
// Exact-sign predicates. A floating-point evaluation is accepted when it
// clears a forward error bound; otherwise the determinant is evaluated
// exactly with expansion arithmetic.

namespace detail {

inline constexpr double kEpsilon = 0x1p-53;
inline constexpr double kOrient3dBound = (7.0 + 56.0 * kEpsilon) * kEpsilon;
inline constexpr double kOrient2dBound = (3.0 + 16.0 * kEpsilon) * kEpsilon;

inline int orient3d_exact(const Point3& p, const Point3& q, const Point3& r, const Point3& s) {
  const Expansion ux = exact_diff(q.x, p.x), uy = exact_diff(q.y, p.y), uz = exact_diff(q.z, p.z);
  const Expansion vx = exact_diff(r.x, p.x), vy = exact_diff(r.y, p.y), vz = exact_diff(r.z, p.z);
  const Expansion wx = exact_diff(s.x, p.x), wy = exact_diff(s.y, p.y), wz = exact_diff(s.z, p.z);
  const Expansion det = ux * (vy * wz - vz * wy) + uy * (vz * wx - vx * wz) + uz * (vx * wy - vy * wx);
  return det.sign();
}

inline int orient2d_exact(double ax, double ay, double bx, double by, double cx, double cy) {
  const Expansion det =
      exact_diff(bx, ax) * exact_diff(cy, ay) - exact_diff(by, ay) * exact_diff(cx, ax);
  return det.sign();
}

// Exact signed volume determinant det[a-o, b-o, c-o] as an expansion.
inline Expansion tet_determinant_exact(const Point3& o, const Point3& a, const Point3& b, const Point3& c) {
  const Expansion ux = exact_diff(a.x, o.x), uy = exact_diff(a.y, o.y), uz = exact_diff(a.z, o.z);
  const Expansion vx = exact_diff(b.x, o.x), vy = exact_diff(b.y, o.y), vz = exact_diff(b.z, o.z);
  const Expansion wx = exact_diff(c.x, o.x), wy = exact_diff(c.y, o.y), wz = exact_diff(c.z, o.z);
  return ux * (vy * wz - vz * wy) + uy * (vz * wx - vx * wz) + uz * (vx * wy - vy * wx);
}

}  // namespace detail

/// Sign of det[q-p, r-p, s-p]: +1 for (origin, e_x, e_y, e_z).
inline int orientation(const Point3& p, const Point3& q, const Point3& r, const Point3& s) {
  const double ux = q.x - p.x, uy = q.y - p.y, uz = q.z - p.z;
  const double vx = r.x - p.x, vy = r.y - p.y, vz = r.z - p.z;
  const double wx = s.x - p.x, wy = s.y - p.y, wz = s.z - p.z;
  const double m1 = vy * wz, m2 = vz * wy;
  const double m3 = vz * wx, m4 = vx * wz;
  const double m5 = vx * wy, m6 = vy * wx;
  const double det = ux * (m1 - m2) + uy * (m3 - m4) + uz * (m5 - m6);
  const double permanent = std::abs(ux) * (std::abs(m1) + std::abs(m2)) +
                           std::abs(uy) * (std::abs(m3) + std::abs(m4)) +
                           std::abs(uz) * (std::abs(m5) + std::abs(m6));
  const double bound = detail::kOrient3dBound * permanent;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return detail::orient3d_exact(p, q, r, s);
}

/// Planar orientation of the projection that drops coordinate `drop_axis`.
inline int orientation_projected(const Point3& a, const Point3& b, const Point3& c, int drop_axis) {
  const int i = (drop_axis + 1) % 3;
  const int j = (drop_axis + 2) % 3;
  const double ax = a[i], ay = a[j], bx = b[i], by = b[j], cx = c[i], cy = c[j];
  const double left = (bx - ax) * (cy - ay);
  const double right = (by - ay) * (cx - ax);
  const double det = left - right;
  const double bound = detail::kOrient2dBound * (std::abs(left) + std::abs(right));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return detail::orient2d_exact(ax, ay, bx, by, cx, cy);
}

/// Axis along which the triangle's normal is largest; dropping it keeps the
/// projection non-degenerate.
inline int dominant_axis(const Triangle& t) {
  const Point3 n = cross(t.b - t.a, t.c - t.a);
  const double ax = std::abs(n.x), ay = std::abs(n.y), az = std::abs(n.z);
  if (ax >= ay && ax >= az) return 0;
  return ay >= az ? 1 : 2;
}

/// Exact collinearity of three points.
inline bool collinear(const Point3& a, const Point3& b, const Point3& c) {
  return orientation_projected(a, b, c, 0) == 0 && orientation_projected(a, b, c, 1) == 0 &&
         orientation_projected(a, b, c, 2) == 0;
}

// ---------------------------------------------------------------------------
// Measures.

inline double triangle_area(const Triangle& t) { return 0.5 * norm(cross(t.b - t.a, t.c - t.a)); }

inline double longest_edge_squared(const Triangle& t) {
  return std::max({squared_norm(t.b - t.a), squared_norm(t.c - t.b), squared_norm(t.a - t.c)});
}

/// Relative degeneracy threshold: area below 1e-12 of the squared longest edge.
inline constexpr double kDegeneracyRatio = 1e-12;

inline bool is_degenerate(const Triangle& t) {
  const double longest = longest_edge_squared(t);
  if (!(longest > 0.0)) return true;
  return !(triangle_area(t) > kDegeneracyRatio * longest);
}

inline void require_non_degenerate(const Triangle& t) {
  if (is_degenerate(t)) throw Error(ErrorKind::DegenerateFacet, "triangle area below degeneracy tolerance");
}

inline Point3 centroid(const Triangle& t) { return (t.a + t.b + t.c) * (1.0 / 3.0); }

/// Signed volume of the tetrahedron (origin, a, b, c); positive when the
/// facet winds counter-clockwise seen from outside and origin is behind it.
inline double signed_tet_volume(const Point3& origin, const Triangle& t) {
  const Point3 ao = t.a - origin;
  return dot(ao, cross(t.b - t.a, t.c - t.a)) / 6.0;
}

/// Same quantity, exact up to the final rounding.
inline double signed_tet_volume_exact(const Point3& origin, const Triangle& t) {
  return detail::tet_determinant_exact(origin, t.a, t.b, t.c).estimate() / 6.0;
}

namespace detail {

// Closest point on a closed triangle (Voronoi-region walk). No degeneracy check.
inline Point3 closest_point(const Point3& p, const Triangle& t) {
  const Point3 ab = t.b - t.a, ac = t.c - t.a, ap = p - t.a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return t.a;
  const Point3 bp = p - t.b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return t.b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return t.a + ab * (d1 / (d1 - d3));
  const Point3 cp = p - t.c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return t.c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return t.a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return t.b + (t.c - t.b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  }
  const double denom = 1.0 / (va + vb + vc);
  return t.a + ab * (vb * denom) + ac * (vc * denom);
}

inline double point_triangle_distance_unchecked(const Point3& p, const Triangle& t) {
  return distance(p, closest_point(p, t));
}

inline double centroid_distance_unchecked(const Point3& p, const Triangle& t) {
  return distance(p, centroid(t));
}

}  // namespace detail

inline double point_triangle_distance(const Point3& p, const Triangle& t) {
  require_non_degenerate(t);
  return detail::point_triangle_distance_unchecked(p, t);
}

inline double centroid_distance(const Point3& p, const Triangle& t) {
  require_non_degenerate(t);
  return detail::centroid_distance_unchecked(p, t);
}

// ---------------------------------------------------------------------------
// Intersection tests on closed triangles, all decided by exact signs.

/// Vertices two facets share in the mesh, as corner pairs (index into the
/// first triangle, index into the second).
struct SharedTopology {
  int count = 0;
  std::array<std::array<int, 2>, 3> corners{};

  template <typename Facet>
  static SharedTopology of(const Facet& f, const Facet& g) {
    SharedTopology s;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (f[i] == g[j]) s.corners[static_cast<std::size_t>(s.count++)] = {i, j};
      }
    }
    return s;
  }
};

namespace detail {

inline bool on_segment_2d(const Point3& a, const Point3& b, const Point3& p, int drop) {
  const int i = (drop + 1) % 3, j = (drop + 2) % 3;
  return std::min(a[i], b[i]) <= p[i] && p[i] <= std::max(a[i], b[i]) && std::min(a[j], b[j]) <= p[j] &&
         p[j] <= std::max(a[j], b[j]);
}

// Closed segments in the projection dropping `drop`.
inline bool segments_intersect_2d(const Point3& a, const Point3& b, const Point3& c, const Point3& d, int drop) {
  const int o1 = orientation_projected(a, b, c, drop);
  const int o2 = orientation_projected(a, b, d, drop);
  const int o3 = orientation_projected(c, d, a, drop);
  const int o4 = orientation_projected(c, d, b, drop);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && on_segment_2d(a, b, c, drop)) return true;
  if (o2 == 0 && on_segment_2d(a, b, d, drop)) return true;
  if (o3 == 0 && on_segment_2d(c, d, a, drop)) return true;
  if (o4 == 0 && on_segment_2d(c, d, b, drop)) return true;
  return false;
}

inline bool point_in_triangle_2d(const Point3& p, const Triangle& t, int drop) {
  const int s1 = orientation_projected(t.a, t.b, p, drop);
  const int s2 = orientation_projected(t.b, t.c, p, drop);
  const int s3 = orientation_projected(t.c, t.a, p, drop);
  const bool has_neg = s1 < 0 || s2 < 0 || s3 < 0;
  const bool has_pos = s1 > 0 || s2 > 0 || s3 > 0;
  return !(has_neg && has_pos);
}

inline bool coplanar_triangles_intersect(const Triangle& t1, const Triangle& t2) {
  const int drop = dominant_axis(t1);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (segments_intersect_2d(t1[i], t1[(i + 1) % 3], t2[j], t2[(j + 1) % 3], drop)) return true;
    }
  }
  return point_in_triangle_2d(t1.a, t2, drop) || point_in_triangle_2d(t2.a, t1, drop);
}

// Interval overlap on the line where the two supporting planes meet; the
// permutations put the lone vertex of each triangle first.
inline bool check_min_max(const Point3& p1, const Point3& q1, const Point3& r1, const Point3& p2,
                          const Point3& q2, const Point3& r2) {
  if (orientation(q1, p2, p1, q2) > 0) return false;
  if (orientation(p1, p2, r1, r2) > 0) return false;
  return true;
}

inline bool tri_tri_3d(const Point3& p1, const Point3& q1, const Point3& r1, const Point3& p2,
                       const Point3& q2, const Point3& r2, int dp2, int dq2, int dr2, const Triangle& t1,
                       const Triangle& t2) {
  if (dp2 > 0) {
    if (dq2 > 0) return check_min_max(p1, r1, q1, r2, p2, q2);
    if (dr2 > 0) return check_min_max(p1, r1, q1, q2, r2, p2);
    return check_min_max(p1, q1, r1, p2, q2, r2);
  }
  if (dp2 < 0) {
    if (dq2 < 0) return check_min_max(p1, q1, r1, r2, p2, q2);
    if (dr2 < 0) return check_min_max(p1, q1, r1, q2, r2, p2);
    return check_min_max(p1, r1, q1, p2, q2, r2);
  }
  if (dq2 < 0) {
    if (dr2 >= 0) return check_min_max(p1, r1, q1, q2, r2, p2);
    return check_min_max(p1, q1, r1, p2, q2, r2);
  }
  if (dq2 > 0) {
    if (dr2 > 0) return check_min_max(p1, r1, q1, p2, q2, r2);
    return check_min_max(p1, q1, r1, q2, r2, p2);
  }
  if (dr2 > 0) return check_min_max(p1, q1, r1, r2, p2, q2);
  if (dr2 < 0) return check_min_max(p1, r1, q1, r2, p2, q2);
  return coplanar_triangles_intersect(t1, t2);
}

// Closed-triangle overlap without any shared topology.
inline bool triangles_overlap(const Triangle& t1, const Triangle& t2) {
  const Point3 &p1 = t1.a, &q1 = t1.b, &r1 = t1.c;
  const Point3 &p2 = t2.a, &q2 = t2.b, &r2 = t2.c;

  const int dp1 = orientation(p2, q2, r2, p1);
  const int dq1 = orientation(p2, q2, r2, q1);
  const int dr1 = orientation(p2, q2, r2, r1);
  if (dp1 * dq1 > 0 && dp1 * dr1 > 0) return false;

  const int dp2 = orientation(p1, q1, r1, p2);
  const int dq2 = orientation(p1, q1, r1, q2);
  const int dr2 = orientation(p1, q1, r1, r2);
  if (dp2 * dq2 > 0 && dp2 * dr2 > 0) return false;

  if (dp1 > 0) {
    if (dq1 > 0) return tri_tri_3d(r1, p1, q1, p2, r2, q2, dp2, dr2, dq2, t1, t2);
    if (dr1 > 0) return tri_tri_3d(q1, r1, p1, p2, r2, q2, dp2, dr2, dq2, t1, t2);
    return tri_tri_3d(p1, q1, r1, p2, q2, r2, dp2, dq2, dr2, t1, t2);
  }
  if (dp1 < 0) {
    if (dq1 < 0) return tri_tri_3d(r1, p1, q1, p2, q2, r2, dp2, dq2, dr2, t1, t2);
    if (dr1 < 0) return tri_tri_3d(q1, r1, p1, p2, q2, r2, dp2, dq2, dr2, t1, t2);
    return tri_tri_3d(p1, q1, r1, p2, r2, q2, dp2, dr2, dq2, t1, t2);
  }
  if (dq1 < 0) {
    if (dr1 >= 0) return tri_tri_3d(q1, r1, p1, p2, r2, q2, dp2, dr2, dq2, t1, t2);
    return tri_tri_3d(p1, q1, r1, p2, q2, r2, dp2, dq2, dr2, t1, t2);
  }
  if (dq1 > 0) {
    if (dr1 > 0) return tri_tri_3d(p1, q1, r1, p2, r2, q2, dp2, dr2, dq2, t1, t2);
    return tri_tri_3d(q1, r1, p1, p2, q2, r2, dp2, dq2, dr2, t1, t2);
  }
  if (dr1 > 0) return tri_tri_3d(r1, p1, q1, p2, q2, r2, dp2, dq2, dr2, t1, t2);
  if (dr1 < 0) return tri_tri_3d(r1, p1, q1, p2, r2, q2, dp2, dr2, dq2, t1, t2);
  return coplanar_triangles_intersect(t1, t2);
}

}  // namespace detail

/// Whether the closed segment [s, e] meets the closed triangle.
inline bool segment_intersects_triangle(const Point3& s, const Point3& e, const Triangle& t) {
  const int os = orientation(t.a, t.b, t.c, s);
  const int oe = orientation(t.a, t.b, t.c, e);
  if (os * oe > 0) return false;
  if (os == 0 && oe == 0) {
    const int drop = dominant_axis(t);
    if (detail::point_in_triangle_2d(s, t, drop) || detail::point_in_triangle_2d(e, t, drop)) return true;
    for (int i = 0; i < 3; ++i) {
      if (detail::segments_intersect_2d(s, e, t[i], t[(i + 1) % 3], drop)) return true;
    }
    return false;
  }
  const int s1 = orientation(s, e, t.a, t.b);
  const int s2 = orientation(s, e, t.b, t.c);
  const int s3 = orientation(s, e, t.c, t.a);
  const bool has_neg = s1 < 0 || s2 < 0 || s3 < 0;
  const bool has_pos = s1 > 0 || s2 > 0 || s3 > 0;
  return !(has_neg && has_pos);
}

/// True iff the two closed triangles touch anywhere outside the vertices and
/// edge declared in `shared`. Contact along a declared shared edge or vertex is
/// permitted; coplanar overlap across a shared edge is not.
inline bool triangles_intersect(const Triangle& t1, const Triangle& t2, const SharedTopology& shared) {
  switch (shared.count) {
    case 0:
      return detail::triangles_overlap(t1, t2);
    case 1: {
      // Both triangles are convex and contain the shared vertex, so they meet
      // elsewhere iff an opposite edge of one reaches the other.
      const int i = shared.corners[0][0], j = shared.corners[0][1];
      const Point3& e1a = t1[(i + 1) % 3];
      const Point3& e1b = t1[(i + 2) % 3];
      const Point3& e2a = t2[(j + 1) % 3];
      const Point3& e2b = t2[(j + 2) % 3];
      return segment_intersects_triangle(e1a, e1b, t2) || segment_intersects_triangle(e2a, e2b, t1);
    }
    case 2: {
      // Distinct planes through a common edge meet only on that edge.
      const int i0 = shared.corners[0][0], i1 = shared.corners[1][0];
      const int j0 = shared.corners[0][1], j1 = shared.corners[1][1];
      const Point3& apex1 = t1[3 - i0 - i1];
      const Point3& apex2 = t2[3 - j0 - j1];
      const Point3& ea = t1[i0];
      const Point3& eb = t1[i1];
      if (orientation(ea, eb, apex1, apex2) != 0) return false;
      const int drop = dominant_axis(t1);
      return orientation_projected(ea, eb, apex1, drop) == orientation_projected(ea, eb, apex2, drop);
    }
    default:
      return true;
  }
}

}  // namespace hullwrap
