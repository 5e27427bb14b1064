#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hullwrap/aabb_tree.hpp"
#include "hullwrap/contraction.hpp"
#include "hullwrap/error.hpp"
#include "hullwrap/geom_core.hpp"
#include "hullwrap/point_cloud.hpp"
#include "hullwrap/surface_mesh.hpp"
#include "hullwrap/trace.hpp"

namespace hullwrap {

using Edge = std::array<PointId, 2>;
using FacetPair = std::array<FacetId, 2>;

// ---------------------------------------------------------------------------
// Topology

struct ManifoldReport {
  bool closed = true;                  // every undirected edge has exactly two facets
  bool orientation_consistent = true;  // and they traverse it in opposite directions
  bool vertex_fans_ok = true;          // each vertex link is a single cycle
  std::vector<Edge> boundary_edges;    // edges with one facet, as traversed
  std::vector<Edge> nonmanifold_edges; // edges with three or more facets (sorted endpoints)
  std::vector<Edge> misoriented_edges; // two facets traversing the same direction (sorted endpoints)
  std::vector<PointId> nonmanifold_vertices;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t facets = 0;
  long euler = 0;

  bool ok() const { return closed && orientation_consistent && vertex_fans_ok; }
};

inline ManifoldReport is_closed_manifold(const SurfaceMesh& mesh) {
  ManifoldReport r;
  r.facets = mesh.facet_count();
  // undirected edge -> directed traversals
  std::map<Edge, std::vector<Edge>> uses;
  for (const Facet& f : mesh.facets()) {
    for (int k = 0; k < 3; ++k) {
      const PointId a = f[static_cast<std::size_t>(k)], b = f[static_cast<std::size_t>((k + 1) % 3)];
      uses[{std::min(a, b), std::max(a, b)}].push_back({a, b});
    }
  }
  r.edges = uses.size();
  for (const auto& [e, dirs] : uses) {
    if (dirs.size() == 1) {
      r.closed = false;
      r.boundary_edges.push_back(dirs.front());
    } else if (dirs.size() > 2) {
      r.closed = false;
      r.nonmanifold_edges.push_back(e);
    } else if (dirs[0] == dirs[1]) {
      r.orientation_consistent = false;
      r.misoriented_edges.push_back(e);
    }
  }

  // Link of each vertex: the edge opposite it in every incident facet.
  std::map<PointId, std::vector<Edge>> links;
  for (const Facet& f : mesh.facets()) {
    for (int k = 0; k < 3; ++k) {
      links[f[static_cast<std::size_t>(k)]].push_back(
          {f[static_cast<std::size_t>((k + 1) % 3)], f[static_cast<std::size_t>((k + 2) % 3)]});
    }
  }
  r.vertices = links.size();
  for (const auto& [v, link] : links) {
    std::unordered_map<PointId, std::vector<PointId>> adj;
    for (const Edge& e : link) {
      adj[e[0]].push_back(e[1]);
      adj[e[1]].push_back(e[0]);
    }
    bool cycle = true;
    for (const auto& [u, nb] : adj) cycle = cycle && nb.size() == 2;
    if (cycle) {
      // connected: walk from any link vertex and count how many are reached
      std::vector<PointId> stack{adj.begin()->first};
      std::unordered_map<PointId, bool> seen{{stack.back(), true}};
      while (!stack.empty()) {
        const PointId u = stack.back();
        stack.pop_back();
        for (PointId w : adj[u]) {
          if (seen.try_emplace(w, true).second) stack.push_back(w);
        }
      }
      cycle = seen.size() == adj.size() && link.size() == adj.size();
    }
    if (!cycle) {
      r.vertex_fans_ok = false;
      r.nonmanifold_vertices.push_back(v);
    }
  }
  r.euler = static_cast<long>(r.vertices) - static_cast<long>(r.edges) + static_cast<long>(r.facets);
  return r;
}

// ---------------------------------------------------------------------------
// Self-intersection

struct IntersectionReport {
  bool free = true;
  std::vector<FacetPair> witnesses;  // ascending (i < j), lexicographic
  std::vector<FacetId> degenerate;   // facets excluded from the scan
};

namespace detail {

inline void require_in_range(const SurfaceMesh& mesh, const PointCloud& cloud) {
  for (const Facet& f : mesh.facets()) {
    for (PointId v : f) {
      if (v >= cloud.size()) {
        throw Error(ErrorKind::InconsistentInput, "mesh references point " + std::to_string(v) + " outside a cloud of " +
                                                      std::to_string(cloud.size()));
      }
    }
  }
}

inline bool forbidden_pair(const SurfaceMesh& mesh, std::span<const Point3> pts, FacetId i, FacetId j) {
  const Facet& f = mesh.facet(i);
  const Facet& g = mesh.facet(j);
  return triangles_intersect(triangle_of(f, pts), triangle_of(g, pts), SharedTopology::of(f, g));
}

inline std::vector<bool> degenerate_mask(const SurfaceMesh& mesh, std::span<const Point3> pts,
                                         std::vector<FacetId>& list) {
  std::vector<bool> mask(mesh.facet_count(), false);
  for (FacetId f = 0; f < mesh.facet_count(); ++f) {
    const Facet& t = mesh.facet(f);
    if (t[0] == t[1] || t[1] == t[2] || t[2] == t[0] || is_degenerate(triangle_of(t, pts))) {
      mask[f] = true;
      list.push_back(f);
    }
  }
  return mask;
}

}  // namespace detail

/// Every facet pair meeting outside the vertices and edges they share in the
/// mesh; candidate pairs come from a bounding-box hierarchy.
inline IntersectionReport self_intersection_free(const SurfaceMesh& mesh, const PointCloud& cloud) {
  detail::require_in_range(mesh, cloud);
  const auto pts = cloud.points();
  IntersectionReport r;
  const auto skip = detail::degenerate_mask(mesh, pts, r.degenerate);
  AabbTree tree;
  for (FacetId f = 0; f < mesh.facet_count(); ++f) {
    if (!skip[f]) tree.insert(Aabb::of(mesh.triangle(f, pts)), f);
  }
  for (FacetId i = 0; i < mesh.facet_count(); ++i) {
    if (skip[i]) continue;
    std::vector<FacetId> hits;
    tree.query(Aabb::of(mesh.triangle(i, pts)), [&](FacetId j) {
      if (j > i) hits.push_back(j);
    });
    std::sort(hits.begin(), hits.end());
    for (FacetId j : hits) {
      if (detail::forbidden_pair(mesh, pts, i, j)) r.witnesses.push_back({i, j});
    }
  }
  r.free = r.witnesses.empty();
  return r;
}

/// Same contract as self_intersection_free, testing all pairs.
inline IntersectionReport self_intersection_free_exhaustive(const SurfaceMesh& mesh, const PointCloud& cloud) {
  detail::require_in_range(mesh, cloud);
  const auto pts = cloud.points();
  IntersectionReport r;
  const auto skip = detail::degenerate_mask(mesh, pts, r.degenerate);
  for (FacetId i = 0; i < mesh.facet_count(); ++i) {
    for (FacetId j = i + 1; j < mesh.facet_count() && !skip[i]; ++j) {
      if (!skip[j] && detail::forbidden_pair(mesh, pts, i, j)) r.witnesses.push_back({i, j});
    }
  }
  r.free = r.witnesses.empty();
  return r;
}

// ---------------------------------------------------------------------------
// Distances from the cloud to the surface

/// Distance from each cloud point to the surface; mesh vertices are matched by
/// id and score exactly zero.
inline std::vector<double> surface_distances(const SurfaceMesh& mesh, const PointCloud& cloud) {
  detail::require_in_range(mesh, cloud);
  std::vector<double> out(cloud.size(), 0.0);
  if (mesh.facet_count() == 0) {
    std::fill(out.begin(), out.end(), std::numeric_limits<double>::infinity());
    return out;
  }
  const FacetIndex index(mesh, cloud.points());
  for (PointId i = 0; i < cloud.size(); ++i) {
    if (!mesh.has_vertex(i)) out[i] = index.nearest(cloud[i], PriorityMode::TrueDistance).first;
  }
  return out;
}

/// Sum over cloud points of the squared distance to the surface.
inline double surface_metric(const SurfaceMesh& mesh, const PointCloud& cloud) {
  double sum = 0.0;
  for (double d : surface_distances(mesh, cloud)) sum += d * d;
  return sum;
}

/// Largest distance from a cloud point to the surface.
inline double directed_hausdorff(const PointCloud& cloud, const SurfaceMesh& mesh) {
  double worst = 0.0;
  for (double d : surface_distances(mesh, cloud)) worst = std::max(worst, d);
  return worst;
}

// ---------------------------------------------------------------------------
// Containment

namespace detail {

// Ray parity against a closed, embedded surface. Returns +1 inside, 0 on the
// surface, -1 outside. Degenerate ray hits (edge, vertex, in-plane) restart
// with the next direction of a fixed sequence.
class Inclusion {
 public:
  Inclusion(const SurfaceMesh& mesh, std::span<const Point3> pts) : mesh_(mesh), pts_(pts) {
    for (FacetId f = 0; f < mesh.facet_count(); ++f) {
      const Aabb b = Aabb::of(mesh.triangle(f, pts));
      box_ = Aabb::merge(box_, b);
      tree_.insert(b, f);
    }
    reach_ = 4.0 * box_.diagonal() + 1.0;
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    while (directions_.size() < 64) {
      const Point3 d{u(rng), u(rng), u(rng)};
      const double n = norm(d);
      if (n > 0.1 && n <= 1.0) directions_.push_back(d * (1.0 / n));
    }
  }

  int classify(PointId q) const {
    if (mesh_.has_vertex(q)) return 0;
    const Point3& p = pts_[q];
    if (on_surface(p)) return 0;
    if (!box_.contains(p)) return -1;
    for (const Point3& dir : directions_) {
      const auto parity = cast(p, p + dir * reach_);
      if (parity) return *parity ? 1 : -1;
    }
    throw Error(ErrorKind::InvalidMesh, "no non-degenerate ray found for point " + std::to_string(q));
  }

 private:
  bool on_surface(const Point3& p) const {
    Aabb probe;
    probe.expand(p);
    bool hit = false;
    tree_.query(probe, [&](FacetId f) {
      if (hit) return;
      const Triangle t = mesh_.triangle(f, pts_);
      hit = orientation(t.a, t.b, t.c, p) == 0 && point_in_triangle_2d(p, t, dominant_axis(t));
    });
    return hit;
  }

  // Crossing parity of segment p->e, or nothing when the segment grazes an
  // edge, a vertex or lies in a facet plane.
  std::optional<bool> cast(const Point3& p, const Point3& e) const {
    Aabb seg;
    seg.expand(p);
    seg.expand(e);
    const Point3 dir = e - p;
    const double pad = 1e-9 * (box_.diagonal() + 1.0);
    const auto crosses_box = [&](const Aabb& b) {
      if (!b.overlaps(seg)) return false;
      double t0 = 0.0, t1 = 1.0;
      for (int a = 0; a < 3; ++a) {
        const double lo = b.lo[a] - pad, hi = b.hi[a] + pad;
        if (dir[a] == 0.0) {
          if (p[a] < lo || p[a] > hi) return false;
          continue;
        }
        double ta = (lo - p[a]) / dir[a], tb = (hi - p[a]) / dir[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1 * (1.0 + 1e-12) + 1e-12) return false;
      }
      return true;
    };
    bool degenerate = false;
    bool parity = false;
    tree_.traverse(crosses_box, [&](FacetId f) {
      if (degenerate) return;
      const Triangle t = mesh_.triangle(f, pts_);
      const int s1 = orientation(t.a, t.b, t.c, p);
      const int s2 = orientation(t.a, t.b, t.c, e);
      if (s1 == 0 && s2 == 0) {
        degenerate = segment_intersects_triangle(p, e, t);
        return;
      }
      if (s1 == s2) return;
      if (s1 == 0 || s2 == 0) {
        // an endpoint on the plane: p is known to be off the triangle, e is far outside
        return;
      }
      const int e1 = orientation(p, e, t.a, t.b);
      const int e2 = orientation(p, e, t.b, t.c);
      const int e3 = orientation(p, e, t.c, t.a);
      const bool any_pos = e1 > 0 || e2 > 0 || e3 > 0;
      const bool any_neg = e1 < 0 || e2 < 0 || e3 < 0;
      if (any_pos && any_neg) return;
      if (e1 == 0 || e2 == 0 || e3 == 0) {
        degenerate = true;
        return;
      }
      parity = !parity;
    });
    if (degenerate) return std::nullopt;
    return parity;
  }

  const SurfaceMesh& mesh_;
  std::span<const Point3> pts_;
  AabbTree tree_;
  Aabb box_;
  double reach_ = 1.0;
  std::vector<Point3> directions_;
};

}  // namespace detail

struct ContainmentReport {
  bool ok = true;
  std::vector<PointId> outside;  // ascending
};

inline ContainmentReport containment_report(const PointCloud& cloud, const SurfaceMesh& mesh) {
  detail::require_in_range(mesh, cloud);
  if (!is_closed_manifold(mesh).ok()) throw Error(ErrorKind::InvalidMesh, "containment needs a closed manifold surface");
  if (!self_intersection_free(mesh, cloud).free) {
    throw Error(ErrorKind::InvalidMesh, "containment needs a self-intersection-free surface");
  }
  ContainmentReport r;
  const detail::Inclusion inclusion(mesh, cloud.points());
  for (PointId q = 0; q < cloud.size(); ++q) {
    if (inclusion.classify(q) < 0) r.outside.push_back(q);
  }
  r.ok = r.outside.empty();
  return r;
}

/// Whether every cloud point lies inside or on the closed surface.
inline bool containment_check(const PointCloud& cloud, const SurfaceMesh& mesh) {
  return containment_report(cloud, mesh).ok;
}

// ---------------------------------------------------------------------------
// Trace replay

struct TraceCheck {
  bool metric_decreasing = true;
  bool hausdorff_nonincreasing = true;
  bool volume_exact = true;       // step delta equals the carved tetrahedron
  bool volume_consistent = true;  // volume series follows the step deltas
  bool area_nondecreasing = true;
  std::size_t insertions = 0;
  std::optional<std::size_t> first_failure;  // index into trace.steps
  std::string failure;

  bool ok() const {
    return metric_decreasing && hausdorff_nonincreasing && volume_exact && volume_consistent && area_nondecreasing;
  }
};

inline constexpr double kVolumeRelTolerance = 1e-9;
inline constexpr double kSeriesRelTolerance = 1e-12;
inline constexpr double kAreaRelTolerance = 1e-12;

/// Volume enclosed after the split of `facet` toward `p`, removed from the
/// surface: -det[B-A, C-A, P-A] / 6, plain floating point.
inline double carved_volume(const Point3& a, const Point3& b, const Point3& c, const Point3& p) {
  return -dot(p - a, cross(b - a, c - a)) / 6.0;
}

/// Replays the per-step records: metric strictly decreasing (non-increasing on
/// coplanar splits), Hausdorff non-increasing, volume and area bookkeeping.
inline TraceCheck check_trace(const ContractionTrace& trace, const PointCloud& cloud) {
  TraceCheck c;
  if (trace.steps.empty()) return c;
  const double v0 = std::abs(trace.steps.front().volume);
  const auto fail = [&](std::size_t i, bool& flag, const std::string& what) {
    flag = false;
    if (!c.first_failure) {
      c.first_failure = i;
      c.failure = what + " at step " + std::to_string(i);
    }
  };
  const StepRecord* prev = &trace.steps.front();
  for (std::size_t i = 1; i < trace.steps.size(); ++i) {
    const StepRecord& s = trace.steps[i];
    if (s.action != StepAction::Inserted) continue;
    ++c.insertions;
    if (s.coplanar ? !(s.metric <= prev->metric) : !(s.metric < prev->metric)) {
      fail(i, c.metric_decreasing, "metric did not decrease");
    }
    if (!(s.hausdorff <= prev->hausdorff)) fail(i, c.hausdorff_nonincreasing, "hausdorff increased");

    bool in_range = s.point < cloud.size();
    for (PointId v : s.facet) in_range = in_range && v < cloud.size();
    if (!in_range) {
      fail(i, c.volume_exact, "step references a point outside the cloud");
      prev = &s;
      continue;
    }
    const Point3 &a = cloud[s.facet[0]], &b = cloud[s.facet[1]], &cc = cloud[s.facet[2]], &p = cloud[s.point];
    const double tet = carved_volume(a, b, cc, p);
    if (s.coplanar ? s.volume_delta != 0.0 : !(std::abs(s.volume_delta - tet) <= kVolumeRelTolerance * std::abs(tet))) {
      fail(i, c.volume_exact, "volume delta differs from the carved tetrahedron");
    }
    if (!(std::abs((prev->volume - s.volume) - s.volume_delta) <= kSeriesRelTolerance * v0)) {
      fail(i, c.volume_consistent, "volume series disagrees with the step delta");
    }
    const double base = triangle_area(Triangle{a, b, cc});
    if (!(s.area_delta >= -kAreaRelTolerance * base) || !(s.area >= prev->area - kSeriesRelTolerance * prev->area)) {
      fail(i, c.area_nondecreasing, "area decreased");
    }
    prev = &s;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Aggregate report

struct ValidationReport {
  bool closed_manifold = false;
  bool orientation_consistent = false;
  bool vertex_fans_ok = false;
  bool self_intersection_free = false;
  bool all_points_on_surface = false;
  bool containment_ok = false;
  bool containment_checked = false;  // false when the surface violated its preconditions
  long euler = 0;
  std::size_t vertices = 0;
  std::size_t facets = 0;
  std::vector<Edge> boundary_edges;
  std::vector<Edge> nonmanifold_edges;
  std::vector<Edge> misoriented_edges;
  std::vector<FacetPair> intersection_witnesses;
  std::size_t degenerate_facets = 0;
  std::optional<PointId> worst_point;  // farthest point when not all are on the surface
  double worst_distance = 0.0;
  std::vector<PointId> outside_points;
  double metric = 0.0;
  double hausdorff = 0.0;
  double volume = 0.0;
  double area = 0.0;
  std::optional<TraceCheck> trace;

  bool passed() const {
    return closed_manifold && orientation_consistent && vertex_fans_ok && self_intersection_free &&
           all_points_on_surface && containment_ok && (!trace || trace->ok());
  }

  /// One `name=value` per line.
  std::string to_key_values() const {
    std::ostringstream os;
    os.precision(17);
    const auto flag = [&](const char* k, bool v) { os << k << '=' << (v ? "true" : "false") << '\n'; };
    flag("passed", passed());
    flag("closed_manifold", closed_manifold);
    flag("orientation_consistent", orientation_consistent);
    flag("vertex_fans_ok", vertex_fans_ok);
    flag("self_intersection_free", self_intersection_free);
    flag("all_points_on_surface", all_points_on_surface);
    flag("containment_ok", containment_ok);
    os << "euler=" << euler << '\n' << "vertices=" << vertices << '\n' << "facets=" << facets << '\n';
    os << "boundary_edges=" << boundary_edges.size() << '\n';
    os << "intersection_witnesses=" << intersection_witnesses.size() << '\n';
    os << "outside_points=" << outside_points.size() << '\n';
    if (worst_point) os << "worst_point=" << *worst_point << '\n';
    os << "worst_distance=" << worst_distance << '\n';
    os << "metric=" << metric << '\n' << "hausdorff=" << hausdorff << '\n';
    os << "volume=" << volume << '\n' << "area=" << area << '\n';
    if (trace) {
      flag("trace_metric_decreasing", trace->metric_decreasing);
      flag("trace_hausdorff_nonincreasing", trace->hausdorff_nonincreasing);
      flag("trace_volume_exact", trace->volume_exact);
      flag("trace_volume_consistent", trace->volume_consistent);
      flag("trace_area_nondecreasing", trace->area_nondecreasing);
      os << "trace_insertions=" << trace->insertions << '\n';
    }
    return os.str();
  }
};

/// Runs every check; `tolerance` is relative to the cloud's bounding-box
/// diagonal and only matters for points that are not mesh vertices.
inline ValidationReport validate(const SurfaceMesh& mesh, const PointCloud& cloud,
                                 const ContractionTrace* trace = nullptr, double tolerance = 1e-9) {
  detail::require_in_range(mesh, cloud);
  ValidationReport r;
  const ManifoldReport m = is_closed_manifold(mesh);
  r.closed_manifold = m.closed;
  r.orientation_consistent = m.orientation_consistent;
  r.vertex_fans_ok = m.vertex_fans_ok;
  r.euler = m.euler;
  r.vertices = m.vertices;
  r.facets = m.facets;
  r.boundary_edges = m.boundary_edges;
  r.nonmanifold_edges = m.nonmanifold_edges;
  r.misoriented_edges = m.misoriented_edges;

  const IntersectionReport x = self_intersection_free(mesh, cloud);
  r.self_intersection_free = x.free && x.degenerate.empty();
  r.intersection_witnesses = x.witnesses;
  r.degenerate_facets = x.degenerate.size();

  const auto dist = surface_distances(mesh, cloud);
  const double tol = tolerance * cloud.diagonal();
  r.all_points_on_surface = true;
  for (PointId i = 0; i < cloud.size(); ++i) {
    r.metric += dist[i] * dist[i];
    r.hausdorff = std::max(r.hausdorff, dist[i]);
    if (!mesh.has_vertex(i) && !(dist[i] <= tol)) {
      r.all_points_on_surface = false;
      if (!r.worst_point || dist[i] > r.worst_distance) {
        r.worst_point = i;
        r.worst_distance = dist[i];
      }
    }
  }

  if (m.ok() && x.free) {
    const detail::Inclusion inclusion(mesh, cloud.points());
    for (PointId q = 0; q < cloud.size(); ++q) {
      if (inclusion.classify(q) < 0) r.outside_points.push_back(q);
    }
    r.containment_checked = true;
    r.containment_ok = r.outside_points.empty();
  }

  const Point3 origin = (cloud.bounds().lo + cloud.bounds().hi) * 0.5;
  for (FacetId f = 0; f < mesh.facet_count(); ++f) {
    const Triangle t = mesh.triangle(f, cloud.points());
    r.volume += signed_tet_volume(origin, t);
    r.area += triangle_area(t);
  }
  if (trace) r.trace = check_trace(*trace, cloud);
  return r;
}

}  // namespace hullwrap
